#include <doctest.h>

#include <cmath>
#include <random>

#include "lsinv/errors.hpp"
#include "lsinv/posterior.hpp"

using namespace lsinv;

namespace {

PriorSpec identity_prior(int grid) {
  PriorSpec p;
  p.grid = grid;
  return p;
}

}  // namespace

TEST_CASE("potential: exact fit, scalar example, dimension checks") {
  const DataVector y{{1.0, 2.0}, {}};
  const NoiseModel noise{{0.2, 0.2}};
  const std::vector<double> g{1.0, 2.0};
  CHECK(potential(g, y, noise) == 0.0);
  CHECK(potential(std::vector<double>{0.0}, DataVector{{1.0}, {}}, NoiseModel{{0.2}}) ==
        doctest::Approx(12.5).epsilon(1e-14));
  CHECK_THROWS_AS(potential(std::vector<double>{1.0}, y, noise), DimensionError);
  const NoiseModel bad{{0.1, 0.0}};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("posterior potential matches a direct sum of squares") {
  auto basis = std::make_shared<const SpectralBasis>(identity_prior(32));
  const ObservationGrid obs = uniform_observation_grid(2, std::vector<double>{1.0, 1.0}, 10);
  std::mt19937_64 gen(12);
  std::normal_distribution<double> z;
  DataVector y;
  NoiseModel noise;
  for (int j = 0; j < 100; ++j) {
    y.values.push_back(3.0 + z(gen));
    noise.sigma.push_back(0.2 + 0.01 * j);
  }
  Posterior post(basis, LevelSetSpec{},
                 std::make_unique<PointObservation>(basis->geometry(), obs), y, noise);
  Rng rng(3);
  for (double tau : {5.0, 15.0, 30.0}) {
    const SpectralField u = sample_prior(*basis, tau, rng);
    const std::vector<double> grid = basis->synthesize(u);
    const PhaseField phases = apply(grid, tau, LevelSetSpec{});
    double direct = 0.0;
    for (std::size_t j = 0; j < obs.size(); ++j) {
      const double g = phases.values[basis->geometry().nearest(obs.points[j])];
      direct += 0.5 * (y.values[j] - g) * (y.values[j] - g) / (noise.sigma[j] * noise.sigma[j]);
    }
    CHECK(post.potential(u, tau) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("posterior: prior_only has zero potential, clones are independent") {
  auto basis = std::make_shared<const SpectralBasis>(identity_prior(16));
  Posterior p = Posterior::prior_only(basis, LevelSetSpec{});
  Rng rng(1);
  CHECK(p.potential(sample_prior(*basis, 10.0, rng), 10.0) == 0.0);
  Posterior q = p.clone();
  CHECK(q.observations() == 0);
  CHECK(&q.basis() == &p.basis());
}

TEST_CASE("posterior: mismatched data and forward sizes are rejected") {
  auto basis = std::make_shared<const SpectralBasis>(identity_prior(16));
  const ObservationGrid obs = uniform_observation_grid(2, std::vector<double>{1.0, 1.0}, 3);
  CHECK_THROWS_AS(Posterior(basis, LevelSetSpec{},
                            std::make_unique<PointObservation>(basis->geometry(), obs),
                            DataVector{{1.0, 2.0}, {}}, NoiseModel{{1.0, 1.0}}),
                  DimensionError);
}

TEST_CASE("generate_data: zero noise, determinism, relative scheme") {
  const PriorSpec fine = identity_prior(64);
  const SpectralBasis basis(fine);
  const ObservationGrid obs = uniform_observation_grid(2, fine.lengths, 10);
  PointObservation forward(basis.geometry(), obs);
  Rng truth_rng(1);
  const std::vector<double> truth = basis.synthesize(sample_prior(basis, 15.0, truth_rng));

  Rng r0(2);
  const SyntheticData clean =
      generate_data(truth, 15.0, LevelSetSpec{}, forward, {NoiseScheme::Kind::absolute, 0.0}, r0);
  CHECK(clean.y.values == clean.noise_free);

  Rng a(5);
  Rng b(5);
  const NoiseScheme scheme{NoiseScheme::Kind::absolute, 0.2};
  const SyntheticData da = generate_data(truth, 15.0, LevelSetSpec{}, forward, scheme, a);
  const SyntheticData db = generate_data(truth, 15.0, LevelSetSpec{}, forward, scheme, b);
  CHECK(da.y.values == db.y.values);
  for (double s : da.noise.sigma) CHECK(s == 0.2);

  Rng c(6);
  const SyntheticData rel =
      generate_data(truth, 15.0, LevelSetSpec{}, forward, {NoiseScheme::Kind::relative, 0.0175}, c);
  for (std::size_t j = 0; j < rel.noise_free.size(); ++j) {
    CHECK(rel.noise.sigma[j] == doctest::Approx(0.0175 * std::abs(rel.noise_free[j])));
  }
}

TEST_CASE("generate_data: identity defaults give 6-9% mean relative error over seeds") {
  const PriorSpec fine = identity_prior(128);
  const SpectralBasis basis(fine);
  const ObservationGrid obs = uniform_observation_grid(2, fine.lengths, 10);
  PointObservation forward(basis.geometry(), obs);
  double total = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    Rng truth_rng(100 + s);
    const std::vector<double> truth = basis.synthesize(sample_prior(basis, 15.0, truth_rng));
    Rng noise_rng(200 + s);
    const SyntheticData d = generate_data(truth, 15.0, LevelSetSpec{}, forward,
                                          {NoiseScheme::Kind::absolute, 0.2}, noise_rng);
    total += mean_relative_error(d.y.values, d.noise_free);
  }
  const double mean = total / seeds;
  CAPTURE(mean);
  CHECK(mean >= 0.06);
  CHECK(mean <= 0.09);
}

TEST_CASE("mean relative error") {
  CHECK(mean_relative_error(std::vector<double>{1.1, 2.8}, std::vector<double>{1.0, 3.0}) ==
        doctest::Approx((0.1 + 0.2 / 3.0) / 2.0));
}
