#include <doctest.h>

#include <random>

#include "lsinv/errors.hpp"
#include "lsinv/running_stats.hpp"
#include "oracles.hpp"

using namespace lsinv;

namespace {

RunningStats accumulate(const std::vector<std::vector<double>>& rows, std::size_t from,
                        std::size_t to) {
  RunningStats s;
  for (std::size_t i = from; i < to; ++i) {
    ++s.steps;
    s.accepted_u += i % 2;
    s.coeffs.add(rows[i]);
    s.phase.add(rows[i]);
    s.rescaled.add(rows[i]);
    s.tau.add(rows[i][0]);
    s.phi.add(rows[i][1]);
    s.tau_trace.push_back(rows[i][0]);
    s.phi_trace.push_back(rows[i][1]);
    for (std::size_t k = 0; k < kLeadingModes; ++k) s.leading_modes.push_back(rows[i][k]);
  }
  return s;
}

}  // namespace

TEST_CASE("Welford: constant stream has zero variance, two-pass agreement") {
  Welford w;
  for (int i = 0; i < 100; ++i) w.add(3.25);
  CHECK(w.mean() == 3.25);
  CHECK(w.variance() == 0.0);

  std::mt19937_64 gen(1);
  std::normal_distribution<double> z(1e6, 2.0);
  std::vector<double> xs(5000);
  Welford v;
  for (double& x : xs) {
    x = z(gen);
    v.add(x);
  }
  const auto [mean, var] = oracle::two_pass(xs);
  CHECK(v.mean() == doctest::Approx(mean).epsilon(1e-14));
  CHECK(v.variance() == doctest::Approx(var).epsilon(1e-9));
  Welford one;
  one.add(2.0);
  CHECK(one.variance() == 0.0);
}

TEST_CASE("stats_merge: halves equal a single pass, empty is neutral") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> z;
  std::vector<std::vector<double>> rows(1001, std::vector<double>(6));
  for (auto& r : rows) {
    for (double& x : r) x = 5.0 + z(gen);
  }
  const RunningStats whole = accumulate(rows, 0, rows.size());
  const RunningStats a = accumulate(rows, 0, 377);
  const RunningStats b = accumulate(rows, 377, rows.size());
  const RunningStats m = stats_merge(a, b);

  CHECK(m.steps == whole.steps);
  CHECK(m.accepted_u == whole.accepted_u);
  CHECK(m.retained() == whole.retained());
  CHECK(m.tau_trace == whole.tau_trace);
  CHECK(m.leading_modes == whole.leading_modes);
  CHECK(m.tau.mean() == doctest::Approx(whole.tau.mean()).epsilon(1e-10));
  CHECK(m.tau.m2() == doctest::Approx(whole.tau.m2()).epsilon(1e-10));
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(m.coeffs.mean()[k] == doctest::Approx(whole.coeffs.mean()[k]).epsilon(1e-10));
    CHECK(m.phase.m2()[k] == doctest::Approx(whole.phase.m2()[k]).epsilon(1e-10));
  }

  const RunningStats left = stats_merge(RunningStats{}, a);
  const RunningStats right = stats_merge(a, RunningStats{});
  for (const RunningStats* s : {&left, &right}) {
    CHECK(s->tau.mean() == a.tau.mean());
    CHECK(s->tau.m2() == a.tau.m2());
    CHECK(s->coeffs.mean() == a.coeffs.mean());
    CHECK(s->steps == a.steps);
  }
}

TEST_CASE("VectorWelford: mismatched dimensions are rejected") {
  VectorWelford a(3);
  a.add(std::vector<double>{1, 2, 3});
  VectorWelford b(2);
  b.add(std::vector<double>{1, 2});
  CHECK_THROWS_AS(a.merge(b), DimensionError);
  CHECK_THROWS_AS(a.add(std::vector<double>{1, 2}), DimensionError);
}

TEST_CASE("stats_finalize: pushforward of the mean and empty runs") {
  PriorSpec p;
  p.grid = 8;
  const SpectralBasis basis(p);
  const LevelSetSpec ls;
  RunningStats s;
  CHECK(stats_finalize(s, basis, ls).mean_phase.empty());

  Rng rng(3);
  std::vector<double> tau_values{9.0, 11.0};
  std::vector<std::vector<double>> us;
  for (double t : tau_values) {
    const SpectralField u = sample_prior(basis, t, rng);
    us.push_back(u.coeffs);
    const std::vector<double> g = basis.synthesize(u);
    s.coeffs.add(u.coeffs);
    s.phase.add(apply(g, t, ls).values);
    s.rescaled.add(amplitude_rescale(g, t, p.alpha, p.dim));
    s.tau.add(t);
    s.phi.add(0.0);
    ++s.steps;
  }
  const StatsSummary sum = stats_finalize(s, basis, ls);
  CHECK(sum.tau_mean == 10.0);
  std::vector<double> mean_u(basis.size());
  for (std::size_t k = 0; k < mean_u.size(); ++k) mean_u[k] = 0.5 * (us[0][k] + us[1][k]);
  CHECK(sum.pushforward_of_mean ==
        apply(basis.synthesize(SpectralField{mean_u}), 10.0, ls).values);
  for (double v : sum.var_phase) CHECK(v >= 0.0);
}
