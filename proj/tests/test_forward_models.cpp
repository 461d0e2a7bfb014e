#include <doctest.h>

#include <cmath>
#include <random>

#include "lsinv/errors.hpp"
#include "lsinv/forward_models.hpp"
#include "oracles.hpp"

using namespace lsinv;

namespace {

PhaseField random_ternary(std::size_t n, std::uint64_t seed,
                          const std::vector<double>& kappa = {1.0, 3.0, 5.0}) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(kappa.size()) - 1);
  PhaseField f;
  for (std::size_t i = 0; i < n; ++i) {
    const int k = pick(gen);
    f.index.push_back(static_cast<std::uint8_t>(k));
    f.values.push_back(kappa[k]);
  }
  return f;
}

PhaseField constant_field(std::size_t n, double v) {
  return PhaseField{std::vector<double>(n, v), std::vector<std::uint8_t>(n, 0)};
}

double mms_exact(double x1, double x2) { return x1 * x1 + x2 * x2; }

// all-Dirichlet unit square with h* = x1^2 + x2^2 and f = -4
DarcySetup mms_setup(int cells) {
  DarcySetup s;
  s.length = 1.0;
  s.cells = cells;
  s.recharge = {{0.0, 1.0, -4.0}};
  s.left = {SideKind::dirichlet, [](double t) { return mms_exact(0.0, t); }};
  s.right = {SideKind::dirichlet, [](double t) { return mms_exact(1.0, t); }};
  s.bottom = {SideKind::dirichlet, [](double t) { return mms_exact(t, 0.0); }};
  s.top = {SideKind::dirichlet, [](double t) { return mms_exact(t, 1.0); }};
  return s;
}

double mms_error(int cells) {
  const DarcySetup s = mms_setup(cells);
  const DarcySolution sol = darcy_solve(constant_field(cells * cells, 1.0), s);
  const GridGeometry g = s.geometry();
  double err = 0.0;
  for (std::size_t p = 0; p < sol.head.size(); ++p) {
    const Point x = g.node(p);
    err = std::max(err, std::abs(sol.head[p] - mms_exact(x[0], x[1])));
  }
  return err;
}

}  // namespace

TEST_CASE("observation grid: cell centers of a uniform partition") {
  const std::vector<double> L{1.0, 1.0};
  const ObservationGrid g = uniform_observation_grid(2, L, 10);
  REQUIRE(g.size() == 100);
  CHECK(g.points[0][0] == doctest::Approx(0.05));
  CHECK(g.points[0][1] == doctest::Approx(0.05));
  CHECK(g.points[1][1] == doctest::Approx(0.15));
  CHECK(g.points[10][0] == doctest::Approx(0.15));
  CHECK_THROWS_AS(uniform_observation_grid(2, L, 0), ConfigError);
}

TEST_CASE("point observation: constants, single points and lookup oracle") {
  const GridGeometry geo{2, {1.0, 1.0}, 16, true};
  const ObservationGrid obs = uniform_observation_grid(2, geo.lengths, 10);
  for (double v : point_observe(constant_field(geo.size(), 3.0), geo, obs)) CHECK(v == 3.0);

  PhaseField f = constant_field(geo.size(), 5.0);
  const std::size_t node = 3 * 16 + 7;
  f.values[node] = 1.0;
  const Point q = geo.node(node);
  CHECK(point_observe(f, geo, ObservationGrid{{{q[0] + 0.01, q[1] - 0.01, 0.0}}}) ==
        std::vector<double>{1.0});

  const PhaseField r = random_ternary(geo.size(), 17);
  const std::vector<double> y = point_observe(r, geo, obs);
  for (std::size_t j = 0; j < obs.size(); ++j) {
    const auto i1 = static_cast<std::size_t>(obs.points[j][0] * 16);
    const auto i2 = static_cast<std::size_t>(obs.points[j][1] * 16);
    CHECK(y[j] == r.values[i1 * 16 + i2]);
    CHECK((y[j] == 1.0 || y[j] == 3.0 || y[j] == 5.0));
  }
  CHECK_THROWS_AS(point_observe(r, geo, ObservationGrid{{{1.2, 0.5, 0.0}}}), ConfigError);
}

TEST_CASE("Darcy: second-order convergence on a manufactured solution") {
  const double e8 = mms_error(8);
  const double e16 = mms_error(16);
  const double e32 = mms_error(32);
  const double e64 = mms_error(64);
  CAPTURE(e8);
  CAPTURE(e16);
  CAPTURE(e32);
  CAPTURE(e64);
  for (double ratio : {e8 / e16, e16 / e32, e32 / e64}) {
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
  }
}

TEST_CASE("Darcy: 4x4 grid equals a dense direct solve") {
  const DarcySetup s = benchmark_darcy_setup(4);
  DarcySolver solver(s);
  std::vector<double> f(solver.recharge().begin(), solver.recharge().end());
  const oracle::Side bc[4] = {{false, [](double) { return 500.0; }},
                              {false, [](double) { return 0.0; }},
                              {true, [](double) { return 100.0; }},
                              {false, [](double) { return 0.0; }}};
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> k(0.1, 10.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> kappa(16);
    for (double& v : kappa) v = k(gen);
    const DarcySolution sol = solver.solve(kappa);
    const std::vector<double> dense = oracle::dense_darcy(4, 6.0, kappa, f, bc);
    for (std::size_t c = 0; c < 16; ++c) {
      CHECK(std::abs(sol.head[c] - dense[c]) <= 1e-10 * std::abs(dense[c]));
    }
    CHECK(sol.residual_norm <= 1e-10 * sol.rhs_norm);
  }
}

TEST_CASE("Darcy: benchmark recharge integrates to 2466 and fluxes balance") {
  for (int n : {4, 16, 32, 48}) {
    const DarcySetup s = benchmark_darcy_setup(n);
    const PhaseField k =
        random_ternary(n * n, n, {std::exp(1.5), std::exp(4.0), std::exp(6.5)});
    const DarcySolution sol = darcy_solve(k, s);
    CHECK(sol.recharge_total == doctest::Approx(2466.0).epsilon(1e-12));
    CHECK(sol.flux_inflow == doctest::Approx(3000.0).epsilon(1e-12));
    const double in = sol.recharge_total + sol.flux_inflow;
    CHECK(std::abs(sol.dirichlet_outflow - in) <= 1e-8 * in);
  }
}

TEST_CASE("Darcy: 1-D slice has slope -500/kappa") {
  const int n = 16;
  DarcySetup s;
  s.length = 6.0;
  s.cells = n;
  s.left = {SideKind::flux, [](double) { return 500.0; }};
  s.right = {SideKind::dirichlet, [](double) { return 100.0; }};
  s.bottom = {SideKind::flux, [](double) { return 0.0; }};
  s.top = {SideKind::flux, [](double) { return 0.0; }};
  const double kappa = 3.0;
  const DarcySolution sol = darcy_solve(constant_field(n * n, kappa), s);
  const double h = 6.0 / n;
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double slope = (sol.head[(i + 1) * n + j] - sol.head[i * n + j]) / h;
      CHECK(slope == doctest::Approx(-500.0 / kappa).epsilon(1e-9));
    }
  }
  // h(x1) = 100 + 500 (L - x1) / kappa at cell centers
  CHECK(sol.head[0] == doctest::Approx(100.0 + 500.0 * (6.0 - 0.5 * h) / kappa).epsilon(1e-10));
}

TEST_CASE("Darcy: errors") {
  const DarcySetup s = benchmark_darcy_setup(8);
  DarcySolver solver(s);
  std::vector<double> kappa(64, 1.0);
  kappa[5] = 0.0;
  CHECK_THROWS_AS(solver.solve(kappa), DomainError);
  CHECK_THROWS_AS(solver.solve(std::vector<double>(10, 1.0)), DimensionError);
  CHECK_THROWS_AS(DarcySolver(benchmark_darcy_setup(2)), ConfigError);
  DarcySetup no_dirichlet = s;
  no_dirichlet.bottom.kind = SideKind::flux;
  CHECK_THROWS_AS(DarcySolver{no_dirichlet}, ConfigError);
}

TEST_CASE("smoothed observation: constants, collapse and linear fields") {
  const GridGeometry geo{2, {6.0, 6.0}, 32, true};
  const ObservationGrid obs = uniform_observation_grid(2, geo.lengths, 8);
  for (double v : smoothed_observe(std::vector<double>(geo.size(), 100.0), geo, obs, 0.2)) {
    CHECK(v == doctest::Approx(100.0).epsilon(1e-14));
  }

  std::vector<double> h(geo.size());
  for (std::size_t p = 0; p < h.size(); ++p) h[p] = std::sin(static_cast<double>(p));
  const ObservationGrid off{{{1.01, 2.33, 0.0}, {5.2, 0.4, 0.0}}};
  const std::vector<double> tiny = smoothed_observe(h, geo, off, 1e-4);
  for (std::size_t j = 0; j < off.size(); ++j) CHECK(tiny[j] == h[geo.nearest(off.points[j])]);

  std::vector<double> lin(geo.size());
  for (std::size_t p = 0; p < lin.size(); ++p) lin[p] = geo.node(p)[0];
  const ObservationGrid interior{{{3.0, 3.0, 0.0}, {2.1, 4.4, 0.0}, {1.7, 1.3, 0.0}}};
  for (double eps : {0.1875, 0.3}) {
    const std::vector<double> l = smoothed_observe(lin, geo, interior, eps);
    for (std::size_t j = 0; j < interior.size(); ++j) {
      CHECK(std::abs(l[j] - interior.points[j][0]) < 1e-6);
    }
  }
  CHECK_THROWS_AS(smoothed_observe(lin, geo, interior, 0.0), DomainError);
}

TEST_CASE("smoothed observation is linear and bounded by max |h|") {
  const GridGeometry geo{2, {6.0, 6.0}, 16, true};
  const ObservationGrid obs = uniform_observation_grid(2, geo.lengths, 4);
  std::mt19937_64 gen(2);
  std::normal_distribution<double> z;
  std::vector<double> a(geo.size()), b(geo.size()), c(geo.size());
  double amax = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    a[p] = z(gen);
    b[p] = z(gen);
    c[p] = 2.0 * a[p] - 3.0 * b[p];
    amax = std::max(amax, std::abs(a[p]));
  }
  const auto la = smoothed_observe(a, geo, obs, 0.4);
  const auto lb = smoothed_observe(b, geo, obs, 0.4);
  const auto lc = smoothed_observe(c, geo, obs, 0.4);
  for (std::size_t j = 0; j < obs.size(); ++j) {
    CHECK(lc[j] == doctest::Approx(2.0 * la[j] - 3.0 * lb[j]).epsilon(1e-12).scale(1.0));
    CHECK(std::abs(la[j]) <= amax);
  }
}

TEST_CASE("Darcy observation: benchmark heads are finite and clones agree") {
  const ObservationGrid obs = uniform_observation_grid(2, std::vector<double>{6.0, 6.0}, 8);
  DarcyObservation model(benchmark_darcy_setup(16), obs, 6.0 / 16);
  const PhaseField k = random_ternary(256, 5, {std::exp(1.5), std::exp(4.0), std::exp(6.5)});
  const std::vector<double> y = model.observe(k);
  auto copy = model.clone();
  CHECK(copy->observe(k) == y);
  REQUIRE(y.size() == 64);
  for (double v : y) CHECK(v >= 100.0);
}
