#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <string>

#include "lsinv/errors.hpp"
#include "lsinv/forward_models.hpp"

namespace lsinv {

void DarcySetup::validate() const {
  if (cells < 4) throw ConfigError("darcy.cells must be at least 4");
  if (!(length > 0.0)) throw ConfigError("darcy.length must be positive");
  for (const SideCondition* s : {&left, &right, &bottom, &top}) {
    if (!s->value) throw ConfigError("darcy: boundary condition without value");
  }
  const bool any_dirichlet = left.kind == SideKind::dirichlet ||
                             right.kind == SideKind::dirichlet ||
                             bottom.kind == SideKind::dirichlet ||
                             top.kind == SideKind::dirichlet;
  if (!any_dirichlet) {
    throw ConfigError("darcy: at least one side must carry a Dirichlet condition");
  }
  for (const RechargeBand& b : recharge) {
    if (!(b.lo <= b.hi)) throw ConfigError("darcy: recharge band with lo > hi");
  }
}

DarcySetup benchmark_darcy_setup(int cells) {
  DarcySetup s;
  s.length = 6.0;
  s.cells = cells;
  s.recharge = {{4.0, 5.0, 137.0}, {5.0, 6.0, 274.0}};
  s.left = {SideKind::flux, [](double) { return 500.0; }};
  s.right = {SideKind::flux, [](double) { return 0.0; }};
  s.bottom = {SideKind::dirichlet, [](double) { return 100.0; }};
  s.top = {SideKind::flux, [](double) { return 0.0; }};
  return s;
}

namespace {

struct InteriorFace {
  int a;
  int b;
};

struct BoundaryFace {
  int cell;
  SideKind kind;
  double value;  // head (dirichlet) or inflow per unit length (flux)
};

double harmonic_mean(double x, double y) { return 2.0 * x * y / (x + y); }

}  // namespace

struct DarcySolver::Impl {
  using Matrix = Eigen::SparseMatrix<double>;
  Matrix A;
  Eigen::SimplicialLDLT<Matrix> ldlt;
  std::vector<InteriorFace> interior;
  std::vector<BoundaryFace> boundary;
  std::vector<double*> diag;
  std::vector<std::pair<double*, double*>> off;  // (a,b), (b,a) per interior face
  Eigen::VectorXd rhs;
  Eigen::VectorXd x;
};

DarcySolver::DarcySolver(DarcySetup setup)
    : setup_(std::move(setup)), impl_(std::make_unique<Impl>()) {
  setup_.validate();
  const int n = setup_.cells;
  const double h = setup_.length / n;
  const int cells = n * n;
  auto flat = [n](int i, int j) { return i * n + j; };

  recharge_.assign(cells, 0.0);
  for (int j = 0; j < n; ++j) {
    const double lo = j * h;
    const double hi = (j + 1) * h;
    double f = 0.0;
    for (const RechargeBand& band : setup_.recharge) {
      const double overlap = std::max(0.0, std::min(hi, band.hi) - std::max(lo, band.lo));
      f += band.rate * overlap / h;
    }
    for (int i = 0; i < n; ++i) recharge_[flat(i, j)] = f;
  }

  Impl& m = *impl_;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i + 1 < n) m.interior.push_back({flat(i, j), flat(i + 1, j)});
      if (j + 1 < n) m.interior.push_back({flat(i, j), flat(i, j + 1)});
    }
  }
  for (int k = 0; k < n; ++k) {
    const double s = (k + 0.5) * h;
    m.boundary.push_back({flat(0, k), setup_.left.kind, setup_.left.value(s)});
    m.boundary.push_back({flat(n - 1, k), setup_.right.kind, setup_.right.value(s)});
    m.boundary.push_back({flat(k, 0), setup_.bottom.kind, setup_.bottom.value(s)});
    m.boundary.push_back({flat(k, n - 1), setup_.top.kind, setup_.top.value(s)});
  }

  std::vector<Eigen::Triplet<double>> pattern;
  pattern.reserve(cells + 2 * m.interior.size());
  for (int c = 0; c < cells; ++c) pattern.emplace_back(c, c, 1.0);
  for (const InteriorFace& f : m.interior) {
    pattern.emplace_back(f.a, f.b, 0.0);
    pattern.emplace_back(f.b, f.a, 0.0);
  }
  m.A.resize(cells, cells);
  m.A.setFromTriplets(pattern.begin(), pattern.end());
  m.A.makeCompressed();
  for (int c = 0; c < cells; ++c) m.diag.push_back(&m.A.coeffRef(c, c));
  for (const InteriorFace& f : m.interior) {
    m.off.emplace_back(&m.A.coeffRef(f.a, f.b), &m.A.coeffRef(f.b, f.a));
  }
  m.ldlt.analyzePattern(m.A);
  m.rhs.resize(cells);
  m.x.resize(cells);
}

DarcySolver::~DarcySolver() = default;
DarcySolver::DarcySolver(DarcySolver&&) noexcept = default;
DarcySolver& DarcySolver::operator=(DarcySolver&&) noexcept = default;

DarcySolution DarcySolver::solve(std::span<const double> kappa) {
  const int n = setup_.cells;
  const double h = setup_.length / n;
  const std::size_t cells = static_cast<std::size_t>(n) * n;
  if (kappa.size() != cells) {
    throw DimensionError("darcy_solve: kappa has " + std::to_string(kappa.size()) +
                         " cells, expected " + std::to_string(cells));
  }
  for (double k : kappa) {
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw DomainError("darcy_solve: conductivity must be positive and finite");
    }
  }

  Impl& m = *impl_;
  std::fill(m.A.valuePtr(), m.A.valuePtr() + m.A.nonZeros(), 0.0);
  for (std::size_t c = 0; c < cells; ++c) m.rhs[c] = recharge_[c] * h * h;
  for (std::size_t f = 0; f < m.interior.size(); ++f) {
    const auto [a, b] = m.interior[f];
    const double t = harmonic_mean(kappa[a], kappa[b]);
    *m.diag[a] += t;
    *m.diag[b] += t;
    *m.off[f].first -= t;
    *m.off[f].second -= t;
  }
  for (const BoundaryFace& f : m.boundary) {
    if (f.kind == SideKind::dirichlet) {
      const double t = 2.0 * kappa[f.cell];  // half-cell distance
      *m.diag[f.cell] += t;
      m.rhs[f.cell] += t * f.value;
    } else {
      m.rhs[f.cell] += f.value * h;
    }
  }

  m.ldlt.factorize(m.A);
  if (m.ldlt.info() != Eigen::Success) {
    throw NumericalError("darcy_solve: sparse factorization failed");
  }
  m.x = m.ldlt.solve(m.rhs);

  DarcySolution sol;
  sol.rhs_norm = m.rhs.norm();
  sol.residual_norm = (m.A * m.x - m.rhs).norm();
  if (!(sol.residual_norm <= 1e-10 * sol.rhs_norm)) {
    throw NumericalError("darcy_solve: residual " + std::to_string(sol.residual_norm) +
                         " exceeds 1e-10 * ||rhs|| = " +
                         std::to_string(1e-10 * sol.rhs_norm));
  }
  sol.head.assign(m.x.data(), m.x.data() + cells);
  for (const BoundaryFace& f : m.boundary) {
    if (f.kind == SideKind::dirichlet) {
      sol.dirichlet_outflow += 2.0 * kappa[f.cell] * (sol.head[f.cell] - f.value);
    } else {
      sol.flux_inflow += f.value * h;
    }
  }
  for (double f : recharge_) sol.recharge_total += f * h * h;
  return sol;
}

DarcySolution darcy_solve(const PhaseField& kappa, const DarcySetup& setup) {
  DarcySolver solver(setup);
  return solver.solve(kappa.values);
}

}  // namespace lsinv
