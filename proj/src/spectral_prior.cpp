#include "lsinv/spectral_prior.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "lsinv/errors.hpp"

namespace lsinv {

namespace {

// The FFTW planner is not thread-safe; plan execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

// One-dimensional factors for position m of an axis transform.
struct AxisTable {
  std::vector<double> nu;
  std::vector<double> synth;
  std::vector<double> analysis;
};

AxisTable neumann_axis(int n, double length) {
  AxisTable t;
  const double c0 = std::sqrt(1.0 / length);
  const double c = std::sqrt(2.0 / length);
  const double h = length / n;
  for (int m = 0; m < n; ++m) {
    const double k = std::numbers::pi * m / length;
    const double cm = m == 0 ? c0 : c;
    t.nu.push_back(k * k);
    // REDFT01: y_i = x_0 + 2 sum_{m>0} x_m cos(pi m (i + 1/2) / n)
    t.synth.push_back(m == 0 ? c0 : 0.5 * c);
    // REDFT10: y_m = 2 sum_i x_i cos(pi m (i + 1/2) / n)
    t.analysis.push_back(0.5 * h * cm);
  }
  return t;
}

AxisTable periodic_axis(int n, double length) {
  AxisTable t;
  const double c0 = std::sqrt(1.0 / length);
  const double c = std::sqrt(2.0 / length);
  const double h = length / n;
  for (int m = 0; m < n; ++m) {
    // halfcomplex layout: r_0 .. r_{n/2}, i_{n/2-1} .. i_1
    const int k = m <= n / 2 ? m : n - m;
    const double w = 2.0 * std::numbers::pi * k / length;
    t.nu.push_back(w * w);
    if (m == 0 || 2 * m == n) {
      t.synth.push_back(c0);
      t.analysis.push_back(h * c0);
    } else if (m < n / 2) {
      t.synth.push_back(0.5 * c);
      t.analysis.push_back(h * c);
    } else {
      t.synth.push_back(-0.5 * c);
      t.analysis.push_back(-h * c);
    }
  }
  return t;
}

double eigenfunction_1d(Boundary b, int n, double length, int m, double x) {
  const double c0 = std::sqrt(1.0 / length);
  const double c = std::sqrt(2.0 / length);
  if (b == Boundary::neumann_zero_mean) {
    if (m == 0) return c0;
    return c * std::cos(std::numbers::pi * m * x / length);
  }
  if (m == 0) return c0;
  if (2 * m == n) return c0 * std::cos(std::numbers::pi * n * x / length);
  if (m < n / 2) return c * std::cos(2.0 * std::numbers::pi * m * x / length);
  return c * std::sin(2.0 * std::numbers::pi * (n - m) * x / length);
}

}  // namespace

Boundary parse_boundary(std::string_view name) {
  if (name == "neumann-zero-mean") return Boundary::neumann_zero_mean;
  if (name == "periodic-zero-mean") return Boundary::periodic_zero_mean;
  throw ConfigError("unsupported boundary kind '" + std::string(name) +
                    "' (expected neumann-zero-mean or periodic-zero-mean)");
}

std::string_view to_string(Boundary b) {
  switch (b) {
    case Boundary::neumann_zero_mean:
      return "neumann-zero-mean";
    case Boundary::periodic_zero_mean:
      return "periodic-zero-mean";
  }
  return "unknown";
}

void PriorSpec::validate() const {
  if (dim < 1 || dim > 3) {
    throw ConfigError("prior.dim must be 1, 2 or 3");
  }
  if (!(alpha > 0.5 * dim)) {
    throw ConfigError("prior.alpha must exceed dim/2 for continuous samples");
  }
  if (static_cast<int>(lengths.size()) != dim) {
    throw ConfigError("prior.lengths must have one entry per dimension");
  }
  for (double l : lengths) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw ConfigError("prior.lengths must be positive and finite");
    }
  }
  if (grid < 2 || !is_power_of_two(grid)) {
    throw ConfigError("prior.grid must be a power of two >= 2");
  }
  if (boundary != Boundary::neumann_zero_mean &&
      boundary != Boundary::periodic_zero_mean) {
    throw ConfigError("prior.boundary is not a supported boundary kind");
  }
}

GridGeometry PriorSpec::geometry() const {
  return GridGeometry{dim, lengths, grid,
                      boundary == Boundary::neumann_zero_mean};
}

std::size_t PriorSpec::grid_size() const { return geometry().size(); }

namespace {

std::vector<AxisTable> axis_tables(const PriorSpec& spec) {
  std::vector<AxisTable> axes;
  for (int a = 0; a < spec.dim; ++a) {
    axes.push_back(spec.boundary == Boundary::neumann_zero_mean
                       ? neumann_axis(spec.grid, spec.lengths[a])
                       : periodic_axis(spec.grid, spec.lengths[a]));
  }
  return axes;
}

}  // namespace

ModeTable build_basis(const PriorSpec& spec) {
  spec.validate();
  const auto axes = axis_tables(spec);
  const std::size_t total = spec.grid_size();
  std::vector<Mode> modes;
  modes.reserve(total - 1);
  for (std::size_t offset = 1; offset < total; ++offset) {
    Mode mode;
    mode.offset = offset;
    std::size_t rest = offset;
    for (int a = spec.dim - 1; a >= 0; --a) {
      mode.index[a] = static_cast<int>(rest % spec.grid);
      rest /= spec.grid;
    }
    for (int a = 0; a < spec.dim; ++a) mode.nu += axes[a].nu[mode.index[a]];
    modes.push_back(mode);
  }
  std::sort(modes.begin(), modes.end(), [](const Mode& x, const Mode& y) {
    return x.nu != y.nu ? x.nu < y.nu : x.offset < y.offset;
  });
  return ModeTable(std::move(modes));
}

double log_prior_eigenvalue(double nu, double tau, double alpha) {
  return -alpha * std::log(tau * tau + nu);
}

double prior_eigenvalue(double nu, double tau, double alpha) {
  return std::exp(log_prior_eigenvalue(nu, tau, alpha));
}

struct SpectralBasis::Plans {
  fftw_plan synth = nullptr;
  fftw_plan analysis = nullptr;
};

SpectralBasis::SpectralBasis(PriorSpec spec)
    : spec_(std::move(spec)),
      geometry_(spec_.geometry()),
      modes_(build_basis(spec_)),
      plans_(std::make_unique<Plans>()) {
  const auto axes = axis_tables(spec_);
  synth_scale_.reserve(modes_.size());
  analysis_scale_.reserve(modes_.size());
  for (const Mode& m : modes_) {
    double s = 1.0;
    double a = 1.0;
    for (int ax = 0; ax < spec_.dim; ++ax) {
      s *= axes[ax].synth[m.index[ax]];
      a *= axes[ax].analysis[m.index[ax]];
    }
    synth_scale_.push_back(s);
    analysis_scale_.push_back(a);
  }

  std::vector<int> n(spec_.dim, spec_.grid);
  const bool neumann = spec_.boundary == Boundary::neumann_zero_mean;
  std::vector<fftw_r2r_kind> back(spec_.dim, neumann ? FFTW_REDFT01 : FFTW_HC2R);
  std::vector<fftw_r2r_kind> fwd(spec_.dim, neumann ? FFTW_REDFT10 : FFTW_R2HC);
  std::vector<double> in(grid_size());
  std::vector<double> out(grid_size());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  plans_->synth = fftw_plan_r2r(spec_.dim, n.data(), in.data(), out.data(),
                                back.data(), flags);
  plans_->analysis = fftw_plan_r2r(spec_.dim, n.data(), in.data(), out.data(),
                                   fwd.data(), flags);
  if (plans_->synth == nullptr || plans_->analysis == nullptr) {
    throw NumericalError("FFTW could not create transform plans");
  }
}

SpectralBasis::~SpectralBasis() {
  std::lock_guard lock(planner_mutex());
  if (plans_->synth != nullptr) fftw_destroy_plan(plans_->synth);
  if (plans_->analysis != nullptr) fftw_destroy_plan(plans_->analysis);
}

std::vector<double> SpectralBasis::synthesize(const SpectralField& field) const {
  std::vector<double> grid(grid_size());
  synthesize(field.coeffs, grid);
  return grid;
}

void SpectralBasis::synthesize(std::span<const double> coeffs,
                               std::span<double> grid) const {
  if (coeffs.size() != size()) {
    throw DimensionError("synthesize: coefficient vector has length " +
                         std::to_string(coeffs.size()) + ", expected " +
                         std::to_string(size()));
  }
  if (grid.size() != grid_size()) {
    throw DimensionError("synthesize: grid has wrong number of points");
  }
  std::vector<double> spectrum(grid_size(), 0.0);
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    spectrum[modes_[j].offset] = coeffs[j] * synth_scale_[j];
  }
  fftw_execute_r2r(plans_->synth, spectrum.data(), grid.data());
}

SpectralField SpectralBasis::analyze(std::span<const double> grid) const {
  SpectralField field;
  field.coeffs.resize(size());
  analyze(grid, field.coeffs);
  return field;
}

void SpectralBasis::analyze(std::span<const double> grid,
                            std::span<double> coeffs) const {
  if (grid.size() != grid_size()) {
    throw DimensionError("analyze: grid has " + std::to_string(grid.size()) +
                         " points, expected " + std::to_string(grid_size()));
  }
  if (coeffs.size() != size()) {
    throw DimensionError("analyze: coefficient vector has wrong length");
  }
  // r2r may overwrite its input
  std::vector<double> work(grid.begin(), grid.end());
  std::vector<double> spectrum(grid_size());
  fftw_execute_r2r(plans_->analysis, work.data(), spectrum.data());
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    coeffs[j] = spectrum[modes_[j].offset] * analysis_scale_[j];
  }
}

double SpectralBasis::eigenfunction(std::size_t j, const Point& x) const {
  double v = 1.0;
  for (int a = 0; a < spec_.dim; ++a) {
    v *= eigenfunction_1d(spec_.boundary, spec_.grid, spec_.lengths[a],
                          modes_[j].index[a], x[a]);
  }
  return v;
}

SpectralField sample_prior(const SpectralBasis& basis, double tau, Rng& rng) {
  if (!(tau > 0.0)) throw DomainError("sample_prior: tau must be positive");
  const double alpha = basis.spec().alpha;
  SpectralField field;
  field.coeffs.reserve(basis.size());
  for (const Mode& m : basis.modes()) {
    const double sd = std::exp(0.5 * log_prior_eigenvalue(m.nu, tau, alpha));
    field.coeffs.push_back(sd * rng.normal());
  }
  return field;
}

double log_prior_ratio(const ModeTable& modes, double alpha,
                       std::span<const double> coeffs, double tau,
                       double gamma) {
  if (!(tau > 0.0) || !(gamma > 0.0)) {
    throw DomainError("log_prior_ratio: tau and gamma must be positive");
  }
  if (coeffs.size() != modes.size()) {
    throw DimensionError("log_prior_ratio: coefficient vector has wrong length");
  }
  if (tau == gamma) return 0.0;
  const double dt = gamma * gamma - tau * tau;
  double sum = 0.0;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const double base = tau * tau + modes[j].nu;
    // r = log(lambda_j(tau) / lambda_j(gamma))
    const double r = alpha * std::log1p(dt / base);
    // 1/lambda(tau) - 1/lambda(gamma) = -base^alpha * expm1(r)
    const double precision_gap = -std::pow(base, alpha) * std::expm1(r);
    sum += precision_gap * coeffs[j] * coeffs[j] + r;
  }
  return 0.5 * sum;
}

double log_prior_ratio(const SpectralBasis& basis, const SpectralField& field,
                       double tau, double gamma) {
  return log_prior_ratio(basis.modes(), basis.spec().alpha, field.coeffs, tau,
                         gamma);
}

double amplitude_scale(double tau, double alpha, int dim) {
  return std::pow(tau, alpha - 0.5 * dim);
}

std::vector<double> amplitude_rescale(std::span<const double> grid, double tau,
                                      double alpha, int dim) {
  if (!(tau > 0.0)) throw DomainError("amplitude_rescale: tau must be positive");
  const double s = amplitude_scale(tau, alpha, dim);
  std::vector<double> out(grid.begin(), grid.end());
  for (double& v : out) v *= s;
  return out;
}

double matern_beta(double sigma, double smoothness, int dim) {
  const double d = dim;
  return sigma * sigma * std::pow(2.0, d) *
         std::pow(std::numbers::pi, 0.5 * d) *
         std::exp(std::lgamma(smoothness + 0.5 * d) - std::lgamma(smoothness));
}

double matern_eigenvalue(double nu, double sigma, double smoothness, double ell,
                         int dim) {
  const double d = dim;
  const double log_value = d * std::log(ell) -
                           (smoothness + 0.5 * d) * std::log1p(ell * ell * nu);
  return matern_beta(sigma, smoothness, dim) * std::exp(log_value);
}

}  // namespace lsinv
