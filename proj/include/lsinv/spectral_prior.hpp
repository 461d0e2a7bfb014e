#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lsinv/grid.hpp"
#include "lsinv/rng.hpp"

namespace lsinv {

enum class Boundary { neumann_zero_mean, periodic_zero_mean };

Boundary parse_boundary(std::string_view name);
std::string_view to_string(Boundary b);

/// Parameters of the prior family C(alpha, tau) = (tau^2 - Laplacian)^(-alpha)
/// restricted to zero-mean functions on a box.
struct PriorSpec {
  double alpha = 5.0;
  int dim = 2;
  std::vector<double> lengths{1.0, 1.0};
  Boundary boundary = Boundary::neumann_zero_mean;
  int grid = 64;  // points per axis, power of two

  /// Throws ConfigError when alpha <= dim/2, dim not in {1,2,3}, lengths
  /// mismatch dim or are non-positive, or grid is not a power of two.
  void validate() const;
  GridGeometry geometry() const;
  std::size_t grid_size() const;
};

struct Mode {
  std::array<int, 3> index{};  // per-axis position in the r2r spectrum
  double nu = 0.0;             // Laplacian eigenvalue
  std::size_t offset = 0;      // flat offset in the spectral array
};

/// Retained Laplacian eigenmodes, sorted by nu ascending (ties by offset).
/// Position j in this table is "KL mode j".
class ModeTable {
 public:
  ModeTable() = default;
  explicit ModeTable(std::vector<Mode> modes) : modes_(std::move(modes)) {}

  std::size_t size() const { return modes_.size(); }
  const Mode& operator[](std::size_t j) const { return modes_[j]; }
  auto begin() const { return modes_.begin(); }
  auto end() const { return modes_.end(); }

 private:
  std::vector<Mode> modes_;
};

/// Every grid-resolvable mode except the constant one.
ModeTable build_basis(const PriorSpec& spec);

/// (tau^2 + nu)^(-alpha), evaluated in log space.
double prior_eigenvalue(double nu, double tau, double alpha);
double log_prior_eigenvalue(double nu, double tau, double alpha);

/// Level set function as coefficients against the eigenbasis, indexed like
/// the ModeTable.
struct SpectralField {
  std::vector<double> coeffs;
};

/// Owns the mode table and the transform plans for one PriorSpec. Immutable
/// after construction; synthesize/analyze are reentrant.
class SpectralBasis {
 public:
  explicit SpectralBasis(PriorSpec spec);
  ~SpectralBasis();
  SpectralBasis(const SpectralBasis&) = delete;
  SpectralBasis& operator=(const SpectralBasis&) = delete;

  const PriorSpec& spec() const { return spec_; }
  const ModeTable& modes() const { return modes_; }
  const GridGeometry& geometry() const { return geometry_; }
  std::size_t size() const { return modes_.size(); }
  std::size_t grid_size() const { return geometry_.size(); }

  /// Grid values of sum_k u_k phi_k.
  std::vector<double> synthesize(const SpectralField& field) const;
  void synthesize(std::span<const double> coeffs, std::span<double> grid) const;

  /// Discrete L2 projection onto the retained modes; exact inverse of
  /// synthesize. The grid mean (constant mode) is discarded.
  SpectralField analyze(std::span<const double> grid) const;
  void analyze(std::span<const double> grid, std::span<double> coeffs) const;

  /// Closed-form phi_j(x) for mode j of the table.
  double eigenfunction(std::size_t j, const Point& x) const;

 private:
  struct Plans;

  PriorSpec spec_;
  GridGeometry geometry_;
  ModeTable modes_;
  std::vector<double> synth_scale_;
  std::vector<double> analysis_scale_;
  std::unique_ptr<Plans> plans_;
};

/// u_k = sqrt(lambda_k(tau)) xi_k, xi_k drawn in mode order from rng.
SpectralField sample_prior(const SpectralBasis& basis, double tau, Rng& rng);

/// log of d mu^gamma / d mu^tau evaluated at u:
///   1/2 sum_k [ (1/lambda_k(tau) - 1/lambda_k(gamma)) u_k^2
///               + log(lambda_k(tau) / lambda_k(gamma)) ].
/// Each mode contributes one fused term; the two partial series are never
/// formed separately since they diverge individually for d >= 2.
double log_prior_ratio(const ModeTable& modes, double alpha,
                       std::span<const double> coeffs, double tau,
                       double gamma);
double log_prior_ratio(const SpectralBasis& basis, const SpectralField& field,
                       double tau, double gamma);

/// tau^(alpha - d/2); multiplies a synthesized field to unit-order amplitude.
double amplitude_scale(double tau, double alpha, int dim);
std::vector<double> amplitude_rescale(std::span<const double> grid, double tau,
                                      double alpha, int dim);

/// Whittle-Matern normalization beta = sigma^2 2^d pi^(d/2) Gamma(nu+d/2)/Gamma(nu).
double matern_beta(double sigma, double smoothness, int dim);
/// Eigenvalue of beta ell^d (I - ell^2 Laplacian)^(-smoothness - d/2) at
/// Laplacian eigenvalue nu.
double matern_eigenvalue(double nu, double sigma, double smoothness, double ell,
                         int dim);

}  // namespace lsinv
