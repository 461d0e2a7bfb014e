#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lsinv/levelset_map.hpp"
#include "lsinv/spectral_prior.hpp"

namespace lsinv {

/// Scalar Welford accumulator; merge() is the Chan et al. pairwise update.
class Welford {
 public:
  void add(double x);
  void merge(const Welford& other);

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double m2() const { return m2_; }
  /// Unbiased sample variance; 0 with fewer than two samples.
  double variance() const;

  static Welford from_moments(std::uint64_t n, double mean, double m2);

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Componentwise Welford accumulator over fixed-length vectors.
class VectorWelford {
 public:
  VectorWelford() = default;
  explicit VectorWelford(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}

  void add(std::span<const double> x);
  /// Throws DimensionError when both sides are non-empty with different sizes.
  void merge(const VectorWelford& other);

  std::uint64_t count() const { return n_; }
  std::size_t dim() const { return mean_.size(); }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& m2() const { return m2_; }
  std::vector<double> variance() const;

  static VectorWelford from_moments(std::uint64_t n, std::vector<double> mean,
                                    std::vector<double> m2);

 private:
  std::uint64_t n_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

inline constexpr std::size_t kLeadingModes = 5;

struct RunningStats {
  std::uint64_t steps = 0;
  std::uint64_t accepted_u = 0;
  std::uint64_t accepted_tau = 0;

  // retained (post burn-in, thinned) samples only
  VectorWelford coeffs;    // KL coefficients of u
  VectorWelford phase;     // F(u, tau) on the grid
  VectorWelford rescaled;  // tau^(alpha - d/2) u on the grid
  Welford tau;
  Welford phi;
  std::vector<double> tau_trace;
  std::vector<double> phi_trace;
  std::vector<double> leading_modes;  // kLeadingModes per retained sample

  std::uint64_t retained() const { return tau.count(); }
};

/// Streams of a then b; moments by parallel combination.
RunningStats stats_merge(const RunningStats& a, const RunningStats& b);

struct StatsSummary {
  std::uint64_t steps = 0;
  std::uint64_t retained = 0;
  double acceptance_u = 0.0;
  double acceptance_tau = 0.0;
  double tau_mean = 0.0;
  double tau_std = 0.0;
  double phi_mean = 0.0;
  std::vector<double> mean_phase;          // E F(u, tau)
  std::vector<double> var_phase;           // Var F(u, tau)
  std::vector<double> pushforward_of_mean; // F(E u, E tau)
  std::vector<double> mean_rescaled;       // E tau^(alpha-d/2) u
  std::vector<double> mean_coeffs;
};

/// With zero retained samples the grid fields are left empty.
StatsSummary stats_finalize(const RunningStats& stats, const SpectralBasis& basis,
                            const LevelSetSpec& levelset);

}  // namespace lsinv
