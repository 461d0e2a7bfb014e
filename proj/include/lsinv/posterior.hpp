#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lsinv/forward_models.hpp"
#include "lsinv/levelset_map.hpp"
#include "lsinv/rng.hpp"
#include "lsinv/spectral_prior.hpp"

namespace lsinv {

/// Diagonal Gaussian noise, stored as per-component standard deviations.
struct NoiseModel {
  std::vector<double> sigma;

  void validate() const;
};

struct DataProvenance {
  std::uint64_t truth_seed = 0;
  std::uint64_t noise_seed = 0;
  double truth_tau = 0.0;
  int truth_grid = 0;
  int inversion_grid = 0;
};

struct DataVector {
  std::vector<double> values;
  DataProvenance provenance;
};

/// 1/2 sum_j (y_j - g_j)^2 / sigma_j^2.
double potential(std::span<const double> predicted, const DataVector& y,
                 const NoiseModel& noise);

/// How observation noise is scaled when generating synthetic data.
struct NoiseScheme {
  enum class Kind { absolute, relative };
  Kind kind = Kind::absolute;
  double level = 0.2;  // sigma (absolute) or fraction of |G_j| (relative)
};

struct SyntheticData {
  DataVector y;
  NoiseModel noise;
  std::vector<double> noise_free;
};

/// y = G(u, tau) + Gamma^(1/2) xi, evaluated on the grid the truth lives on.
/// With the relative scheme, sigma_j = level * |G_j(u, tau)|.
SyntheticData generate_data(std::span<const double> truth_grid, double truth_tau,
                            const LevelSetSpec& levelset, ForwardModel& forward,
                            const NoiseScheme& scheme, Rng& rng);
/// Same, for a truth given directly as a phase field.
SyntheticData generate_data(const PhaseField& truth, ForwardModel& forward,
                            const NoiseScheme& scheme, Rng& rng);

/// Mean over j of |y_j - g_j| / |g_j|.
double mean_relative_error(std::span<const double> y,
                           std::span<const double> noise_free);

/// Posterior ingredients for one inversion grid: prior basis, level set map,
/// forward model, data, noise. Holds a private forward-model instance, so a
/// Posterior must not be shared across threads; use clone() per chain.
class Posterior {
 public:
  Posterior(std::shared_ptr<const SpectralBasis> basis, LevelSetSpec levelset,
            std::unique_ptr<ForwardModel> forward, DataVector y, NoiseModel noise);

  /// A posterior whose potential vanishes identically (no observations).
  static Posterior prior_only(std::shared_ptr<const SpectralBasis> basis,
                              LevelSetSpec levelset);

  Posterior clone() const;

  const SpectralBasis& basis() const { return *basis_; }
  std::shared_ptr<const SpectralBasis> basis_ptr() const { return basis_; }
  const LevelSetSpec& levelset() const { return levelset_; }
  const DataVector& data() const { return y_; }
  const NoiseModel& noise() const { return noise_; }
  std::size_t observations() const { return y_.values.size(); }

  /// Phi for u given by its grid values; the phase field is written to phases.
  double potential_from_grid(std::span<const double> u_grid, double tau,
                             PhaseField& phases);
  /// Phi for an already thresholded field.
  double potential_from_phases(const PhaseField& phases);
  double potential(const SpectralField& u, double tau);

 private:
  std::shared_ptr<const SpectralBasis> basis_;
  LevelSetSpec levelset_;
  std::unique_ptr<ForwardModel> forward_;
  DataVector y_;
  NoiseModel noise_;
  std::vector<double> predicted_;
};

}  // namespace lsinv
