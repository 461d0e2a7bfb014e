#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lsinv/levelset_map.hpp"
#include "lsinv/posterior.hpp"
#include "lsinv/rng.hpp"
#include "lsinv/running_stats.hpp"
#include "lsinv/spectral_prior.hpp"

namespace lsinv {

/// Normal(mean, std) hyperprior on tau, supported on the positive reals.
/// The truncation constant is omitted since only ratios are used.
struct Hyperprior {
  double mean = 20.0;
  double std = 10.0;

  double log_density(double tau) const;
};

struct ChainConfig {
  double beta = 0.05;              // pCN jump size, in (0, 1]
  double tau_proposal_std = 1.0;   // random-walk step for tau
  Hyperprior hyperprior;
  double tau_min = 1e-3;           // proposals at or below are rejected
  double tau0 = 25.0;              // initial tau; u0 is drawn from the prior at tau0
  std::uint64_t n_steps = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t thinning = 1;
  std::uint64_t seed = 0;

  /// Throws ConfigError; burn_in == n_steps is accepted (no retained samples).
  void validate() const;
};

/// Current chain position plus caches kept coherent with (u, tau):
/// grid = synthesize(u), phases = F(u, tau), phi = Phi(u, tau; y).
struct ChainState {
  SpectralField u;
  double tau = 0.0;
  double phi = 0.0;
  std::vector<double> grid;
  PhaseField phases;
};

struct StepRecord {
  std::uint64_t step = 0;
  double tau = 0.0;
  double phi = 0.0;
  bool accept_u = false;
  bool accept_tau = false;
};

/// Receives every step and every retained sample of a run.
class ChainObserver {
 public:
  virtual ~ChainObserver() = default;
  virtual void on_step(const StepRecord&) {}
  /// rescaled is tau^(alpha - d/2) u on the grid.
  virtual void on_sample(std::uint64_t /*step*/, const ChainState& /*state*/,
                         std::span<const double> /*rescaled*/) {}
};

/// Metropolis-within-Gibbs over (u, tau): a pCN move for u | tau, y followed
/// by a random-walk Metropolis move for tau | u, y.
class GibbsSampler {
 public:
  /// The posterior is used (not copied) and must outlive the sampler.
  GibbsSampler(Posterior& posterior, ChainConfig config);

  const ChainConfig& config() const { return config_; }
  Posterior& posterior() { return posterior_; }

  ChainState make_state(SpectralField u, double tau);
  /// u drawn from the prior at tau.
  ChainState initial_state(double tau, Rng& rng);

  /// pCN proposal v = sqrt(1 - beta^2) u + beta xi with xi ~ N(0, C_tau);
  /// accepted with probability min(1, exp(Phi(u) - Phi(v))).
  bool pcn_step(ChainState& state, Rng& rng);

  /// gamma = tau + step * N(0,1); gamma <= tau_min is rejected outright.
  bool tau_step(ChainState& state, Rng& rng);

  /// log of the tau acceptance ratio before clamping; -inf when gamma is
  /// outside the support. Requires state coherent.
  double tau_log_ratio(const ChainState& state, double gamma);
  double tau_acceptance_probability(const ChainState& state, double gamma);

  struct Result {
    ChainState final_state;
    RunningStats stats;
  };

  /// n_steps iterations from the given state.
  Result run(ChainState state, Rng& rng, ChainObserver* observer = nullptr);

 private:
  const std::vector<double>& prior_sd(double tau);
  double tau_log_ratio(const ChainState& state, double gamma, double& phi_g);

  Posterior& posterior_;
  ChainConfig config_;
  std::vector<double> sd_;
  double sd_tau_ = -1.0;
  std::vector<double> proposal_;
  std::vector<double> proposal_grid_;
  PhaseField proposal_phases_;
  std::vector<double> rescaled_;
};

/// Full run from config.seed: draws u0 ~ N(0, C_tau0), then iterates.
GibbsSampler::Result gibbs_run(Posterior& posterior, const ChainConfig& config,
                               ChainObserver* observer = nullptr);

}  // namespace lsinv
