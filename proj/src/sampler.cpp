#include "lsinv/sampler.hpp"

#include <cmath>
#include <limits>

#include "lsinv/errors.hpp"

namespace lsinv {

double Hyperprior::log_density(double tau) const {
  const double z = (tau - mean) / std;
  return -0.5 * z * z;
}

void ChainConfig::validate() const {
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("chain.beta must lie in (0, 1]");
  if (!(tau_proposal_std > 0.0)) throw ConfigError("chain.tau_proposal_std must be positive");
  if (!(hyperprior.std > 0.0)) throw ConfigError("chain.prior_std must be positive");
  if (!(tau_min > 0.0)) throw ConfigError("chain.tau_min must be positive");
  if (!(tau0 > tau_min)) throw ConfigError("chain.tau0 must exceed chain.tau_min");
  if (burn_in > n_steps) throw ConfigError("chain.burn_in must not exceed chain.n_steps");
  if (thinning < 1) throw ConfigError("chain.thinning must be >= 1");
}

GibbsSampler::GibbsSampler(Posterior& posterior, ChainConfig config)
    : posterior_(posterior), config_(config) {
  config_.validate();
  const std::size_t modes = posterior_.basis().size();
  const std::size_t points = posterior_.basis().grid_size();
  proposal_.resize(modes);
  proposal_grid_.resize(points);
  rescaled_.resize(points);
}

const std::vector<double>& GibbsSampler::prior_sd(double tau) {
  if (tau != sd_tau_) {
    const auto& modes = posterior_.basis().modes();
    const double alpha = posterior_.basis().spec().alpha;
    sd_.resize(modes.size());
    for (std::size_t j = 0; j < modes.size(); ++j) {
      sd_[j] = std::exp(0.5 * log_prior_eigenvalue(modes[j].nu, tau, alpha));
    }
    sd_tau_ = tau;
  }
  return sd_;
}

ChainState GibbsSampler::make_state(SpectralField u, double tau) {
  if (!(tau > 0.0)) throw DomainError("chain state: tau must be positive");
  ChainState s;
  s.u = std::move(u);
  s.tau = tau;
  s.grid = posterior_.basis().synthesize(s.u);
  s.phi = posterior_.potential_from_grid(s.grid, s.tau, s.phases);
  return s;
}

ChainState GibbsSampler::initial_state(double tau, Rng& rng) {
  return make_state(sample_prior(posterior_.basis(), tau, rng), tau);
}

bool GibbsSampler::pcn_step(ChainState& state, Rng& rng) {
  const std::vector<double>& sd = prior_sd(state.tau);
  const double keep = std::sqrt(1.0 - config_.beta * config_.beta);
  for (std::size_t j = 0; j < proposal_.size(); ++j) {
    proposal_[j] = keep * state.u.coeffs[j] + config_.beta * sd[j] * rng.normal();
  }
  posterior_.basis().synthesize(proposal_, proposal_grid_);
  const double phi_v =
      posterior_.potential_from_grid(proposal_grid_, state.tau, proposal_phases_);
  const double log_u = std::log(rng.uniform());
  if (!(log_u < state.phi - phi_v)) return false;
  state.u.coeffs.swap(proposal_);
  state.grid.swap(proposal_grid_);
  std::swap(state.phases, proposal_phases_);
  state.phi = phi_v;
  return true;
}

double GibbsSampler::tau_log_ratio(const ChainState& state, double gamma) {
  double phi_g = 0.0;
  return tau_log_ratio(state, gamma, phi_g);
}

double GibbsSampler::tau_log_ratio(const ChainState& state, double gamma,
                                   double& phi_g) {
  if (!(gamma > config_.tau_min)) return -std::numeric_limits<double>::infinity();
  apply_into(state.grid, gamma, posterior_.levelset(), proposal_phases_);
  // moving the levels often leaves every phase unchanged; Phi is then equal
  phi_g = proposal_phases_.index == state.phases.index
              ? state.phi
              : posterior_.potential_from_phases(proposal_phases_);
  const auto& basis = posterior_.basis();
  return state.phi - phi_g +
         log_prior_ratio(basis.modes(), basis.spec().alpha, state.u.coeffs,
                         state.tau, gamma) +
         config_.hyperprior.log_density(gamma) -
         config_.hyperprior.log_density(state.tau);
}

double GibbsSampler::tau_acceptance_probability(const ChainState& state,
                                                double gamma) {
  const double r = tau_log_ratio(state, gamma);
  if (std::isnan(r)) return 0.0;
  return r >= 0.0 ? 1.0 : std::exp(r);
}

bool GibbsSampler::tau_step(ChainState& state, Rng& rng) {
  const double gamma = state.tau + config_.tau_proposal_std * rng.normal();
  const double log_u = std::log(rng.uniform());
  if (!(gamma > config_.tau_min)) return false;
  double phi_g = 0.0;
  const double log_r = tau_log_ratio(state, gamma, phi_g);
  if (!(log_u < log_r)) return false;
  // tau_log_ratio left F(u, gamma) in proposal_phases_
  state.phi = phi_g;
  state.tau = gamma;
  std::swap(state.phases, proposal_phases_);
  return true;
}

GibbsSampler::Result GibbsSampler::run(ChainState state, Rng& rng,
                                       ChainObserver* observer) {
  Result result;
  RunningStats& stats = result.stats;
  const auto& spec = posterior_.basis().spec();
  for (std::uint64_t step = 1; step <= config_.n_steps; ++step) {
    StepRecord rec;
    rec.step = step;
    rec.accept_u = pcn_step(state, rng);
    rec.accept_tau = tau_step(state, rng);
    rec.tau = state.tau;
    rec.phi = state.phi;
    ++stats.steps;
    stats.accepted_u += rec.accept_u;
    stats.accepted_tau += rec.accept_tau;
    if (observer != nullptr) observer->on_step(rec);

    if (step <= config_.burn_in || (step - config_.burn_in) % config_.thinning != 0) {
      continue;
    }
    const double scale = amplitude_scale(state.tau, spec.alpha, spec.dim);
    for (std::size_t p = 0; p < rescaled_.size(); ++p) rescaled_[p] = scale * state.grid[p];
    stats.coeffs.add(state.u.coeffs);
    stats.phase.add(state.phases.values);
    stats.rescaled.add(rescaled_);
    stats.tau.add(state.tau);
    stats.phi.add(state.phi);
    stats.tau_trace.push_back(state.tau);
    stats.phi_trace.push_back(state.phi);
    for (std::size_t j = 0; j < kLeadingModes; ++j) {
      stats.leading_modes.push_back(j < state.u.coeffs.size() ? state.u.coeffs[j] : 0.0);
    }
    if (observer != nullptr) observer->on_sample(step, state, rescaled_);
  }
  result.final_state = std::move(state);
  return result;
}

GibbsSampler::Result gibbs_run(Posterior& posterior, const ChainConfig& config,
                               ChainObserver* observer) {
  GibbsSampler sampler(posterior, config);
  Rng rng(config.seed);
  ChainState start = sampler.initial_state(config.tau0, rng);
  return sampler.run(std::move(start), rng, observer);
}

}  // namespace lsinv
