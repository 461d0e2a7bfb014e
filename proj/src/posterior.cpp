#include "lsinv/posterior.hpp"

#include <cmath>

#include "lsinv/errors.hpp"

namespace lsinv {

void NoiseModel::validate() const {
  for (double s : sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ConfigError("noise: standard deviations must be positive and finite");
    }
  }
}

double potential(std::span<const double> predicted, const DataVector& y,
                 const NoiseModel& noise) {
  if (predicted.size() != y.values.size() || noise.sigma.size() != y.values.size()) {
    throw DimensionError("potential: data has " + std::to_string(y.values.size()) +
                         " entries, prediction " + std::to_string(predicted.size()) +
                         ", noise " + std::to_string(noise.sigma.size()));
  }
  double phi = 0.0;
  for (std::size_t j = 0; j < predicted.size(); ++j) {
    const double r = (y.values[j] - predicted[j]) / noise.sigma[j];
    phi += r * r;
  }
  return 0.5 * phi;
}

SyntheticData generate_data(const PhaseField& truth, ForwardModel& forward,
                            const NoiseScheme& scheme, Rng& rng) {
  SyntheticData out;
  out.noise_free = forward.observe(truth);
  out.y.values.resize(out.noise_free.size());
  out.noise.sigma.resize(out.noise_free.size());
  for (std::size_t j = 0; j < out.noise_free.size(); ++j) {
    const double g = out.noise_free[j];
    const double sd = scheme.kind == NoiseScheme::Kind::absolute
                          ? scheme.level
                          : scheme.level * std::abs(g);
    out.noise.sigma[j] = sd;
    out.y.values[j] = g + sd * rng.normal();
  }
  return out;
}

SyntheticData generate_data(std::span<const double> truth_grid, double truth_tau,
                            const LevelSetSpec& levelset, ForwardModel& forward,
                            const NoiseScheme& scheme, Rng& rng) {
  const PhaseField truth = apply(truth_grid, truth_tau, levelset);
  SyntheticData out = generate_data(truth, forward, scheme, rng);
  out.y.provenance.truth_tau = truth_tau;
  return out;
}

double mean_relative_error(std::span<const double> y,
                           std::span<const double> noise_free) {
  if (y.size() != noise_free.size() || y.empty()) {
    throw DimensionError("mean_relative_error: shape mismatch");
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    acc += std::abs(y[j] - noise_free[j]) / std::abs(noise_free[j]);
  }
  return acc / y.size();
}

Posterior::Posterior(std::shared_ptr<const SpectralBasis> basis,
                     LevelSetSpec levelset, std::unique_ptr<ForwardModel> forward,
                     DataVector y, NoiseModel noise)
    : basis_(std::move(basis)),
      levelset_(std::move(levelset)),
      forward_(std::move(forward)),
      y_(std::move(y)),
      noise_(std::move(noise)) {
  levelset_.validate();
  noise_.validate();
  if (forward_->output_size() != y_.values.size() ||
      noise_.sigma.size() != y_.values.size()) {
    throw DimensionError("posterior: forward output, data and noise lengths differ");
  }
  predicted_.resize(y_.values.size());
}

Posterior Posterior::prior_only(std::shared_ptr<const SpectralBasis> basis,
                                LevelSetSpec levelset) {
  return Posterior(std::move(basis), std::move(levelset),
                   std::make_unique<NullObservation>(), DataVector{}, NoiseModel{});
}

Posterior Posterior::clone() const {
  return Posterior(basis_, levelset_, forward_->clone(), y_, noise_);
}

double Posterior::potential_from_phases(const PhaseField& phases) {
  if (y_.values.empty()) return 0.0;
  forward_->observe(phases, predicted_);
  return lsinv::potential(predicted_, y_, noise_);
}

double Posterior::potential_from_grid(std::span<const double> u_grid, double tau,
                                      PhaseField& phases) {
  apply_into(u_grid, tau, levelset_, phases);
  return potential_from_phases(phases);
}

double Posterior::potential(const SpectralField& u, double tau) {
  if (!(tau > 0.0)) throw DomainError("potential: tau must be positive");
  const std::vector<double> grid = basis_->synthesize(u);
  PhaseField phases;
  return potential_from_grid(grid, tau, phases);
}

}  // namespace lsinv
