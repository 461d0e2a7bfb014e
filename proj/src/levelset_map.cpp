#include "lsinv/levelset_map.hpp"

#include <algorithm>
#include <cmath>

#include "lsinv/errors.hpp"

namespace lsinv {

void LevelSetSpec::validate(bool require_positive) const {
  if (phase_values.size() < 2) {
    throw ConfigError("levelset: at least two phases are required");
  }
  if (phase_values.size() > 255) {
    throw ConfigError("levelset: at most 255 phases are supported");
  }
  if (base_levels.size() + 1 != phase_values.size()) {
    throw ConfigError("levelset: need exactly one level fewer than phases");
  }
  for (std::size_t i = 0; i < base_levels.size(); ++i) {
    if (!std::isfinite(base_levels[i])) {
      throw ConfigError("levelset: levels must be finite");
    }
    if (i > 0 && !(base_levels[i - 1] < base_levels[i])) {
      throw ConfigError("levelset: levels must be strictly increasing");
    }
  }
  for (double k : phase_values) {
    if (!std::isfinite(k)) throw ConfigError("levelset: phase values must be finite");
    if (require_positive && !(k > 0.0)) {
      throw ConfigError("levelset: PDE forward models need positive phase values");
    }
  }
}

std::vector<double> thresholds(const LevelSetSpec& spec, double tau) {
  if (!(tau > 0.0)) throw DomainError("thresholds: tau must be positive");
  const double scale = std::pow(tau, 0.5 * spec.dim - spec.alpha);
  std::vector<double> levels = spec.base_levels;
  for (double& c : levels) c *= scale;
  return levels;
}

void apply_into(std::span<const double> u, double tau, const LevelSetSpec& spec,
                PhaseField& out) {
  const std::vector<double> levels = thresholds(spec, tau);
  out.values.resize(u.size());
  out.index.resize(u.size());
  for (std::size_t p = 0; p < u.size(); ++p) {
    // number of levels <= u(x); ties go to the upper phase
    const auto i = static_cast<std::size_t>(
        std::upper_bound(levels.begin(), levels.end(), u[p]) - levels.begin());
    out.index[p] = static_cast<std::uint8_t>(i);
    out.values[p] = spec.phase_values[i];
  }
}

PhaseField apply(std::span<const double> u, double tau,
                 const LevelSetSpec& spec) {
  PhaseField out;
  apply_into(u, tau, spec, out);
  return out;
}

std::vector<double> phase_fractions(const PhaseField& field,
                                    std::size_t n_phases) {
  std::vector<std::size_t> counts(n_phases, 0);
  for (std::uint8_t i : field.index) {
    if (i >= n_phases) throw DimensionError("phase_fractions: index out of range");
    ++counts[i];
  }
  std::vector<double> fractions(n_phases, 0.0);
  if (field.index.empty()) return fractions;
  for (std::size_t i = 0; i < n_phases; ++i) {
    fractions[i] = static_cast<double>(counts[i]) / field.index.size();
  }
  return fractions;
}

}  // namespace lsinv
