#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lsinv {

/// Base levels c_1 < ... < c_{n-1} and phase values kappa_1..kappa_n.
/// Levels scale with tau as c_i(tau) = tau^(d/2 - alpha) c_i.
struct LevelSetSpec {
  std::vector<double> base_levels{-0.1, 0.1};
  std::vector<double> phase_values{1.0, 3.0, 5.0};
  double alpha = 5.0;
  int dim = 2;

  std::size_t phases() const { return phase_values.size(); }
  /// Throws ConfigError on unordered/non-finite levels or a level/phase count
  /// mismatch; with require_positive, also when any kappa_i <= 0.
  void validate(bool require_positive = false) const;
};

/// Piecewise-constant field. index holds the 0-based phase of each point.
struct PhaseField {
  std::vector<double> values;
  std::vector<std::uint8_t> index;
};

std::vector<double> thresholds(const LevelSetSpec& spec, double tau);

/// Phase i (0-based) at x iff c_i(tau) <= u(x) < c_{i+1}(tau) with
/// c_0 = -inf and c_n = +inf.
PhaseField apply(std::span<const double> u, double tau,
                 const LevelSetSpec& spec);
void apply_into(std::span<const double> u, double tau, const LevelSetSpec& spec,
                PhaseField& out);

std::vector<double> phase_fractions(const PhaseField& field,
                                    std::size_t n_phases);

}  // namespace lsinv
