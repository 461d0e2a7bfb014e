#include "lsinv/running_stats.hpp"

#include <cmath>

#include "lsinv/errors.hpp"

namespace lsinv {

void Welford::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void Welford::merge(const Welford& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  n_ += other.n_;
}

double Welford::variance() const {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

Welford Welford::from_moments(std::uint64_t n, double mean, double m2) {
  Welford w;
  w.n_ = n;
  w.mean_ = mean;
  w.m2_ = m2;
  return w;
}

void VectorWelford::add(std::span<const double> x) {
  if (mean_.empty() && n_ == 0) {
    mean_.assign(x.size(), 0.0);
    m2_.assign(x.size(), 0.0);
  }
  if (x.size() != mean_.size()) {
    throw DimensionError("VectorWelford::add: sample length mismatch");
  }
  ++n_;
  const double inv = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double delta = x[i] - mean_[i];
    mean_[i] += delta * inv;
    m2_[i] += delta * (x[i] - mean_[i]);
  }
}

void VectorWelford::merge(const VectorWelford& other) {
  if (!mean_.empty() && !other.mean_.empty() && mean_.size() != other.mean_.size()) {
    throw DimensionError("VectorWelford::merge: dimension mismatch");
  }
  if (other.n_ == 0) {
    if (mean_.empty()) {
      mean_ = other.mean_;
      m2_ = other.m2_;
    }
    return;
  }
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  for (std::size_t i = 0; i < mean_.size(); ++i) {
    const double delta = other.mean_[i] - mean_[i];
    mean_[i] += delta * nb / n;
    m2_[i] += other.m2_[i] + delta * delta * na * nb / n;
  }
  n_ += other.n_;
}

std::vector<double> VectorWelford::variance() const {
  std::vector<double> v(mean_.size(), 0.0);
  if (n_ < 2) return v;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = m2_[i] / static_cast<double>(n_ - 1);
  return v;
}

VectorWelford VectorWelford::from_moments(std::uint64_t n, std::vector<double> mean,
                                          std::vector<double> m2) {
  if (mean.size() != m2.size()) {
    throw DimensionError("VectorWelford::from_moments: mean/m2 length mismatch");
  }
  VectorWelford w;
  w.n_ = n;
  w.mean_ = std::move(mean);
  w.m2_ = std::move(m2);
  return w;
}

RunningStats stats_merge(const RunningStats& a, const RunningStats& b) {
  RunningStats out = a;
  out.steps += b.steps;
  out.accepted_u += b.accepted_u;
  out.accepted_tau += b.accepted_tau;
  out.coeffs.merge(b.coeffs);
  out.phase.merge(b.phase);
  out.rescaled.merge(b.rescaled);
  out.tau.merge(b.tau);
  out.phi.merge(b.phi);
  out.tau_trace.insert(out.tau_trace.end(), b.tau_trace.begin(), b.tau_trace.end());
  out.phi_trace.insert(out.phi_trace.end(), b.phi_trace.begin(), b.phi_trace.end());
  out.leading_modes.insert(out.leading_modes.end(), b.leading_modes.begin(),
                           b.leading_modes.end());
  return out;
}

StatsSummary stats_finalize(const RunningStats& stats, const SpectralBasis& basis,
                            const LevelSetSpec& levelset) {
  StatsSummary s;
  s.steps = stats.steps;
  s.retained = stats.retained();
  if (stats.steps > 0) {
    s.acceptance_u = static_cast<double>(stats.accepted_u) / stats.steps;
    s.acceptance_tau = static_cast<double>(stats.accepted_tau) / stats.steps;
  }
  if (s.retained == 0) return s;
  s.tau_mean = stats.tau.mean();
  s.tau_std = std::sqrt(stats.tau.variance());
  s.phi_mean = stats.phi.mean();
  s.mean_phase = stats.phase.mean();
  s.var_phase = stats.phase.variance();
  s.mean_rescaled = stats.rescaled.mean();
  s.mean_coeffs = stats.coeffs.mean();
  if (s.mean_coeffs.size() != basis.size()) {
    throw DimensionError("stats_finalize: coefficient statistics do not match basis");
  }
  const std::vector<double> mean_u = basis.synthesize(SpectralField{s.mean_coeffs});
  s.pushforward_of_mean = apply(mean_u, s.tau_mean, levelset).values;
  return s;
}

}  // namespace lsinv
