#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lsinv/errors.hpp"
#include "lsinv/forward_models.hpp"

namespace lsinv {

ObservationGrid uniform_observation_grid(int dim, std::span<const double> lengths,
                                         int per_axis) {
  if (per_axis < 1) throw ConfigError("observations.per_axis must be >= 1");
  if (static_cast<int>(lengths.size()) != dim) {
    throw ConfigError("observation grid: lengths do not match dim");
  }
  ObservationGrid obs;
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(per_axis);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Point p{0.0, 0.0, 0.0};
    std::size_t rest = flat;
    for (int a = dim - 1; a >= 0; --a) {
      p[a] = (static_cast<double>(rest % per_axis) + 0.5) * lengths[a] / per_axis;
      rest /= per_axis;
    }
    obs.points.push_back(p);
  }
  return obs;
}

std::vector<double> ForwardModel::observe(const PhaseField& kappa) {
  std::vector<double> out(output_size());
  observe(kappa, out);
  return out;
}

std::unique_ptr<ForwardModel> NullObservation::clone() const {
  return std::make_unique<NullObservation>();
}

namespace {

void require_inside(const GridGeometry& geometry, const ObservationGrid& obs) {
  for (std::size_t j = 0; j < obs.size(); ++j) {
    if (!geometry.contains(obs.points[j])) {
      throw ConfigError("observation point " + std::to_string(j) +
                        " lies outside the domain");
    }
  }
}

}  // namespace

PointObservation::PointObservation(const GridGeometry& geometry,
                                   const ObservationGrid& obs)
    : grid_size_(geometry.size()) {
  require_inside(geometry, obs);
  nodes_.reserve(obs.size());
  for (const Point& p : obs.points) nodes_.push_back(geometry.nearest(p));
}

void PointObservation::observe(const PhaseField& kappa, std::span<double> out) {
  if (kappa.values.size() != grid_size_ || out.size() != nodes_.size()) {
    throw DimensionError("point_observe: shape mismatch");
  }
  for (std::size_t j = 0; j < nodes_.size(); ++j) out[j] = kappa.values[nodes_[j]];
}

std::unique_ptr<ForwardModel> PointObservation::clone() const {
  return std::make_unique<PointObservation>(*this);
}

std::vector<double> point_observe(const PhaseField& kappa,
                                  const GridGeometry& geometry,
                                  const ObservationGrid& obs) {
  PointObservation model(geometry, obs);
  return model.ForwardModel::observe(kappa);
}

SmoothedObservation::SmoothedObservation(const GridGeometry& geometry,
                                         const ObservationGrid& obs, double eps)
    : grid_size_(geometry.size()) {
  if (!(eps > 0.0)) throw DomainError("smoothed_observe: eps must be positive");
  require_inside(geometry, obs);
  const std::size_t n = geometry.size();
  std::vector<double> log_w(n);
  for (const Point& q : obs.points) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t node = 0; node < n; ++node) {
      const Point x = geometry.node(node);
      double r2 = 0.0;
      for (int a = 0; a < geometry.dim; ++a) r2 += (x[a] - q[a]) * (x[a] - q[a]);
      log_w[node] = -0.5 * r2 / (eps * eps);
      top = std::max(top, log_w[node]);
    }
    // shift by the largest exponent so the nearest node keeps weight 1 even
    // when eps is far below the grid spacing
    std::vector<Entry> row;
    double total = 0.0;
    for (std::size_t node = 0; node < n; ++node) {
      const double w = std::exp(log_w[node] - top);
      if (w < 1e-17) continue;
      row.push_back({node, w});
      total += w;
    }
    for (Entry& e : row) e.weight /= total;
    rows_.push_back(std::move(row));
  }
}

void SmoothedObservation::apply(std::span<const double> h,
                                std::span<double> out) const {
  if (h.size() != grid_size_ || out.size() != rows_.size()) {
    throw DimensionError("smoothed_observe: shape mismatch");
  }
  for (std::size_t j = 0; j < rows_.size(); ++j) {
    double acc = 0.0;
    for (const Entry& e : rows_[j]) acc += e.weight * h[e.node];
    out[j] = acc;
  }
}

std::vector<double> smoothed_observe(std::span<const double> h,
                                     const GridGeometry& geometry,
                                     const ObservationGrid& obs, double eps) {
  SmoothedObservation op(geometry, obs, eps);
  std::vector<double> out(op.size());
  op.apply(h, out);
  return out;
}

DarcyObservation::DarcyObservation(DarcySetup setup, const ObservationGrid& obs,
                                   double eps)
    : setup_(setup),
      obs_(obs),
      eps_(eps),
      solver_(std::move(setup)),
      smoother_(setup_.geometry(), obs_, eps_) {}

void DarcyObservation::observe(const PhaseField& kappa, std::span<double> out) {
  last_ = solver_.solve(kappa.values);
  smoother_.apply(last_.head, out);
}

std::unique_ptr<ForwardModel> DarcyObservation::clone() const {
  return std::make_unique<DarcyObservation>(setup_, obs_, eps_);
}

}  // namespace lsinv
