#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "lsinv/grid.hpp"
#include "lsinv/levelset_map.hpp"

namespace lsinv {

struct ObservationGrid {
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
};

/// per_axis^dim points at the cell centers of a uniform partition of the box.
ObservationGrid uniform_observation_grid(int dim, std::span<const double> lengths,
                                         int per_axis);

/// S : phase field -> R^J.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;
  virtual std::size_t output_size() const = 0;
  /// Not const: implementations may reuse internal workspaces. One instance
  /// per thread.
  virtual void observe(const PhaseField& kappa, std::span<double> out) = 0;
  virtual std::unique_ptr<ForwardModel> clone() const = 0;

  std::vector<double> observe(const PhaseField& kappa);
};

/// Produces no observations, so the potential vanishes identically.
class NullObservation final : public ForwardModel {
 public:
  std::size_t output_size() const override { return 0; }
  void observe(const PhaseField&, std::span<double>) override {}
  std::unique_ptr<ForwardModel> clone() const override;
};

/// y_j = kappa(q_j) with q_j snapped to the nearest grid node.
class PointObservation final : public ForwardModel {
 public:
  /// Throws ConfigError when a point lies outside the domain.
  PointObservation(const GridGeometry& geometry, const ObservationGrid& obs);

  std::size_t output_size() const override { return nodes_.size(); }
  using ForwardModel::observe;
  void observe(const PhaseField& kappa, std::span<double> out) override;
  std::unique_ptr<ForwardModel> clone() const override;

  std::span<const std::size_t> nodes() const { return nodes_; }

 private:
  std::size_t grid_size_;
  std::vector<std::size_t> nodes_;
};

std::vector<double> point_observe(const PhaseField& kappa,
                                  const GridGeometry& geometry,
                                  const ObservationGrid& obs);

// ---------------------------------------------------------------------------
// Darcy flow: -div(kappa grad h) = f on [0, L]^2, cell-centered differences.

enum class SideKind { dirichlet, flux };

/// Condition on one side of the square. For dirichlet, value(s) is the head;
/// for flux, value(s) is the inflow per unit length (positive into the
/// domain). s is the coordinate along the side.
struct SideCondition {
  SideKind kind = SideKind::flux;
  std::function<double(double)> value = [](double) { return 0.0; };
};

/// Recharge f = rate on lo < x2 < hi (band edges carry no mass).
struct RechargeBand {
  double lo = 0.0;
  double hi = 0.0;
  double rate = 0.0;
};

struct DarcySetup {
  double length = 6.0;
  int cells = 32;
  std::vector<RechargeBand> recharge;
  SideCondition left;    // x1 = 0
  SideCondition right;   // x1 = L
  SideCondition bottom;  // x2 = 0
  SideCondition top;     // x2 = L

  /// Throws ConfigError when cells < 4, length <= 0, or no side is Dirichlet.
  void validate() const;
  GridGeometry geometry() const { return {2, {length, length}, cells, true}; }
};

/// Benchmark aquifer: f = 0 / 137 / 274 on x2 in (0,4] / (4,5) / [5,6),
/// h = 100 at the bottom, no flow on right and top, inflow 500 on the left.
DarcySetup benchmark_darcy_setup(int cells);

struct DarcySolution {
  std::vector<double> head;     // cell values, GridGeometry layout
  double residual_norm = 0.0;   // ||A h - b||_2
  double rhs_norm = 0.0;        // ||b||_2
  double dirichlet_outflow = 0.0;
  double flux_inflow = 0.0;
  double recharge_total = 0.0;
};

/// Reusable solver for one setup. The sparsity pattern is analyzed once;
/// each solve refactorizes. Not thread-safe; use one instance per thread.
class DarcySolver {
 public:
  explicit DarcySolver(DarcySetup setup);
  ~DarcySolver();
  DarcySolver(DarcySolver&&) noexcept;
  DarcySolver& operator=(DarcySolver&&) noexcept;

  const DarcySetup& setup() const { return setup_; }

  /// Throws DomainError for non-positive kappa, DimensionError for a wrong
  /// number of cells, NumericalError when the residual exceeds 1e-10 ||b||.
  DarcySolution solve(std::span<const double> kappa);

  /// Cell-averaged recharge, one value per cell.
  std::span<const double> recharge() const { return recharge_; }

 private:
  struct Impl;

  DarcySetup setup_;
  std::vector<double> recharge_;
  std::unique_ptr<Impl> impl_;
};

DarcySolution darcy_solve(const PhaseField& kappa, const DarcySetup& setup);

/// Gaussian-kernel averages of a grid function around each observation
/// point, with kernel weights renormalized to sum to one over the grid.
class SmoothedObservation {
 public:
  /// Throws DomainError when eps <= 0, ConfigError when a point is outside.
  SmoothedObservation(const GridGeometry& geometry, const ObservationGrid& obs,
                      double eps);

  std::size_t size() const { return rows_.size(); }
  void apply(std::span<const double> h, std::span<double> out) const;

 private:
  struct Entry {
    std::size_t node;
    double weight;
  };
  std::size_t grid_size_;
  std::vector<std::vector<Entry>> rows_;
};

std::vector<double> smoothed_observe(std::span<const double> h,
                                     const GridGeometry& geometry,
                                     const ObservationGrid& obs, double eps);

/// kappa -> (l_1(h), ..., l_J(h)) with h the Darcy head for kappa.
class DarcyObservation final : public ForwardModel {
 public:
  DarcyObservation(DarcySetup setup, const ObservationGrid& obs, double eps);

  std::size_t output_size() const override { return smoother_.size(); }
  using ForwardModel::observe;
  void observe(const PhaseField& kappa, std::span<double> out) override;
  std::unique_ptr<ForwardModel> clone() const override;

  const DarcySolution& last_solution() const { return last_; }

 private:
  DarcySetup setup_;
  ObservationGrid obs_;
  double eps_;
  DarcySolver solver_;
  SmoothedObservation smoother_;
  DarcySolution last_;
};

}  // namespace lsinv
