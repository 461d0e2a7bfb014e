#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace lsinv {

using Point = std::array<double, 3>;

/// Uniform tensor grid on the box [0, L_1] x ... x [0, L_d].
///
/// Values are stored row-major with axis 0 (x1) outermost, so for d = 2 the
/// flat index of (i, j) is i * points + j where i runs along x1.
/// Cell-centered grids place node i at (i + 1/2) h; otherwise at i h.
struct GridGeometry {
  int dim = 2;
  std::vector<double> lengths{1.0, 1.0};
  int points = 64;
  bool cell_centered = true;

  std::size_t size() const;
  double spacing(int axis) const { return lengths[axis] / points; }
  double coordinate(int axis, int i) const;
  double cell_volume() const;
  Point node(std::size_t flat) const;
  bool contains(const Point& p) const;
  /// Flat index of the grid node closest to p (p must lie in the closed box).
  std::size_t nearest(const Point& p) const;
};

}  // namespace lsinv
