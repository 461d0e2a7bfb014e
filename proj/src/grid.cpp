#include "lsinv/grid.hpp"

#include <algorithm>
#include <cmath>

namespace lsinv {

std::size_t GridGeometry::size() const {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(points);
  return n;
}

double GridGeometry::coordinate(int axis, int i) const {
  const double offset = cell_centered ? 0.5 : 0.0;
  return (i + offset) * spacing(axis);
}

double GridGeometry::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= spacing(a);
  return v;
}

Point GridGeometry::node(std::size_t flat) const {
  Point p{0.0, 0.0, 0.0};
  for (int a = dim - 1; a >= 0; --a) {
    p[a] = coordinate(a, static_cast<int>(flat % points));
    flat /= points;
  }
  return p;
}

bool GridGeometry::contains(const Point& p) const {
  for (int a = 0; a < dim; ++a) {
    if (!(p[a] >= 0.0 && p[a] <= lengths[a])) return false;
  }
  return true;
}

std::size_t GridGeometry::nearest(const Point& p) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim; ++a) {
    const double s = p[a] / spacing(a);
    int i = 0;
    if (cell_centered) {
      i = std::clamp(static_cast<int>(std::floor(s)), 0, points - 1);
    } else {
      // nodes at i h; x = L coincides with x = 0 on the torus
      i = static_cast<int>(std::lround(s)) % points;
    }
    flat = flat * points + static_cast<std::size_t>(i);
  }
  return flat;
}

}  // namespace lsinv
