#include "ilsq/interval_matrix.hpp"

namespace ilsq {

IntervalVector hull(std::span<const RealVector> points) {
  if (points.empty())
    throw std::invalid_argument("hull of an empty point set");
  RealVector lo = points.front();
  RealVector hi = points.front();
  for (const auto &p : points) {
    detail::require(p.size() == lo.size(), "hull");
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return from_bounds(lo, hi);
}

} // namespace ilsq
