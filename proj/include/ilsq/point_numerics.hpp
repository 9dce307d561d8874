#pragma once

#include <stdexcept>

#include "ilsq/interval_matrix.hpp"

namespace ilsq {

class SingularSystem : public std::runtime_error {
public:
  SingularSystem() : std::runtime_error("singular point system") {}
};

/// Pivots smaller than this fraction of the largest entry count as zero.
inline constexpr double kSingularPivotRatio = 1e-12;

/// LU solve with partial pivoting. Throws SingularSystem when a pivot falls
/// below kSingularPivotRatio times the largest entry magnitude.
RealVector solve(const RealMatrix &q, const RealVector &r);
RealMatrix solve(const RealMatrix &q, const RealMatrix &r);

RealMatrix inverse(const RealMatrix &q);

struct SingularValueExtremes {
  double sigma_min;
  double sigma_max;
};

/// Smallest and largest singular values (Jacobi SVD).
SingularValueExtremes sigma_extremes(const RealMatrix &a);

/// Spectral radius of an elementwise nonnegative square matrix.
double spectral_radius_nonneg(const RealMatrix &m);

/// A+ = (A^T A)^{-1} A^T for a full column rank m x n matrix, m >= n.
RealMatrix pseudoinverse(const RealMatrix &a);

} // namespace ilsq
