#pragma once

#include <stdexcept>

#include "ilsq/interval_matrix.hpp"

namespace ilsq {

class RankDeficientMidpoint : public std::domain_error {
public:
  RankDeficientMidpoint() : std::domain_error("midpoint rank deficient") {}
};

/// Sufficient full-rank certificates for an interval matrix A (m >= n):
///   spectral: rho(|(mid A)^+| * rad A) < 1
///   singular values: sigma_max(rad A) < sigma_min(mid A)
/// `ratio` is sigma_mid_min / sigma_rad_max, the margin reported alongside
/// the spectral value; it is +inf for a point matrix.
struct RankReport {
  double spectral_value = 0;
  double sigma_mid_min = 0;
  double sigma_rad_max = 0;
  double ratio = 0;
  bool spectral_holds = false;
  bool sigma_holds = false;

  bool certified() const { return spectral_holds || sigma_holds; }
};

RankReport check_full_rank(const IntervalMatrix &a);

} // namespace ilsq
