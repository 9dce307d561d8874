#include "ilsq/rank_check.hpp"

#include <limits>

#include "ilsq/point_numerics.hpp"

namespace ilsq {

RankReport check_full_rank(const IntervalMatrix &a) {
  if (a.rows() < a.cols() || a.cols() == 0)
    throw std::invalid_argument("check_full_rank: requires m >= n >= 1");
  const RealMatrix mid_a = mid(a);
  const RealMatrix rad_a = rad(a);

  const auto mid_sigma = sigma_extremes(mid_a);
  if (!(mid_sigma.sigma_min > kSingularPivotRatio * mid_sigma.sigma_max))
    throw RankDeficientMidpoint();

  RealMatrix pinv;
  try {
    pinv = pseudoinverse(mid_a);
  } catch (const std::domain_error &) {
    throw RankDeficientMidpoint();
  }

  RankReport report;
  report.spectral_value = spectral_radius_nonneg(RealMatrix(pinv.cwiseAbs() * rad_a));
  report.sigma_mid_min = mid_sigma.sigma_min;
  report.sigma_rad_max = sigma_extremes(rad_a).sigma_max;
  report.ratio = report.sigma_rad_max > 0 ? report.sigma_mid_min / report.sigma_rad_max
                                          : std::numeric_limits<double>::infinity();
  report.spectral_holds = report.spectral_value < 1;
  report.sigma_holds = report.sigma_rad_max < report.sigma_mid_min;
  return report;
}

} // namespace ilsq
