#pragma once

#include <stdexcept>
#include <utility>

#include "ilsq/interval_matrix.hpp"

namespace ilsq {

/// The enclosure routine could not prove the interval matrix regular, so no
/// finite bound on the solution set is available.
class EnclosureFailure : public std::runtime_error {
public:
  EnclosureFailure() : std::runtime_error("regularity not verified") {}
  explicit EnclosureFailure(const std::string &detail)
      : std::runtime_error("regularity not verified: " + detail) {}
};

enum class EnclosureKind { krawczyk, interval_gauss };

struct EnclosureMethod {
  EnclosureKind kind = EnclosureKind::krawczyk;
  int max_iters = 100;
  double stop_tol = 1e-12;

  void validate() const;
};

/// Outer enclosure of the united solution set {x : Qx = r, Q in Q, r in R}
/// for every column of R at once.
IntervalMatrix encl(const EnclosureMethod &method, const IntervalMatrix &q,
                    const IntervalMatrix &r);

IntervalVector encl(const EnclosureMethod &method, const IntervalMatrix &q,
                    const IntervalVector &r);

/// Lower endpoint of component `nu` of encl(Q, r).
double upsilon(const EnclosureMethod &method, const IntervalMatrix &q, const IntervalVector &r,
               Index nu);

/// Y containing Q^{-1} for every Q in Q, built column by column from Q y = e_j.
IntervalMatrix inverse_interval_matrix(const EnclosureMethod &method, const IntervalMatrix &q);

struct SystemEnclosure {
  IntervalVector x;
  IntervalMatrix inverse;
};

/// Solution enclosure and inverse enclosure from a single factorization.
SystemEnclosure enclose_with_inverse(const EnclosureMethod &method, const IntervalMatrix &q,
                                     const IntervalVector &r);

/// Solution enclosure and column nu of the inverse enclosure. For a
/// symmetric Q this column also bounds row nu of every symmetric member's
/// inverse.
std::pair<IntervalVector, IntervalVector> enclose_with_inverse_column(const EnclosureMethod &method,
                                                                      const IntervalMatrix &q,
                                                                      const IntervalVector &r,
                                                                      Index nu);

} // namespace ilsq
