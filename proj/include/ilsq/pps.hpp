#pragma once

#include <compare>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ilsq/augment.hpp"
#include "ilsq/enclosure.hpp"
#include "ilsq/rank_check.hpp"

namespace ilsq {

/// One parameter of a symmetric interval system: a matrix pair (k, l) with
/// k <= l, standing for both (k, l) and (l, k), or a right-hand side entry.
struct ElementId {
  enum class Kind { matrix, rhs };

  Kind kind = Kind::matrix;
  Index k = 0;
  Index l = 0;

  static ElementId matrix(Index k, Index l) {
    return k <= l ? ElementId{Kind::matrix, k, l} : ElementId{Kind::matrix, l, k};
  }
  static ElementId rhs(Index k) { return {Kind::rhs, k, 0}; }

  bool is_matrix() const { return kind == Kind::matrix; }
  auto operator<=>(const ElementId &) const = default;
};

struct Record {
  IntervalMatrix q;
  IntervalVector r;
  double upsilon = 0;
  // Row nu of an enclosure of the inverses; the derivatives need no more.
  IntervalVector y;
  IntervalVector x;
};

/// Records ordered by ascending upsilon, first in first out among equal
/// keys, together with the best known upper bound omega.
class WorkList {
public:
  void insert(Record record);
  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }

  const Record &leading() const;
  Record pop_leading();

  double omega() const { return omega_; }
  /// omega <- min(omega, value); true when omega decreased.
  bool lower_omega(double value);

  /// Removes records with upsilon > omega, never the leading one. Returns the
  /// number removed.
  std::size_t clean();

  std::vector<double> upsilons() const;

private:
  std::multimap<double, Record> records_;
  double omega_ = std::numeric_limits<double>::infinity();
};

enum class PpsMethod { simple, modified };
enum class RhsSplit { endpoints, halves };

struct SolveOptions {
  double eps = 1e-6;
  long max_iters = 10'000'000;
  /// Seconds; infinity means no limit.
  double time_limit = std::numeric_limits<double>::infinity();
  PpsMethod method = PpsMethod::modified;
  /// Clean at every M-th iteration in which omega decreased; 0 never cleans.
  int clean_period = 8;
  EnclosureMethod encl;
  bool squeeze = true;
  RhsSplit rhs_split = RhsSplit::endpoints;
  /// Children inherit the parent's Y and x instead of recomputing them.
  bool reuse_parent = false;
  bool trace = false;

  void validate() const;
};

struct TraceEntry {
  long iteration;
  double z;
  double omega;
  std::size_t list_size;
};

struct PpsStats {
  long iterations = 0;
  double wall_ms = 0;
  double omega = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  std::size_t peak_list = 0;
  bool converged = false;
  std::vector<TraceEntry> trace;
};

struct PpsResult {
  double value;
  PpsStats stats;
};

/// Children of Q halved at (k, l) and (l, k): [lo, mid] and [mid, hi].
std::pair<IntervalMatrix, IntervalMatrix> subdivide_matrix(const IntervalMatrix &q, Index k,
                                                           Index l);

/// Children of r split at component k into its endpoints, or halves.
std::pair<IntervalVector, IntervalVector> subdivide_rhs(const IntervalVector &r, Index k,
                                                        RhsSplit how = RhsSplit::endpoints);

/// Widest element with width above `min_width`; ties prefer matrix entries,
/// then the lexicographically smallest index. Empty when nothing qualifies.
std::optional<ElementId> select_widest(const IntervalMatrix &q, const IntervalVector &r,
                                       double min_width = 0);

/// Enclosures of the partial derivatives of x_nu with respect to every
/// parameter, given Y containing the inverses and x containing the solutions.
struct DerivativeEnclosures {
  IntervalMatrix matrix;
  IntervalVector rhs;

  IntervalD at(const ElementId &id) const {
    return id.is_matrix() ? matrix(id.k, id.l) : rhs(id.k);
  }
};

DerivativeEnclosures derivative_enclosures(const IntervalMatrix &y, const IntervalVector &x,
                                           Index nu);

/// Same, from row nu of Y alone.
DerivativeEnclosures derivative_enclosures(const IntervalVector &y_nu, const IntervalVector &x);

/// Pins every parameter on which x_nu is monotone to the endpoint that can
/// hold the minimum.
std::pair<IntervalMatrix, IntervalVector> monotonicity_squeeze(const IntervalMatrix &q,
                                                               const IntervalVector &r,
                                                               const DerivativeEnclosures &d);

/// Element maximizing mag(derivative) * width among those wider than
/// `min_width`, with the same tie rule as select_widest.
std::optional<ElementId> select_max_impact(const IntervalMatrix &q, const IntervalVector &r,
                                           const DerivativeEnclosures &d, double min_width = 0);

/// Verified upper bound on x_nu for the midpoint system of (Q, r), if it is
/// nonsingular.
std::optional<double> midpoint_upper_bound(const EnclosureMethod &method, const IntervalMatrix &q,
                                           const IntervalVector &r, Index nu);

/// Folds midpoint bounds of both children into the list's omega.
double update_upper_bound(WorkList &list, const EnclosureMethod &method,
                          const IntervalMatrix &q1, const IntervalVector &r1,
                          const IntervalMatrix &q2, const IntervalVector &r2, Index nu);

/// Lower bound on min { x_nu : Qx = r, Q in Q symmetric, r in r }.
PpsResult pps_min(const IntervalMatrix &q, const IntervalVector &r, Index nu,
                  const SolveOptions &opts = {});

/// Upper bound on the maximum, through min over the negated right-hand side.
PpsResult pps_max(const IntervalMatrix &q, const IntervalVector &r, Index nu,
                  const SolveOptions &opts = {});

class RankCertificationFailure : public std::runtime_error {
public:
  explicit RankCertificationFailure(const RankReport &report)
      : std::runtime_error("full column rank not certified"), report_(report) {}
  const RankReport &report() const { return report_; }

private:
  RankReport report_;
};

enum class BoundSide { min, max, both };

struct IlsqOptions {
  SolveOptions solve;
  /// Zero-based x components; empty means all.
  std::vector<Index> components;
  BoundSide bounds = BoundSide::both;
  bool skip_rank_check = false;
};

struct ComponentReport {
  Index component = 0;
  std::optional<PpsResult> lower;
  std::optional<PpsResult> upper;
};

struct IlsqReport {
  /// Every component; sides not refined by PPS come from the root enclosure.
  IntervalVector box;
  std::optional<RankReport> rank;
  std::vector<ComponentReport> components;

  bool converged() const;
};

/// Outer box of the least squares solution set of (A, b). The time limit in
/// `opts.solve` is a total budget shared among the requested bounds.
IlsqReport ilsq_pps(const LsqProblem &p, const IlsqOptions &opts = {});

} // namespace ilsq
