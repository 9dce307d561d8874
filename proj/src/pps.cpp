#include "ilsq/pps.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace ilsq {

void WorkList::insert(Record record) {
  const double key = record.upsilon;
  records_.emplace(key, std::move(record));
}

const Record &WorkList::leading() const {
  if (records_.empty())
    throw std::logic_error("work list is empty");
  return records_.begin()->second;
}

Record WorkList::pop_leading() {
  if (records_.empty())
    throw std::logic_error("work list is empty");
  auto node = records_.extract(records_.begin());
  return std::move(node.mapped());
}

bool WorkList::lower_omega(double value) {
  if (value < omega_) {
    omega_ = value;
    return true;
  }
  return false;
}

std::size_t WorkList::clean() {
  if (records_.size() <= 1)
    return 0;
  auto first = records_.upper_bound(omega_);
  if (first == records_.begin())
    ++first;
  const auto removed = static_cast<std::size_t>(std::distance(first, records_.end()));
  records_.erase(first, records_.end());
  return removed;
}

std::vector<double> WorkList::upsilons() const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const auto &entry : records_)
    out.push_back(entry.first);
  return out;
}

void SolveOptions::validate() const {
  if (!(eps > 0) || !std::isfinite(eps))
    throw std::invalid_argument("eps must be positive");
  if (max_iters < 0)
    throw std::invalid_argument("max_iters must be nonnegative");
  if (!(time_limit >= 0))
    throw std::invalid_argument("time_limit must be nonnegative");
  if (clean_period < 0)
    throw std::invalid_argument("clean_period must be nonnegative");
  encl.validate();
}

namespace {

std::pair<IntervalD, IntervalD> halves(const IntervalD &v) {
  const double m = mid(v);
  return {IntervalD(v.lo(), m), IntervalD(m, v.hi())};
}

void require_square(const IntervalMatrix &q, const IntervalVector &r) {
  if (q.rows() != q.cols() || r.size() != q.rows())
    throw std::invalid_argument("dimension mismatch: system must be square with matching rhs");
}

// Visits the parameters of a symmetric system in tie-break order: the upper
// triangle row by row, then the right-hand side.
template <typename F> void for_each_element(const IntervalMatrix &q, const IntervalVector &r, F f) {
  for (Index k = 0; k < q.rows(); ++k)
    for (Index l = k; l < q.cols(); ++l)
      f(ElementId::matrix(k, l), q(k, l));
  for (Index k = 0; k < r.size(); ++k)
    f(ElementId::rhs(k), r(k));
}

template <typename Score>
std::optional<ElementId> select_max(const IntervalMatrix &q, const IntervalVector &r,
                                    double min_width, Score score) {
  std::optional<ElementId> best;
  double best_score = -1;
  for_each_element(q, r, [&](const ElementId &id, const IntervalD &e) {
    const double w = wid(e);
    if (!(w > min_width))
      return;
    const double s = score(id, w);
    if (s > best_score) {
      best_score = s;
      best = id;
    }
  });
  return best;
}

double max_split_width(const IntervalMatrix &q, const IntervalVector &r) {
  return std::max(max_width(q), max_width(r));
}

} // namespace

std::pair<IntervalMatrix, IntervalMatrix> subdivide_matrix(const IntervalMatrix &q, Index k,
                                                           Index l) {
  if (k < 0 || l < 0 || k >= q.rows() || l >= q.cols())
    throw std::out_of_range("subdivide_matrix: index out of range");
  if (q(k, l).is_point())
    throw std::invalid_argument("subdivide_matrix: element is degenerate");
  const auto [left, right] = halves(q(k, l));
  std::pair<IntervalMatrix, IntervalMatrix> out{q, q};
  out.first(k, l) = out.first(l, k) = left;
  out.second(k, l) = out.second(l, k) = right;
  return out;
}

std::pair<IntervalVector, IntervalVector> subdivide_rhs(const IntervalVector &r, Index k,
                                                        RhsSplit how) {
  if (k < 0 || k >= r.size())
    throw std::out_of_range("subdivide_rhs: index out of range");
  if (r(k).is_point())
    throw std::invalid_argument("subdivide_rhs: component is degenerate");
  std::pair<IntervalVector, IntervalVector> out{r, r};
  if (how == RhsSplit::endpoints) {
    out.first(k) = IntervalD(r(k).lo());
    out.second(k) = IntervalD(r(k).hi());
  } else {
    std::tie(out.first(k), out.second(k)) = halves(r(k));
  }
  return out;
}

std::optional<ElementId> select_widest(const IntervalMatrix &q, const IntervalVector &r,
                                       double min_width) {
  return select_max(q, r, min_width, [](const ElementId &, double w) { return w; });
}

DerivativeEnclosures derivative_enclosures(const IntervalMatrix &y, const IntervalVector &x,
                                           Index nu) {
  const Index n = y.rows();
  if (y.cols() != n || x.size() != n)
    throw std::invalid_argument("dimension mismatch: derivative_enclosures");
  if (nu < 0 || nu >= n)
    throw std::out_of_range("derivative_enclosures: component out of range");
  return derivative_enclosures(IntervalVector(y.row(nu).transpose()), x);
}

DerivativeEnclosures derivative_enclosures(const IntervalVector &y_nu, const IntervalVector &x) {
  const Index n = y_nu.size();
  if (x.size() != n)
    throw std::invalid_argument("dimension mismatch: derivative_enclosures");
  DerivativeEnclosures d{IntervalMatrix(n, n), y_nu};
  for (Index k = 0; k < n; ++k) {
    d.matrix(k, k) = -(y_nu(k) * x(k));
    for (Index l = k + 1; l < n; ++l)
      d.matrix(k, l) = d.matrix(l, k) = -(y_nu(k) * x(l)) - y_nu(l) * x(k);
  }
  return d;
}

std::pair<IntervalMatrix, IntervalVector> monotonicity_squeeze(const IntervalMatrix &q,
                                                               const IntervalVector &r,
                                                               const DerivativeEnclosures &d) {
  require_square(q, r);
  std::pair<IntervalMatrix, IntervalVector> out{q, r};
  auto pin = [](const IntervalD &e, const IntervalD &deriv) {
    if (deriv.lo() >= 0)
      return IntervalD(e.lo());
    if (deriv.hi() <= 0)
      return IntervalD(e.hi());
    return e;
  };
  for_each_element(q, r, [&](const ElementId &id, const IntervalD &e) {
    if (e.is_point())
      return;
    const IntervalD pinned = pin(e, d.at(id));
    if (id.is_matrix())
      out.first(id.k, id.l) = out.first(id.l, id.k) = pinned;
    else
      out.second(id.k) = pinned;
  });
  return out;
}

std::optional<ElementId> select_max_impact(const IntervalMatrix &q, const IntervalVector &r,
                                           const DerivativeEnclosures &d, double min_width) {
  return select_max(q, r, min_width,
                    [&](const ElementId &id, double w) { return mag(d.at(id)) * w; });
}

std::optional<double> midpoint_upper_bound(const EnclosureMethod &method, const IntervalMatrix &q,
                                           const IntervalVector &r, Index nu) {
  try {
    const IntervalVector x = encl(method, to_interval(mid(q)), to_interval(mid(r)));
    return x(nu).hi();
  } catch (const EnclosureFailure &) {
    return std::nullopt;
  }
}

double update_upper_bound(WorkList &list, const EnclosureMethod &method,
                          const IntervalMatrix &q1, const IntervalVector &r1,
                          const IntervalMatrix &q2, const IntervalVector &r2, Index nu) {
  for (const auto &bound : {midpoint_upper_bound(method, q1, r1, nu),
                            midpoint_upper_bound(method, q2, r2, nu)})
    if (bound)
      list.lower_omega(*bound);
  return list.omega();
}

namespace {

using Clock = std::chrono::steady_clock;

Record evaluate(const EnclosureMethod &method, IntervalMatrix q, IntervalVector r, Index nu) {
  auto [x, y] = enclose_with_inverse_column(method, q, r, nu);
  const double lower = x(nu).lo();
  return {std::move(q), std::move(r), lower, std::move(y), std::move(x)};
}

// A child's solution set is part of its parent's, so the parent's bounds
// stay valid and can only tighten the child's.
Record make_child(const SolveOptions &opts, const Record &parent, IntervalMatrix q,
                  IntervalVector r, Index nu) {
  if (opts.reuse_parent)
    return {std::move(q), std::move(r), parent.upsilon, parent.y, parent.x};
  Record child = evaluate(opts.encl, std::move(q), std::move(r), nu);
  if (auto x = intersect(child.x, parent.x))
    child.x = std::move(*x);
  if (auto y = intersect(child.y, parent.y))
    child.y = std::move(*y);
  child.upsilon = std::max(child.x(nu).lo(), parent.upsilon);
  return child;
}

} // namespace

PpsResult pps_min(const IntervalMatrix &q, const IntervalVector &r, Index nu,
                  const SolveOptions &opts) {
  opts.validate();
  require_square(q, r);
  if (nu < 0 || nu >= q.rows())
    throw std::out_of_range("pps_min: component out of range");
  if (!is_symmetric(q))
    throw std::invalid_argument("pps_min: matrix is not symmetric");

  const auto start = Clock::now();
  const bool modified = opts.method == PpsMethod::modified;
  auto elapsed_s = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  PpsStats stats;
  WorkList list;
  list.insert(evaluate(opts.encl, q, r, nu));
  stats.peak_list = 1;
  long omega_decreases = 0;

  auto log = [&] {
    if (opts.trace)
      stats.trace.push_back({stats.iterations, list.leading().upsilon, list.omega(), list.size()});
  };
  log();

  while (true) {
    const Record &lead = list.leading();
    if (max_split_width(lead.q, lead.r) <= opts.eps) {
      stats.converged = true;
      break;
    }
    if (stats.iterations >= opts.max_iters || elapsed_s() >= opts.time_limit)
      break;
    ++stats.iterations;

    Record parent = list.pop_leading();
    IntervalMatrix pq = parent.q;
    IntervalVector pr = parent.r;
    std::optional<ElementId> pick;
    if (modified) {
      const auto d = derivative_enclosures(parent.y, parent.x);
      if (opts.squeeze)
        std::tie(pq, pr) = monotonicity_squeeze(pq, pr, d);
      pick = select_max_impact(pq, pr, d, opts.eps);
    } else {
      pick = select_widest(pq, pr, opts.eps);
    }

    std::vector<Record> children;
    if (!pick) {
      // Squeezing left nothing wide enough to split; keep the pinned system.
      if (const auto bound = midpoint_upper_bound(opts.encl, pq, pr, nu);
          bound && list.lower_omega(*bound))
        ++omega_decreases;
      children.push_back(make_child(opts, parent, std::move(pq), std::move(pr), nu));
    } else {
      IntervalMatrix q1 = pq, q2 = pq;
      IntervalVector r1 = pr, r2 = pr;
      if (pick->is_matrix())
        std::tie(q1, q2) = subdivide_matrix(pq, pick->k, pick->l);
      else
        std::tie(r1, r2) = subdivide_rhs(pr, pick->k, opts.rhs_split);
      const double before = list.omega();
      update_upper_bound(list, opts.encl, q1, r1, q2, r2, nu);
      if (list.omega() < before)
        ++omega_decreases;
      children.push_back(make_child(opts, parent, std::move(q1), std::move(r1), nu));
      children.push_back(make_child(opts, parent, std::move(q2), std::move(r2), nu));
    }

    // One child always holds the minimizer, so its bound is at most omega;
    // keeping the smallest guards against an empty list regardless.
    const bool prune = modified && !list.empty();
    std::sort(children.begin(), children.end(),
              [](const Record &a, const Record &b) { return a.upsilon < b.upsilon; });
    for (std::size_t i = 0; i < children.size(); ++i)
      if (!prune || i == 0 || children[i].upsilon <= list.omega())
        list.insert(std::move(children[i]));

    if (modified && opts.clean_period > 0 && omega_decreases > 0 &&
        omega_decreases % opts.clean_period == 0) {
      list.clean();
      omega_decreases = 0;
    }
    stats.peak_list = std::max(stats.peak_list, list.size());
    log();
  }

  const Record &last = list.leading();
  if (const auto bound = midpoint_upper_bound(opts.encl, last.q, last.r, nu))
    list.lower_omega(*bound);
  const double z = last.upsilon;
  stats.omega = list.omega();
  stats.gap = stats.omega - z;
  stats.wall_ms = elapsed_s() * 1e3;
  return {z, std::move(stats)};
}

PpsResult pps_max(const IntervalMatrix &q, const IntervalVector &r, Index nu,
                  const SolveOptions &opts) {
  PpsResult res = pps_min(q, IntervalVector(-r), nu, opts);
  res.value = -res.value;
  res.stats.omega = -res.stats.omega;
  return res;
}

bool IlsqReport::converged() const {
  for (const auto &c : components)
    for (const auto *side : {&c.lower, &c.upper})
      if (*side && !(*side)->stats.converged)
        return false;
  return true;
}

IlsqReport ilsq_pps(const LsqProblem &p, const IlsqOptions &opts) {
  p.validate();
  opts.solve.validate();

  IlsqReport report;
  if (!opts.skip_rank_check) {
    report.rank = check_full_rank(p.a);
    if (!report.rank->certified())
      throw RankCertificationFailure(*report.rank);
  }

  const ExtendedSystem sys = build_extended(p);
  std::vector<Index> comps = opts.components;
  if (comps.empty())
    for (Index j = 0; j < p.cols(); ++j)
      comps.push_back(j);
  for (const Index j : comps)
    if (j < 0 || j >= p.cols())
      throw std::out_of_range("ilsq_pps: component out of range");

  report.box = project_x(encl(opts.solve.encl, sys.matrix, sys.rhs), sys);

  const bool want_min = opts.bounds != BoundSide::max;
  const bool want_max = opts.bounds != BoundSide::min;
  const auto start = Clock::now();
  std::size_t remaining = comps.size() * ((want_min ? 1 : 0) + (want_max ? 1 : 0));

  // Unused budget rolls over to the bounds that follow.
  auto next_options = [&] {
    SolveOptions o = opts.solve;
    if (std::isfinite(o.time_limit)) {
      const double used = std::chrono::duration<double>(Clock::now() - start).count();
      o.time_limit = std::max(0.0, o.time_limit - used) / static_cast<double>(remaining);
    }
    --remaining;
    return o;
  };

  for (const Index j : comps) {
    ComponentReport c;
    c.component = j;
    const Index nu = sys.x_index(j);
    double lo = report.box(j).lo();
    double hi = report.box(j).hi();
    if (want_min) {
      c.lower = pps_min(sys.matrix, sys.rhs, nu, next_options());
      lo = std::max(lo, c.lower->value);
    }
    if (want_max) {
      c.upper = pps_max(sys.matrix, sys.rhs, nu, next_options());
      hi = std::min(hi, c.upper->value);
    }
    report.box(j) = IntervalD(lo, hi);
    report.components.push_back(std::move(c));
  }
  return report;
}

} // namespace ilsq
