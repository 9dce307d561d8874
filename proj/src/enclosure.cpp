#include "ilsq/enclosure.hpp"

#include <algorithm>

#include "ilsq/point_numerics.hpp"

namespace ilsq {

void EnclosureMethod::validate() const {
  if (max_iters < 1)
    throw std::invalid_argument("enclosure method: max_iters must be at least 1");
  if (!(stop_tol > 0))
    throw std::invalid_argument("enclosure method: stop_tol must be positive");
}

namespace {

using Extended = Interval<long double>;

void check_shapes(const IntervalMatrix &q, Index rhs_rows) {
  if (q.rows() != q.cols())
    throw std::invalid_argument("dimension mismatch: enclosure needs a square matrix");
  if (q.rows() != rhs_rows)
    throw std::invalid_argument("dimension mismatch: enclosure right-hand side");
}

// r - Q*x for every member of (Q, r), accumulated in extended precision and
// rounded outward to double. For point data this keeps the residual
// enclosure far below one ulp of the solution.
IntervalMatrix residual(const IntervalMatrix &q, const IntervalMatrix &r, const RealMatrix &x) {
  IntervalMatrix out(r.rows(), r.cols());
  for (Index c = 0; c < r.cols(); ++c) {
    for (Index i = 0; i < q.rows(); ++i) {
      Extended acc = Extended::raw(r(i, c).lo(), r(i, c).hi());
      for (Index k = 0; k < q.cols(); ++k) {
        if (detail::is_zero(q(i, k)))
          continue;
        const Extended qik = Extended::raw(q(i, k).lo(), q(i, k).hi());
        acc -= qik * Extended(static_cast<long double>(x(k, c)));
      }
      out(i, c) = outward_cast<double>(acc);
    }
  }
  return out;
}

// One step of iterative refinement for the midpoint solution, with the
// residual formed in extended precision.
void refine(const RealMatrix &qm, const RealMatrix &rm, const RealMatrix &c, RealMatrix &x) {
  RealMatrix res(rm.rows(), rm.cols());
  for (Index col = 0; col < rm.cols(); ++col)
    for (Index i = 0; i < qm.rows(); ++i) {
      long double acc = rm(i, col);
      for (Index k = 0; k < qm.cols(); ++k)
        acc -= static_cast<long double>(qm(i, k)) * static_cast<long double>(x(k, col));
      res(i, col) = static_cast<double>(acc);
    }
  x += c * res;
}

double up(const IntervalD &v) { return v.hi(); }

IntervalMatrix krawczyk(const EnclosureMethod &method, const IntervalMatrix &q,
                        const IntervalMatrix &r) {
  const Index n = q.rows();
  const RealMatrix qm = mid(q);
  RealMatrix c;
  try {
    c = inverse(qm);
  } catch (const SingularSystem &) {
    throw EnclosureFailure("midpoint matrix is singular");
  }

  RealMatrix xt = c * mid(r);
  refine(qm, mid(r), c, xt);

  // x - xt = C (r - Q xt) + (I - C Q)(x - xt) for every solution x.
  const IntervalMatrix z = mul(c, residual(q, r, xt));
  IntervalMatrix g = mul(c, q);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      g(i, j) = IntervalD(i == j ? 1.0 : 0.0) - g(i, j);

  // Weighted max-norm contraction test: find u > 0 with |G| u <= theta u,
  // theta < 1. This proves rho(|G|) < 1, hence regularity of every member
  // of Q, and bounds |x - xt| <= beta u.
  const RealMatrix gm = mag(g);
  RealVector u;
  try {
    u = solve(RealMatrix(RealMatrix::Identity(n, n) - gm), RealVector::Ones(n).eval());
  } catch (const SingularSystem &) {
    throw EnclosureFailure("preconditioned matrix is not contracting");
  }
  if (!u.allFinite() || (u.array() <= 0).any())
    throw EnclosureFailure("preconditioned matrix is not contracting");

  double theta = 0;
  for (Index i = 0; i < n; ++i) {
    IntervalD acc(0.0);
    for (Index j = 0; j < n; ++j)
      acc += IntervalD(gm(i, j)) * IntervalD(u(j));
    theta = std::max(theta, up(acc / IntervalD(u(i))));
  }
  if (!(theta < 1))
    throw EnclosureFailure("preconditioned matrix is not contracting");
  const IntervalD slack = IntervalD(1.0) - IntervalD(theta);

  IntervalMatrix d(n, r.cols());
  for (Index col = 0; col < r.cols(); ++col) {
    double ratio = 0;
    for (Index i = 0; i < n; ++i)
      ratio = std::max(ratio, up(IntervalD(mag(z(i, col))) / IntervalD(u(i))));
    const double beta = up(IntervalD(ratio) / slack);
    for (Index i = 0; i < n; ++i) {
      const double half = up(IntervalD(beta) * IntervalD(u(i)));
      d(i, col) = IntervalD::raw(-half, half);
    }
  }

  for (int it = 0; it < method.max_iters; ++it) {
    const IntervalMatrix next = z + mul(g, d);
    double improvement = 0;
    bool disjoint = false;
    for (Index col = 0; col < d.cols() && !disjoint; ++col)
      for (Index i = 0; i < n; ++i) {
        const auto cut = intersect(next(i, col), d(i, col));
        if (!cut) {
          disjoint = true;
          break;
        }
        improvement = std::max(improvement, wid(d(i, col)) - wid(*cut));
      }
    if (disjoint)
      break;
    d = *intersect(next, d);
    if (improvement < method.stop_tol)
      break;
  }

  IntervalMatrix out(n, r.cols());
  for (Index col = 0; col < r.cols(); ++col)
    for (Index i = 0; i < n; ++i)
      out(i, col) = IntervalD(xt(i, col)) + d(i, col);
  return out;
}

IntervalMatrix interval_gauss(const IntervalMatrix &q, const IntervalMatrix &r) {
  const Index n = q.rows();
  IntervalMatrix a = q;
  IntervalMatrix b = r;
  for (Index k = 0; k < n; ++k) {
    Index pivot = k;
    double best = mig(a(k, k));
    for (Index i = k + 1; i < n; ++i) {
      const double cand = mig(a(i, k));
      if (cand > best) {
        best = cand;
        pivot = i;
      }
    }
    if (!(best > 0))
      throw EnclosureFailure("interval Gauss pivot contains zero");
    if (pivot != k) {
      a.row(k).swap(a.row(pivot));
      b.row(k).swap(b.row(pivot));
    }
    for (Index i = k + 1; i < n; ++i) {
      if (a(i, k) == IntervalD(0.0))
        continue;
      const IntervalD f = a(i, k) / a(k, k);
      for (Index j = k + 1; j < n; ++j)
        a(i, j) -= f * a(k, j);
      for (Index col = 0; col < b.cols(); ++col)
        b(i, col) -= f * b(k, col);
      a(i, k) = IntervalD(0.0);
    }
  }
  IntervalMatrix x(n, b.cols());
  for (Index col = 0; col < b.cols(); ++col)
    for (Index i = n - 1; i >= 0; --i) {
      IntervalD acc = b(i, col);
      for (Index j = i + 1; j < n; ++j)
        acc -= a(i, j) * x(j, col);
      x(i, col) = acc / a(i, i);
    }
  return x;
}

} // namespace

IntervalMatrix encl(const EnclosureMethod &method, const IntervalMatrix &q,
                    const IntervalMatrix &r) {
  method.validate();
  check_shapes(q, r.rows());
  if (q.rows() == 0)
    return IntervalMatrix(0, r.cols());
  switch (method.kind) {
  case EnclosureKind::krawczyk:
    return krawczyk(method, q, r);
  case EnclosureKind::interval_gauss:
    return interval_gauss(q, r);
  }
  throw std::logic_error("unknown enclosure method");
}

IntervalVector encl(const EnclosureMethod &method, const IntervalMatrix &q,
                    const IntervalVector &r) {
  return encl(method, q, IntervalMatrix(r)).col(0);
}

double upsilon(const EnclosureMethod &method, const IntervalMatrix &q, const IntervalVector &r,
               Index nu) {
  if (nu < 0 || nu >= q.rows())
    throw std::out_of_range("upsilon: component index out of range");
  return encl(method, q, r)(nu).lo();
}

IntervalMatrix inverse_interval_matrix(const EnclosureMethod &method, const IntervalMatrix &q) {
  const IntervalMatrix identity = IntervalMatrix::Identity(q.rows(), q.rows());
  return encl(method, q, identity);
}

SystemEnclosure enclose_with_inverse(const EnclosureMethod &method, const IntervalMatrix &q,
                                     const IntervalVector &r) {
  check_shapes(q, r.size());
  const Index n = q.rows();
  IntervalMatrix rhs(n, n + 1);
  rhs.col(0) = r;
  rhs.rightCols(n) = IntervalMatrix::Identity(n, n);
  const IntervalMatrix all = encl(method, q, rhs);
  return {all.col(0), all.rightCols(n)};
}

std::pair<IntervalVector, IntervalVector> enclose_with_inverse_column(const EnclosureMethod &method,
                                                                      const IntervalMatrix &q,
                                                                      const IntervalVector &r,
                                                                      Index nu) {
  check_shapes(q, r.size());
  const Index n = q.rows();
  if (nu < 0 || nu >= n)
    throw std::out_of_range("enclose_with_inverse_column: component out of range");
  IntervalMatrix rhs = IntervalMatrix::Zero(n, 2);
  rhs.col(0) = r;
  rhs(nu, 1) = IntervalD(1.0);
  const IntervalMatrix both = encl(method, q, rhs);
  return {both.col(0), both.col(1)};
}

} // namespace ilsq
