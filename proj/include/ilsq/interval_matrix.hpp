#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <Eigen/Core>

#include "ilsq/interval.hpp"

namespace ilsq {

template <std::floating_point T>
using IntervalMatrixT = Eigen::Matrix<Interval<T>, Eigen::Dynamic, Eigen::Dynamic>;
template <std::floating_point T>
using IntervalVectorT = Eigen::Matrix<Interval<T>, Eigen::Dynamic, 1>;

using IntervalMatrix = IntervalMatrixT<double>;
using IntervalVector = IntervalVectorT<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace detail {

template <typename S> struct interval_traits {
  static constexpr bool is_interval = false;
  using real = S;
};
template <typename T> struct interval_traits<Interval<T>> {
  static constexpr bool is_interval = true;
  using real = T;
};

template <typename Derived>
using real_of = typename interval_traits<typename Derived::Scalar>::real;

template <typename S> bool is_zero(const S &v) {
  if constexpr (interval_traits<S>::is_interval)
    return v.lo() == 0 && v.hi() == 0;
  else
    return v == 0;
}

inline void require(bool ok, const char *what) {
  if (!ok)
    throw std::invalid_argument(std::string("dimension mismatch: ") + what);
}

} // namespace detail

// Elementwise descriptors. Each returns a plain real matrix of the same shape.

template <typename Derived> auto mid(const Eigen::MatrixBase<Derived> &m) {
  using T = detail::real_of<Derived>;
  return m.unaryExpr([](const Interval<T> &v) { return mid(v); }).eval();
}

template <typename Derived> auto rad(const Eigen::MatrixBase<Derived> &m) {
  using T = detail::real_of<Derived>;
  return m.unaryExpr([](const Interval<T> &v) { return rad(v); }).eval();
}

template <typename Derived> auto wid(const Eigen::MatrixBase<Derived> &m) {
  using T = detail::real_of<Derived>;
  return m.unaryExpr([](const Interval<T> &v) { return wid(v); }).eval();
}

template <typename Derived> auto mag(const Eigen::MatrixBase<Derived> &m) {
  using T = detail::real_of<Derived>;
  return m.unaryExpr([](const Interval<T> &v) { return mag(v); }).eval();
}

template <typename Derived> auto lower(const Eigen::MatrixBase<Derived> &m) {
  using T = detail::real_of<Derived>;
  return m.unaryExpr([](const Interval<T> &v) { return v.lo(); }).eval();
}

template <typename Derived> auto upper(const Eigen::MatrixBase<Derived> &m) {
  using T = detail::real_of<Derived>;
  return m.unaryExpr([](const Interval<T> &v) { return v.hi(); }).eval();
}

/// Lifts a real matrix to degenerate intervals.
template <typename Derived> auto to_interval(const Eigen::MatrixBase<Derived> &m) {
  using T = typename Derived::Scalar;
  return m.unaryExpr([](T v) { return Interval<T>(v); }).eval();
}

/// Builds an interval matrix from endpoint matrices; throws when lo > hi.
template <typename DL, typename DH>
auto from_bounds(const Eigen::MatrixBase<DL> &lo, const Eigen::MatrixBase<DH> &hi) {
  using T = typename DL::Scalar;
  detail::require(lo.rows() == hi.rows() && lo.cols() == hi.cols(), "from_bounds");
  Eigen::Matrix<Interval<T>, DL::RowsAtCompileTime, DL::ColsAtCompileTime> out(lo.rows(),
                                                                               lo.cols());
  for (Index j = 0; j < lo.cols(); ++j)
    for (Index i = 0; i < lo.rows(); ++i)
      out(i, j) = Interval<T>(lo(i, j), hi(i, j));
  return out;
}

template <typename Derived> double max_width(const Eigen::MatrixBase<Derived> &m) {
  double w = 0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      w = std::max(w, static_cast<double>(wid(m(i, j))));
  return w;
}

template <typename Derived> bool is_degenerate(const Eigen::MatrixBase<Derived> &m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!m(i, j).is_point())
        return false;
  return true;
}

/// Exact elementwise symmetry, endpoints compared bit for bit.
template <typename Derived> bool is_symmetric(const Eigen::MatrixBase<Derived> &m) {
  if (m.rows() != m.cols())
    return false;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = i + 1; j < m.cols(); ++j)
      if (!(m(i, j) == m(j, i)))
        return false;
  return true;
}

/// Interval inner-product matrix multiply. Either factor may be real or
/// interval; every accumulation is outward rounded, so the result contains
/// every product of member matrices.
template <typename DA, typename DB>
auto mul(const Eigen::MatrixBase<DA> &a, const Eigen::MatrixBase<DB> &b) {
  using T = std::common_type_t<detail::real_of<DA>, detail::real_of<DB>>;
  detail::require(a.cols() == b.rows(), "mul");
  Eigen::Matrix<Interval<T>, DA::RowsAtCompileTime, DB::ColsAtCompileTime> out(a.rows(),
                                                                               b.cols());
  for (Index j = 0; j < b.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      Interval<T> acc(T(0));
      for (Index k = 0; k < a.cols(); ++k)
        if (!detail::is_zero(a(i, k)) && !detail::is_zero(b(k, j)))
          acc += Interval<T>(a(i, k)) * Interval<T>(b(k, j));
      out(i, j) = acc;
    }
  }
  return out;
}

template <typename DA, typename DB>
auto add(const Eigen::MatrixBase<DA> &a, const Eigen::MatrixBase<DB> &b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "add");
  return (a + b).eval();
}

template <typename DA, typename DB>
auto sub(const Eigen::MatrixBase<DA> &a, const Eigen::MatrixBase<DB> &b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "sub");
  return (a - b).eval();
}

/// Componentwise containment of a real vector or of another interval box.
template <typename DO, typename DI>
bool contains(const Eigen::MatrixBase<DO> &outer, const Eigen::MatrixBase<DI> &inner) {
  if (outer.rows() != inner.rows() || outer.cols() != inner.cols())
    return false;
  for (Index j = 0; j < outer.cols(); ++j)
    for (Index i = 0; i < outer.rows(); ++i)
      if (!contains(outer(i, j), inner(i, j)))
        return false;
  return true;
}

/// Elementwise intersection; nullopt if any pair is disjoint.
template <typename Derived>
std::optional<typename Derived::PlainObject> intersect(const Eigen::MatrixBase<Derived> &a,
                                                       const Eigen::MatrixBase<Derived> &b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "intersect");
  typename Derived::PlainObject out(a.rows(), a.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) {
      auto v = intersect(a(i, j), b(i, j));
      if (!v)
        return std::nullopt;
      out(i, j) = *v;
    }
  return out;
}

/// Interval hull of a nonempty set of points.
IntervalVector hull(std::span<const RealVector> points);

} // namespace ilsq
