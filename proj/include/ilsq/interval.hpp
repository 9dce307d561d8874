#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <Eigen/Core>

namespace ilsq {

/// Thrown when an interval division has a divisor that contains zero.
class ZeroDivisor : public std::domain_error {
public:
  ZeroDivisor() : std::domain_error("zero divisor interval") {}
};

namespace detail {

template <std::floating_point T> struct Bracket {
  T lo;
  T hi;
};

template <std::floating_point T> inline T round_down(T x) {
  return std::nextafter(x, -std::numeric_limits<T>::infinity());
}

template <std::floating_point T> inline T round_up(T x) {
  return std::nextafter(x, std::numeric_limits<T>::infinity());
}

template <std::floating_point T> inline void check_finite(T x) {
  if (!std::isfinite(x))
    throw std::overflow_error("interval endpoint overflow");
}

// Below this magnitude the fma residual of a product or quotient may itself
// underflow, so the sign test is no longer exact and we fall back to nudging.
template <std::floating_point T> constexpr T eft_safe_min() {
  return std::numeric_limits<T>::min() *
         static_cast<T>(std::uint64_t{1} << (std::numeric_limits<T>::digits / 2)) *
         static_cast<T>(std::uint64_t{1} << (std::numeric_limits<T>::digits -
                                             std::numeric_limits<T>::digits / 2));
}

// The brackets below return the tightest pair of representable numbers
// enclosing the exact result. Rounding direction is recovered from the
// error-free transformations (TwoSum, fma residual), so no FPU mode switch
// is needed.

template <std::floating_point T> inline Bracket<T> sum(T a, T b) {
  const T s = a + b;
  check_finite(s);
  const T bb = s - a;
  const T err = (a - (s - bb)) + (b - bb);
  return {err < 0 ? round_down(s) : s, err > 0 ? round_up(s) : s};
}

template <std::floating_point T> inline Bracket<T> product(T a, T b) {
  if (a == 0 || b == 0)
    return {T(0), T(0)};
  const T p = a * b;
  check_finite(p);
  if (std::abs(p) < eft_safe_min<T>())
    return {round_down(p), round_up(p)};
  const T err = std::fma(a, b, -p);
  return {err < 0 ? round_down(p) : p, err > 0 ? round_up(p) : p};
}

template <std::floating_point T> inline Bracket<T> quotient(T a, T b) {
  if (a == 0)
    return {T(0), T(0)};
  const T q = a / b;
  check_finite(q);
  if (std::abs(q) < eft_safe_min<T>() || std::abs(a) < eft_safe_min<T>())
    return {round_down(q), round_up(q)};
  // a - q*b is exact; the true quotient is q + rem/b.
  const T rem = std::fma(-q, b, a);
  const T err = (b > 0) ? rem : -rem;
  return {err < 0 ? round_down(q) : q, err > 0 ? round_up(q) : q};
}

} // namespace detail

/// Closed bounded interval [lo, hi] with finite endpoints. Degenerate
/// intervals (lo == hi) stand for point values, and implicit conversion from
/// a scalar yields one, so an `Interval` can be used as an Eigen scalar.
template <std::floating_point T> class Interval {
public:
  using value_type = T;

  constexpr Interval() = default;
  constexpr Interval(T value) : lo_(value), hi_(value) {} // NOLINT
  Interval(T lo, T hi) : lo_(lo), hi_(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("interval endpoints must be finite");
    if (!(lo <= hi))
      throw std::invalid_argument("interval lower endpoint exceeds upper endpoint");
  }

  constexpr T lo() const { return lo_; }
  constexpr T hi() const { return hi_; }

  Interval &operator+=(const Interval &o) { return *this = *this + o; }
  Interval &operator-=(const Interval &o) { return *this = *this - o; }
  Interval &operator*=(const Interval &o) { return *this = *this * o; }
  Interval &operator/=(const Interval &o) { return *this = *this / o; }

  friend Interval operator-(const Interval &a) { return raw(-a.hi_, -a.lo_); }

  friend Interval operator+(const Interval &a, const Interval &b) {
    return raw(detail::sum(a.lo_, b.lo_).lo, detail::sum(a.hi_, b.hi_).hi);
  }

  friend Interval operator-(const Interval &a, const Interval &b) {
    return raw(detail::sum(a.lo_, -b.hi_).lo, detail::sum(a.hi_, -b.lo_).hi);
  }

  friend Interval operator*(const Interval &a, const Interval &b) {
    if (a.is_point())
      return scale(a.lo_, b);
    if (b.is_point())
      return scale(b.lo_, a);
    const auto p1 = detail::product(a.lo_, b.lo_);
    const auto p2 = detail::product(a.lo_, b.hi_);
    const auto p3 = detail::product(a.hi_, b.lo_);
    const auto p4 = detail::product(a.hi_, b.hi_);
    return raw(std::min({p1.lo, p2.lo, p3.lo, p4.lo}),
               std::max({p1.hi, p2.hi, p3.hi, p4.hi}));
  }

  friend Interval operator/(const Interval &a, const Interval &b) {
    if (b.lo_ <= 0 && b.hi_ >= 0)
      throw ZeroDivisor();
    const auto q1 = detail::quotient(a.lo_, b.lo_);
    const auto q2 = detail::quotient(a.lo_, b.hi_);
    const auto q3 = detail::quotient(a.hi_, b.lo_);
    const auto q4 = detail::quotient(a.hi_, b.hi_);
    return raw(std::min({q1.lo, q2.lo, q3.lo, q4.lo}),
               std::max({q1.hi, q2.hi, q3.hi, q4.hi}));
  }

  friend bool operator==(const Interval &a, const Interval &b) = default;

  bool is_point() const { return lo_ == hi_; }

  /// Builds an interval from endpoints already known to satisfy the
  /// invariants; skips validation in hot loops.
  static Interval raw(T lo, T hi) {
    Interval v;
    v.lo_ = lo;
    v.hi_ = hi;
    return v;
  }

private:
  static Interval scale(T s, const Interval &v) {
    const auto p1 = detail::product(s, v.lo_);
    const auto p2 = detail::product(s, v.hi_);
    return raw(std::min(p1.lo, p2.lo), std::max(p1.hi, p2.hi));
  }

  T lo_{0};
  T hi_{0};
};

using IntervalD = Interval<double>;

template <std::floating_point T> T mid(const Interval<T> &x) {
  if (x.is_point())
    return x.lo();
  const T m = x.lo() / 2 + x.hi() / 2;
  return std::clamp(m, x.lo(), x.hi());
}

template <std::floating_point T> T rad(const Interval<T> &x) {
  return (x.hi() - x.lo()) / 2;
}

template <std::floating_point T> T wid(const Interval<T> &x) {
  return x.hi() - x.lo();
}

/// Upper bound on the width, for decisions that must not undercount it.
template <std::floating_point T> T wid_up(const Interval<T> &x) {
  return detail::sum(x.hi(), -x.lo()).hi;
}

template <std::floating_point T> T mag(const Interval<T> &x) {
  return std::max(std::abs(x.lo()), std::abs(x.hi()));
}

/// Mignitude: smallest absolute value over the interval.
template <std::floating_point T> T mig(const Interval<T> &x) {
  if (x.lo() <= 0 && x.hi() >= 0)
    return T(0);
  return std::min(std::abs(x.lo()), std::abs(x.hi()));
}

template <std::floating_point T> bool contains(const Interval<T> &x, T v) {
  return x.lo() <= v && v <= x.hi();
}

template <std::floating_point T>
bool contains(const Interval<T> &outer, const Interval<T> &inner) {
  return outer.lo() <= inner.lo() && inner.hi() <= outer.hi();
}

/// True when zero lies in the interior of x.
template <std::floating_point T> bool interior_contains_zero(const Interval<T> &x) {
  return x.lo() < 0 && 0 < x.hi();
}

template <std::floating_point T>
Interval<T> hull(const Interval<T> &a, const Interval<T> &b) {
  return Interval<T>::raw(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

/// Intersection; nullopt when the intervals are disjoint.
template <std::floating_point T>
std::optional<Interval<T>> intersect(const Interval<T> &a, const Interval<T> &b) {
  const T lo = std::max(a.lo(), b.lo());
  const T hi = std::min(a.hi(), b.hi());
  if (lo > hi)
    return std::nullopt;
  return Interval<T>::raw(lo, hi);
}

/// Converts to another floating type, rounding each endpoint outward.
template <std::floating_point To, std::floating_point From>
Interval<To> outward_cast(const Interval<From> &x) {
  To lo = static_cast<To>(x.lo());
  To hi = static_cast<To>(x.hi());
  if (static_cast<From>(lo) > x.lo())
    lo = detail::round_down(lo);
  if (static_cast<From>(hi) < x.hi())
    hi = detail::round_up(hi);
  detail::check_finite(lo);
  detail::check_finite(hi);
  return Interval<To>::raw(lo, hi);
}

template <std::floating_point T>
std::ostream &operator<<(std::ostream &os, const Interval<T> &x) {
  return os << '[' << x.lo() << ", " << x.hi() << ']';
}

} // namespace ilsq

namespace Eigen {

template <typename T>
struct NumTraits<ilsq::Interval<T>> : GenericNumTraits<ilsq::Interval<T>> {
  using Real = ilsq::Interval<T>;
  using NonInteger = ilsq::Interval<T>;
  using Literal = ilsq::Interval<T>;
  using Nested = ilsq::Interval<T>;

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 8,
    MulCost = 24
  };

  static inline Real epsilon() { return Real(std::numeric_limits<T>::epsilon()); }
  static inline Real dummy_precision() { return Real(T(1e-12)); }
  static inline Real highest() { return Real(std::numeric_limits<T>::max()); }
  static inline Real lowest() { return Real(std::numeric_limits<T>::lowest()); }
  static inline int digits10() { return std::numeric_limits<T>::digits10; }
};

} // namespace Eigen
