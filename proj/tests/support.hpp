#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ilsq/augment.hpp"
#include "ilsq/interval_matrix.hpp"
#include "ilsq/rank_check.hpp"

namespace ilsq::test {

using Rational = boost::multiprecision::cpp_rational;

inline std::filesystem::path fixture(const std::string &name) {
  return std::filesystem::path(ILSQ_FIXTURE_DIR) / name;
}

inline Rational exact(double v) { return Rational(v); }

/// Exact solution of a nonsingular point system by rational elimination.
inline std::vector<Rational> exact_solve(const RealMatrix &q, const RealVector &r) {
  const auto n = static_cast<std::size_t>(q.rows());
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      a[i][j] = exact(q(static_cast<Index>(i), static_cast<Index>(j)));
    a[i][n] = exact(r(static_cast<Index>(i)));
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0)
      ++p;
    if (p == n)
      throw std::domain_error("exact_solve: singular");
    std::swap(a[p], a[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0)
        continue;
      const Rational f = a[i][c] / a[c][c];
      for (std::size_t j = c; j <= n; ++j)
        a[i][j] -= f * a[c][j];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = a[i][n] / a[i][i];
  return x;
}

/// Number of nextafter steps from a to b.
inline std::int64_t ulp_distance(double a, double b) {
  if (a == b)
    return 0;
  if (a > b)
    std::swap(a, b);
  std::int64_t steps = 0;
  while (a < b && steps < 1'000'000) {
    a = std::nextafter(a, b);
    ++steps;
  }
  return steps;
}

class Random {
public:
  explicit Random(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::mt19937_64 &engine() { return rng_; }

  IntervalD interval(double centre_lo, double centre_hi, double rad_lo, double rad_hi) {
    const double c = uniform(centre_lo, centre_hi);
    const double r = uniform(rad_lo, rad_hi);
    return IntervalD(c - r, c + r);
  }

  double point_in(const IntervalD &v) { return v.is_point() ? v.lo() : uniform(v.lo(), v.hi()); }

  RealMatrix member(const IntervalMatrix &m) {
    RealMatrix out(m.rows(), m.cols());
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j)
        out(i, j) = point_in(m(i, j));
    return out;
  }
  RealVector member(const IntervalVector &v) {
    RealVector out(v.size());
    for (Index i = 0; i < v.size(); ++i)
      out(i) = point_in(v(i));
    return out;
  }
  /// Symmetric member of a symmetric interval matrix.
  RealMatrix symmetric_member(const IntervalMatrix &m) {
    RealMatrix out(m.rows(), m.cols());
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = i; j < m.cols(); ++j)
        out(i, j) = out(j, i) = point_in(m(i, j));
    return out;
  }

  /// Diagonally dominant symmetric interval matrix with radii in [0, max_rad].
  IntervalMatrix symmetric_system(Index n, double max_rad) {
    IntervalMatrix q(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i; j < n; ++j) {
        const double dn = static_cast<double>(n);
        const double c =
            i == j ? uniform(3 * dn, 4 * dn) * (integer(0, 1) ? 1 : -1) : uniform(-1, 1);
        const double r = uniform(0, max_rad);
        q(i, j) = q(j, i) = IntervalD(c - r, c + r);
      }
    return q;
  }

  IntervalVector rhs(Index n, double max_rad) {
    IntervalVector r(n);
    for (Index i = 0; i < n; ++i)
      r(i) = interval(-2, 2, 0, max_rad);
    return r;
  }

  /// Random least squares problem whose full rank is certified.
  LsqProblem lsq_problem(Index m, Index n, double max_rad) {
    while (true) {
      LsqProblem p;
      p.a.resize(m, n);
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j)
          p.a(i, j) = interval(-3, 3, 0, max_rad);
      p.b = rhs(m, max_rad);
      try {
        if (check_full_rank(p.a).certified())
          return p;
      } catch (const RankDeficientMidpoint &) {
      }
    }
  }

private:
  std::mt19937_64 rng_;
};

} // namespace ilsq::test
