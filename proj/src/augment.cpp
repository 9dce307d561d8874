#include "ilsq/augment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

#include "ilsq/point_numerics.hpp"

namespace ilsq {

void LsqProblem::validate() const {
  if (a.cols() < 1)
    throw std::invalid_argument("problem: need at least one unknown");
  if (a.rows() < a.cols())
    throw std::invalid_argument("problem: need at least as many rows as columns (m >= n)");
  if (b.size() != a.rows())
    throw std::invalid_argument("dimension mismatch: right-hand side length differs from m");
}

ExtendedSystem build_extended(const LsqProblem &p) {
  p.validate();
  const Index m = p.rows();
  const Index n = p.cols();
  ExtendedSystem sys;
  sys.m = m;
  sys.n = n;
  sys.matrix = IntervalMatrix::Zero(m + n, m + n);
  sys.matrix.topLeftCorner(m, m) = IntervalMatrix::Identity(m, m);
  sys.matrix.topRightCorner(m, n) = p.a;
  sys.matrix.bottomLeftCorner(n, m) = p.a.transpose();
  sys.rhs = IntervalVector::Zero(m + n);
  sys.rhs.head(m) = p.b;
  return sys;
}

IntervalVector project_x(const IntervalVector &box, const ExtendedSystem &sys) {
  if (box.size() != sys.m + sys.n)
    throw std::invalid_argument("dimension mismatch: project_x box length");
  return box.tail(sys.n);
}

RealVector lsq_solution(const RealMatrix &a, const RealVector &b) {
  const RealMatrix at = a.transpose();
  return solve(RealMatrix(at * a), RealVector(at * b));
}

namespace {

struct Parameter {
  Index row;
  Index col;
  double lo;
  double hi;
};

std::vector<Parameter> matrix_parameters(const IntervalMatrix &a) {
  std::vector<Parameter> out;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (!a(i, j).is_point())
        out.push_back({i, j, a(i, j).lo(), a(i, j).hi()});
  return out;
}

class HullAccumulator {
public:
  explicit HullAccumulator(Index n)
      : lo_(RealVector::Constant(n, std::numeric_limits<double>::infinity())),
        hi_(RealVector::Constant(n, -std::numeric_limits<double>::infinity())) {}

  void add(const RealVector &x) {
    lo_ = lo_.cwiseMin(x);
    hi_ = hi_.cwiseMax(x);
    ++count_;
  }

  std::size_t count() const { return count_; }
  IntervalVector box() const {
    if (count_ == 0)
      throw std::runtime_error("oracle: no nonsingular member found");
    return from_bounds(lo_, hi_);
  }

private:
  RealVector lo_;
  RealVector hi_;
  std::size_t count_ = 0;
};

// For a fixed A the solution is P b with P = A^+, linear in b, so each
// component's extremes over the right-hand side box sit at a corner chosen
// by the signs of the corresponding row of P.
class CornerEvaluator {
public:
  CornerEvaluator(const LsqProblem &p, std::vector<Parameter> params)
      : base_(mid(p.a)), b_lo_(lower(p.b)), b_hi_(upper(p.b)), params_(std::move(params)) {}

  const std::vector<Parameter> &params() const { return params_; }

  RealMatrix matrix_at(const RealVector &values) const {
    RealMatrix a = base_;
    for (std::size_t k = 0; k < params_.size(); ++k)
      a(params_[k].row, params_[k].col) = values(static_cast<Index>(k));
    return a;
  }

  /// Extreme solution for component nu; direction +1 minimizes, -1 maximizes.
  std::optional<RealVector> extreme(const RealMatrix &pinv, Index nu, int direction) const {
    RealVector b(b_lo_.size());
    for (Index i = 0; i < b.size(); ++i) {
      const bool take_lo = (direction * pinv(nu, i)) > 0;
      b(i) = take_lo ? b_lo_(i) : b_hi_(i);
    }
    return RealVector(pinv * b);
  }

  std::optional<RealMatrix> pinv_at(const RealVector &values) const {
    try {
      return pseudoinverse(matrix_at(values));
    } catch (const std::domain_error &) {
      return std::nullopt;
    }
  }

private:
  RealMatrix base_;
  RealVector b_lo_;
  RealVector b_hi_;
  std::vector<Parameter> params_;
};

void polish(const CornerEvaluator &eval, const RealVector &start, Index nu, int direction,
            int grid, HullAccumulator &acc) {
  const auto &params = eval.params();
  const Index p = static_cast<Index>(params.size());
  if (p == 0)
    return;

  auto objective = [&](const RealVector &values, double &out) {
    const auto pinv = eval.pinv_at(values);
    if (!pinv)
      return false;
    const auto x = eval.extreme(*pinv, nu, direction);
    acc.add(*x);
    out = direction * (*x)(nu);
    return true;
  };

  RealVector current = start;
  double best = 0;
  if (!objective(current, best))
    return;
  RealVector step(p);
  for (Index k = 0; k < p; ++k)
    step(k) = (params[k].hi - params[k].lo) / std::max(2, grid);

  constexpr int kMaxEvaluations = 20000;
  int evaluations = 0;
  while (evaluations < kMaxEvaluations) {
    bool improved = false;
    for (Index k = 0; k < p && evaluations < kMaxEvaluations; ++k) {
      for (const double sign : {1.0, -1.0}) {
        RealVector trial = current;
        trial(k) = std::clamp(current(k) + sign * step(k), params[k].lo, params[k].hi);
        if (trial(k) == current(k))
          continue;
        double value = 0;
        ++evaluations;
        if (objective(trial, value) && value < best) {
          best = value;
          current = trial;
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      step *= 0.5;
      bool done = true;
      for (Index k = 0; k < p; ++k)
        if (step(k) > 1e-13 * (1.0 + std::abs(params[k].hi) + std::abs(params[k].lo)))
          done = false;
      if (done)
        break;
    }
  }
}

} // namespace

std::vector<RealVector> sample_lsq(const LsqProblem &p, std::size_t count, std::uint64_t seed) {
  p.validate();
  constexpr int kMaxRetries = 1000;
  std::mt19937_64 rng(seed);
  const RealMatrix a_lo = lower(p.a);
  const RealMatrix a_hi = upper(p.a);
  const RealVector b_lo = lower(p.b);
  const RealVector b_hi = upper(p.b);

  auto draw = [&rng](double lo, double hi) {
    if (lo == hi)
      return lo;
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng);
  };

  std::vector<RealVector> out;
  out.reserve(count);
  RealMatrix a(p.rows(), p.cols());
  RealVector b(p.rows());
  for (std::size_t s = 0; s < count; ++s) {
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxRetries)
        throw std::runtime_error("sample_lsq: too many singular draws");
      for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
          a(i, j) = draw(a_lo(i, j), a_hi(i, j));
      for (Index i = 0; i < b.size(); ++i)
        b(i) = draw(b_lo(i), b_hi(i));
      try {
        out.push_back(lsq_solution(a, b));
        break;
      } catch (const SingularSystem &) {
      }
    }
  }
  return out;
}

OracleResult corner_lsq_hull(const LsqProblem &p, const OracleOptions &options) {
  p.validate();
  if (options.grid < 2)
    throw std::invalid_argument("oracle: grid density must be at least 2");

  auto params = matrix_parameters(p.a);
  int rhs_params = 0;
  for (Index i = 0; i < p.b.size(); ++i)
    rhs_params += p.b(i).is_point() ? 0 : 1;
  if (static_cast<int>(params.size()) + rhs_params > options.max_parameters)
    throw std::length_error("oracle: too many interval parameters for brute force");

  const Index np = static_cast<Index>(params.size());
  int grid = options.grid;
  auto total = [&](int g) {
    double t = 1;
    for (Index k = 0; k < np; ++k)
      t *= g;
    return t;
  };
  while (grid > 2 && total(grid) > static_cast<double>(options.max_points))
    --grid;

  const CornerEvaluator eval(p, params);
  const Index n = p.cols();
  HullAccumulator acc(n);

  // Best grid point per (component, direction), used to seed polishing.
  std::vector<RealVector> best_at(2 * n);
  std::vector<double> best_value(2 * n, std::numeric_limits<double>::infinity());

  std::vector<int> counter(params.size(), 0);
  RealVector values(np);
  while (true) {
    for (Index k = 0; k < np; ++k) {
      const auto &par = params[k];
      const double t = static_cast<double>(counter[k]) / (grid - 1);
      values(k) = counter[k] == grid - 1 ? par.hi : par.lo + t * (par.hi - par.lo);
    }
    if (const auto pinv = eval.pinv_at(values)) {
      for (Index nu = 0; nu < n; ++nu)
        for (const int direction : {1, -1}) {
          const auto x = eval.extreme(*pinv, nu, direction);
          acc.add(*x);
          const std::size_t slot = 2 * nu + (direction > 0 ? 0 : 1);
          const double v = direction * (*x)(nu);
          if (v < best_value[slot]) {
            best_value[slot] = v;
            best_at[slot] = values;
          }
        }
    }
    Index k = 0;
    while (k < np && ++counter[k] == grid) {
      counter[k] = 0;
      ++k;
    }
    if (k == np)
      break;
  }

  if (options.polish)
    for (Index nu = 0; nu < n; ++nu)
      for (const int direction : {1, -1}) {
        const std::size_t slot = 2 * nu + (direction > 0 ? 0 : 1);
        if (best_at[slot].size() == np)
          polish(eval, best_at[slot], nu, direction, grid, acc);
      }

  return {acc.box(), grid, acc.count()};
}

LsqProblem gen_toft(const ToftParams &t) {
  if (t.n < 2)
    throw std::invalid_argument("toft: n must be at least 2");
  if (t.extra_rows < 0 || t.extra_rows > t.n)
    throw std::invalid_argument("toft: extra_rows must lie in [0, n]");
  if (t.r < 0 || t.s < 0 || t.big_r < 0)
    throw std::invalid_argument("toft: radii must be nonnegative");

  const Index n = t.n;
  const Index m = n + t.extra_rows;
  auto around = [](double centre, double radius) {
    return IntervalD((IntervalD(centre) - IntervalD(radius)).lo(),
                     (IntervalD(centre) + IntervalD(radius)).hi());
  };

  LsqProblem p;
  p.name = "toft";
  p.a = IntervalMatrix::Zero(m, n);
  for (Index i = 0; i + 1 < n; ++i) {
    p.a(i, i) = around(1.0, t.r);
    p.a(i, n - 1) = around(static_cast<double>(i + 1), t.r);
    p.a(n - 1, i) = around(static_cast<double>(i + 1), t.r);
  }
  p.a(n - 1, n - 1) = around(static_cast<double>(n), t.r);
  for (Index k = 0; k < t.extra_rows; ++k) {
    const Index row = n + k;
    p.a(row, k) = around(t.theta, t.s);
    for (Index j = 0; j < k; ++j)
      p.a(row, j) = IntervalD(0.0, t.s);
  }
  p.b = IntervalVector::Constant(m, around(1.0, t.big_r));
  return p;
}

namespace {

IntervalD iv(double lo, double hi) { return IntervalD(lo, hi); }

LsqProblem make(std::string name, IntervalMatrix a, IntervalVector b) {
  LsqProblem p{std::move(a), std::move(b), std::move(name)};
  p.validate();
  return p;
}

} // namespace

LsqProblem named_problem(std::string_view family) {
  if (family == "example1") {
    IntervalMatrix a(3, 2);
    a << iv(0, 10), 2, -1, 3, 3, -2;
    IntervalVector b(3);
    b << 10, -20, 0;
    return make("example1", a, b);
  }
  if (family == "example2" || family == "gay") {
    IntervalMatrix a(6, 2);
    a << iv(0.75, 1.25), 1, iv(1.75, 2.25), 1, iv(4.75, 5.25), 1, iv(5.75, 6.25), 1,
        iv(8.75, 9.25), 1, iv(9.75, 10.25), 1;
    IntervalVector b(6);
    b << iv(2.25, 2.75), iv(1.25, 1.75), iv(3.25, 3.75), iv(4.25, 4.75), iv(7.25, 7.75),
        iv(6.25, 6.75);
    return make("example2", a, b);
  }
  if (family == "example3" || family == "bentbib" || family == "rohn") {
    IntervalMatrix a(3, 2);
    a << iv(0.1, 0.3), iv(0.9, 1.1), iv(8.9, 9.1), iv(0.4, 0.6), iv(0.9, 1.1), iv(6.9, 7.1);
    IntervalVector b(3);
    if (family == "rohn") {
      b << iv(0.8, 1.2), iv(0.3, 0.7), iv(6.8, 7.2);
      return make("rohn", a, b);
    }
    b << iv(0.8, 1.2), iv(-0.2, 0.2), iv(1.8, 2.2);
    return make("example3", a, b);
  }
  if (family == "example4") {
    IntervalMatrix a(3, 2);
    a << iv(0, 2), 2, -1, iv(3, 5), 5, -2;
    IntervalVector b(3);
    b << -3, 5, 7;
    return make("example4", a, b);
  }
  if (family == "example5" || family == "sample_ils") {
    IntervalMatrix a(3, 2);
    a << iv(-13, -11), iv(-7, -5), iv(-3, -1), iv(1, 3), iv(5, 7), iv(11, 13);
    IntervalVector b(3);
    b << iv(-1, 0), iv(0, 1), iv(-1, 1);
    return make("example5", a, b);
  }
  if (family == "toft" || family == "example6") {
    auto p = gen_toft({});
    p.name = "example6";
    return p;
  }
  throw std::invalid_argument("unknown problem family: " + std::string(family));
}

std::vector<std::string> problem_families() {
  return {"example1", "example2", "example3", "rohn", "example4", "example5", "toft"};
}

} // namespace ilsq
