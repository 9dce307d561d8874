#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ilsq/interval_matrix.hpp"

namespace ilsq {

/// Interval least squares problem: minimize ||Ax - b|| over A in A, b in b.
struct LsqProblem {
  IntervalMatrix a;
  IntervalVector b;
  std::string name;

  Index rows() const { return a.rows(); }
  Index cols() const { return a.cols(); }

  /// Throws std::invalid_argument unless m >= n >= 1 and b has m entries.
  void validate() const;
};

/// The bordered symmetric system
///
///   [ I   A ] [y]   [b]
///   [ A^T 0 ] [x] = [0]
///
/// whose x-part solution set is the least squares solution set of (A, b).
/// Entry (i, m + j) and its mirror (m + j, i) are one parameter.
struct ExtendedSystem {
  IntervalMatrix matrix;
  IntervalVector rhs;
  Index m = 0;
  Index n = 0;

  Index x_index(Index j) const { return m + j; }
};

ExtendedSystem build_extended(const LsqProblem &p);

/// Components m .. m+n-1 of an enclosure of the extended system.
IntervalVector project_x(const IntervalVector &box, const ExtendedSystem &sys);

/// Point least squares solution through the normal equations.
RealVector lsq_solution(const RealMatrix &a, const RealVector &b);

/// Least squares solutions of `count` uniformly drawn members (A, b).
/// Deterministic for a fixed seed. Singular draws are redrawn a bounded
/// number of times.
std::vector<RealVector> sample_lsq(const LsqProblem &p, std::size_t count, std::uint64_t seed);

struct OracleOptions {
  /// Grid points per nondegenerate matrix entry (endpoints included).
  int grid = 64;
  /// Cap on grid points; the per-entry density is lowered to fit.
  std::size_t max_points = std::size_t{1} << 22;
  /// Refine each extreme with a box-constrained compass search.
  bool polish = false;
  /// Upper limit on interval parameters (matrix plus right-hand side).
  int max_parameters = 20;
};

struct OracleResult {
  IntervalVector hull;
  int grid_used = 0;
  std::size_t points = 0;
};

/// Inner approximation of the interval hull of the least squares solution
/// set: a grid over the matrix parameters, each paired with the right-hand
/// side corner that is extreme for every component and direction. Every
/// point it reports is an exact member of the set (up to rounding), so the
/// result is contained in the true hull.
OracleResult corner_lsq_hull(const LsqProblem &p, const OracleOptions &options = {});

struct ToftParams {
  Index n = 12;
  Index extra_rows = 3;
  double r = 0.1;
  double s = 0.05;
  double theta = 4.0;
  double big_r = 0.2;
};

/// Toft arrow-pattern system stacked over a lower-triangular band of
/// `extra_rows` rows; the defaults give the 15 x 12 benchmark.
LsqProblem gen_toft(const ToftParams &params);

/// Built-in benchmark systems: example1 .. example5 and rohn (example3 with
/// the alternative right-hand side).
LsqProblem named_problem(std::string_view family);
std::vector<std::string> problem_families();

} // namespace ilsq
