#include "ilsq/point_numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace ilsq {

namespace {

Eigen::PartialPivLU<RealMatrix> factor(const RealMatrix &q) {
  if (q.rows() != q.cols())
    throw std::invalid_argument("dimension mismatch: solve requires a square matrix");
  if (!q.allFinite())
    throw std::invalid_argument("solve: non-finite matrix entry");
  const double scale = q.cwiseAbs().maxCoeff();
  if (q.size() == 0)
    return Eigen::PartialPivLU<RealMatrix>(q);
  if (!(scale > 0))
    throw SingularSystem();
  Eigen::PartialPivLU<RealMatrix> lu(q);
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (pivots.minCoeff() < kSingularPivotRatio * scale)
    throw SingularSystem();
  return lu;
}

} // namespace

RealVector solve(const RealMatrix &q, const RealVector &r) {
  if (q.rows() != r.size())
    throw std::invalid_argument("dimension mismatch: solve");
  return factor(q).solve(r);
}

RealMatrix solve(const RealMatrix &q, const RealMatrix &r) {
  if (q.rows() != r.rows())
    throw std::invalid_argument("dimension mismatch: solve");
  return factor(q).solve(r);
}

RealMatrix inverse(const RealMatrix &q) {
  return solve(q, RealMatrix::Identity(q.rows(), q.cols()).eval());
}

SingularValueExtremes sigma_extremes(const RealMatrix &a) {
  if (a.size() == 0)
    return {0.0, 0.0};
  Eigen::JacobiSVD<RealMatrix> svd(a);
  const auto &s = svd.singularValues();
  return {s.minCoeff(), s.maxCoeff()};
}

double spectral_radius_nonneg(const RealMatrix &m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("dimension mismatch: spectral radius needs a square matrix");
  if ((m.array() < 0).any())
    throw std::invalid_argument("spectral_radius_nonneg: matrix has a negative entry");
  if (m.size() == 0 || m.isZero(0))
    return 0.0;
  Eigen::EigenSolver<RealMatrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral_radius_nonneg: eigenvalue iteration failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

RealMatrix pseudoinverse(const RealMatrix &a) {
  if (a.rows() < a.cols())
    throw std::invalid_argument("pseudoinverse: requires rows >= cols");
  const RealMatrix gram = a.transpose() * a;
  try {
    return solve(gram, RealMatrix(a.transpose()));
  } catch (const SingularSystem &) {
    throw std::domain_error("pseudoinverse: matrix is rank deficient");
  }
}

} // namespace ilsq
