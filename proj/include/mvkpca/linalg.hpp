#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "mvkpca/errors.hpp"

namespace mvkpca {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace linalg {

/// Relative floor below which an eigenvalue of Gamma counts as zero.
inline constexpr double kSingularGammaRatio = 1e-12;

inline MatrixXd symmetrize(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

/// Eigenpairs of a symmetric matrix, eigenvalues strictly descending.
struct EigenPairs {
  VectorXd values;
  MatrixXd vectors;  // columns
};

/// Full symmetric eigendecomposition, reordered to descending eigenvalues.
inline EigenPairs sym_eig_descending(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(symmetrize(a));
  if (solver.info() != Eigen::Success) {
    throw Error("symmetric eigendecomposition failed to converge");
  }
  const Index m = a.rows();
  EigenPairs out{VectorXd(m), MatrixXd(m, m)};
  for (Index i = 0; i < m; ++i) {
    out.values(i) = solver.eigenvalues()(m - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(m - 1 - i);
  }
  return out;
}

/// Flips each column so that its largest-magnitude entry is positive; ties go
/// to the earliest index. Returns the applied signs.
template <typename Derived>
VectorXd apply_sign_convention(Eigen::MatrixBase<Derived>& a) {
  VectorXd signs = VectorXd::Ones(a.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < a.rows(); ++i) {
      const double mag = std::abs(a(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (a.rows() > 0 && a(arg, j) < 0.0) {
      a.col(j) *= -1.0;
      signs(j) = -1.0;
    }
  }
  return signs;
}

/// Flips columns of `a` to minimise the L2 distance to the matching column of
/// `reference`. Shapes must agree.
inline MatrixXd sign_align(const MatrixXd& a, const MatrixXd& reference) {
  if (a.rows() != reference.rows() || a.cols() != reference.cols()) {
    std::ostringstream msg;
    msg << "sign_align: shape " << a.rows() << "x" << a.cols() << " vs reference "
        << reference.rows() << "x" << reference.cols();
    throw DimensionError(msg.str());
  }
  MatrixXd out = a;
  for (Index j = 0; j < a.cols(); ++j) {
    if ((a.col(j) + reference.col(j)).squaredNorm() < (a.col(j) - reference.col(j)).squaredNorm()) {
      out.col(j) *= -1.0;
    }
  }
  return out;
}

inline double offdiag_norm(const MatrixXd& a) {
  MatrixXd off = a;
  off.diagonal().setZero();
  return off.norm();
}

inline double max_abs(const MatrixXd& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

/// Eigen-decomposes a symmetric positive definite Gamma, rejecting it when its
/// smallest eigenvalue falls below kSingularGammaRatio times the largest.
inline EigenPairs checked_spd_eig(const MatrixXd& gamma) {
  if (gamma.rows() != gamma.cols() || gamma.rows() == 0) {
    throw DimensionError("Gamma must be a non-empty square matrix");
  }
  EigenPairs ep = sym_eig_descending(gamma);
  const double lmax = ep.values(0);
  const double lmin = ep.values(ep.values.size() - 1);
  if (!(lmax > 0.0) || lmin < kSingularGammaRatio * lmax) {
    std::ostringstream msg;
    msg << "singular Gamma: eigenvalues span [" << lmin << ", " << lmax
        << "], below the SPD threshold " << kSingularGammaRatio << " * max";
    throw SingularGamma(msg.str());
  }
  return ep;
}

/// Symmetric square root Gamma^{1/2}.
inline MatrixXd spd_sqrt(const MatrixXd& gamma) {
  const EigenPairs ep = checked_spd_eig(gamma);
  return ep.vectors * ep.values.cwiseSqrt().asDiagonal() * ep.vectors.transpose();
}

/// Symmetric inverse square root Gamma^{-1/2}.
inline MatrixXd spd_inv_sqrt(const MatrixXd& gamma) {
  const EigenPairs ep = checked_spd_eig(gamma);
  return ep.vectors * ep.values.cwiseSqrt().cwiseInverse().asDiagonal() * ep.vectors.transpose();
}

inline MatrixXd spd_inverse(const MatrixXd& gamma) {
  const EigenPairs ep = checked_spd_eig(gamma);
  return ep.vectors * ep.values.cwiseInverse().asDiagonal() * ep.vectors.transpose();
}

/// Orthonormal basis of range(a) via Householder QR, with columns signed so
/// that R has a positive diagonal (a no-op on already orthonormal input).
inline MatrixXd orthonormalize(const MatrixXd& a) {
  Eigen::HouseholderQR<MatrixXd> qr(a);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(a.rows(), a.cols());
  const MatrixXd& r = qr.matrixQR();
  for (Index j = 0; j < a.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

/// ||A^T A - I||_F.
inline double orthonormality_error(const MatrixXd& a) {
  return (a.transpose() * a - MatrixXd::Identity(a.cols(), a.cols())).norm();
}

}  // namespace linalg
}  // namespace mvkpca
