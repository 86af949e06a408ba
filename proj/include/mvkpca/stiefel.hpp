#pragma once

// Minimisation of -1/2 Tr(A^T B A) + 1/2 Tr(B) over the Stiefel manifold
// St(m, s) = {A : A^T A = I_s} with a Cayley-retraction Adam scheme.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "mvkpca/errors.hpp"
#include "mvkpca/linalg.hpp"
#include "mvkpca/random.hpp"

namespace mvkpca {

struct StiefelOptions {
  int max_iters = 5000;
  double learning_rate = 0.2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  /// Stop once ||grad_R|| <= grad_tol * ||B||_F.
  double grad_tol = 1e-7;
  /// Stop once |J_k - J_{k-1}| <= obj_tol * max(|J_k|, 1e-4 ||B||_F) ...
  double obj_tol = 1e-12;
  /// ... for this many consecutive iterations.
  int stall_window = 10;
  std::uint64_t seed = 0;

  void validate() const {
    if (max_iters < 1) throw InvalidArgument("Stiefel max_iters must be positive");
    if (!(learning_rate > 0.0)) throw InvalidArgument("Stiefel learning_rate must be positive");
    if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) throw InvalidArgument("adam_beta1 must lie in (0,1)");
    if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) throw InvalidArgument("adam_beta2 must lie in (0,1)");
    if (!(grad_tol > 0.0) || !(obj_tol > 0.0)) throw InvalidArgument("Stiefel tolerances must be positive");
    if (stall_window < 1) throw InvalidArgument("Stiefel stall_window must be positive");
  }
};

struct StiefelResult {
  MatrixXd A;  // m x s, orthonormal columns
  int iterations = 0;
  double objective = 0.0;
  double grad_norm = 0.0;  // relative Riemannian gradient norm at A
  bool converged = false;  // false: max_iters hit, A is the best iterate seen
};

namespace detail {

inline double stiefel_objective(const MatrixXd& a, const MatrixXd& b, double half_trace) {
  return -0.5 * (a.transpose() * b * a).trace() + half_trace;
}

/// Cayley step (I + tau W)^{-1} (I - tau W) A for W = L R^T, evaluated through
/// the 2s x 2s system of the Sherman-Morrison-Woodbury identity:
/// A - 2 tau L (I + tau R^T L)^{-1} R^T A.
inline MatrixXd cayley_step(const MatrixXd& a, const MatrixXd& left, const MatrixXd& right, double tau) {
  const Index r = left.cols();
  const MatrixXd small = MatrixXd::Identity(r, r) + tau * (right.transpose() * left);
  const MatrixXd rhs = right.transpose() * a;
  return a - 2.0 * tau * left * small.partialPivLu().solve(rhs);
}

}  // namespace detail

/// Random feasible starting point: Q factor of a seeded Gaussian matrix.
inline MatrixXd stiefel_random_init(Index m, Index s, std::uint64_t seed) {
  DeterministicRng rng(seed);
  MatrixXd g(m, s);
  for (Index j = 0; j < s; ++j) {
    for (Index i = 0; i < m; ++i) g(i, j) = rng.normal();
  }
  return linalg::orthonormalize(g);
}

/// Cayley Adam from a given feasible start.
///
/// Each iteration takes the Euclidean gradient G = -B A, folds it into the
/// Adam moments (first moment elementwise, second moment on ||G||_F^2 so the
/// scheme stays rotation-equivariant), forms the skew-symmetric
/// W = G_hat A^T - A G_hat^T and retracts with the Cayley transform
/// A <- (I + lr/2 W)^{-1} (I - lr/2 W) A.
inline StiefelResult stiefel_minimize_from(const MatrixXd& b_in, MatrixXd a, const StiefelOptions& opts) {
  opts.validate();
  if (b_in.rows() != b_in.cols()) throw DimensionError("stiefel_minimize: B must be square");
  if (a.rows() != b_in.rows() || a.cols() > a.rows() || a.cols() < 1) {
    std::ostringstream msg;
    msg << "stiefel_minimize: start point " << a.rows() << "x" << a.cols() << " incompatible with B "
        << b_in.rows() << "x" << b_in.cols();
    throw DimensionError(msg.str());
  }
  const MatrixXd b = linalg::symmetrize(b_in);
  const double half_trace = 0.5 * b.trace();
  const double scale = std::max(b.norm(), std::numeric_limits<double>::min());
  const double eps = 1e-8 * scale;  // Adam denominator guard, in gradient units
  const double tau = 0.5 * opts.learning_rate;

  MatrixXd moment = MatrixXd::Zero(a.rows(), a.cols());
  double second_moment = 0.0;
  double beta1_pow = 1.0;
  double beta2_pow = 1.0;

  StiefelResult best;
  best.objective = std::numeric_limits<double>::infinity();
  double previous = std::numeric_limits<double>::quiet_NaN();
  int stalled = 0;

  int iter = 0;
  for (;; ++iter) {
    const MatrixXd grad = -(b * a);
    const double objective = 0.5 * (a.transpose() * grad).trace() + half_trace;
    const double rgrad = (grad - a * (grad.transpose() * a)).norm() / scale;

    if (objective < best.objective) {
      best.A = a;
      best.objective = objective;
      best.grad_norm = rgrad;
      best.iterations = iter;
    }
    if (rgrad <= opts.grad_tol) {
      best = StiefelResult{a, iter, objective, rgrad, true};
      break;
    }
    if (std::isfinite(previous) &&
        std::abs(objective - previous) <= opts.obj_tol * std::max(std::abs(objective), 1e-4 * scale)) {
      if (++stalled >= opts.stall_window) {
        best = StiefelResult{a, iter, objective, rgrad, true};
        break;
      }
    } else {
      stalled = 0;
    }
    previous = objective;
    if (iter >= opts.max_iters) {
      best.converged = false;
      best.iterations = iter;
      break;
    }

    moment = opts.adam_beta1 * moment + (1.0 - opts.adam_beta1) * grad;
    second_moment = opts.adam_beta2 * second_moment + (1.0 - opts.adam_beta2) * grad.squaredNorm();
    beta1_pow *= opts.adam_beta1;
    beta2_pow *= opts.adam_beta2;
    const double denom = std::sqrt(second_moment / (1.0 - beta2_pow)) + eps;
    const MatrixXd g_hat = moment / ((1.0 - beta1_pow) * denom);

    // W = [G_hat, A] [A, -G_hat]^T
    MatrixXd left(a.rows(), 2 * a.cols());
    MatrixXd right(a.rows(), 2 * a.cols());
    left << g_hat, a;
    right << a, -g_hat;
    a = detail::cayley_step(a, left, right, tau);

    // Keep rounding drift far below the 1e-6 feasibility budget.
    if (linalg::orthonormality_error(a) > 1e-10) a = linalg::orthonormalize(a);
  }

  best.A = linalg::orthonormalize(best.A);
  best.objective = detail::stiefel_objective(best.A, b, half_trace);
  return best;
}

inline StiefelResult stiefel_minimize(const MatrixXd& b, Index s, const StiefelOptions& opts = {}) {
  if (s < 1 || s > b.rows()) {
    std::ostringstream msg;
    msg << "stiefel_minimize: need 1 <= s <= m, got s=" << s << ", m=" << b.rows();
    throw RankError(msg.str());
  }
  return stiefel_minimize_from(b, stiefel_random_init(b.rows(), s, opts.seed), opts);
}

/// Result of aligning a Stiefel solution with the eigenbasis of A'^T B A'.
struct Rotation {
  MatrixXd A;       // A' O, sign convention applied
  VectorXd lambda;  // descending
  MatrixXd O;       // orthonormal s x s
};

/// Gamma' = A'^T B A' = O Lambda O^T, A = A' O.
inline Rotation rotate_solution(const MatrixXd& a_prime, const MatrixXd& b) {
  if (a_prime.rows() != b.rows()) throw DimensionError("rotate_solution: A' and B row counts differ");
  const MatrixXd gamma_prime = linalg::symmetrize(a_prime.transpose() * b * a_prime);
  linalg::EigenPairs ep = linalg::sym_eig_descending(gamma_prime);
  Rotation out{a_prime * ep.vectors, ep.values, ep.vectors};
  const VectorXd signs = linalg::apply_sign_convention(out.A);
  out.O = out.O * signs.asDiagonal();
  return out;
}

}  // namespace mvkpca
