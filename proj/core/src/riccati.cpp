#include "softnash/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace softnash {

namespace {

double max_abs(const MatrixXd& M) {
  return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

}  // namespace

MatrixXd riccati_map(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q,
                     const MatrixXd& R, const MatrixXd& P) {
  const MatrixXd PA = P * A;
  const MatrixXd BtPA = B.transpose() * PA;
  const MatrixXd G = R + B.transpose() * P * B;
  return A.transpose() * PA -
         BtPA.transpose() * G.ldlt().solve(BtPA) + Q;
}

double dare_defect(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q,
                   const MatrixXd& R, const MatrixXd& P) {
  return max_abs(P - riccati_map(A, B, Q, R, P));
}

RiccatiSolution solve_dare(const MatrixXd& A, const MatrixXd& B,
                           const MatrixXd& Q, const MatrixXd& R,
                           const RiccatiOptions& options) {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != B.cols() || R.cols() != B.cols()) {
    throw std::invalid_argument("solve_dare: inconsistent dimensions");
  }
  if (max_abs(Q - Q.transpose()) > 1e-12 * std::max(1.0, max_abs(Q)))
    throw std::invalid_argument("solve_dare: Q must be symmetric");
  if (max_abs(R - R.transpose()) > 1e-12 * std::max(1.0, max_abs(R)) ||
      R.llt().info() != Eigen::Success) {
    throw std::invalid_argument("solve_dare: R must be symmetric positive definite");
  }

  RiccatiSolution sol;
  MatrixXd P = Q;
  double residual = 0.0;
  for (int it = 1; it <= options.max_iter; ++it) {
    MatrixXd next = riccati_map(A, B, Q, R, P);
    next = 0.5 * (next + next.transpose()).eval();
    residual = max_abs(next - P);
    if (!std::isfinite(residual)) {
      throw RiccatiError("solve_dare: iteration diverged", residual, it);
    }
    if (options.keep_residual_log) sol.residual_log.push_back(residual);
    P = std::move(next);
    if (residual <= options.tol) {
      sol.P = std::move(P);
      sol.iterations = it;
      sol.residual = dare_defect(A, B, Q, R, sol.P);
      return sol;
    }
  }
  throw RiccatiError("solve_dare: no convergence after " +
                         std::to_string(options.max_iter) +
                         " sweeps, residual " + std::to_string(residual),
                     residual, options.max_iter);
}

double spectral_radius(const MatrixXd& M) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("spectral_radius: matrix must be square");
  if (!M.allFinite())
    throw std::invalid_argument("spectral_radius: non-finite entries");
  if (M.size() == 0) return 0.0;
  Eigen::EigenSolver<MatrixXd> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectral_radius: eigenvalue iteration failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace softnash
