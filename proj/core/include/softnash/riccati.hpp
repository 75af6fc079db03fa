#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace softnash {

using Eigen::MatrixXd;

struct RiccatiOptions {
  // Stop when max|P - f(P)| <= tol.
  double tol = 1e-12;
  int max_iter = 100000;
  bool keep_residual_log = false;
};

struct RiccatiSolution {
  MatrixXd P;
  int iterations = 0;
  double residual = 0.0;  // max-abs entry of P - f(P) at exit
  std::vector<double> residual_log;
};

class RiccatiError : public std::runtime_error {
 public:
  RiccatiError(const std::string& what, double last_residual, int iterations)
      : std::runtime_error(what),
        last_residual_(last_residual),
        iterations_(iterations) {}

  double last_residual() const { return last_residual_; }
  int iterations() const { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

// One sweep of the discrete Riccati map
//   f(P) = A'PA - A'PB (R + B'PB)^-1 B'PA + Q.
MatrixXd riccati_map(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q,
                     const MatrixXd& R, const MatrixXd& P);

// max-abs entry of P - f(P).
double dare_defect(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q,
                   const MatrixXd& R, const MatrixXd& P);

/// Fixed-point value iteration for the discrete algebraic Riccati equation,
/// started from P = Q and symmetrized after every sweep.
///
/// Throws std::invalid_argument for shape errors, a non-symmetric Q or a
/// non positive definite R, and RiccatiError when max_iter is exhausted
/// (the error carries the last residual).
RiccatiSolution solve_dare(const MatrixXd& A, const MatrixXd& B,
                           const MatrixXd& Q, const MatrixXd& R,
                           const RiccatiOptions& options = {});

// Largest eigenvalue modulus. Throws std::invalid_argument on non-square or
// non-finite input.
double spectral_radius(const MatrixXd& M);

}  // namespace softnash
