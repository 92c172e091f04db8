#pragma once

#include <Eigen/Dense>

namespace fairprice {

/// Mean vector and block covariance of the joint vector (X, S, Y) with
/// X in R^p and S, Y scalar. Blocks are stored separately; full() assembles
/// the (p+2)x(p+2) matrix in (X, S, Y) order.
struct CovarianceModel {
  Eigen::VectorXd mu_X;
  double mu_S = 0.0;
  double mu_Y = 0.0;

  Eigen::MatrixXd Sigma_X;   // p x p
  Eigen::VectorXd Sigma_XS;  // p
  Eigen::VectorXd Sigma_XY;  // p
  double Sigma_S = 0.0;
  double Sigma_SY = 0.0;
  double Sigma_Y = 0.0;

  int dim() const { return static_cast<int>(Sigma_X.rows()); }
  Eigen::MatrixXd full() const;

  // Symmetry/PSD of the assembled covariance and the Cauchy-Schwarz bound
  // Sigma_S*Sigma_Y >= Sigma_SY^2. Throws std::invalid_argument.
  void validate(double tol = 1e-8) const;
};

struct CovarianceEstimate {
  CovarianceModel model;
  bool psd_projected = false;  // negative eigenvalues were clipped
  double min_eigenvalue = 0.0; // of the raw assembled covariance
};

// Empirical means and covariance blocks (denominator n-1) from a sample;
// requires n >= p+3 and a non-degenerate sample. The assembled covariance is
// symmetrized and, if indefinite, eigenvalue-clipped to PSD (reported).
CovarianceEstimate estimate_covariance(const Eigen::MatrixXd& X,
                                       const Eigen::VectorXd& s,
                                       const Eigen::VectorXd& y);

}  // namespace fairprice
