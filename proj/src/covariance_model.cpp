#include "fairprice/covariance_model.hpp"

#include <stdexcept>

namespace fairprice {

Eigen::MatrixXd CovarianceModel::full() const {
  const int p = dim();
  Eigen::MatrixXd M(p + 2, p + 2);
  M.topLeftCorner(p, p) = Sigma_X;
  M.block(0, p, p, 1) = Sigma_XS;
  M.block(0, p + 1, p, 1) = Sigma_XY;
  M.block(p, 0, 1, p) = Sigma_XS.transpose();
  M.block(p + 1, 0, 1, p) = Sigma_XY.transpose();
  M(p, p) = Sigma_S;
  M(p, p + 1) = Sigma_SY;
  M(p + 1, p) = Sigma_SY;
  M(p + 1, p + 1) = Sigma_Y;
  return M;
}

void CovarianceModel::validate(double tol) const {
  const int p = dim();
  if (Sigma_XS.size() != p || Sigma_XY.size() != p || mu_X.size() != p ||
      Sigma_X.cols() != p)
    throw std::invalid_argument("CovarianceModel: inconsistent block sizes");
  if (!(Sigma_S > 0.0) || !(Sigma_Y > 0.0))
    throw std::invalid_argument("CovarianceModel: Sigma_S, Sigma_Y must be > 0");
  if ((Sigma_X - Sigma_X.transpose()).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("CovarianceModel: Sigma_X not symmetric");
  if (Sigma_S * Sigma_Y - Sigma_SY * Sigma_SY < -tol)
    throw std::invalid_argument(
        "CovarianceModel: Cauchy-Schwarz violated (Sigma_S*Sigma_Y < Sigma_SY^2)");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(full());
  if (es.eigenvalues().minCoeff() < -tol)
    throw std::invalid_argument("CovarianceModel: assembled covariance not PSD");
}

CovarianceEstimate estimate_covariance(const Eigen::MatrixXd& X,
                                       const Eigen::VectorXd& s,
                                       const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (s.size() != n || y.size() != n)
    throw std::invalid_argument("estimate_covariance: length mismatch");
  if (n < p + 3)
    throw std::invalid_argument("estimate_covariance: need n >= p+3");

  Eigen::MatrixXd J(n, p + 2);
  J.leftCols(p) = X;
  J.col(p) = s;
  J.col(p + 1) = y;
  const Eigen::RowVectorXd mu = J.colwise().mean();
  Eigen::MatrixXd C = J.rowwise() - mu;
  Eigen::MatrixXd Sigma = (C.transpose() * C) / double(n - 1);
  Sigma = 0.5 * (Sigma + Sigma.transpose()).eval();

  CovarianceEstimate est;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sigma);
  est.min_eigenvalue = es.eigenvalues().minCoeff();
  if (est.min_eigenvalue < 0.0) {
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    Sigma = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    est.psd_projected = true;
  }
  if (Sigma(p, p) <= 0.0 || Sigma(p + 1, p + 1) <= 0.0)
    throw std::invalid_argument("estimate_covariance: degenerate sample "
                                "(constant S or Y)");

  CovarianceModel& m = est.model;
  m.mu_X = mu.head(p).transpose();
  m.mu_S = mu(p);
  m.mu_Y = mu(p + 1);
  m.Sigma_X = Sigma.topLeftCorner(p, p);
  m.Sigma_XS = Sigma.block(0, p, p, 1);
  m.Sigma_XY = Sigma.block(0, p + 1, p, 1);
  m.Sigma_S = Sigma(p, p);
  m.Sigma_SY = Sigma(p, p + 1);
  m.Sigma_Y = Sigma(p + 1, p + 1);
  return est;
}

}  // namespace fairprice
