#include "fairprice/gaussian_eo.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace fairprice {

namespace {

// SPD solve with a condition-number guard.
Eigen::VectorXd spd_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                          const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (lmin <= 0.0 || lmax / lmin > 1e12)
    throw std::runtime_error(std::string(what) +
                             ": singular or ill-conditioned matrix "
                             "(condition number " +
                             std::to_string(lmin > 0.0 ? lmax / lmin
                                                       : std::numeric_limits<double>::infinity()) +
                             ")");
  return es.eigenvectors() *
         (es.eigenvalues().cwiseInverse().asDiagonal() *
          (es.eigenvectors().transpose() * b));
}

}  // namespace

Eigen::VectorXd correction_vector(const CovarianceModel& cm) {
  const double den = cm.Sigma_S * cm.Sigma_Y - cm.Sigma_SY * cm.Sigma_SY;
  if (den <= 1e-12 * cm.Sigma_S * cm.Sigma_Y)
    throw std::runtime_error(
        "correction_vector: Y and S linearly dependent "
        "(Sigma_S*Sigma_Y - Sigma_SY^2 not positive)");
  return (cm.Sigma_SY * cm.Sigma_XY - cm.Sigma_XS * cm.Sigma_Y) / den;
}

LinearPredictor fit_eo_fair_linear(const CovarianceModel& cm) {
  const Eigen::VectorXd C = correction_vector(cm);
  const Eigen::MatrixXd Sigma_Z =
      cm.Sigma_X + cm.Sigma_S * C * C.transpose() +
      C * cm.Sigma_XS.transpose() + cm.Sigma_XS * C.transpose();
  const Eigen::VectorXd Sigma_ZY = cm.Sigma_XY + cm.Sigma_SY * C;

  LinearPredictor pred;
  pred.beta = spd_solve(Sigma_Z, Sigma_ZY, "fit_eo_fair_linear");
  pred.beta0 = pred.beta.dot(C);
  return pred;
}

LinearPredictor fit_unconstrained_linear(const CovarianceModel& cm) {
  const int p = cm.dim();
  Eigen::MatrixXd A(p + 1, p + 1);
  A.topLeftCorner(p, p) = cm.Sigma_X;
  A.block(0, p, p, 1) = cm.Sigma_XS;
  A.block(p, 0, 1, p) = cm.Sigma_XS.transpose();
  A(p, p) = cm.Sigma_S;
  Eigen::VectorXd b(p + 1);
  b.head(p) = cm.Sigma_XY;
  b(p) = cm.Sigma_SY;

  const Eigen::VectorXd sol = spd_solve(A, b, "fit_unconstrained_linear");
  LinearPredictor pred;
  pred.beta = sol.head(p);
  pred.beta0 = sol(p);
  return pred;
}

double population_risk(const CovarianceModel& cm, const LinearPredictor& pred) {
  const Eigen::VectorXd& beta = pred.beta;
  const double b0 = pred.beta0;
  const double var = cm.Sigma_Y + b0 * b0 * cm.Sigma_S +
                     beta.dot(cm.Sigma_X * beta) - 2.0 * b0 * cm.Sigma_SY -
                     2.0 * beta.dot(cm.Sigma_XY) +
                     2.0 * b0 * beta.dot(cm.Sigma_XS);
  const double mean_resid = cm.mu_Y - b0 * cm.mu_S - beta.dot(cm.mu_X);
  return var + mean_resid * mean_resid;
}

double eo_constraint_residual(const CovarianceModel& cm,
                              const LinearPredictor& pred) {
  return pred.beta.dot(cm.Sigma_XS * cm.Sigma_Y - cm.Sigma_SY * cm.Sigma_XY) +
         pred.beta0 * (cm.Sigma_S * cm.Sigma_Y - cm.Sigma_SY * cm.Sigma_SY);
}

double excess_risk(const CovarianceModel& cm) {
  const double fair = population_risk(cm, fit_eo_fair_linear(cm));
  const double unconstrained =
      population_risk(cm, fit_unconstrained_linear(cm));
  const double diff = fair - unconstrained;
  return diff > 0.0 ? diff : 0.0;
}

SimulationConfig SimulationConfig::defaults() {
  SimulationConfig c;
  c.Sigma_X = Eigen::Vector2d(2.0, 3.0).asDiagonal();
  c.Sigma_XS = Eigen::Vector2d(0.1, 0.1);
  c.Sigma_S = 10.0;
  c.beta0 = 1.0;
  c.beta = Eigen::Vector2d(1.0, 1.0);
  c.noise_sd = 1.0;
  c.sizes = {100, 200, 400, 800, 1000, 1500, 2000, 3000, 5000, 10000};
  c.reps = 1000;
  return c;
}

CovarianceModel SimulationConfig::implied_model() const {
  const int p = static_cast<int>(Sigma_X.rows());
  CovarianceModel m;
  m.mu_X = Eigen::VectorXd::Zero(p);
  m.Sigma_X = Sigma_X;
  m.Sigma_XS = Sigma_XS;
  m.Sigma_S = Sigma_S;
  m.Sigma_XY = Sigma_X * beta + beta0 * Sigma_XS;
  m.Sigma_SY = Sigma_XS.dot(beta) + beta0 * Sigma_S;
  m.Sigma_Y = beta.dot(Sigma_X * beta) + 2.0 * beta0 * beta.dot(Sigma_XS) +
              beta0 * beta0 * Sigma_S + noise_sd * noise_sd;
  return m;
}

ExcessRiskCurve simulate_excess_risk(const SimulationConfig& config) {
  if (config.sizes.empty())
    throw std::invalid_argument("simulate_excess_risk: sizes empty");
  if (config.reps < 1)
    throw std::invalid_argument("simulate_excess_risk: reps >= 1 required");
  for (std::size_t i = 1; i < config.sizes.size(); ++i)
    if (config.sizes[i] <= config.sizes[i - 1])
      throw std::invalid_argument(
          "simulate_excess_risk: sizes must be strictly increasing");

  const int p = static_cast<int>(config.Sigma_X.rows());
  Eigen::MatrixXd joint(p + 1, p + 1);
  joint.topLeftCorner(p, p) = config.Sigma_X;
  joint.block(0, p, p, 1) = config.Sigma_XS;
  joint.block(p, 0, 1, p) = config.Sigma_XS.transpose();
  joint(p, p) = config.Sigma_S;
  Eigen::LLT<Eigen::MatrixXd> llt(joint);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("simulate_excess_risk: (X,S) covariance not SPD");
  const Eigen::MatrixXd L = llt.matrixL();

  ExcessRiskCurve curve;
  curve.seed = config.seed;
  for (int n : config.sizes) {
    ExcessRiskCurve::Point pt;
    pt.n = n;
    pt.reps = config.reps;
    std::vector<double> estimates;
    estimates.reserve(config.reps);
    for (int rep = 0; rep < config.reps; ++rep) {
      std::seed_seq sseq{static_cast<std::uint32_t>(config.seed),
                         static_cast<std::uint32_t>(config.seed >> 32),
                         static_cast<std::uint32_t>(n),
                         static_cast<std::uint32_t>(rep)};
      std::mt19937_64 rng(sseq);
      std::normal_distribution<double> gauss(0.0, 1.0);

      Eigen::MatrixXd X(n, p);
      Eigen::VectorXd s(n), y(n);
      Eigen::VectorXd z(p + 1);
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < p + 1; ++k) z(k) = gauss(rng);
        const Eigen::VectorXd v = L * z;
        X.row(i) = v.head(p).transpose();
        s(i) = v(p);
        y(i) = config.beta0 * s(i) + config.beta.dot(v.head(p)) +
               config.noise_sd * gauss(rng);
      }
      try {
        const CovarianceEstimate est = estimate_covariance(X, s, y);
        estimates.push_back(excess_risk(est.model));
      } catch (const std::exception&) {
        pt.failures++;
      }
    }
    if (!estimates.empty()) {
      double sum = 0.0;
      for (double e : estimates) sum += e;
      pt.mean = sum / estimates.size();
      if (estimates.size() > 1) {
        double ss = 0.0;
        for (double e : estimates) ss += (e - pt.mean) * (e - pt.mean);
        pt.sd = std::sqrt(ss / (estimates.size() - 1));
      }
    }
    curve.points.push_back(pt);
  }
  return curve;
}

}  // namespace fairprice
