#pragma once

#include <cstdint>
#include <vector>

#include "fairprice/covariance_model.hpp"

namespace fairprice {

/// f(X,S) = beta0 * S + beta^T X
struct LinearPredictor {
  double beta0 = 0.0;
  Eigen::VectorXd beta;
};

// Correction vector coupling beta0 to beta so that the linear predictor is
// independent of S given Y under the Gaussian model:
// C = -(Sigma_XS*Sigma_Y - Sigma_SY*Sigma_XY) / (Sigma_S*Sigma_Y - Sigma_SY^2),
// the sign chosen so that beta0 = beta^T C solves the constraint
// beta^T(Sigma_XS Sigma_Y - Sigma_SY Sigma_XY)
//   + beta0(Sigma_S Sigma_Y - Sigma_SY^2) = 0.
// Throws when Y and S are (numerically) linearly dependent.
Eigen::VectorXd correction_vector(const CovarianceModel& cm);

// Optimal equality-of-odds-fair linear predictor:
// beta = Sigma_Z^{-1} Sigma_ZY with Z = X + S*C, beta0 = beta^T C.
LinearPredictor fit_eo_fair_linear(const CovarianceModel& cm);

// Population least squares over (X, S) jointly.
LinearPredictor fit_unconstrained_linear(const CovarianceModel& cm);

// E (Y - beta0 S - beta^T X)^2, means included.
double population_risk(const CovarianceModel& cm, const LinearPredictor& pred);

// Residual of the fairness constraint
// beta^T(Sigma_XS Sigma_Y - Sigma_SY Sigma_XY) + beta0(Sigma_S Sigma_Y - Sigma_SY^2).
double eo_constraint_residual(const CovarianceModel& cm,
                              const LinearPredictor& pred);

// population_risk(fair) - population_risk(unconstrained), always >= 0.
double excess_risk(const CovarianceModel& cm);

struct SimulationConfig {
  // law of (X, S); means zero
  Eigen::MatrixXd Sigma_X;   // p x p
  Eigen::VectorXd Sigma_XS;  // p
  double Sigma_S = 10.0;
  // generating coefficients: Y = beta0 S + beta^T X + noise, noise ~ N(0, noise_sd^2)
  double beta0 = 1.0;
  Eigen::VectorXd beta;
  double noise_sd = 1.0;

  std::vector<int> sizes;
  int reps = 1000;
  std::uint64_t seed = 0;

  // the defaults above with Sigma_X = diag(2,3), Sigma_XS = (0.1, 0.1)
  static SimulationConfig defaults();

  // population covariance model implied by the generating process
  CovarianceModel implied_model() const;
};

struct ExcessRiskCurve {
  struct Point {
    int n = 0;
    double mean = 0.0;
    double sd = 0.0;
    int reps = 0;
    int failures = 0;  // replications where the fit failed
  };
  std::vector<Point> points;
  std::uint64_t seed = 0;
};

// For each n, draws `reps` independent samples from the Gaussian model, runs
// estimate_covariance -> excess_risk, and records mean and standard deviation.
// Deterministic given seed; replications use derived substreams (seed, n, rep).
ExcessRiskCurve simulate_excess_risk(const SimulationConfig& config);

}  // namespace fairprice
