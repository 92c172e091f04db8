#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "fairprice/dataset.hpp"

namespace fairprice {

/// Regression function eta(x,s) = P(Y=1|X=x,S=s) plus the joint priors of
/// (Y, S); the inputs to the recalibrated optimal classifier.
struct ScoreModel {
  std::function<double(const Eigen::VectorXd&, int)> eta;
  double joint[2][2] = {};  // joint[y][s] = P(Y=y, S=s)

  double p_s(int s) const { return joint[0][s] + joint[1][s]; }
  double p_y1_given_s(int s) const { return joint[1][s] / p_s(s); }
  void validate() const;  // all joints in (0,1), sum to 1
};

using Classifier = std::function<int(const Eigen::VectorXd&, int)>;

struct ThetaPair {
  double theta0 = 0.0;
  double theta1 = 0.0;
};

// g(x,s) = 1{eta(x,s) >= 1/2}
Classifier bayes_classifier(const ScoreModel& sm);

// Recalibration of the Bayes rule with group-dependent shifts:
// g(x,1) = 1{1 <= 2 eta - th1*eta/P(Y=1,S=1) + th0*(1-eta)/P(Y=0,S=1)}
// g(x,0) = 1{1 <= 2 eta + th1*eta/P(Y=1,S=0) - th0*(1-eta)/P(Y=0,S=0)}
// theta = (0,0) gives back the Bayes classifier.
Classifier recalibrated_classifier(const ScoreModel& sm, const ThetaPair& th);

/// Sampled conditional distribution of X given S: one point list per group.
struct GroupSample {
  std::vector<Eigen::VectorXd> x[2];
};

struct ThetaSolution {
  ThetaPair theta;
  double residual_tpr = 0.0;  // gap in the Y=1 moment condition
  double residual_fpr = 0.0;  // gap in the Y=0 moment condition
  bool converged = false;
};

struct ThetaSolveOptions {
  double box = 2.0;          // initial search domain [-box, box]^2
  int max_box_doublings = 3;
  int coarse_grid = 41;      // per axis
  double refine_step_min = 1e-6;
  double residual_tol = 0.02;
  // atom guard: refuse when the empirical eta distribution has fewer than
  // half as many distinct values as samples (per group)
  double min_distinct_fraction = 0.5;
  std::size_t min_samples = 50;
};

// Finds theta minimizing max(|tpr-side residual|, |fpr-side residual|) of the
// two moment-matching equations over the sampled distribution, by coarse grid
// plus shrinking pattern search. Throws when the per-group score distribution
// has atoms (continuity assumption violated) or when residuals stay above
// tolerance; the failure message carries the best theta and residuals.
ThetaSolution solve_theta(const ScoreModel& sm, const GroupSample& dist,
                          const ThetaSolveOptions& opts = {});

// Misclassification probability via the linear-functional expansion
// P(Y=1) - sum_s P(S=s) E_{X|S=s}[g(X,s)(2 eta(X,s)-1)], with the
// conditional expectations taken over the sampled distribution.
double risk_of(const Classifier& g, const GroupSample& dist,
               const ScoreModel& sm);

struct LogisticFit {
  // per group: intercept + coefficients
  double intercept[2] = {};
  Eigen::VectorXd coef[2];
  double final_grad_norm[2] = {};
  int iterations[2] = {};
};

struct EtaFitResult {
  ScoreModel model;
  LogisticFit fit;
};

// Per-group logistic regression by adaptive-step gradient descent on the mean
// log-loss (step halving on failure, growth on success; max 10k iterations,
// gradient-norm stop 1e-8). Priors from group/label frequencies.
EtaFitResult fit_eta_logistic(const Dataset& ds);

}  // namespace fairprice
