#include "fairprice/eo_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fairprice {

void ScoreModel::validate() const {
  double sum = 0.0;
  for (int y = 0; y < 2; ++y)
    for (int s = 0; s < 2; ++s) {
      if (!(joint[y][s] > 0.0 && joint[y][s] < 1.0))
        throw std::invalid_argument(
            "ScoreModel: joint priors must lie in (0,1)");
      sum += joint[y][s];
    }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("ScoreModel: joint priors must sum to 1");
  if (!eta) throw std::invalid_argument("ScoreModel: eta not set");
}

Classifier bayes_classifier(const ScoreModel& sm) {
  sm.validate();
  auto eta = sm.eta;
  return [eta](const Eigen::VectorXd& x, int s) {
    return eta(x, s) >= 0.5 ? 1 : 0;
  };
}

namespace {

// indicator arguments of the recalibrated rule as functions of eta alone
inline int recal_group1(double e, double th0, double th1, double j11,
                        double j01) {
  return 1.0 <= 2.0 * e - th1 * e / j11 + th0 * (1.0 - e) / j01 ? 1 : 0;
}

inline int recal_group0(double e, double th0, double th1, double j10,
                        double j00) {
  return 1.0 <= 2.0 * e + th1 * e / j10 - th0 * (1.0 - e) / j00 ? 1 : 0;
}

}  // namespace

Classifier recalibrated_classifier(const ScoreModel& sm, const ThetaPair& th) {
  sm.validate();
  auto eta = sm.eta;
  const double j11 = sm.joint[1][1], j01 = sm.joint[0][1];
  const double j10 = sm.joint[1][0], j00 = sm.joint[0][0];
  const double th0 = th.theta0, th1 = th.theta1;
  return [=](const Eigen::VectorXd& x, int s) {
    const double e = eta(x, s);
    return s == 1 ? recal_group1(e, th0, th1, j11, j01)
                  : recal_group0(e, th0, th1, j10, j00);
  };
}

ThetaSolution solve_theta(const ScoreModel& sm, const GroupSample& dist,
                          const ThetaSolveOptions& opts) {
  sm.validate();

  // per-group eta values, with the atom guard
  std::vector<double> e[2];
  for (int s = 0; s < 2; ++s) {
    if (dist.x[s].size() < opts.min_samples)
      throw std::invalid_argument("solve_theta: need at least " +
                                  std::to_string(opts.min_samples) +
                                  " samples per group");
    e[s].reserve(dist.x[s].size());
    for (const auto& x : dist.x[s]) e[s].push_back(sm.eta(x, s));
    std::vector<double> sorted = e[s];
    std::sort(sorted.begin(), sorted.end());
    const std::size_t distinct = static_cast<std::size_t>(
        std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    if (double(distinct) < opts.min_distinct_fraction * double(sorted.size()))
      throw std::invalid_argument(
          "solve_theta: per-group score distribution has atoms (" +
          std::to_string(distinct) + " distinct values among " +
          std::to_string(sorted.size()) +
          " samples); continuity assumption violated");
  }

  const double j11 = sm.joint[1][1], j01 = sm.joint[0][1];
  const double j10 = sm.joint[1][0], j00 = sm.joint[0][0];
  const double py1s1 = sm.p_y1_given_s(1), py1s0 = sm.p_y1_given_s(0);

  auto residuals = [&](double th0, double th1) {
    double tpr[2] = {0, 0}, fpr[2] = {0, 0};
    for (int s = 0; s < 2; ++s) {
      double num_t = 0.0, num_f = 0.0;
      for (double ev : e[s]) {
        const int g = s == 1 ? recal_group1(ev, th0, th1, j11, j01)
                             : recal_group0(ev, th0, th1, j10, j00);
        if (g) {
          num_t += ev;
          num_f += 1.0 - ev;
        }
      }
      const double n = double(e[s].size());
      tpr[s] = num_t / n / (s == 1 ? py1s1 : py1s0);
      fpr[s] = num_f / n / (s == 1 ? 1.0 - py1s1 : 1.0 - py1s0);
    }
    return std::pair<double, double>{tpr[1] - tpr[0], fpr[1] - fpr[0]};
  };
  auto objective = [&](double th0, double th1) {
    auto [rt, rf] = residuals(th0, th1);
    return std::max(std::abs(rt), std::abs(rf));
  };

  double box = opts.box;
  double best0 = 0.0, best1 = 0.0, best = objective(0.0, 0.0);
  for (int attempt = 0; attempt <= opts.max_box_doublings; ++attempt) {
    double g0 = 0.0, g1 = 0.0, gbest = std::numeric_limits<double>::infinity();
    const int m = opts.coarse_grid;
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < m; ++k) {
        const double t0 = -box + 2.0 * box * i / (m - 1);
        const double t1 = -box + 2.0 * box * k / (m - 1);
        const double v = objective(t0, t1);
        if (v < gbest) {
          gbest = v;
          g0 = t0;
          g1 = t1;
        }
      }
    }
    if (gbest < best) {
      best = gbest;
      best0 = g0;
      best1 = g1;
    }
    const bool on_boundary =
        std::abs(std::abs(g0) - box) < 1e-12 || std::abs(std::abs(g1) - box) < 1e-12;
    if (!on_boundary || attempt == opts.max_box_doublings) break;
    box *= 2.0;
  }

  // shrinking pattern search around the grid optimum
  double step = 2.0 * box / (opts.coarse_grid - 1);
  while (step > opts.refine_step_min) {
    bool moved = false;
    const double cand[8][2] = {{step, 0},  {-step, 0}, {0, step},  {0, -step},
                               {step, step}, {step, -step}, {-step, step},
                               {-step, -step}};
    for (const auto& c : cand) {
      const double v = objective(best0 + c[0], best1 + c[1]);
      if (v < best) {
        best = v;
        best0 += c[0];
        best1 += c[1];
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }

  ThetaSolution sol;
  sol.theta = {best0, best1};
  auto [rt, rf] = residuals(best0, best1);
  sol.residual_tpr = rt;
  sol.residual_fpr = rf;
  sol.converged = best <= opts.residual_tol;
  if (!sol.converged)
    throw std::runtime_error(
        "solve_theta: residuals above tolerance after search budget "
        "(best theta = (" + std::to_string(best0) + ", " +
        std::to_string(best1) + "), residuals (" + std::to_string(rt) + ", " +
        std::to_string(rf) + ")); likely continuity assumption violation");
  return sol;
}

double risk_of(const Classifier& g, const GroupSample& dist,
               const ScoreModel& sm) {
  sm.validate();
  double risk = sm.joint[1][0] + sm.joint[1][1];  // P(Y=1)
  for (int s = 0; s < 2; ++s) {
    if (dist.x[s].empty())
      throw std::invalid_argument("risk_of: empty group sample");
    double acc = 0.0;
    for (const auto& x : dist.x[s])
      if (g(x, s)) acc += 2.0 * sm.eta(x, s) - 1.0;
    risk -= sm.p_s(s) * acc / double(dist.x[s].size());
  }
  return risk;
}

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// mean log-loss and gradient for weights w over rows (with leading 1 column)
double logloss(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
               const Eigen::VectorXd& w, Eigen::VectorXd* grad) {
  const Eigen::Index n = Z.rows();
  Eigen::VectorXd t = Z * w;
  double loss = 0.0;
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = sigmoid(t(i));
    // numerically safe log-loss
    loss += y(i) > 0.5 ? -std::log(std::max(p, 1e-300))
                       : -std::log(std::max(1.0 - p, 1e-300));
    r(i) = p - y(i);
  }
  if (grad) *grad = Z.transpose() * r / double(n);
  return loss / double(n);
}

}  // namespace

EtaFitResult fit_eta_logistic(const Dataset& ds) {
  validate_dataset(ds);
  const std::size_t n = ds.rows();
  const std::size_t p = ds.num_features();
  long count[2][2] = {};
  for (std::size_t i = 0; i < n; ++i) {
    const double yv = ds.target(i);
    if (yv != 0.0 && yv != 1.0)
      throw std::invalid_argument("fit_eta_logistic: target must be 0/1");
    if (ds.sensitive[i] != 0 && ds.sensitive[i] != 1)
      throw std::invalid_argument("fit_eta_logistic: sensitive must be 0/1");
    count[int(yv)][ds.sensitive[i]]++;
  }

  EtaFitResult out;
  for (int y = 0; y < 2; ++y)
    for (int s = 0; s < 2; ++s)
      out.model.joint[y][s] = double(count[y][s]) / double(n);

  for (int s = 0; s < 2; ++s) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i)
      if (ds.sensitive[i] == s) rows.push_back(i);
    Eigen::MatrixXd Z(rows.size(), p + 1);
    Eigen::VectorXd yv(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      Z(k, 0) = 1.0;
      Z.row(k).tail(p) = ds.features.row(rows[k]);
      yv(k) = ds.target(rows[k]);
    }

    Eigen::VectorXd w = Eigen::VectorXd::Zero(p + 1);
    Eigen::VectorXd grad;
    double loss = logloss(Z, yv, w, &grad);
    double step = 1.0;
    int it = 0;
    const int max_iter = 10000;
    for (; it < max_iter; ++it) {
      if (grad.norm() < 1e-8) break;
      const Eigen::VectorXd w_try = w - step * grad;
      Eigen::VectorXd grad_try;
      const double loss_try = logloss(Z, yv, w_try, &grad_try);
      if (loss_try < loss) {
        w = w_try;
        loss = loss_try;
        grad = grad_try;
        step = std::min(step * 2.0, 1e6);
      } else {
        step *= 0.5;
        if (step < 1e-18)
          throw std::runtime_error(
              "fit_eta_logistic: step collapsed, gradient norm " +
              std::to_string(grad.norm()));
      }
    }
    if (grad.norm() >= 1e-8)
      throw std::runtime_error(
          "fit_eta_logistic: no convergence in 10000 iterations, "
          "final gradient norm " + std::to_string(grad.norm()));
    out.fit.intercept[s] = w(0);
    out.fit.coef[s] = w.tail(p);
    out.fit.final_grad_norm[s] = grad.norm();
    out.fit.iterations[s] = it;
  }

  const double b0 = out.fit.intercept[0], b1 = out.fit.intercept[1];
  const Eigen::VectorXd c0 = out.fit.coef[0], c1 = out.fit.coef[1];
  out.model.eta = [b0, b1, c0, c1](const Eigen::VectorXd& x, int s) {
    return sigmoid(s == 1 ? b1 + c1.dot(x) : b0 + c0.dot(x));
  };
  out.model.validate();
  return out;
}

}  // namespace fairprice
