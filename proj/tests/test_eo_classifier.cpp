#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fairprice/eo_classifier.hpp"

using namespace fairprice;

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// symmetric model: same score law in both groups, equal priors
ScoreModel symmetric_model() {
  ScoreModel sm;
  sm.eta = [](const Eigen::VectorXd& x, int) { return sigmoid(x(0)); };
  sm.joint[0][0] = sm.joint[0][1] = sm.joint[1][0] = sm.joint[1][1] = 0.25;
  return sm;
}

GroupSample gaussian_sample(int n, std::uint64_t seed, double shift1 = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  GroupSample gs;
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd x(1);
      x(0) = gauss(rng) + (s == 1 ? shift1 : 0.0);
      gs.x[s].push_back(x);
    }
  return gs;
}

}  // namespace

TEST_CASE("score model validation") {
  ScoreModel sm = symmetric_model();
  CHECK_NOTHROW(sm.validate());
  sm.joint[0][0] = 0.5;
  CHECK_THROWS_AS(sm.validate(), std::invalid_argument);
  sm = symmetric_model();
  sm.eta = nullptr;
  CHECK_THROWS_AS(sm.validate(), std::invalid_argument);
}

TEST_CASE("theta = (0,0) reproduces the Bayes classifier pointwise") {
  const ScoreModel sm = symmetric_model();
  const Classifier bayes = bayes_classifier(sm);
  const Classifier recal = recalibrated_classifier(sm, {0.0, 0.0});
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd x(1);
    x(0) = 3.0 * gauss(rng);
    const int s = i % 2;
    CHECK(bayes(x, s) == recal(x, s));
  }
}

TEST_CASE("shifts with th1 <= 0 <= th0 only enlarge the acceptance set") {
  const ScoreModel sm = symmetric_model();
  const Classifier bayes = bayes_classifier(sm);
  const Classifier wide = recalibrated_classifier(sm, {0.1, -0.1});
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd x(1);
    x(0) = 3.0 * gauss(rng);
    // for group 1 both correction terms are then nonnegative
    if (bayes(x, 1) == 1) CHECK(wide(x, 1) == 1);
  }
}

TEST_CASE("risk of the always-reject classifier is P(Y=1)") {
  ScoreModel sm = symmetric_model();
  sm.joint[1][0] = 0.20;
  sm.joint[1][1] = 0.15;
  sm.joint[0][0] = 0.30;
  sm.joint[0][1] = 0.35;
  const GroupSample gs = gaussian_sample(200, 11);
  const Classifier reject = [](const Eigen::VectorXd&, int) { return 0; };
  CHECK(risk_of(reject, gs, sm) == doctest::Approx(0.35));
}

TEST_CASE("risk difference between classifiers matches direct averaging") {
  // risk_of(g) - risk_of(h) = -sum_s p_s E[(g-h)(2 eta - 1)], which a direct
  // per-sample computation reproduces without the linear-functional form
  const ScoreModel sm = symmetric_model();
  const GroupSample gs = gaussian_sample(500, 13);
  const Classifier g = bayes_classifier(sm);
  const Classifier h = [](const Eigen::VectorXd& x, int) {
    return x(0) > 0.7 ? 1 : 0;
  };
  double direct = 0.0;
  for (int s = 0; s < 2; ++s) {
    double acc = 0.0;
    for (const auto& x : gs.x[s])
      acc += (g(x, s) - h(x, s)) * (2.0 * sm.eta(x, s) - 1.0);
    direct -= sm.p_s(s) * acc / double(gs.x[s].size());
  }
  CHECK(risk_of(g, gs, sm) - risk_of(h, gs, sm) ==
        doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("Bayes classifier minimizes the sampled risk functional") {
  const ScoreModel sm = symmetric_model();
  const GroupSample gs = gaussian_sample(400, 17);
  const Classifier bayes = bayes_classifier(sm);
  const double bayes_risk = risk_of(bayes, gs, sm);
  for (double thr : {-1.0, -0.3, 0.3, 1.0}) {
    const Classifier cand = [thr](const Eigen::VectorXd& x, int) {
      return x(0) > thr ? 1 : 0;
    };
    CHECK(bayes_risk <= risk_of(cand, gs, sm) + 1e-12);
  }
  const Classifier accept = [](const Eigen::VectorXd&, int) { return 1; };
  const Classifier reject = [](const Eigen::VectorXd&, int) { return 0; };
  CHECK(bayes_risk <= risk_of(accept, gs, sm) + 1e-12);
  CHECK(bayes_risk <= risk_of(reject, gs, sm) + 1e-12);
}

TEST_CASE("solve_theta: symmetric groups need almost no recalibration") {
  const ScoreModel sm = symmetric_model();
  const GroupSample gs = gaussian_sample(2000, 19);
  const ThetaSolution sol = solve_theta(sm, gs);
  CHECK(sol.converged);
  CHECK(std::abs(sol.residual_tpr) <= 0.02);
  CHECK(std::abs(sol.residual_fpr) <= 0.02);
}

TEST_CASE("solve_theta closes the odds gaps of a shifted group") {
  // group 1 scores are shifted upward; the Bayes rule then has unequal rates
  ScoreModel sm;
  sm.eta = [](const Eigen::VectorXd& x, int) { return sigmoid(x(0)); };
  const GroupSample gs = gaussian_sample(3000, 23, 1.0);
  // priors consistent with the sampled score means
  double m[2] = {};
  for (int s = 0; s < 2; ++s) {
    for (const auto& x : gs.x[s]) m[s] += sigmoid(x(0));
    m[s] /= double(gs.x[s].size());
  }
  sm.joint[1][0] = 0.5 * m[0];
  sm.joint[0][0] = 0.5 * (1 - m[0]);
  sm.joint[1][1] = 0.5 * m[1];
  sm.joint[0][1] = 0.5 * (1 - m[1]);

  // gaps of the Bayes rule, as the baseline to improve on
  auto gaps = [&](const Classifier& g) {
    double tpr[2], fpr[2];
    for (int s = 0; s < 2; ++s) {
      double nt = 0, nf = 0;
      for (const auto& x : gs.x[s])
        if (g(x, s)) {
          nt += sigmoid(x(0));
          nf += 1 - sigmoid(x(0));
        }
      const double n = double(gs.x[s].size());
      tpr[s] = nt / n / (sm.joint[1][s] / sm.p_s(s));
      fpr[s] = nf / n / (sm.joint[0][s] / sm.p_s(s));
    }
    return std::pair{tpr[1] - tpr[0], fpr[1] - fpr[0]};
  };
  const auto [bt, bf] = gaps(bayes_classifier(sm));
  CHECK(std::max(std::abs(bt), std::abs(bf)) > 0.05);

  const ThetaSolution sol = solve_theta(sm, gs);
  CHECK(sol.converged);
  CHECK(std::abs(sol.residual_tpr) <= 0.02);
  CHECK(std::abs(sol.residual_fpr) <= 0.02);
  const auto [rt, rf] = gaps(recalibrated_classifier(sm, sol.theta));
  CHECK(std::abs(rt) <= 0.02 + 1e-9);
  CHECK(std::abs(rf) <= 0.02 + 1e-9);
}

TEST_CASE("solve_theta refuses atomic score distributions") {
  ScoreModel sm = symmetric_model();
  sm.eta = [](const Eigen::VectorXd& x, int) {
    return x(0) > 0 ? 0.8 : 0.2;  // two-point score law
  };
  const GroupSample gs = gaussian_sample(500, 29);
  CHECK_THROWS_WITH_AS(solve_theta(sm, gs), doctest::Contains("atoms"),
                       std::invalid_argument);
}

TEST_CASE("solve_theta refuses tiny samples") {
  const ScoreModel sm = symmetric_model();
  const GroupSample gs = gaussian_sample(10, 31);
  CHECK_THROWS_AS(solve_theta(sm, gs), std::invalid_argument);
}

TEST_CASE("logistic fit recovers per-group generating coefficients") {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  const int n = 20000;
  Dataset ds;
  ds.feature_names = {"x1", "x2"};
  ds.sensitive_name = "s";
  ds.target_name = "y";
  ds.features.resize(n, 2);
  ds.target.resize(n);
  // group 0: w = (0.5, 1, -1); group 1: w = (-0.5, 2, 0.5)
  const double w0[3] = {0.5, 1.0, -1.0}, w1[3] = {-0.5, 2.0, 0.5};
  for (int i = 0; i < n; ++i) {
    const int s = i % 2;
    const double a = gauss(rng), b = gauss(rng);
    ds.features(i, 0) = a;
    ds.features(i, 1) = b;
    ds.sensitive.push_back(s);
    const double* w = s ? w1 : w0;
    ds.target(i) = unif(rng) < sigmoid(w[0] + w[1] * a + w[2] * b) ? 1.0 : 0.0;
  }
  for (int s : ds.sensitive) ds.counts[s]++;
  ds.groups = {0, 1};

  const EtaFitResult fit = fit_eta_logistic(ds);
  CHECK(fit.model.joint[0][0] + fit.model.joint[0][1] + fit.model.joint[1][0] +
            fit.model.joint[1][1] ==
        doctest::Approx(1.0));
  CHECK(fit.fit.intercept[0] == doctest::Approx(0.5).epsilon(0.15));
  CHECK(fit.fit.coef[0](0) == doctest::Approx(1.0).epsilon(0.15));
  CHECK(fit.fit.coef[0](1) == doctest::Approx(-1.0).epsilon(0.15));
  CHECK(fit.fit.intercept[1] == doctest::Approx(-0.5).epsilon(0.15));
  CHECK(fit.fit.coef[1](0) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(fit.fit.coef[1](1) == doctest::Approx(0.5).epsilon(0.15));
  // the packaged eta evaluates the fitted per-group weights
  Eigen::VectorXd x(2);
  x << 0.3, -0.2;
  CHECK(fit.model.eta(x, 1) ==
        doctest::Approx(sigmoid(fit.fit.intercept[1] +
                                fit.fit.coef[1].dot(x))));
}

TEST_CASE("logistic fit gradient vanishes at the reported optimum") {
  // finite-difference check of the mean log-loss at the fitted weights
  std::mt19937_64 rng(41);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  const int n = 2000;
  Dataset ds;
  ds.feature_names = {"x1"};
  ds.sensitive_name = "s";
  ds.target_name = "y";
  ds.features.resize(n, 1);
  ds.target.resize(n);
  for (int i = 0; i < n; ++i) {
    const double a = gauss(rng);
    ds.features(i, 0) = a;
    ds.sensitive.push_back(i % 2);
    ds.target(i) = unif(rng) < sigmoid(0.3 + 0.8 * a) ? 1.0 : 0.0;
  }
  for (int s : ds.sensitive) ds.counts[s]++;
  ds.groups = {0, 1};
  const EtaFitResult fit = fit_eta_logistic(ds);

  for (int s = 0; s < 2; ++s) {
    auto loss = [&](double b, double w) {
      double acc = 0.0;
      long cnt = 0;
      for (int i = 0; i < n; ++i) {
        if (ds.sensitive[i] != s) continue;
        const double p = sigmoid(b + w * ds.features(i, 0));
        acc += ds.target(i) > 0.5 ? -std::log(p) : -std::log(1 - p);
        cnt++;
      }
      return acc / double(cnt);
    };
    const double b = fit.fit.intercept[s], w = fit.fit.coef[s](0);
    const double h = 1e-5;
    CHECK(std::abs(loss(b + h, w) - loss(b - h, w)) / (2 * h) < 1e-4);
    CHECK(std::abs(loss(b, w + h) - loss(b, w - h)) / (2 * h) < 1e-4);
  }
}
