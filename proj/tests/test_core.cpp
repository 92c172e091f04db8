#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include "fairprice/confusion.hpp"
#include "fairprice/dataset.hpp"
#include "fairprice/empirical.hpp"

using namespace fairprice;

namespace {

std::string temp_csv(const std::string& content) {
  static int counter = 0;
  std::string path = "/tmp/fairprice_test_core_" + std::to_string(counter++) + ".csv";
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_dataset parses a small csv") {
  const std::string path =
      temp_csv("x1,s,y\n1.0,0,1\n2.0,0,0\n3.0,1,1\n4.0,1,0\n");
  const Dataset ds = load_dataset(path, {{"x1"}, "s", "y"});
  CHECK(ds.rows() == 4);
  CHECK(ds.features(2, 0) == 3.0);
  CHECK(ds.sensitive == std::vector<int>{0, 0, 1, 1});
  CHECK(ds.counts.at(0) == 2);
  CHECK(ds.groups == std::vector<int>{0, 1});
}

TEST_CASE("load_dataset rejects a degenerate sensitive column") {
  const std::string path = temp_csv("x1,s,y\n1.0,1,1\n2.0,1,0\n");
  CHECK_THROWS_WITH_AS(load_dataset(path, {{"x1"}, "s", "y"}),
                       doctest::Contains("degenerate sensitive column"),
                       std::runtime_error);
}

TEST_CASE("load_dataset names missing columns and bad cells") {
  const std::string path = temp_csv("x1,s,y\n1.0,0,1\nbad,1,0\n");
  CHECK_THROWS_WITH_AS(load_dataset(path, {{"x2"}, "s", "y"}),
                       doctest::Contains("x2"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_dataset(path, {{"x1"}, "s", "y"}),
                       doctest::Contains("row 2"), std::runtime_error);
}

TEST_CASE("dataset write/read round-trips bit-exactly") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  const int n = 1000;
  Dataset ds;
  ds.feature_names = {"x1", "x2"};
  ds.sensitive_name = "s";
  ds.target_name = "y";
  ds.features.resize(n, 2);
  ds.target.resize(n);
  for (int i = 0; i < n; ++i) {
    ds.features(i, 0) = gauss(rng);
    ds.features(i, 1) = gauss(rng) * 1e-7;
    ds.sensitive.push_back(i % 2);
    ds.target(i) = gauss(rng) * 1e9;
  }
  for (int s : ds.sensitive) ds.counts[s]++;
  ds.groups = {0, 1};

  const std::string path = temp_csv("");
  save_dataset(ds, path);
  const Dataset back = load_dataset(path, {{"x1", "x2"}, "s", "y"});
  REQUIRE(back.rows() == ds.rows());
  for (int i = 0; i < n; ++i) {
    CHECK(back.features(i, 0) == ds.features(i, 0));
    CHECK(back.features(i, 1) == ds.features(i, 1));
    CHECK(back.target(i) == ds.target(i));
    CHECK(back.sensitive[i] == ds.sensitive[i]);
  }
}

TEST_CASE("confusion: perfect predictor") {
  std::vector<int> truth{1, 0, 1, 0, 1, 0};
  std::vector<int> s{0, 0, 0, 1, 1, 1};
  const GroupConfusion conf = confusion_by_group(truth, truth, s);
  for (int g : {0, 1}) {
    CHECK(conf.at(g).tpr == 1.0);
    CHECK(conf.at(g).fpr == 0.0);
  }
}

TEST_CASE("confusion: 4-row hand count") {
  std::vector<int> truth{1, 0, 1, 0}, pred{1, 1, 0, 0}, s{0, 0, 1, 1};
  const GroupConfusion conf = confusion_by_group(truth, pred, s);
  CHECK(conf.at(0).tpr == 1.0);
  CHECK(conf.at(0).fpr == 1.0);
  CHECK(conf.at(1).tpr == 0.0);
  CHECK(conf.at(1).fpr == 0.0);
}

TEST_CASE("confusion: zero denominators stay undefined") {
  std::vector<int> truth{1, 1, 1, 1}, pred{1, 0, 1, 0}, s{0, 0, 1, 1};
  const GroupConfusion conf = confusion_by_group(truth, pred, s);
  CHECK(!conf.at(0).fpr.has_value());
  CHECK(conf.at(0).tpr.has_value());
}

TEST_CASE("confusion matches a per-cell counting oracle on random data") {
  std::mt19937_64 rng(11);
  std::bernoulli_distribution coin(0.4);
  const int n = 200;
  std::vector<int> truth(n), pred(n), s(n);
  for (int i = 0; i < n; ++i) {
    truth[i] = coin(rng);
    pred[i] = coin(rng);
    s[i] = coin(rng);
  }
  const GroupConfusion conf = confusion_by_group(truth, pred, s);
  for (int g : {0, 1}) {
    long cells[2][2] = {};
    long ng = 0;
    for (int i = 0; i < n; ++i)
      if (s[i] == g) {
        cells[truth[i]][pred[i]]++;
        ng++;
      }
    const GroupRates& r = conf.at(g);
    CHECK(r.n == ng);
    CHECK(*r.tpr == doctest::Approx(double(cells[1][1]) /
                                    (cells[1][0] + cells[1][1])).epsilon(1e-12));
    CHECK(*r.fpr == doctest::Approx(double(cells[0][1]) /
                                    (cells[0][0] + cells[0][1])).epsilon(1e-12));
    // acceptance-rate identity: a = b*tpr + (1-b)*fpr
    CHECK(r.positive_rate ==
          doctest::Approx(r.base_rate * *r.tpr + (1 - r.base_rate) * *r.fpr)
              .epsilon(1e-12));
  }
}

TEST_CASE("empirical quantile: point mass and uniform steps") {
  const auto pm = EmpiricalMeasure1D::from_samples({3.0});
  CHECK(pm.quantile(0.0) == 3.0);
  CHECK(pm.quantile(0.3) == 3.0);
  CHECK(pm.quantile(1.0) == 3.0);

  const auto u = EmpiricalMeasure1D::from_samples({1, 2, 3, 4});
  CHECK(u.quantile(0.5) == 2.0);
  CHECK(u.quantile(0.5 + 1e-12) == 3.0);
  CHECK(u.quantile(0.25) == 1.0);
  CHECK(u.quantile(0.0) == 1.0);
  CHECK(u.quantile(1.0) == 4.0);
}

TEST_CASE("empirical quantile matches sort-and-index oracle") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss;
  std::vector<double> xs(500);
  for (auto& x : xs) x = gauss(rng);
  const auto m = EmpiricalMeasure1D::from_samples(xs);

  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const int n = int(sorted.size());
  for (int k = 0; k <= 100; ++k) {
    const double p = k / 100.0;
    // smallest index i with (i+1)/n >= p
    int i = p <= 0.0 ? 0 : int(std::ceil(p * n)) - 1;
    i = std::clamp(i, 0, n - 1);
    CHECK(m.quantile(p) == sorted[i]);
  }
}

TEST_CASE("quantile is nondecreasing and cdf(quantile(p)) >= p") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(-5, 5);
  std::vector<double> xs(137);
  for (auto& x : xs) x = std::round(unif(rng));  // force ties
  const auto m = EmpiricalMeasure1D::from_samples(xs);
  double prev = m.quantile(0.0);
  for (int k = 1; k <= 200; ++k) {
    const double p = k / 200.0;
    const double q = m.quantile(p);
    CHECK(q >= prev);
    CHECK(m.cdf(q) >= p - 1e-12);
    prev = q;
  }
}
