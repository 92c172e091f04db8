#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fairprice/dataset.hpp"
#include "fairprice/empirical.hpp"

namespace fairprice {

// Squared 1-D Wasserstein-2 distance: integral over (0,1) of the squared
// difference of the quantile functions, computed exactly on the merged
// breakpoint grid of both step functions.
double wasserstein2_1d(const EmpiricalMeasure1D& P, const EmpiricalMeasure1D& Q);

// Measure whose quantile function is the weighted average of the input
// quantile functions, evaluated on the union of all breakpoints plus a
// uniform grid (controls interpolation error). Minimizes
// nu -> sum_s w_s W2^2(mu_s, nu) among 1-D measures.
EmpiricalMeasure1D barycenter_1d(const std::vector<EmpiricalMeasure1D>& measures,
                                 const std::vector<double>& weights,
                                 int uniform_grid = 1024);

struct TvBerResult {
  double tv = 0.0;
  double min_ber = 0.0;                // = (1 - tv) / 2
  std::vector<int> minimizing_classifier;  // per-cell majority vote
};

// Total variation between two discrete measures given as weight vectors on a
// finite common support, and the minimal balanced error rate of any
// classifier predicting the group from the cell.
TvBerResult tv_ber_relation(const std::vector<double>& mu0,
                            const std::vector<double>& mu1);

/// Replayable repair: per (feature, group), a monotone piecewise-linear map
/// stored as (source point, repaired value) pairs, plus the mixing amount.
struct RepairPlan {
  struct CoordinateMap {
    std::vector<double> source;  // sorted distinct group values
    std::vector<double> target;  // nondecreasing repaired values
    double apply(double x) const;  // monotone interpolation, clamped
  };
  // maps[feature index][group code]
  std::vector<std::map<int, CoordinateMap>> maps;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  std::vector<std::string> feature_names;
};

// Coordinatewise total repair: each group's per-coordinate marginal is pushed
// onto the group-frequency-weighted 1-D barycenter by the monotone quantile
// map. Sensitive and target columns are untouched.
Dataset total_repair(const Dataset& ds, RepairPlan* plan_out = nullptr);

// Per row, a Bernoulli(lambda) draw selects the fully repaired row (all
// coordinates) with probability lambda, else the original. lambda=0 is the
// identity, lambda=1 equals total_repair. Deterministic given seed.
Dataset random_repair(const Dataset& ds, double lambda, std::uint64_t seed,
                      RepairPlan* plan_out = nullptr);

// Re-applies a stored plan (same lambda/seed semantics) to a dataset with the
// same feature columns, e.g. held-out data.
Dataset apply_repair_plan(const Dataset& ds, const RepairPlan& plan);

struct PriceBound {
  double generic = 0.0;     // 2*sqrt(2)*K*sqrt(sum_s pi_s W2^2)
  double barycenter = 0.0;  // sqrt(2)*K*sqrt(sum_s pi_s W2^2), the minimized form
};

// Excess-risk bound for classifiers trained on repaired data, eta K-Lipschitz.
PriceBound classification_price_bound(double K, const std::vector<double>& pis,
                                      const std::vector<double>& w2s);

// Exact statistical-parity price for regression on empirical measures:
// sum_s pi_s W2^2(mu_s, barycenter(mu, pi)).
double sp_price_regression(const std::vector<EmpiricalMeasure1D>& mus,
                           const std::vector<double>& pis);

}  // namespace fairprice
