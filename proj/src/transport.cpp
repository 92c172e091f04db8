#include "fairprice/transport.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fairprice {

double wasserstein2_1d(const EmpiricalMeasure1D& P,
                       const EmpiricalMeasure1D& Q) {
  std::vector<double> levels;
  levels.reserve(P.size() + Q.size());
  levels.insert(levels.end(), P.cum().begin(), P.cum().end());
  levels.insert(levels.end(), Q.cum().begin(), Q.cum().end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  double acc = 0.0, prev = 0.0;
  std::size_t ip = 0, iq = 0;
  for (double t : levels) {
    while (P.cum()[ip] < t) ++ip;
    while (Q.cum()[iq] < t) ++iq;
    const double d = P.points()[ip] - Q.points()[iq];
    acc += (t - prev) * d * d;
    prev = t;
  }
  return acc;
}

EmpiricalMeasure1D barycenter_1d(const std::vector<EmpiricalMeasure1D>& measures,
                                 const std::vector<double>& weights,
                                 int uniform_grid) {
  if (measures.empty())
    throw std::invalid_argument("barycenter_1d: empty measure list");
  if (weights.size() != measures.size())
    throw std::invalid_argument("barycenter_1d: weight count mismatch");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0))
      throw std::invalid_argument("barycenter_1d: weights must be positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("barycenter_1d: weights must sum to 1");

  std::vector<double> levels;
  for (const auto& m : measures)
    levels.insert(levels.end(), m.cum().begin(), m.cum().end());
  for (int i = 1; i <= uniform_grid; ++i)
    levels.push_back(double(i) / uniform_grid);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  std::vector<std::size_t> idx(measures.size(), 0);
  std::vector<double> pts, ws;
  double prev = 0.0;
  for (double t : levels) {
    double q = 0.0;
    for (std::size_t s = 0; s < measures.size(); ++s) {
      while (measures[s].cum()[idx[s]] < t) ++idx[s];
      q += weights[s] * measures[s].points()[idx[s]];
    }
    if (t > prev) {
      pts.push_back(q);
      ws.push_back(t - prev);
      prev = t;
    }
  }
  return EmpiricalMeasure1D::from_weighted(std::move(pts), std::move(ws));
}

TvBerResult tv_ber_relation(const std::vector<double>& mu0,
                            const std::vector<double>& mu1) {
  if (mu0.empty() || mu0.size() != mu1.size())
    throw std::invalid_argument("tv_ber_relation: mismatched supports");
  double s0 = 0.0, s1 = 0.0;
  for (double v : mu0) {
    if (v < 0.0) throw std::invalid_argument("tv_ber_relation: negative mass");
    s0 += v;
  }
  for (double v : mu1) {
    if (v < 0.0) throw std::invalid_argument("tv_ber_relation: negative mass");
    s1 += v;
  }
  if (s0 <= 0.0 || s1 <= 0.0)
    throw std::invalid_argument("tv_ber_relation: zero total mass");

  TvBerResult r;
  r.minimizing_classifier.resize(mu0.size());
  double tv = 0.0;
  for (std::size_t i = 0; i < mu0.size(); ++i) {
    const double p0 = mu0[i] / s0, p1 = mu1[i] / s1;
    tv += std::abs(p0 - p1);
    r.minimizing_classifier[i] = (p1 > p0) ? 1 : 0;
  }
  r.tv = 0.5 * tv;
  r.min_ber = 0.5 * (1.0 - r.tv);
  return r;
}

double RepairPlan::CoordinateMap::apply(double x) const {
  auto it = std::lower_bound(source.begin(), source.end(), x);
  if (it != source.end() && *it == x)
    return target[static_cast<std::size_t>(it - source.begin())];
  if (it == source.begin()) return target.front();
  if (it == source.end()) return target.back();
  const std::size_t hi = static_cast<std::size_t>(it - source.begin());
  const std::size_t lo = hi - 1;
  const double w = (x - source[lo]) / (source[hi] - source[lo]);
  return target[lo] + w * (target[hi] - target[lo]);
}

namespace {

RepairPlan build_total_plan(const Dataset& ds) {
  RepairPlan plan;
  plan.lambda = 1.0;
  plan.feature_names = ds.feature_names;
  plan.maps.resize(ds.num_features());
  const double n = double(ds.rows());

  for (std::size_t j = 0; j < ds.num_features(); ++j) {
    std::vector<EmpiricalMeasure1D> group_measures;
    std::vector<double> pis;
    for (int g : ds.groups) {
      std::vector<double> vals;
      for (std::size_t i = 0; i < ds.rows(); ++i)
        if (ds.sensitive[i] == g) vals.push_back(ds.features(i, j));
      group_measures.push_back(EmpiricalMeasure1D::from_samples(std::move(vals)));
      pis.push_back(double(ds.counts.at(g)) / n);
    }
    const EmpiricalMeasure1D bary = barycenter_1d(group_measures, pis);

    for (std::size_t gi = 0; gi < ds.groups.size(); ++gi) {
      const EmpiricalMeasure1D& m = group_measures[gi];
      RepairPlan::CoordinateMap cmap;
      cmap.source = m.points();
      cmap.target.reserve(m.size());
      double prev_cum = 0.0;
      for (std::size_t k = 0; k < m.size(); ++k) {
        const double mid = 0.5 * (prev_cum + m.cum()[k]);
        cmap.target.push_back(bary.quantile(mid));
        prev_cum = m.cum()[k];
      }
      plan.maps[j][ds.groups[gi]] = std::move(cmap);
    }
  }
  return plan;
}

}  // namespace

Dataset apply_repair_plan(const Dataset& ds, const RepairPlan& plan) {
  if (plan.maps.size() != ds.num_features())
    throw std::invalid_argument("repair plan does not match feature count");
  Dataset out = ds;
  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    bool take = true;
    if (plan.lambda <= 0.0)
      take = false;
    else if (plan.lambda < 1.0)
      take = unif(rng) < plan.lambda;
    if (!take) continue;
    for (std::size_t j = 0; j < ds.num_features(); ++j) {
      auto it = plan.maps[j].find(ds.sensitive[i]);
      if (it == plan.maps[j].end())
        throw std::invalid_argument("repair plan has no map for group " +
                                    std::to_string(ds.sensitive[i]));
      out.features(i, j) = it->second.apply(ds.features(i, j));
    }
  }
  return out;
}

Dataset total_repair(const Dataset& ds, RepairPlan* plan_out) {
  validate_dataset(ds);
  RepairPlan plan = build_total_plan(ds);
  Dataset out = apply_repair_plan(ds, plan);
  if (plan_out) *plan_out = std::move(plan);
  return out;
}

Dataset random_repair(const Dataset& ds, double lambda, std::uint64_t seed,
                      RepairPlan* plan_out) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("random_repair: lambda must be in [0,1]");
  validate_dataset(ds);
  RepairPlan plan = build_total_plan(ds);
  plan.lambda = lambda;
  plan.seed = seed;
  Dataset out = apply_repair_plan(ds, plan);
  if (plan_out) *plan_out = std::move(plan);
  return out;
}

PriceBound classification_price_bound(double K, const std::vector<double>& pis,
                                      const std::vector<double>& w2s) {
  if (!(K > 0.0))
    throw std::invalid_argument("classification_price_bound: K must be > 0");
  if (pis.size() != w2s.size() || pis.empty())
    throw std::invalid_argument("classification_price_bound: size mismatch");
  double acc = 0.0;
  for (std::size_t s = 0; s < pis.size(); ++s) {
    if (pis[s] < 0.0 || w2s[s] < 0.0)
      throw std::invalid_argument("classification_price_bound: negative input");
    acc += pis[s] * w2s[s];
  }
  PriceBound b;
  b.generic = 2.0 * std::sqrt(2.0) * K * std::sqrt(acc);
  b.barycenter = std::sqrt(2.0) * K * std::sqrt(acc);
  return b;
}

double sp_price_regression(const std::vector<EmpiricalMeasure1D>& mus,
                           const std::vector<double>& pis) {
  const EmpiricalMeasure1D bary = barycenter_1d(mus, pis);
  double acc = 0.0;
  for (std::size_t s = 0; s < mus.size(); ++s)
    acc += pis[s] * wasserstein2_1d(mus[s], bary);
  return acc;
}

}  // namespace fairprice
