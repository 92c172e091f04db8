#include "fairprice/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fairprice {

namespace {

void require_binary(const GroupConfusion& conf) {
  if (!conf.binary())
    throw std::invalid_argument("metric requires exactly 2 groups");
}

std::pair<const GroupRates&, const GroupRates&> binary_groups(
    const GroupConfusion& conf) {
  require_binary(conf);
  auto it = conf.groups.begin();
  const GroupRates& g0 = it->second;
  const GroupRates& g1 = std::next(it)->second;
  return {g0, g1};
}

double need(const std::optional<double>& r, const char* what, int s) {
  if (!r)
    throw std::invalid_argument(std::string(what) + " undefined for group " +
                                std::to_string(s));
  return *r;
}

}  // namespace

double statistical_parity_gap(const GroupConfusion& conf) {
  auto [g0, g1] = binary_groups(conf);
  if (g0.n == 0 || g1.n == 0)
    throw std::invalid_argument("positive rate undefined: empty group");
  return g1.positive_rate - g0.positive_rate;
}

double disparate_impact(const GroupConfusion& conf) {
  auto [g0, g1] = binary_groups(conf);
  if (g1.positive_rate <= 0.0)
    throw std::invalid_argument("disparate_impact: group 1 acceptance rate is 0");
  if (g0.positive_rate <= 0.0)
    throw std::invalid_argument("disparate_impact: group 0 acceptance rate is 0");
  return g0.positive_rate / g1.positive_rate;
}

bool has_di_at_level(const GroupConfusion& conf, double tau) {
  return disparate_impact(conf) > tau;
}

double multiclass_disparate_impact(const GroupConfusion& conf,
                                   std::optional<int> reference_group) {
  if (conf.groups.size() < 2)
    throw std::invalid_argument("multiclass DI requires >= 2 groups");
  double min_rate = 1.0, ref_rate = -1.0;
  for (const auto& [s, g] : conf.groups) {
    min_rate = std::min(min_rate, g.positive_rate);
    if (reference_group) {
      if (s == *reference_group) ref_rate = g.positive_rate;
    } else {
      ref_rate = std::max(ref_rate, g.positive_rate);
    }
  }
  if (reference_group && ref_rate < 0.0)
    throw std::invalid_argument("reference group not present");
  if (ref_rate <= 0.0)
    throw std::invalid_argument("multiclass DI: reference acceptance rate is 0");
  return min_rate / ref_rate;
}

std::pair<double, double> equalized_odds_gaps(const GroupConfusion& conf) {
  auto [g0, g1] = binary_groups(conf);
  return {need(g1.tpr, "tpr", 1) - need(g0.tpr, "tpr", 0),
          need(g1.fpr, "fpr", 1) - need(g0.fpr, "fpr", 0)};
}

double disparate_mistreatment_gap(const GroupConfusion& conf) {
  auto [g0, g1] = binary_groups(conf);
  if (g0.n == 0 || g1.n == 0)
    throw std::invalid_argument("disparate_mistreatment_gap: empty group");
  return g0.error_rate - g1.error_rate;
}

double predictive_parity_gap(const GroupConfusion& conf) {
  auto [g0, g1] = binary_groups(conf);
  return need(g0.ppv, "ppv", 0) - need(g1.ppv, "ppv", 1);
}

double balance_for_class(std::span<const double> scores,
                         std::span<const int> truth,
                         std::span<const int> sensitive, int cls) {
  const std::size_t n = scores.size();
  if (n == 0 || truth.size() != n || sensitive.size() != n)
    throw std::invalid_argument("balance_for_class: mismatched inputs");
  double sum[2] = {0, 0};
  long cnt[2] = {0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    if (sensitive[i] != 0 && sensitive[i] != 1)
      throw std::invalid_argument("balance_for_class: groups must be 0/1");
    if (truth[i] == cls) {
      sum[sensitive[i]] += scores[i];
      cnt[sensitive[i]]++;
    }
  }
  if (cnt[0] == 0 || cnt[1] == 0)
    throw std::invalid_argument("balance_for_class: empty group x class cell");
  return sum[0] / cnt[0] - sum[1] / cnt[1];
}

CalibrationReport calibration_report(std::span<const double> scores,
                                     std::span<const int> truth,
                                     std::span<const int> sensitive, int bins) {
  const std::size_t n = scores.size();
  if (bins < 1) throw std::invalid_argument("calibration_report: bins >= 1");
  if (n == 0 || truth.size() != n || sensitive.size() != n)
    throw std::invalid_argument("calibration_report: mismatched inputs");

  CalibrationReport rep;
  rep.bins.resize(bins);
  std::vector<std::map<int, long>> pos(bins);
  for (int b = 0; b < bins; ++b) {
    rep.bins[b].lo = double(b) / bins;
    rep.bins[b].hi = double(b + 1) / bins;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (scores[i] < 0.0 || scores[i] > 1.0)
      throw std::invalid_argument("calibration_report: score outside [0,1]");
    int b = std::min(bins - 1, int(scores[i] * bins));
    rep.bins[b].count[sensitive[i]]++;
    if (truth[i] == 1) pos[b][sensitive[i]]++;
  }
  for (int b = 0; b < bins; ++b) {
    CalibrationBin& bin = rep.bins[b];
    const double mid = 0.5 * (bin.lo + bin.hi);
    double fmin = 2.0, fmax = -1.0;
    for (const auto& [s, c] : bin.count) {
      double frac = double(pos[b][s]) / double(c);
      bin.pos_fraction[s] = frac;
      fmin = std::min(fmin, frac);
      fmax = std::max(fmax, frac);
      rep.well_calibration_residual =
          std::max(rep.well_calibration_residual, std::abs(frac - mid));
    }
    if (bin.count.size() >= 2)
      rep.max_discrepancy = std::max(rep.max_discrepancy, fmax - fmin);
    else
      rep.skipped_bins++;
  }
  return rep;
}

double ber(std::span<const int> pred_sensitive,
           std::span<const int> sensitive) {
  const std::size_t n = sensitive.size();
  if (n == 0 || pred_sensitive.size() != n)
    throw std::invalid_argument("ber: mismatched inputs");
  long n0 = 0, n1 = 0, miss1 = 0, false1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (sensitive[i] == 1) {
      n1++;
      if (pred_sensitive[i] == 0) miss1++;
    } else {
      n0++;
      if (pred_sensitive[i] == 1) false1++;
    }
  }
  if (n0 == 0 || n1 == 0) throw std::invalid_argument("ber: empty group");
  return 0.5 * (double(miss1) / n1 + double(false1) / n0);
}

double di_predictability_level(double tau, double acceptance_rate_group0) {
  if (tau <= 0.0)
    throw std::invalid_argument("di_predictability_level: tau must be > 0");
  return 0.5 - 0.5 * acceptance_rate_group0 * (1.0 / tau - 1.0);
}

double di_predictability_level(const GroupConfusion& conf) {
  auto [g0, g1] = binary_groups(conf);
  (void)g1;
  return di_predictability_level(disparate_impact(conf), g0.positive_rate);
}

}  // namespace fairprice
