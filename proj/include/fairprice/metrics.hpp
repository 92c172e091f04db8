#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fairprice/confusion.hpp"

namespace fairprice {

// Group-fairness metrics over binary predictions. Sign convention, used
// everywhere: "gap" metrics are group-1 quantity minus group-0 quantity for
// parity/odds, and group-0 minus group-1 for mistreatment, predictive parity
// and class balance, matching the formula each metric is defined by.
// A metric whose input rate is undefined throws std::invalid_argument.

// P(Yhat=1|S=1) - P(Yhat=1|S=0)
double statistical_parity_gap(const GroupConfusion& conf);

// P(Yhat=1|S=0) / P(Yhat=1|S=1); requires both acceptance rates > 0.
double disparate_impact(const GroupConfusion& conf);

// DI > tau, i.e. no disparate impact at level tau.
bool has_di_at_level(const GroupConfusion& conf, double tau);

// min_s P(Yhat=1|S=s) divided by the reference group's acceptance rate.
// Default reference: the group with the maximal acceptance rate; pass an
// explicit group code to pin it (e.g. group 1).
double multiclass_disparate_impact(const GroupConfusion& conf,
                                   std::optional<int> reference_group = {});

// (tpr_1 - tpr_0, fpr_1 - fpr_0); first component is the equal-opportunity gap.
std::pair<double, double> equalized_odds_gaps(const GroupConfusion& conf);

// P(Yhat != Y|S=0) - P(Yhat != Y|S=1)
double disparate_mistreatment_gap(const GroupConfusion& conf);

// ppv_0 - ppv_1
double predictive_parity_gap(const GroupConfusion& conf);

// E(R|Y=cls,S=0) - E(R|Y=cls,S=1), scores in [0,1].
double balance_for_class(std::span<const double> scores,
                         std::span<const int> truth,
                         std::span<const int> sensitive, int cls);

struct CalibrationBin {
  double lo = 0, hi = 0;
  // per group: count and fraction of Y=1 among rows scoring in the bin
  std::map<int, long> count;
  std::map<int, double> pos_fraction;
};

struct CalibrationReport {
  std::vector<CalibrationBin> bins;
  // max over bins (nonempty in both groups) of the cross-group gap in
  // positive fraction
  double max_discrepancy = 0.0;
  // max over nonempty (bin, group) cells of |pos_fraction - bin midpoint|
  double well_calibration_residual = 0.0;
  long skipped_bins = 0;  // bins empty in at least one group
};

// Equal-width bins on [0,1].
CalibrationReport calibration_report(std::span<const double> scores,
                                     std::span<const int> truth,
                                     std::span<const int> sensitive, int bins);

// Balanced error rate of a predictor of the sensitive attribute:
// (P(g=0|S=1) + P(g=1|S=0)) / 2.
double ber(std::span<const int> pred_sensitive,
           std::span<const int> sensitive);

// Level eps at which S is eps-predictable given that the classifier has
// disparate impact at level tau = DI(conf): eps = 1/2 - (a/2)(1/tau - 1)
// with a = P(Yhat=1|S=0).
double di_predictability_level(const GroupConfusion& conf);
double di_predictability_level(double tau, double acceptance_rate_group0);

}  // namespace fairprice
