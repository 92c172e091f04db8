#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace fairprice {

/// Per-group confusion counts and rates for a binary classification task.
/// A rate whose denominator is zero is left unset rather than reported as 0.
struct GroupRates {
  long n = 0;
  long pos = 0, neg = 0;        // truth counts
  long tp = 0, fp = 0, fn = 0, tn = 0;
  long pred_pos = 0;

  std::optional<double> tpr, fpr, ppv, npv;
  double base_rate = 0.0;      // P(Y=1|S=s), defined whenever n > 0
  double positive_rate = 0.0;  // P(Yhat=1|S=s)
  double error_rate = 0.0;     // P(Yhat != Y|S=s)
};

struct GroupConfusion {
  std::map<int, GroupRates> groups;

  const GroupRates& at(int s) const;
  bool binary() const { return groups.size() == 2; }
};

// truth/pred in {0,1}, equal lengths >= 1; sensitive holds group codes.
GroupConfusion confusion_by_group(std::span<const int> truth,
                                  std::span<const int> pred,
                                  std::span<const int> sensitive);

}  // namespace fairprice
