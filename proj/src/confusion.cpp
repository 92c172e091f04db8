#include "fairprice/confusion.hpp"

#include <stdexcept>
#include <string>

namespace fairprice {

const GroupRates& GroupConfusion::at(int s) const {
  auto it = groups.find(s);
  if (it == groups.end())
    throw std::invalid_argument("no such group: " + std::to_string(s));
  return it->second;
}

GroupConfusion confusion_by_group(std::span<const int> truth,
                                  std::span<const int> pred,
                                  std::span<const int> sensitive) {
  const std::size_t n = truth.size();
  if (n == 0 || pred.size() != n || sensitive.size() != n)
    throw std::invalid_argument("confusion_by_group: empty or mismatched inputs");

  GroupConfusion conf;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = truth[i], yh = pred[i];
    if ((y != 0 && y != 1) || (yh != 0 && yh != 1))
      throw std::invalid_argument("confusion_by_group: labels must be 0/1");
    GroupRates& g = conf.groups[sensitive[i]];
    g.n++;
    if (y == 1) {
      g.pos++;
      (yh == 1) ? g.tp++ : g.fn++;
    } else {
      g.neg++;
      (yh == 1) ? g.fp++ : g.tn++;
    }
    if (yh == 1) g.pred_pos++;
  }

  for (auto& [s, g] : conf.groups) {
    if (g.pos > 0) g.tpr = double(g.tp) / double(g.pos);
    if (g.neg > 0) g.fpr = double(g.fp) / double(g.neg);
    if (g.pred_pos > 0) g.ppv = double(g.tp) / double(g.pred_pos);
    if (g.n - g.pred_pos > 0) g.npv = double(g.tn) / double(g.n - g.pred_pos);
    g.base_rate = double(g.pos) / double(g.n);
    g.positive_rate = double(g.pred_pos) / double(g.n);
    g.error_rate = double(g.fp + g.fn) / double(g.n);
  }
  return conf;
}

}  // namespace fairprice
