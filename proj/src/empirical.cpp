#include "fairprice/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fairprice {

EmpiricalMeasure1D EmpiricalMeasure1D::from_samples(std::vector<double> xs) {
  std::vector<double> ws(xs.size(), 1.0);
  return from_weighted(std::move(xs), std::move(ws));
}

EmpiricalMeasure1D EmpiricalMeasure1D::from_weighted(std::vector<double> xs,
                                                     std::vector<double> ws) {
  if (xs.empty() || xs.size() != ws.size())
    throw std::invalid_argument("EmpiricalMeasure1D: empty or mismatched input");
  for (double x : xs)
    if (!std::isfinite(x))
      throw std::invalid_argument("EmpiricalMeasure1D: non-finite support point");
  double total = 0.0;
  for (double w : ws) {
    if (!(w > 0.0))
      throw std::invalid_argument("EmpiricalMeasure1D: weights must be positive");
    total += w;
  }

  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

  EmpiricalMeasure1D m;
  for (std::size_t k : order) {
    if (!m.points_.empty() && m.points_.back() == xs[k]) {
      m.weights_.back() += ws[k] / total;
    } else {
      m.points_.push_back(xs[k]);
      m.weights_.push_back(ws[k] / total);
    }
  }
  m.cum_.resize(m.points_.size());
  double c = 0.0;
  for (std::size_t i = 0; i < m.weights_.size(); ++i) {
    c += m.weights_[i];
    m.cum_[i] = c;
  }
  m.cum_.back() = 1.0;
  return m;
}

double EmpiricalMeasure1D::quantile(double p) const {
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("quantile: p must be in [0,1]");
  if (p <= 0.0) return points_.front();
  auto it = std::lower_bound(cum_.begin(), cum_.end(), p);
  if (it == cum_.end()) return points_.back();
  return points_[static_cast<std::size_t>(it - cum_.begin())];
}

double EmpiricalMeasure1D::cdf(double x) const {
  auto it = std::upper_bound(points_.begin(), points_.end(), x);
  if (it == points_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - points_.begin()) - 1];
}

double EmpiricalMeasure1D::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) s += points_[i] * weights_[i];
  return s;
}

}  // namespace fairprice
