#pragma once

#include <stdexcept>
#include <vector>

namespace fairprice {

/// Discrete probability measure on the real line: sorted support points with
/// positive weights summing to one. Equal points are merged at construction.
/// Immutable after construction.
class EmpiricalMeasure1D {
 public:
  static EmpiricalMeasure1D from_samples(std::vector<double> xs);
  static EmpiricalMeasure1D from_weighted(std::vector<double> xs,
                                          std::vector<double> ws);

  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  // Cumulative weights, cum_[i] = sum of weights_[0..i]; cum_.back() == 1.
  const std::vector<double>& cum() const { return cum_; }
  std::size_t size() const { return points_.size(); }

  // Left-continuous generalized inverse of the empirical CDF: smallest
  // support point whose cumulative weight is >= p. quantile(0) is the
  // smallest support point.
  double quantile(double p) const;

  // P(X <= x)
  double cdf(double x) const;

  double mean() const;

 private:
  EmpiricalMeasure1D() = default;
  std::vector<double> points_;
  std::vector<double> weights_;
  std::vector<double> cum_;
};

}  // namespace fairprice
