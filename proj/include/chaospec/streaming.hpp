#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

// Single-pass moment accumulators with an exact merge rule.  Monte Carlo
// workers accumulate fixed blocks of samples and the block results are
// merged in block order, so the totals are bit-identical for any worker
// count.

namespace chaospec::mc {

template <int K>
struct VectorMoments {
  std::int64_t n = 0;
  Eigen::Matrix<double, K, 1> mean = Eigen::Matrix<double, K, 1>::Zero();
  // Sum of outer products of residuals; covariance = m2 / (n - 1).
  Eigen::Matrix<double, K, K> m2 = Eigen::Matrix<double, K, K>::Zero();

  void add(const Eigen::Matrix<double, K, 1>& x) {
    ++n;
    const Eigen::Matrix<double, K, 1> before = x - mean;
    mean += before / static_cast<double>(n);
    const Eigen::Matrix<double, K, 1> after = x - mean;
    m2 += before * after.transpose();
  }

  void merge(const VectorMoments& other) {
    if (other.n == 0) return;
    if (n == 0) {
      *this = other;
      return;
    }
    const std::int64_t total = n + other.n;
    const Eigen::Matrix<double, K, 1> delta = other.mean - mean;
    const double w = static_cast<double>(other.n) / total;
    mean += delta * w;
    m2 += other.m2 +
          delta * delta.transpose() * (static_cast<double>(n) * w);
    n = total;
  }

  Eigen::Matrix<double, K, K> covariance() const {
    Eigen::Matrix<double, K, K> c = m2 / static_cast<double>(n - 1);
    return 0.5 * (c + c.transpose());
  }

  // Standard error of the sample mean of component i.
  double stderr_mean(int i) const {
    return std::sqrt(covariance()(i, i) / static_cast<double>(n));
  }
};

struct RunningMoments {
  VectorMoments<1> inner;

  void add(double x) { inner.add(Eigen::Matrix<double, 1, 1>(x)); }
  void merge(const RunningMoments& other) { inner.merge(other.inner); }
  std::int64_t count() const { return inner.n; }
  double mean() const { return inner.mean(0); }
  double variance() const { return inner.covariance()(0, 0); }
  double stderr_mean() const { return inner.stderr_mean(0); }
};

}  // namespace chaospec::mc
