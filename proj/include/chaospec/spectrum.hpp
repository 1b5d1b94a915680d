#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "chaospec/errors.hpp"
#include "chaospec/normal.hpp"

// Discrete laws on chaos orders n = 0, 1, 2, ... truncated at a finite
// support, with the unaccounted tail mass tracked explicitly.  Everything
// downstream (CLT checks, Poisson comparisons, correlation decay) consumes
// this representation.

namespace chaospec {

inline double logsumexp(const Eigen::ArrayXd& a) {
  if (a.size() == 0) return -std::numeric_limits<double>::infinity();
  const double m = a.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf, or a NaN/inf poisoned input
  return m + std::log((a - m).exp().sum());
}

struct SpectrumDistribution {
  Eigen::ArrayXd probs;     // probs[n] = P(N = n), n = 0..n_max
  double tail_mass = 0.0;   // P(N > n_max), bounded by the truncation tol
  double normalizer = 1.0;  // the second moment the law was extracted from

  Eigen::Index n_max() const { return probs.size() - 1; }

  // Invariant check for freshly constructed spectra; violations mean the
  // producing computation went numerically wrong, not that the caller
  // passed bad parameters.
  void validate(double eps_tail) const {
    if (probs.size() == 0)
      throw NumericError("spectrum has empty support");
    if (!probs.allFinite() || !std::isfinite(tail_mass))
      throw NumericError("spectrum contains non-finite entries");
    const double min_p = probs.minCoeff();
    if (min_p < 0.0)
      throw NumericError("spectrum has a negative probability " +
                             std::to_string(min_p),
                         0.0, -min_p);
    const double total = probs.sum() + tail_mass;
    if (std::abs(total - 1.0) > 1e-9)
      throw NumericError("spectrum mass " + std::to_string(total) +
                             " is not 1",
                         1e-9, std::abs(total - 1.0));
    if (tail_mass < 0.0 || tail_mass > eps_tail)
      throw NumericError("spectrum tail mass " + std::to_string(tail_mass) +
                             " exceeds the truncation tolerance",
                         eps_tail, tail_mass);
    if (!(normalizer > 0.0))
      throw NumericError("spectrum normalizer must be positive");
  }
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  // First-order bounds on what the truncated tail could add, placing the
  // unaccounted mass at the truncation boundary.
  double mean_error = 0.0;
  double variance_error = 0.0;
};

struct CltParams {
  double mu = 0.0;      // centering rate: chaos orders per unit time
  double sigma2 = 0.0;  // variance rate: chaos orders^2 per unit time
};

struct DistanceReport {
  double ks = 0.0;
  std::optional<double> tv;
};

inline Moments moments(const SpectrumDistribution& spec) {
  const Eigen::Index n = spec.probs.size();
  const Eigen::ArrayXd orders =
      Eigen::ArrayXd::LinSpaced(n, 0.0, static_cast<double>(n - 1));
  Moments m;
  m.mean = (orders * spec.probs).sum();
  const double second = (orders.square() * spec.probs).sum();
  m.variance = second - m.mean * m.mean;
  const double edge = static_cast<double>(n);
  m.mean_error = spec.tail_mass * edge;
  m.variance_error = spec.tail_mass * edge * edge;
  return m;
}

inline std::complex<double> characteristic_function(
    const SpectrumDistribution& spec, double theta) {
  std::complex<double> acc(0.0, 0.0);
  for (Eigen::Index n = 0; n < spec.probs.size(); ++n)
    acc += spec.probs[n] *
           std::polar(1.0, theta * static_cast<double>(n));
  return acc;
}

// Kolmogorov distance between the law of (N - center)/scale and N(0, 1).
// The sup is over the atoms, evaluated from both sides of each jump; mass
// beyond the truncation shows up as a floor of tail_mass.
inline DistanceReport ks_to_standard_normal(const SpectrumDistribution& spec,
                                            double center, double scale) {
  if (!(scale > 0.0))
    throw std::invalid_argument("ks_to_standard_normal: scale must be > 0");
  double ks = spec.tail_mass;
  double cdf = 0.0;
  for (Eigen::Index n = 0; n < spec.probs.size(); ++n) {
    const double x = (static_cast<double>(n) - center) / scale;
    const double ref = normal_cdf(x);
    ks = std::max(ks, std::abs(cdf - ref));  // left limit of the jump
    cdf += spec.probs[n];
    ks = std::max(ks, std::abs(cdf - ref));  // right limit
  }
  return DistanceReport{ks, std::nullopt};
}

inline double total_variation(const SpectrumDistribution& a,
                              const SpectrumDistribution& b) {
  const Eigen::Index n = std::max(a.probs.size(), b.probs.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pa = i < a.probs.size() ? a.probs[i] : 0.0;
    const double pb = i < b.probs.size() ? b.probs[i] : 0.0;
    acc += std::abs(pa - pb);
  }
  return 0.5 * acc + 0.5 * std::abs(a.tail_mass - b.tail_mass);
}

// Smallest N with P(N_t > N) <= eps_tail, from the Markov bound
// P(N_t > N) <= pgf(x) / x^(N+1) minimized over a geometric grid of x > 1.
// The pgfs we truncate are entire, so arbitrarily large x are usable.
inline int chernoff_cutoff(const std::function<double(double)>& log_pgf,
                           double eps_tail) {
  if (!(eps_tail > 0.0) || eps_tail >= 1.0)
    throw std::invalid_argument("chernoff_cutoff: eps_tail must be in (0,1)");
  const double log_eps = std::log(eps_tail);
  constexpr int grid_size = 200;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid_size; ++k) {
    // x - 1 sweeps 1e-6 .. 1e13: small x for fast-growing pgfs, large x to
    // certify short supports.
    const double xm1 = 1e-6 * std::pow(1e19, k / (grid_size - 1.0));
    const double x = 1.0 + xm1;
    const double lp = log_pgf(x);
    if (!std::isfinite(lp))
      throw NumericError("chernoff_cutoff: log_pgf not finite at x = " +
                         std::to_string(x));
    const double need = (lp - log_eps) / std::log1p(xm1) - 1.0;
    best = std::min(best, std::max(0.0, std::ceil(need)));
  }
  return static_cast<int>(best);
}

// Reference Poisson law, assembled in log-domain so large intensities never
// overflow.  The support is extended past n_max if that is what it takes to
// get the tail below eps_tail.
inline SpectrumDistribution poisson_pmf(double lambda, Eigen::Index n_max,
                                        double eps_tail) {
  if (!(lambda >= 0.0))
    throw std::invalid_argument("poisson_pmf: lambda must be >= 0");
  if (lambda == 0.0) {
    SpectrumDistribution spec;
    spec.probs = Eigen::ArrayXd::Zero(std::max<Eigen::Index>(n_max, 0) + 1);
    spec.probs[0] = 1.0;
    return spec;
  }
  auto log_pgf = [lambda](double x) { return lambda * (x - 1.0); };
  const Eigen::Index needed = chernoff_cutoff(log_pgf, eps_tail);
  const Eigen::Index top = std::max(n_max, needed);
  SpectrumDistribution spec;
  spec.probs.resize(top + 1);
  const double log_lambda = std::log(lambda);
  for (Eigen::Index n = 0; n <= top; ++n) {
    const double ln = static_cast<double>(n);
    spec.probs[n] =
        std::exp(ln * log_lambda - lambda - std::lgamma(ln + 1.0));
  }
  spec.tail_mass = std::max(0.0, 1.0 - spec.probs.sum());
  return spec;
}

}  // namespace chaospec
