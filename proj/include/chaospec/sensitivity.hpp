#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "chaospec/errors.hpp"
#include "chaospec/schrodinger.hpp"
#include "chaospec/she.hpp"
#include "chaospec/spectrum.hpp"

// Decorrelation under an Ornstein-Uhlenbeck resampling of the driving
// noise.  Replacing the noise V by e^{-s} V + sqrt(1 - e^{-2s}) V-tilde
// multiplies the n-th chaos by e^{-ns}, so the correlation of the solution
// with its perturbed copy is a Laplace-type functional of the chaos law:
//
//   cor(s) = (E e^{-s N} - P(N=0)) / (1 - P(N=0)).
//
// The onset-of-chaos scans probe s = t^{-alpha}: correlation tends to 1 for
// alpha > 1 and to 0 for alpha < 1, with the transition at s ~ 1/t.

namespace chaospec::sensitivity {

struct CorrelationCurve {
  std::string model;
  double t = 0.0;
  std::vector<double> s;
  std::vector<double> cor;
};

struct OnsetScan {
  std::vector<double> alphas;
  std::vector<double> times;
  Eigen::ArrayXXd values;  // values(i, j) = cor at s = times[j]^-alphas[i]
};

inline double correlation_from_spectrum(const SpectrumDistribution& spec,
                                        double s) {
  if (!(s >= 0.0))
    throw std::invalid_argument("correlation: s must be >= 0");
  const double p0 = spec.probs.size() > 0 ? spec.probs[0] : 1.0;
  if (!(p0 < 1.0))
    throw DegenerateLawError(
        "correlation undefined: the law is concentrated at chaos order 0");
  double num = 0.0;
  for (Eigen::Index n = spec.probs.size() - 1; n >= 1; --n)
    num += spec.probs[n] * std::exp(-s * static_cast<double>(n));
  return num / (1.0 - p0);
}

// Correlation induced by a Poisson(t) chaos law (the geometric Brownian
// motion benchmark): (e^{t e^{-s}} - 1) / (e^t - 1), written with expm1 so
// that t of order 1e4 and the t -> 0 limit are both handled.
inline double gbm_correlation(double t, double s) {
  if (!(t >= 0.0)) throw std::invalid_argument("gbm: t must be >= 0");
  if (!(s >= 0.0)) throw std::invalid_argument("gbm: s must be >= 0");
  if (t == 0.0) return std::exp(-s);
  const double a = t * std::exp(-s);
  return std::exp(t * std::expm1(-s)) * std::expm1(-a) / std::expm1(-t);
}

// Closed-form correlation providers for the onset scans.  Using the Laplace
// transforms directly keeps t = 1e4 exact and cheap where assembling the
// full pmf would cost extended-precision work.
class LaplaceModel {
 public:
  virtual ~LaplaceModel() = default;
  virtual std::string name() const = 0;
  virtual double correlation(double t, double s) const = 0;
};

class GbmModel final : public LaplaceModel {
 public:
  std::string name() const override { return "gbm"; }
  double correlation(double t, double s) const override {
    return gbm_correlation(t, s);
  }
};

class SheModel final : public LaplaceModel {
 public:
  explicit SheModel(double beta = 1.0) : beta_(beta) {}
  std::string name() const override { return "she"; }

  // (f(beta e^{-s/2}, t) - 1) / (f(beta, t) - 1), from E Z = 1 and
  // P(N=0) = 1/f(beta, t); evaluated through log f to survive large t.
  double correlation(double t, double s) const override {
    she::SheParams base{beta_, t};
    base.validate();
    if (!(s >= 0.0)) throw std::invalid_argument("she: s must be >= 0");
    if (t == 0.0)
      throw DegenerateLawError("she correlation undefined at t = 0");
    she::SheParams weak{beta_ * std::exp(-0.5 * s), t};
    const double lf = she::log_second_moment(base);
    const double lf_weak = she::log_second_moment(weak);
    return std::exp(lf_weak - lf) * std::expm1(-lf_weak) / std::expm1(-lf);
  }

 private:
  double beta_;
};

class SchrodingerModel final : public LaplaceModel {
 public:
  SchrodingerModel(schrodinger::CovarianceModel cov,
                   schrodinger::InitialDataModel init)
      : cov_(cov), init_(init) {}
  std::string name() const override { return "schrodinger"; }

  // Ratio of log-domain sums over chaos orders n >= 1; the order-0 term is
  // excluded up front instead of being subtracted, which would cancel badly
  // at small s.
  double correlation(double t, double s) const override {
    if (!(s >= 0.0))
      throw std::invalid_argument("schrodinger: s must be >= 0");
    if (t == 0.0)
      throw DegenerateLawError("schrodinger correlation undefined at t = 0");
    const int n_top = schrodinger::support_bound(cov_, t, 1e-16);
    const Eigen::ArrayXd logw =
        schrodinger::log_chaos_weights(cov_, init_, t, std::max(n_top, 1));
    const Eigen::ArrayXd active = logw.tail(logw.size() - 1);
    const Eigen::ArrayXd orders = Eigen::ArrayXd::LinSpaced(
        active.size(), 1.0, static_cast<double>(active.size()));
    return std::exp(logsumexp(active - s * orders) - logsumexp(active));
  }

 private:
  schrodinger::CovarianceModel cov_;
  schrodinger::InitialDataModel init_;
};

inline CorrelationCurve correlation_curve(const LaplaceModel& model, double t,
                                          const std::vector<double>& s_grid) {
  CorrelationCurve curve;
  curve.model = model.name();
  curve.t = t;
  curve.s = s_grid;
  curve.cor.reserve(s_grid.size());
  for (double s : s_grid) curve.cor.push_back(model.correlation(t, s));
  return curve;
}

inline OnsetScan onset_scan(const LaplaceModel& model,
                            const std::vector<double>& alphas,
                            const std::vector<double>& times) {
  for (double a : alphas)
    if (!(a > 0.0))
      throw std::invalid_argument("onset scan: exponents must be > 0");
  for (double t : times)
    if (!(t > 0.0))
      throw std::invalid_argument("onset scan: times must be > 0");
  OnsetScan scan;
  scan.alphas = alphas;
  scan.times = times;
  scan.values.resize(static_cast<Eigen::Index>(alphas.size()),
                     static_cast<Eigen::Index>(times.size()));
  for (std::size_t i = 0; i < alphas.size(); ++i)
    for (std::size_t j = 0; j < times.size(); ++j)
      scan.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          model.correlation(times[j], std::pow(times[j], -alphas[i]));
  return scan;
}

}  // namespace chaospec::sensitivity
