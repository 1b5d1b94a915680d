#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "chaospec/errors.hpp"
#include "chaospec/quadrature.hpp"
#include "chaospec/spectrum.hpp"

// Chaos spectrum of the Fourier mode of the random Schrodinger equation at
// frequency zero.  The chaos weights are
//
//   c2(t, n) = t^n / n! * exp(-R(0) t) * integral R(y)^n Phi0(y) dy,
//
// with R an isotropic Gaussian covariance bump and Phi0 a Gaussian profile
// (the inverse transform of the initial wave packet's energy density).  For
// this family every integral has a closed form, and the quadrature path is
// kept alongside as a cross-check.

namespace chaospec::schrodinger {

struct CovarianceModel {
  int d = 1;         // spatial dimension, 1..3
  double r0 = 1.0;   // R(0)
  double ell = 1.0;  // correlation length

  void validate() const {
    if (d < 1 || d > 3)
      throw std::invalid_argument(
          "CovarianceModel: dimension must be 1, 2 or 3, got " +
          std::to_string(d));
    if (!(r0 > 0.0))
      throw std::invalid_argument("CovarianceModel: r0 must be > 0");
    if (!(ell > 0.0))
      throw std::invalid_argument("CovarianceModel: ell must be > 0");
  }

  double operator()(const Eigen::VectorXd& y) const {
    return r0 * std::exp(-y.squaredNorm() / (2.0 * ell * ell));
  }

  double fourier(const Eigen::VectorXd& p) const {
    return r0 * std::pow(2.0 * M_PI * ell * ell, 0.5 * d) *
           std::exp(-0.5 * ell * ell * p.squaredNorm());
  }

  Eigen::MatrixXd hessian_at_zero() const {
    return -(r0 / (ell * ell)) * Eigen::MatrixXd::Identity(d, d);
  }

  // The normalized jump density fourier(p) / ((2 pi)^d r0) is a centered
  // Gaussian with this per-coordinate standard deviation.
  double jump_sigma() const { return 1.0 / ell; }
};

struct InitialDataModel {
  int d = 1;
  double amplitude = 1.0;  // Phi0(0)
  double width = 1.0;

  void validate() const {
    if (d < 1 || d > 3)
      throw std::invalid_argument(
          "InitialDataModel: dimension must be 1, 2 or 3, got " +
          std::to_string(d));
    if (!(amplitude > 0.0))
      throw std::invalid_argument("InitialDataModel: amplitude must be > 0");
    if (!(width > 0.0))
      throw std::invalid_argument("InitialDataModel: width must be > 0");
  }

  double operator()(const Eigen::VectorXd& y) const {
    return amplitude * std::exp(-y.squaredNorm() / (2.0 * width * width));
  }

  double transform(const Eigen::VectorXd& xi) const {
    return total_mass() * std::exp(-0.5 * width * width * xi.squaredNorm());
  }

  double total_mass() const {  // integral of Phi0 = transform at 0
    return amplitude * std::pow(2.0 * M_PI * width * width, 0.5 * d);
  }
};

namespace detail {

inline void check_pair(const CovarianceModel& cov,
                       const InitialDataModel& init) {
  cov.validate();
  init.validate();
  if (cov.d != init.d)
    throw std::invalid_argument(
        "covariance and initial data dimensions differ: " +
        std::to_string(cov.d) + " vs " + std::to_string(init.d));
}

}  // namespace detail

// Integration half-width: both R^n Phi0 and exp(t R) Phi0 live under a
// Gaussian envelope of scale <= max(ell, width), so this box bounds the
// dropped mass by roughly 1e-10 of the total.
inline double domain_half_width(const CovarianceModel& cov,
                                const InitialDataModel& init) {
  constexpr double eps_quad = 1e-10;
  return std::max(cov.ell, init.width) * std::sqrt(-2.0 * std::log(eps_quad)) +
         6.0;
}

// log of m_n = integral R(y)^n Phi0(y) dy (closed form).
inline double log_overlap_moment(const CovarianceModel& cov,
                                 const InitialDataModel& init, int n) {
  detail::check_pair(cov, init);
  if (n < 0) throw std::invalid_argument("overlap moment: n must be >= 0");
  const double kappa =
      n / (cov.ell * cov.ell) + 1.0 / (init.width * init.width);
  return std::log(init.amplitude) + n * std::log(cov.r0) +
         0.5 * cov.d * (std::log(2.0 * M_PI) - std::log(kappa));
}

// m_n itself, computed both in closed form and by adaptive quadrature; the
// two must agree to 1e-8 relative.  The integrand is a product of identical
// one-dimensional Gaussians, so the tensor-product quadrature factors into
// the d-th power of a single axis integral.
inline double overlap_moment(const CovarianceModel& cov,
                             const InitialDataModel& init, int n,
                             const QuadratureOptions& opt = {}) {
  const double closed = std::exp(log_overlap_moment(cov, init, n));
  const double kappa =
      n / (cov.ell * cov.ell) + 1.0 / (init.width * init.width);
  const double half_width = domain_half_width(cov, init);
  auto axis = [kappa](double u) { return std::exp(-0.5 * kappa * u * u); };
  const double axis_integral =
      integrate_adaptive(axis, -half_width, half_width, opt).value;
  const double quad = init.amplitude * std::pow(cov.r0, n) *
                      std::pow(axis_integral, cov.d);
  const double rel = std::abs(quad - closed) / closed;
  if (rel > 1e-8)
    throw NumericError("overlap moment n=" + std::to_string(n) +
                           ": quadrature disagrees with the closed form",
                       1e-8, rel);
  return closed;
}

// log c2(t, n).
inline double chaos_coefficient(const CovarianceModel& cov,
                                const InitialDataModel& init, double t,
                                int n) {
  detail::check_pair(cov, init);
  if (!(t >= 0.0))
    throw std::invalid_argument("chaos coefficient: t must be >= 0");
  if (n < 0) throw std::invalid_argument("chaos coefficient: n must be >= 0");
  if (t == 0.0)
    return n == 0 ? log_overlap_moment(cov, init, 0)
                  : -std::numeric_limits<double>::infinity();
  return n * std::log(t) - std::lgamma(n + 1.0) - cov.r0 * t +
         log_overlap_moment(cov, init, n);
}

// Support bound: the weights t^n m_n / n! decrease relative to Poisson(r0 t)
// weights (m_n / (m_0 r0^n) is decreasing in n), so the law is dominated by
// Poisson(r0 t) in likelihood ratio and the Poisson cutoff certifies the
// tail.
inline int support_bound(const CovarianceModel& cov, double t,
                         double eps_tail) {
  const double lambda = cov.r0 * t;
  return chernoff_cutoff(
      [lambda](double x) { return lambda * (x - 1.0); }, eps_tail);
}

inline Eigen::ArrayXd log_chaos_weights(const CovarianceModel& cov,
                                        const InitialDataModel& init,
                                        double t, int n_top) {
  Eigen::ArrayXd logw(n_top + 1);
  for (int n = 0; n <= n_top; ++n)
    logw[n] = chaos_coefficient(cov, init, t, n);
  return logw;
}

inline SpectrumDistribution spectrum(const CovarianceModel& cov,
                                     const InitialDataModel& init, double t,
                                     double eps_tail = 1e-12) {
  detail::check_pair(cov, init);
  if (!(t >= 0.0)) throw std::invalid_argument("spectrum: t must be >= 0");
  const int n_top = support_bound(cov, t, eps_tail);
  const Eigen::ArrayXd logw = log_chaos_weights(cov, init, t, n_top);
  const double log_z = logsumexp(logw);
  SpectrumDistribution spec;
  spec.probs = (logw - log_z).exp();
  spec.tail_mass = std::max(0.0, 1.0 - spec.probs.sum());
  spec.normalizer = std::exp(log_z);
  spec.validate(eps_tail);
  return spec;
}

// E exp(i theta N_t) as the ratio of two d-dimensional integrals,
//
//   integral exp(t (R(y) e^{i theta} - R(0))) Phi0(y) dy  /  (same, theta=0),
//
// evaluated by tensor-product quadrature.  At theta = 0 numerator and
// denominator run through identical arithmetic, so the ratio is exactly 1.
inline std::complex<double> cf_closed_form(const CovarianceModel& cov,
                                           const InitialDataModel& init,
                                           double t, double theta,
                                           const QuadratureOptions& opt = {}) {
  detail::check_pair(cov, init);
  if (!(t >= 0.0)) throw std::invalid_argument("cf: t must be >= 0");
  const double half_width = domain_half_width(cov, init);
  const std::complex<double> phase = std::polar(1.0, theta);
  auto integrand = [&](const Eigen::VectorXd& y) {
    return std::exp(t * (cov(y) * phase - cov.r0)) * init(y);
  };
  auto base = [&](const Eigen::VectorXd& y) {
    return std::exp(t * (cov(y) - cov.r0)) * init(y);
  };
  const std::complex<double> num =
      tensor_integrate(integrand, cov.d, half_width, opt).value;
  const double den = tensor_integrate(base, cov.d, half_width, opt).value;
  return num / den;
}

inline CltParams clt_params(const CovarianceModel& cov) {
  cov.validate();
  return CltParams{cov.r0, cov.r0};
}

// (2 pi)^{-d} integral p p^T fourier(p) dp; for the Gaussian family this is
// (r0 / ell^2) I, which is exactly -hessian_at_zero().
inline Eigen::MatrixXd diffusivity_matrix(const CovarianceModel& cov) {
  cov.validate();
  return (cov.r0 / (cov.ell * cov.ell)) *
         Eigen::MatrixXd::Identity(cov.d, cov.d);
}

}  // namespace chaospec::schrodinger
