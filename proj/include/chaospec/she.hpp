#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "chaospec/errors.hpp"
#include "chaospec/highprec.hpp"
#include "chaospec/normal.hpp"
#include "chaospec/quadrature.hpp"
#include "chaospec/spectrum.hpp"

// Chaos spectrum of the 1+1 stochastic heat equation solution at the
// origin, extracted from the closed second-moment formula
//
//   f(beta, t) = E Z_beta(t,0)^2 = 2 exp(beta^4 t / 4) Phi(beta^2 sqrt(t/2)).
//
// Substituting beta -> beta e^{-s/2} gives the Laplace transform of the
// chaos-order law, i.e. its pgf is
//
//   G(x) = exp(q (x^2 - 1)) Phi(c x) / Phi(c),  q = beta^4 t / 4,
//                                               c = beta^2 sqrt(t/2),
//
// whose coefficients are the probabilities.  The exponential factor has
// positive coefficients but the entire series of Phi(c x) alternates and
// cancels down to values of size exp(-c^2/2), so the series product is done
// in extended precision with a digit budget that grows with beta^4 t.  A
// trigonometric inversion of the characteristic function provides a second,
// independent route to the same numbers.

namespace chaospec::she {

struct SheParams {
  double beta = 1.0;
  double t = 0.0;

  void validate() const {
    if (!(beta > 0.0))
      throw std::invalid_argument("SheParams: beta must be > 0");
    if (!(t >= 0.0)) throw std::invalid_argument("SheParams: t must be >= 0");
  }

  double q() const { return 0.25 * std::pow(beta, 4) * t; }
  double c() const { return beta * beta * std::sqrt(0.5 * t); }
};

struct PowerSeries {
  std::vector<BigFloat> coeffs;  // coefficient of x^n at index n
  unsigned digits = 0;           // working decimal precision
};

inline double log_second_moment(const SheParams& p) {
  p.validate();
  return std::log(2.0) + p.q() + std::log(normal_cdf(p.c()));
}

inline double second_moment(const SheParams& p) {
  const double lf = log_second_moment(p);
  if (lf >= std::log(std::numeric_limits<double>::max()))
    throw NumericError(
        "second moment overflows double; log value = " + std::to_string(lf),
        0.0, lf);
  return std::exp(lf);
}

// E exp(-s N_t) = f(beta e^{-s/2}, t) / f(beta, t).
inline double laplace_transform(const SheParams& p, double s) {
  p.validate();
  if (!(s >= 0.0))
    throw std::invalid_argument("laplace_transform: s must be >= 0");
  SheParams weakened{p.beta * std::exp(-0.5 * s), p.t};
  return std::exp(log_second_moment(weakened) - log_second_moment(p));
}

inline CltParams clt_params(const SheParams& p) {
  p.validate();
  const double b4 = std::pow(p.beta, 4);
  return CltParams{0.5 * b4, b4};
}

// log G(x) for the truncation bound; G is entire so any x > 1 works.
inline double log_pgf(const SheParams& p, double x) {
  return p.q() * (x * x - 1.0) + std::log(normal_cdf(p.c() * x)) -
         std::log(normal_cdf(p.c()));
}

inline int support_bound(const SheParams& p, double eps_tail) {
  return chernoff_cutoff([&p](double x) { return log_pgf(p, x); }, eps_tail);
}

namespace detail {

inline unsigned digit_budget(const SheParams& p) {
  constexpr unsigned max_digits = 25000;
  const double needed = 30.0 + std::ceil(4.0 * p.q());
  if (needed > max_digits)
    throw NumericError("series extraction needs " +
                           std::to_string(static_cast<long>(needed)) +
                           " decimal digits, beyond the supported " +
                           std::to_string(max_digits),
                       max_digits, needed);
  return static_cast<unsigned>(needed);
}

// exp(q x^2) truncated at degree n_top: coefficients q^j / j! at x^{2j}.
inline PowerSeries even_exponential_series(const BigFloat& q_big,
                                           std::size_t n_top,
                                           unsigned digits) {
  PowerSeries s;
  s.digits = digits;
  s.coeffs.assign(n_top + 1, big(digits));
  s.coeffs[0] = big(digits, 1.0);
  for (std::size_t j = 1; 2 * j <= n_top; ++j)
    s.coeffs[2 * j] = s.coeffs[2 * j - 2] * q_big / static_cast<unsigned>(j);
  return s;
}

// Phi(c x) as an entire series:
//   1/2 + sum_k (-1)^k c^{2k+1} x^{2k+1} / (sqrt(2 pi) 2^k k! (2k+1)).
inline PowerSeries gaussian_cdf_series(const BigFloat& c_big,
                                       std::size_t n_top, unsigned digits) {
  PowerSeries s;
  s.digits = digits;
  s.coeffs.assign(n_top + 1, big(digits));
  s.coeffs[0] = big(digits, 0.5);
  if (n_top >= 1) {
    const BigFloat root_two_pi = sqrt(2 * acos(big(digits, -1.0)));
    s.coeffs[1] = c_big / root_two_pi;
    const BigFloat minus_c_sq = -c_big * c_big;
    for (std::size_t k = 1; 2 * k + 1 <= n_top; ++k)
      s.coeffs[2 * k + 1] = s.coeffs[2 * k - 1] * minus_c_sq *
                            static_cast<unsigned>(2 * k - 1) /
                            static_cast<unsigned>(2 * k * (2 * k + 1));
  }
  return s;
}

inline PowerSeries truncated_product(const PowerSeries& a,
                                     const PowerSeries& b,
                                     std::size_t n_top) {
  PowerSeries prod;
  prod.digits = std::max(a.digits, b.digits);
  prod.coeffs.assign(n_top + 1, big(prod.digits));
  for (std::size_t i = 0; i < a.coeffs.size() && i <= n_top; ++i) {
    if (a.coeffs[i] == 0) continue;
    const std::size_t j_top = std::min(n_top - i, b.coeffs.size() - 1);
    for (std::size_t j = 0; j <= j_top; ++j) {
      if (b.coeffs[j] == 0) continue;
      prod.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
    }
  }
  return prod;
}

}  // namespace detail

// The spectrum by coefficient extraction from the pgf.
inline SpectrumDistribution pgf_coefficients(const SheParams& p,
                                             double eps_tail = 1e-12) {
  p.validate();
  const int n_top = support_bound(p, eps_tail);
  const unsigned digits = detail::digit_budget(p);
  const BigFloat q_big = big(digits, 0.25) * pow(big(digits, p.beta), 4) *
                         big(digits, p.t);
  const BigFloat c_big =
      big(digits, p.beta) * big(digits, p.beta) * sqrt(big(digits, 0.5 * p.t));

  const PowerSeries expo =
      detail::even_exponential_series(q_big, n_top, digits);
  const PowerSeries cdf = detail::gaussian_cdf_series(c_big, n_top, digits);
  const PowerSeries prod = detail::truncated_product(expo, cdf, n_top);

  // G = exp(-q) / Phi(c) * expo * cdf; Phi(c) = erfc(-c / sqrt(2)) / 2.
  const BigFloat phi_c = erfc(-c_big / sqrt(big(digits, 2.0))) / 2;
  const BigFloat norm = exp(-q_big) / phi_c;

  SpectrumDistribution spec;
  spec.probs.resize(n_top + 1);
  BigFloat covered = big(digits);
  for (int n = 0; n <= n_top; ++n) {
    const BigFloat value = prod.coeffs[n] * norm;
    covered += value;
    double pn = static_cast<double>(value);
    if (pn < 0.0) {
      if (pn < -1e-9)
        throw NumericError("pgf coefficient " + std::to_string(n) +
                               " is negative: series precision exhausted",
                           1e-9, -pn);
      pn = 0.0;
    }
    spec.probs[n] = pn;
  }
  spec.tail_mass = std::max(0.0, static_cast<double>(1 - covered));
  spec.normalizer = second_moment(p);
  spec.validate(eps_tail);
  return spec;
}

// integral over the straight segment from 0 to z of exp(-y^2/2) dy,
// normalized by sqrt(2 pi); equals Phi(z) - 1/2 on the real axis.
inline std::complex<double> complex_gaussian_integral(
    std::complex<double> z, const QuadratureOptions& opt = {1e-12}) {
  if (std::abs(z) > 1e4)
    throw std::invalid_argument(
        "complex_gaussian_integral: |z| too large for the straight-segment "
        "contour");
  auto integrand = [](std::complex<double> y) {
    constexpr double inv_root_two_pi = 0.3989422804014326779;
    return std::exp(-0.5 * y * y) * inv_root_two_pi;
  };
  return integrate_segment(integrand, z, opt).value;
}

// E exp(i theta N_t) in closed form,
//
//   exp(q (e^{2 i theta} - 1)) * (1/2 + I(c e^{i theta})) / (1/2 + I(c)),
//
// with I the segment integral above.  The pieces are combined through
// complex logs because the prefactor alone can underflow while the bracket
// overflows double range; their sum is always moderate.
inline std::complex<double> cf_closed_form(const SheParams& p, double theta,
                                           const QuadratureOptions& opt = {
                                               1e-12}) {
  p.validate();
  if (p.t == 0.0) return {1.0, 0.0};
  if (p.q() > 700.0)
    throw NumericError(
        "cf bracket exceeds double range at beta^4 t / 4 = " +
            std::to_string(p.q()) + "; use the Laplace/series route",
        700.0, p.q());
  const double c = p.c();
  const std::complex<double> z = c * std::polar(1.0, theta);
  const std::complex<double> numerator = 0.5 + complex_gaussian_integral(z, opt);
  const std::complex<double> denominator =
      0.5 + complex_gaussian_integral(std::complex<double>(c, 0.0), opt);
  const std::complex<double> prefactor_log =
      p.q() * (std::polar(1.0, 2.0 * theta) - 1.0);
  return std::exp(prefactor_log + std::log(numerator) -
                  std::log(denominator));
}

// The spectrum by discrete inversion of the characteristic function:
//   p_n = (1/M) sum_k cf(2 pi k / M) exp(-2 pi i k n / M),
// exact for laws on {0..M-1} up to tail aliasing.
inline SpectrumDistribution spectrum_via_cf_inversion(
    const SheParams& p, int n_points, double eps_tail = 1e-12,
    const QuadratureOptions& opt = {1e-12}) {
  p.validate();
  const int n_top = support_bound(p, eps_tail);
  if (n_points < 2 * (n_top + 1))
    throw std::invalid_argument(
        "cf inversion: n_points = " + std::to_string(n_points) +
        " is below the aliasing guard 2 * " + std::to_string(n_top + 1));
  const int m = n_points;
  std::vector<std::complex<double>> cf(m);
  for (int k = 0; k < m; ++k)
    cf[k] = cf_closed_form(p, 2.0 * M_PI * k / m, opt);

  SpectrumDistribution spec;
  spec.probs.resize(n_top + 1);
  double covered = 0.0;
  for (int n = 0; n <= n_top; ++n) {
    std::complex<double> acc(0.0, 0.0);
    for (int k = 0; k < m; ++k)
      acc += cf[k] * std::polar(1.0, -2.0 * M_PI * k * n / m);
    acc /= static_cast<double>(m);
    if (std::abs(acc.imag()) > 1e-9)
      throw NumericError("cf inversion left an imaginary residue at n = " +
                             std::to_string(n),
                         1e-9, std::abs(acc.imag()));
    double pn = acc.real();
    if (pn < 0.0) {
      if (pn < -1e-9)
        throw NumericError("cf inversion produced a negative probability "
                           "at n = " + std::to_string(n),
                           1e-9, -pn);
      pn = 0.0;
    }
    spec.probs[n] = pn;
    covered += pn;
  }
  spec.tail_mass = std::max(0.0, 1.0 - covered);
  spec.normalizer = second_moment(p);
  spec.validate(eps_tail);
  return spec;
}

}  // namespace chaospec::she
