#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

// Counter-based random numbers for reproducible parallel Monte Carlo.  A
// (seed, stream index) pair determines a stream; the j-th draw of a stream
// is a pure function of (stream, j).  Work can therefore be sharded across
// any number of threads, or re-batched, without changing a single sample.
// The generator is the splitmix64 finalizer applied to an affine counter,
// which is cheap enough to auto-vectorize in bulk fills.

namespace chaospec::rng {

inline constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z += golden_gamma;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t stream_base(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index * golden_gamma + 0x1a2b3c4d5e6f7788ULL));
}

inline double to_unit(std::uint64_t bits) {
  // 53 uniform bits mapped into (0, 1); never 0, safe under log.
  return static_cast<double>(bits >> 11) * 0x1p-53 + 0x1p-54;
}

struct Stream {
  std::uint64_t base = 0;
  std::uint64_t counter = 0;

  Stream() = default;
  Stream(std::uint64_t seed, std::uint64_t index)
      : base(stream_base(seed, index)) {}

  std::uint64_t next_bits() { return mix64(base + (counter++) * golden_gamma); }
  double uniform() { return to_unit(next_bits()); }
};

// out[i] = uniform draw at counter counter0 + stride * i of the stream.
inline void fill_uniforms(std::uint64_t base, std::uint64_t counter0,
                          std::uint64_t stride, double* out, int n) {
  for (int i = 0; i < n; ++i)
    out[i] =
        to_unit(mix64(base + (counter0 + stride * static_cast<std::uint64_t>(i)) *
                                 golden_gamma));
}

// sin(2 pi u) and cos(2 pi u) for u in [0, 1), elementwise, built from
// array products only: Eigen does not vectorize double sin/cos, and these
// two calls dominate the noise-generation cost of the lattice simulation.
//
// Reduction is to the nearest half turn q in {0, 1, 2}: with
// phi = (2u - q) pi, both sin(2 pi u) = sin(phi) cos(pi q) and
// cos(2 pi u) = cos(phi) cos(pi q) share the single sign factor
// cos(pi q) = 1 - 2 q (2 - q).  That keeps the whole computation in
// floor/multiply/add form; comparisons and select() would fall back to
// scalar code.  Taylor tails to phi^17 / phi^18 bound the error at
// |phi| = pi/2 by (pi/2)^19 / 19! < 5e-14.
//
// The five-argument form writes its two intermediates into caller-provided
// buffers (q_buf, phi2_buf) so that the hot loop never allocates; all five
// arguments may be Eigen blocks of larger arrays.
template <typename InT, typename SinT, typename CosT, typename QT,
          typename Phi2T>
void twopi_sincos(const InT& u, SinT&& sin_out, CosT&& cos_out, QT&& q_buf,
                  Phi2T&& phi2_buf) {
  q_buf = (2.0 * u + 0.5).floor();     // nearest half turn, 0..2
  cos_out = (2.0 * u - q_buf) * M_PI;  // phi, |phi| <= pi/2
  phi2_buf = cos_out.square();
  sin_out =
      cos_out *
      (1.0 +
       phi2_buf *
           (-1.0 / 6 +
            phi2_buf *
                (1.0 / 120 +
                 phi2_buf *
                     (-1.0 / 5040 +
                      phi2_buf *
                          (1.0 / 362880 +
                           phi2_buf *
                               (-1.0 / 39916800 +
                                phi2_buf *
                                    (1.0 / 6227020800 +
                                     phi2_buf *
                                         (-1.0 / 1307674368000 +
                                          phi2_buf *
                                              (1.0 /
                                               355687428096000)))))))));
  cos_out =
      1.0 +
      phi2_buf *
          (-1.0 / 2 +
           phi2_buf *
               (1.0 / 24 +
                phi2_buf *
                    (-1.0 / 720 +
                     phi2_buf *
                         (1.0 / 40320 +
                          phi2_buf *
                              (-1.0 / 3628800 +
                               phi2_buf *
                                   (1.0 / 479001600 +
                                    phi2_buf *
                                        (-1.0 / 87178291200 +
                                         phi2_buf *
                                             (1.0 / 20922789888000 +
                                              phi2_buf *
                                                  (-1.0 /
                                                   6402373705728000)))))))));
  q_buf = 1.0 - 2.0 * q_buf * (2.0 - q_buf);  // cos(pi q): +1, -1, +1
  sin_out *= q_buf;
  cos_out *= q_buf;
}

// Convenience form allocating its own scratch.
template <typename ArrayT>
void twopi_sincos(const ArrayT& u, ArrayT& sin_out, ArrayT& cos_out) {
  ArrayT q_buf(u.rows(), u.cols());
  ArrayT phi2_buf(u.rows(), u.cols());
  twopi_sincos(u, sin_out, cos_out, q_buf, phi2_buf);
}

// One standard normal pair by Box-Muller.
inline void normal_pair(Stream& stream, double& n0, double& n1) {
  const double u1 = stream.uniform();
  const double u2 = stream.uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  n0 = r * std::cos(2.0 * M_PI * u2);
  n1 = r * std::sin(2.0 * M_PI * u2);
}

inline double normal(Stream& stream) {
  double a, b;
  normal_pair(stream, a, b);
  return a;
}

// Poisson sampling: inversion by uniform products for small intensity,
// transformed rejection (Hormann's PTRS) above it.  Both consume a
// variable number of draws, which is safe because every sample owns its
// stream.
inline std::int64_t poisson(Stream& stream, double lambda) {
  if (lambda < 30.0) {
    const double floor_value = std::exp(-lambda);
    std::int64_t k = -1;
    double product = 1.0;
    do {
      ++k;
      product *= stream.uniform();
    } while (product > floor_value);
    return k;
  }
  const double b = 0.931 + 2.53 * std::sqrt(lambda);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_lambda = std::log(lambda);
  for (;;) {
    double u = stream.uniform() - 0.5;
    double v = stream.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_lambda - lambda - std::lgamma(k + 1.0))
      return static_cast<std::int64_t>(k);
  }
}

}  // namespace chaospec::rng
