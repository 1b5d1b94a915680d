#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "chaospec/errors.hpp"
#include "chaospec/normal.hpp"
#include "chaospec/rng.hpp"
#include "chaospec/schrodinger.hpp"
#include "chaospec/she.hpp"
#include "chaospec/spectrum.hpp"
#include "chaospec/streaming.hpp"

// Stochastic verification of the closed forms: coupled lattice simulation
// of the stochastic heat equation under a resampled noise, the geometric
// Brownian motion benchmark, and the compound-Poisson kinetic picture.
//
// Determinism contract: sample i draws from the counter-based stream
// (seed, i) only, samples are reduced in fixed blocks of 64, and block
// results are merged in block order, so estimates are bit-identical for any
// worker count.

namespace chaospec::mc {

inline constexpr std::int64_t block_size = 64;

struct SimEstimate {
  double value = 0.0;
  double stderr = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

struct LatticeConfig {
  double dx = 0.05;
  double dt = 0.000625;
  double half_width = 5.0;  // domain [-L, L], Dirichlet walls

  void validate(double t) const {
    if (!(dx > 0.0) || !(dt > 0.0) || !(half_width > 0.0))
      throw std::invalid_argument("lattice: dx, dt, half_width must be > 0");
    if (dt > 0.5 * dx * dx * (1.0 + 1e-12))
      throw std::invalid_argument(
          "lattice: explicit scheme unstable, need dt <= dx^2 / 2 (dt = " +
          std::to_string(dt) + ", dx = " + std::to_string(dx) + ")");
    if (half_width < 4.0 * std::sqrt(t))
      throw std::invalid_argument(
          "lattice: half_width must be >= 4 sqrt(t) to keep the boundary "
          "error negligible at the origin");
  }
};

namespace detail {

inline std::int64_t checked_divisor(double whole, double step,
                                    const std::string& what) {
  const double ratio = whole / step;
  const std::int64_t n = std::llround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) >
                   1e-9 * std::max(1.0, std::abs(ratio)))
    throw std::invalid_argument(what + ": " + std::to_string(step) +
                                " does not divide " + std::to_string(whole));
  return n;
}

// Dispatches blocks to workers.  The work callback receives the worker
// index so that callers can reuse per-worker scratch buffers; results must
// depend only on the block index.
inline void run_blocks(std::int64_t n_blocks, int n_workers,
                       const std::function<void(int, std::int64_t)>& work) {
  if (n_workers <= 1) {
    for (std::int64_t b = 0; b < n_blocks; ++b) work(0, b);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto body = [&](int worker) {
    for (;;) {
      const std::int64_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      try {
        work(worker, b);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(body, w);
  for (auto& thread : pool) thread.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Draws normals one at a time from Box-Muller pairs, remembering the spare.
struct NormalSource {
  rng::Stream* stream;
  double spare = 0.0;
  bool has_spare = false;

  explicit NormalSource(rng::Stream& s) : stream(&s) {}
  double next() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    double a, b;
    rng::normal_pair(*stream, a, b);
    spare = b;
    has_spare = true;
    return a;
  }
};

}  // namespace detail

// e^{-s} v + sqrt(1 - e^{-2s}) v_tilde, cellwise.
inline Eigen::ArrayXXd resample_noise(const Eigen::ArrayXXd& v,
                                      const Eigen::ArrayXXd& v_tilde,
                                      double s) {
  if (v.rows() != v_tilde.rows() || v.cols() != v_tilde.cols())
    throw std::invalid_argument("resample_noise: field shapes differ");
  if (!(s >= 0.0))
    throw std::invalid_argument("resample_noise: s must be >= 0");
  return std::exp(-s) * v + std::sqrt(-std::expm1(-2.0 * s)) * v_tilde;
}

struct PairEstimate {
  SimEstimate zz;  // E[Z(t,0) Z_s(t,0)]
  SimEstimate z2;  // E[Z(t,0)^2]
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // per-sample cov
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

// Coupled explicit-Euler lattices for Z (noise V) and Z_s (noise V_s),
// sharing the Gaussian increments cellwise:
//   Z_{k+1} = Z_k + (dt / 2) lap_dx Z_k + beta Z_k xi sqrt(dt / dx).
inline PairEstimate simulate_she_pair(const LatticeConfig& cfg,
                                      const she::SheParams& p, double s,
                                      std::int64_t n_samples,
                                      std::uint64_t seed, int n_workers = 1) {
  p.validate();
  if (!(s >= 0.0))
    throw std::invalid_argument("simulate_she_pair: s must be >= 0");
  if (n_samples < 2)
    throw std::invalid_argument("simulate_she_pair: need at least 2 samples");
  cfg.validate(p.t);
  const std::int64_t nx =
      detail::checked_divisor(2.0 * cfg.half_width, cfg.dx, "lattice width");
  if (nx % 2 != 0)
    throw std::invalid_argument(
        "lattice: half_width / dx must be integral so that x = 0 is a node");
  const std::int64_t steps = detail::checked_divisor(p.t, cfg.dt, "time");
  const int m = static_cast<int>(nx - 1);  // interior nodes
  const int center = static_cast<int>(nx / 2 - 1);
  const int evens = (m + 1) / 2;
  const int odds = m / 2;

  const double ca = cfg.dt / (2.0 * cfg.dx * cfg.dx);
  const double cn = p.beta * std::sqrt(cfg.dt / cfg.dx);
  const double es = std::exp(-s);
  const double ss = std::sqrt(-std::expm1(-2.0 * s));

  const std::int64_t n_blocks = (n_samples + block_size - 1) / block_size;
  std::vector<VectorMoments<2>> partial(n_blocks);

  // Scratch is allocated once per worker and reused by every block it
  // processes, so the hot loop performs no allocation at all.  Arrays keep
  // the full block_size width; a partial final block simply computes (and
  // ignores) a few stale columns, which is cheaper and simpler than
  // resizing.  Columns never mix, so the used columns are unaffected.
  struct Scratch {
    std::vector<std::uint64_t> base;
    Eigen::ArrayXXd z, zs, z_next, zs_next, xi, xi_tilde, xi_s;
    Eigen::ArrayXXd u1, u2, radius, sin_v, cos_v, q_buf, phi2_buf;

    Scratch(int m, int evens)
        : base(block_size),
          z(m, block_size),
          zs(m, block_size),
          z_next(m, block_size),
          zs_next(m, block_size),
          xi(m, block_size),
          xi_tilde(m, block_size),
          xi_s(m, block_size),
          u1(evens, block_size),
          u2(evens, block_size),
          radius(evens, block_size),
          sin_v(evens, block_size),
          cos_v(evens, block_size),
          q_buf(evens, block_size),
          phi2_buf(evens, block_size) {
      // Stale columns of a partial block run through log() and the lattice
      // update; keep them at benign values rather than uninitialized bits.
      u1.setConstant(0.5);
      u2.setConstant(0.5);
      xi.setZero();
      xi_tilde.setZero();
    }
  };
  const int worker_slots = std::max(1, n_workers);
  std::vector<Scratch> scratch;
  scratch.reserve(worker_slots);
  for (int w = 0; w < worker_slots; ++w) scratch.emplace_back(m, evens);

  auto work = [&](int worker, std::int64_t block) {
    Scratch& s_buf = scratch[worker];
    const std::int64_t first = block * block_size;
    const int count =
        static_cast<int>(std::min<std::int64_t>(block_size, n_samples - first));
    for (int j = 0; j < count; ++j)
      s_buf.base[j] =
          rng::stream_base(seed, static_cast<std::uint64_t>(first + j));

    Eigen::ArrayXXd* z = &s_buf.z;
    Eigen::ArrayXXd* zs = &s_buf.zs;
    Eigen::ArrayXXd* z_next = &s_buf.z_next;
    Eigen::ArrayXXd* zs_next = &s_buf.zs_next;
    z->setOnes();
    zs->setOnes();

    using StridedMap =
        Eigen::Map<Eigen::ArrayXXd, 0, Eigen::Stride<Eigen::Dynamic, 2>>;
    const Eigen::Stride<Eigen::Dynamic, 2> stride(m, 2);

    // Noise value for (sample, step k, field f, cell c) is a fixed function
    // of the sample's stream: cells are generated as Box-Muller pairs
    // (2q, 2q+1) from uniform counters ((k 2 + f) evens + q) 2 + {0, 1}.
    auto generate_noise = [&](std::int64_t k, int field,
                              Eigen::ArrayXXd& out) {
      const std::uint64_t counter0 =
          (static_cast<std::uint64_t>(k) * 2 + field) *
          static_cast<std::uint64_t>(evens) * 2;
      for (int j = 0; j < count; ++j) {
        rng::fill_uniforms(s_buf.base[j], counter0, 2,
                           s_buf.u1.col(j).data(), evens);
        rng::fill_uniforms(s_buf.base[j], counter0 + 1, 2,
                           s_buf.u2.col(j).data(), evens);
      }
      s_buf.radius = (-2.0 * s_buf.u1.log()).sqrt();
      rng::twopi_sincos(s_buf.u2, s_buf.sin_v, s_buf.cos_v, s_buf.q_buf,
                        s_buf.phi2_buf);
      StridedMap(out.data(), evens, count, stride) =
          (s_buf.radius * s_buf.cos_v).leftCols(count);
      if (odds > 0)
        StridedMap(out.data() + 1, odds, count, stride) =
            (s_buf.radius * s_buf.sin_v).block(0, 0, odds, count);
    };

    auto advance = [&](const Eigen::ArrayXXd& field, Eigen::ArrayXXd& to,
                       const Eigen::ArrayXXd& noise) {
      to = field * (1.0 - 2.0 * ca + cn * noise);
      to.topRows(m - 1) += ca * field.bottomRows(m - 1);
      to.bottomRows(m - 1) += ca * field.topRows(m - 1);
    };

    for (std::int64_t k = 0; k < steps; ++k) {
      generate_noise(k, 0, s_buf.xi);
      generate_noise(k, 1, s_buf.xi_tilde);
      s_buf.xi_s = es * s_buf.xi + ss * s_buf.xi_tilde;
      advance(*z, *z_next, s_buf.xi);
      advance(*zs, *zs_next, s_buf.xi_s);
      std::swap(z, z_next);
      std::swap(zs, zs_next);
    }

    VectorMoments<2> acc;
    for (int j = 0; j < count; ++j) {
      const double z0 = (*z)(center, j);
      const double zs0 = (*zs)(center, j);
      acc.add(Eigen::Vector2d(z0 * zs0, z0 * z0));
    }
    partial[block] = acc;
  };

  detail::run_blocks(n_blocks, n_workers, work);

  VectorMoments<2> total;
  for (const auto& acc : partial) total.merge(acc);

  PairEstimate out;
  out.zz = SimEstimate{total.mean(0), total.stderr_mean(0), n_samples, seed};
  out.z2 = SimEstimate{total.mean(1), total.stderr_mean(1), n_samples, seed};
  out.covariance = total.covariance();
  out.n_samples = n_samples;
  out.seed = seed;
  return out;
}

// (E[Z Z_s] - 1) / (E[Z^2] - 1) with a delta-method standard error; uses
// E Z = 1.
inline SimEstimate implied_correlation(const PairEstimate& pair) {
  const double a = pair.zz.value;
  const double b = pair.z2.value;
  if (!(b > 1.0))
    throw DegenerateLawError(
        "implied correlation undefined: estimated E[Z^2] <= 1");
  const double value = (a - 1.0) / (b - 1.0);
  Eigen::Vector2d grad(1.0 / (b - 1.0), -(a - 1.0) / ((b - 1.0) * (b - 1.0)));
  const double variance = grad.dot(pair.covariance * grad) /
                          static_cast<double>(pair.n_samples);
  return SimEstimate{value, std::sqrt(std::max(0.0, variance)),
                     pair.n_samples, pair.seed};
}

// Exact sampling of the geometric Brownian motion benchmark: (B, B_s)
// jointly normal with correlation e^{-s}; the estimator centers by the
// known mean E X = 1 and needs no path discretization.
inline SimEstimate simulate_gbm_pair(double t, double s,
                                     std::int64_t n_samples,
                                     std::uint64_t seed, int n_workers = 1) {
  if (!(t >= 0.0)) throw std::invalid_argument("gbm: t must be >= 0");
  if (!(s >= 0.0)) throw std::invalid_argument("gbm: s must be >= 0");
  if (n_samples < 2)
    throw std::invalid_argument("gbm: need at least 2 samples");
  if (t == 0.0)
    throw DegenerateLawError("gbm correlation undefined at t = 0: X is 1");

  const double root_t = std::sqrt(t);
  const double es = std::exp(-s);
  const double ss = std::sqrt(-std::expm1(-2.0 * s));
  const std::int64_t n_blocks = (n_samples + block_size - 1) / block_size;
  std::vector<VectorMoments<3>> partial(n_blocks);

  auto work = [&](int, std::int64_t block) {
    const std::int64_t first = block * block_size;
    const std::int64_t count =
        std::min<std::int64_t>(block_size, n_samples - first);
    VectorMoments<3> acc;
    for (std::int64_t j = 0; j < count; ++j) {
      rng::Stream stream(seed, static_cast<std::uint64_t>(first + j));
      double g1, g2;
      rng::normal_pair(stream, g1, g2);
      const double b = root_t * g1;
      const double b_s = root_t * (es * g1 + ss * g2);
      const double x = std::exp(b - 0.5 * t);
      const double x_s = std::exp(b_s - 0.5 * t);
      acc.add(Eigen::Vector3d(x * x_s, x * x, x_s * x_s));
    }
    partial[block] = acc;
  };
  detail::run_blocks(n_blocks, n_workers, work);

  VectorMoments<3> total;
  for (const auto& acc : partial) total.merge(acc);

  const double a = total.mean(0), bb = total.mean(1), cc = total.mean(2);
  if (!(bb > 1.0) || !(cc > 1.0))
    throw DegenerateLawError("gbm correlation: zero empirical variance");
  const double denom = std::sqrt((bb - 1.0) * (cc - 1.0));
  const double value = (a - 1.0) / denom;
  Eigen::Vector3d grad(1.0 / denom,
                       -0.5 * (a - 1.0) / (denom * (bb - 1.0)),
                       -0.5 * (a - 1.0) / (denom * (cc - 1.0)));
  const double variance = grad.dot(total.covariance() * grad) /
                          static_cast<double>(n_samples);
  return SimEstimate{value, std::sqrt(std::max(0.0, variance)), n_samples,
                     seed};
}

struct KineticResult {
  SimEstimate w;                          // estimate of w(t, xi)
  std::vector<std::int64_t> jump_counts;  // empirical law of K
};

// Compound Poisson sampling of the kinetic evolution of w(t, xi): jump
// count K ~ Poisson(R(0) t), jumps drawn exactly from the Gaussian jump
// density, value Phi0-hat(xi - sum of jumps).
inline KineticResult simulate_kinetic(const schrodinger::CovarianceModel& cov,
                                      const schrodinger::InitialDataModel& init,
                                      double t, const Eigen::VectorXd& xi,
                                      std::int64_t n_samples,
                                      std::uint64_t seed, int n_workers = 1) {
  schrodinger::detail::check_pair(cov, init);
  if (!(t >= 0.0)) throw std::invalid_argument("kinetic: t must be >= 0");
  if (xi.size() != cov.d)
    throw std::invalid_argument("kinetic: evaluation frequency has dimension " +
                                std::to_string(xi.size()) + ", expected " +
                                std::to_string(cov.d));
  if (n_samples < 2)
    throw std::invalid_argument("kinetic: need at least 2 samples");

  const double lambda = cov.r0 * t;
  const double sigma = cov.jump_sigma();
  const std::int64_t n_blocks = (n_samples + block_size - 1) / block_size;
  std::vector<RunningMoments> partial(n_blocks);
  std::vector<std::vector<std::int64_t>> hist(n_blocks);

  auto work = [&](int, std::int64_t block) {
    const std::int64_t first = block * block_size;
    const std::int64_t count =
        std::min<std::int64_t>(block_size, n_samples - first);
    RunningMoments acc;
    std::vector<std::int64_t> counts;
    Eigen::VectorXd total_jump(cov.d);
    for (std::int64_t j = 0; j < count; ++j) {
      rng::Stream stream(seed, static_cast<std::uint64_t>(first + j));
      const std::int64_t k = rng::poisson(stream, lambda);
      detail::NormalSource normals(stream);
      total_jump.setZero();
      for (std::int64_t jump = 0; jump < k; ++jump)
        for (int c = 0; c < cov.d; ++c)
          total_jump[c] += sigma * normals.next();
      acc.add(init.transform(xi - total_jump));
      if (static_cast<std::size_t>(k) >= counts.size())
        counts.resize(static_cast<std::size_t>(k) + 1, 0);
      ++counts[static_cast<std::size_t>(k)];
    }
    partial[block] = acc;
    hist[block] = std::move(counts);
  };
  detail::run_blocks(n_blocks, n_workers, work);

  RunningMoments total;
  std::vector<std::int64_t> counts;
  for (std::int64_t b = 0; b < n_blocks; ++b) {
    total.merge(partial[b]);
    if (hist[b].size() > counts.size()) counts.resize(hist[b].size(), 0);
    for (std::size_t k = 0; k < hist[b].size(); ++k) counts[k] += hist[b][k];
  }
  KineticResult out;
  out.w = SimEstimate{total.mean(), total.stderr_mean(), n_samples, seed};
  out.jump_counts = std::move(counts);
  return out;
}

namespace detail {

// Two-sided empirical KS distance against a centered normal CDF.
inline double ks_against_normal(std::vector<double>& sorted_samples,
                                double sigma) {
  std::sort(sorted_samples.begin(), sorted_samples.end());
  const double n = static_cast<double>(sorted_samples.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
    const double ref = normal_cdf(sorted_samples[i] / sigma);
    ks = std::max(ks, std::abs(static_cast<double>(i) / n - ref));
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - ref));
  }
  return ks;
}

}  // namespace detail

// Empirical law of (sum of jumps) / sqrt(t) at t = t_scale against the
// diffusive limit N(0, diffusivity_matrix), per coordinate; the largest
// coordinatewise KS distance is reported, not asserted.
inline DistanceReport diffusive_scaling_check(
    const schrodinger::CovarianceModel& cov, double t_scale,
    std::int64_t n_samples, std::uint64_t seed, int n_workers = 1) {
  cov.validate();
  if (!(t_scale > 0.0))
    throw std::invalid_argument("diffusive check: t_scale must be > 0");
  if (n_samples < 2)
    throw std::invalid_argument("diffusive check: need at least 2 samples");

  const double lambda = cov.r0 * t_scale;
  const double sigma_jump = cov.jump_sigma();
  const double root_t = std::sqrt(t_scale);
  Eigen::MatrixXd samples(cov.d, n_samples);
  const std::int64_t n_blocks = (n_samples + block_size - 1) / block_size;

  auto work = [&](int, std::int64_t block) {
    const std::int64_t first = block * block_size;
    const std::int64_t count =
        std::min<std::int64_t>(block_size, n_samples - first);
    Eigen::VectorXd total_jump(cov.d);
    for (std::int64_t j = 0; j < count; ++j) {
      rng::Stream stream(seed, static_cast<std::uint64_t>(first + j));
      const std::int64_t k = rng::poisson(stream, lambda);
      detail::NormalSource normals(stream);
      total_jump.setZero();
      for (std::int64_t jump = 0; jump < k; ++jump)
        for (int c = 0; c < cov.d; ++c)
          total_jump[c] += sigma_jump * normals.next();
      samples.col(first + j) = total_jump / root_t;
    }
  };
  detail::run_blocks(n_blocks, n_workers, work);

  const Eigen::MatrixXd diffusivity = schrodinger::diffusivity_matrix(cov);
  double ks = 0.0;
  std::vector<double> coordinate(n_samples);
  for (int c = 0; c < cov.d; ++c) {
    for (std::int64_t i = 0; i < n_samples; ++i) coordinate[i] = samples(c, i);
    ks = std::max(
        ks, detail::ks_against_normal(coordinate, std::sqrt(diffusivity(c, c))));
  }
  return DistanceReport{ks, std::nullopt};
}

}  // namespace chaospec::mc
