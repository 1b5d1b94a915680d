#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <queue>
#include <string>
#include <vector>

#include "chaospec/errors.hpp"

// Adaptive Gauss-Legendre quadrature.  Panels carry an embedded GL7/GL15
// error estimate; the panel with the largest estimate is bisected until the
// summed estimate meets the tolerance.  Works for real- and complex-valued
// integrands, on real intervals and on straight segments in the complex
// plane.  Tensor-product extension for d <= 3 builds the per-axis partition
// from an axis slice through the origin.

namespace chaospec {

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_panels = 4000;
};

template <typename T>
struct QuadratureResult {
  T value{};
  double error = 0.0;  // summed embedded-rule estimate
  int panels = 0;
};

namespace detail {

inline constexpr int gl7_n = 7;
inline constexpr double gl7_x[gl7_n] = {
    -9.49107912342758486e-01, -7.41531185599394460e-01,
    -4.05845151377397184e-01, 0.0,
    4.05845151377397184e-01,  7.41531185599394460e-01,
    9.49107912342758486e-01};
inline constexpr double gl7_w[gl7_n] = {
    1.29484966168870647e-01, 2.79705391489276589e-01,
    3.81830050505118312e-01, 4.17959183673468959e-01,
    3.81830050505118312e-01, 2.79705391489276589e-01,
    1.29484966168870647e-01};

inline constexpr int gl15_n = 15;
inline constexpr double gl15_x[gl15_n] = {
    -9.87992518020485377e-01, -9.37273392400705951e-01,
    -8.48206583410427206e-01, -7.24417731360170070e-01,
    -5.70972172608538830e-01, -3.94151347077563385e-01,
    -2.01194093997434514e-01, 0.0,
    2.01194093997434514e-01,  3.94151347077563385e-01,
    5.70972172608538830e-01,  7.24417731360170070e-01,
    8.48206583410427206e-01,  9.37273392400705951e-01,
    9.87992518020485377e-01};
inline constexpr double gl15_w[gl15_n] = {
    3.07532419961186465e-02, 7.03660474881080689e-02,
    1.07159220467171773e-01, 1.39570677926153908e-01,
    1.66269205816993781e-01, 1.86161000015561878e-01,
    1.98431485327111246e-01, 2.02578241925560898e-01,
    1.98431485327111246e-01, 1.86161000015561878e-01,
    1.66269205816993781e-01, 1.39570677926153908e-01,
    1.07159220467171773e-01, 7.03660474881080689e-02,
    3.07532419961186465e-02};

template <typename T>
double magnitude(const T& v) {
  using std::abs;
  return static_cast<double>(abs(v));
}

template <typename F>
auto gl_panel(F&& f, double a, double b, const double* x, const double* w,
              int n) {
  using T = decltype(f(a));
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  T acc = f(mid + half * x[0]) * (w[0] * half);
  for (int i = 1; i < n; ++i) acc += f(mid + half * x[i]) * (w[i] * half);
  return acc;
}

template <typename T>
struct Panel {
  double a, b;
  T value;       // GL15
  double error;  // |GL15 - GL7|
};

// Core refinement loop; returns the accepted panel set.
template <typename F>
auto adaptive_panels(F&& f, double a, double b, const QuadratureOptions& opt) {
  using T = decltype(f(a));
  using P = Panel<T>;
  auto make_panel = [&](double lo, double hi) {
    T v15 = gl_panel(f, lo, hi, gl15_x, gl15_w, gl15_n);
    T v7 = gl_panel(f, lo, hi, gl7_x, gl7_w, gl7_n);
    return P{lo, hi, v15, magnitude<T>(v15 - v7)};
  };
  auto worse = [](const P& l, const P& r) { return l.error < r.error; };
  std::priority_queue<P, std::vector<P>, decltype(worse)> queue(worse);
  queue.push(make_panel(a, b));
  T total = queue.top().value;
  double total_error = queue.top().error;
  int panels = 1;
  auto tol = [&] {
    return std::max(opt.abs_tol, opt.rel_tol * magnitude<T>(total));
  };
  while (total_error > tol()) {
    if (panels >= opt.max_panels) {
      throw NumericError(
          "adaptive quadrature stalled on [" + std::to_string(a) + ", " +
              std::to_string(b) + "]: error " + std::to_string(total_error) +
              " after " + std::to_string(panels) + " panels",
          tol(), total_error);
    }
    P top = queue.top();
    queue.pop();
    const double mid = 0.5 * (top.a + top.b);
    P left = make_panel(top.a, mid);
    P right = make_panel(mid, top.b);
    total += left.value + right.value - top.value;
    total_error += left.error + right.error - top.error;
    queue.push(left);
    queue.push(right);
    ++panels;
  }
  std::vector<P> out;
  out.reserve(panels);
  while (!queue.empty()) {
    out.push_back(queue.top());
    queue.pop();
  }
  std::sort(out.begin(), out.end(),
            [](const P& l, const P& r) { return l.a < r.a; });
  return out;
}

}  // namespace detail

template <typename F>
auto integrate_adaptive(F&& f, double a, double b,
                        const QuadratureOptions& opt = {}) {
  using T = decltype(f(a));
  auto panels = detail::adaptive_panels(f, a, b, opt);
  // Left-to-right summation keeps the result independent of the refinement
  // history.
  T value = panels.front().value;
  double error = panels.front().error;
  for (std::size_t i = 1; i < panels.size(); ++i) {
    value += panels[i].value;
    error += panels[i].error;
  }
  return QuadratureResult<T>{value, error, static_cast<int>(panels.size())};
}

// Integral of f along the straight segment from 0 to z.
template <typename F>
QuadratureResult<std::complex<double>> integrate_segment(
    F&& f, std::complex<double> z, const QuadratureOptions& opt = {}) {
  if (z == std::complex<double>(0.0, 0.0)) return {{0.0, 0.0}, 0.0, 0};
  auto g = [&](double u) { return f(z * u); };
  auto r = integrate_adaptive(g, 0.0, 1.0, opt);
  return {z * r.value, std::abs(z) * r.error, r.panels};
}

// Panel edges of an adaptive partition of [a, b] driven by a scalar profile.
template <typename F>
std::vector<double> adapted_partition(F&& profile, double a, double b,
                                      const QuadratureOptions& opt = {}) {
  auto panels = detail::adaptive_panels(profile, a, b, opt);
  std::vector<double> edges;
  edges.reserve(panels.size() + 1);
  edges.push_back(a);
  for (const auto& p : panels) edges.push_back(p.b);
  return edges;
}

namespace detail {

// Per-axis nodes/weights of a composite rule over the given partition.
inline void composite_rule(const std::vector<double>& edges, const double* x,
                           const double* w, int n, Eigen::ArrayXd& nodes,
                           Eigen::ArrayXd& weights) {
  const auto panels = static_cast<Eigen::Index>(edges.size()) - 1;
  nodes.resize(panels * n);
  weights.resize(panels * n);
  for (Eigen::Index p = 0; p < panels; ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    for (int i = 0; i < n; ++i) {
      nodes[p * n + i] = mid + half * x[i];
      weights[p * n + i] = half * w[i];
    }
  }
}

template <typename F>
auto tensor_sum(F&& f, int dim, const Eigen::ArrayXd& nodes,
                const Eigen::ArrayXd& weights) {
  Eigen::VectorXd y(dim);
  using T = decltype(f(y));
  const Eigen::Index n = nodes.size();
  T acc{};
  if (dim == 1) {
    for (Eigen::Index i = 0; i < n; ++i) {
      y[0] = nodes[i];
      acc += f(y) * weights[i];
    }
  } else if (dim == 2) {
    for (Eigen::Index i = 0; i < n; ++i) {
      y[0] = nodes[i];
      T row{};
      for (Eigen::Index j = 0; j < n; ++j) {
        y[1] = nodes[j];
        row += f(y) * weights[j];
      }
      acc += row * weights[i];
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      y[0] = nodes[i];
      T plane{};
      for (Eigen::Index j = 0; j < n; ++j) {
        y[1] = nodes[j];
        T row{};
        for (Eigen::Index k = 0; k < n; ++k) {
          y[2] = nodes[k];
          row += f(y) * weights[k];
        }
        plane += row * weights[j];
      }
      acc += plane * weights[i];
    }
  }
  return acc;
}

}  // namespace detail

// Tensor-product quadrature of f over [-half_width, half_width]^dim.  The
// per-axis partition is adapted on the slice along the first axis (our
// integrands are isotropic about the origin), then the full tensor sum is
// taken with GL15, with a GL7 tensor sum as the error estimate.  Whole-grid
// halving is applied while the estimate exceeds the tolerance.
template <typename F>
auto tensor_integrate(F&& f, int dim, double half_width,
                      const QuadratureOptions& opt = {}) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("tensor_integrate: dim must be 1, 2 or 3");
  Eigen::VectorXd probe = Eigen::VectorXd::Zero(dim);
  using T = decltype(f(probe));

  auto profile = [&](double u) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
    y[0] = u;
    return detail::magnitude<T>(f(y));
  };
  QuadratureOptions axis_opt = opt;
  std::vector<double> edges =
      adapted_partition(profile, -half_width, half_width, axis_opt);

  for (int round = 0;; ++round) {
    Eigen::ArrayXd n15, w15, n7, w7;
    detail::composite_rule(edges, detail::gl15_x, detail::gl15_w,
                           detail::gl15_n, n15, w15);
    detail::composite_rule(edges, detail::gl7_x, detail::gl7_w, detail::gl7_n,
                           n7, w7);
    T v15 = detail::tensor_sum(f, dim, n15, w15);
    T v7 = detail::tensor_sum(f, dim, n7, w7);
    const double err = detail::magnitude<T>(v15 - v7);
    const double tol =
        std::max(opt.abs_tol, opt.rel_tol * detail::magnitude<T>(v15));
    if (err <= tol)
      return QuadratureResult<T>{v15, err,
                                 static_cast<int>(edges.size()) - 1};
    if (round == 3)
      throw NumericError("tensor quadrature stalled in dimension " +
                             std::to_string(dim) + ": error " +
                             std::to_string(err),
                         tol, err);
    std::vector<double> refined;
    refined.reserve(2 * edges.size());
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      refined.push_back(edges[i]);
      refined.push_back(0.5 * (edges[i] + edges[i + 1]));
    }
    refined.push_back(edges.back());
    edges.swap(refined);
  }
}

}  // namespace chaospec
