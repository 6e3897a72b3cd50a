#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace kronspec {

struct QuadOptions {
  double abs_tol = 1e-9;  // accepted error estimate per panel
  int max_depth = 50;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  bool depth_limited = false;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the center.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gk15_panel(const F& f, double a, double b, double& kronrod, double& gauss) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  kronrod = fc * kKronrodWeights[7];
  gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
}

template <class F>
void adaptive_gk(const F& f, double a, double b, int depth, const QuadOptions& opts,
                 QuadResult& out) {
  double k = 0.0;
  double g = 0.0;
  gk15_panel(f, a, b, k, g);
  const double err = std::abs(k - g);
  const bool at_limit = depth >= opts.max_depth;
  if (err <= opts.abs_tol || at_limit || !std::isfinite(err)) {
    out.value += k;
    out.error += err;
    ++out.panels;
    if (at_limit && err > opts.abs_tol) out.depth_limited = true;
    return;
  }
  const double mid = 0.5 * (a + b);
  adaptive_gk(f, a, mid, depth + 1, opts, out);
  adaptive_gk(f, mid, b, depth + 1, opts, out);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b] by recursive bisection.
/// Endpoints are never evaluated, so integrable endpoint singularities are fine.
template <class F>
QuadResult integrate(const F& f, double a, double b, const QuadOptions& opts = {}) {
  QuadResult out;
  if (!(b > a)) return out;
  detail::adaptive_gk(f, a, b, 0, opts, out);
  return out;
}

/// Integrates over consecutive sub-intervals split at the given breakpoints.
template <class F>
QuadResult integrate(const F& f, std::span<const double> breakpoints,
                     const QuadOptions& opts = {}) {
  QuadResult out;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const QuadResult piece = integrate(f, breakpoints[i], breakpoints[i + 1], opts);
    out.value += piece.value;
    out.error += piece.error;
    out.panels += piece.panels;
    out.depth_limited = out.depth_limited || piece.depth_limited;
  }
  return out;
}

// Discrete rule sum_j w_j g(t_j) standing in for an integral against a target
// measure. Exact for polynomials up to exactness_degree.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::string target;
  int exactness_degree = 0;

  std::size_t order() const { return nodes.size(); }
  double total_mass() const;

  template <class G>
  double apply(const G& g) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) acc += weights[j] * g(nodes[j]);
    return acc;
  }
};

/// Gauss-Chebyshev (second kind) rule for the standard semicircle law:
/// nodes 2cos(j*pi/(N+1)), weights 2/(N+1) sin^2(j*pi/(N+1)), j = 1..N.
QuadratureRule gauss_chebyshev_rule(int order);

}  // namespace kronspec
