#include "kronspec/freeconv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "kronspec/csv.hpp"
#include "kronspec/errors.hpp"
#include "kronspec/polyroots.hpp"

namespace kronspec {

namespace {

constexpr double kPi = std::numbers::pi;

void require_upper(Complex z, const char* what) {
  if (!(z.imag() > 0.0)) {
    throw std::invalid_argument(std::string(what) + ": requires Im z > 0");
  }
}

struct ClosedFormValue {
  bool principal_ok = true;
  double value = 0.0;
};

// f(x; t) for t > 0 without the support mask. Zero where the discriminant
// h1^2 - 4 h2^3 is not positive, which is exactly outside [s1, s2].
ClosedFormValue closed_form_unmasked(double x, double t) {
  const double tx = t * x;
  const double h1 = 2.0 + 27.0 * t * t - 3.0 * tx - 3.0 * tx * tx + 2.0 * tx * tx * tx;
  const double h2 = 1.0 - tx + tx * tx;
  const double disc = h1 * h1 - 4.0 * h2 * h2 * h2;
  if (!(disc > 0.0)) return {};
  const double base = h1 + std::sqrt(disc);
  if (!(base > 0.0)) return {false, 0.0};
  const Complex big_h = std::pow(Complex(base, 0.0), 1.0 / 3.0) / std::cbrt(2.0);
  const Complex diff = big_h - h2 / big_h;
  return {true, diff.real() / (2.0 * std::sqrt(3.0) * kPi * t)};
}

Complex newton_track(Complex g, Complex z, double t) {
  for (int it = 0; it < 30; ++it) {
    const Complex p = ((t * g - (1.0 + t * z)) * g + z) * g - 1.0;
    const Complex dp = (3.0 * t * g - 2.0 * (1.0 + t * z)) * g + z;
    if (std::abs(dp) == 0.0) break;
    const Complex step = p / dp;
    g -= step;
    if (std::abs(step) <= 1e-15 * std::abs(g)) break;
  }
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// Transforms

Complex cauchy_transform(const SemicircleLaw& law, Complex z) {
  require_upper(z, "cauchy_transform");
  const Complex w = z - law.center;
  const double r = law.radius();
  const Complex s = std::sqrt(w - r) * std::sqrt(w + r);
  // (w - s) / (2 sigma^2), rationalized to avoid cancellation at large |z|.
  return 2.0 / (w + s);
}

Complex cauchy_transform(const MarchenkoPasturLaw& law, Complex z) {
  require_upper(z, "cauchy_transform");
  const Complex s = std::sqrt(z - law.lower_edge()) * std::sqrt(z - law.upper_edge());
  return 2.0 / (z + 1.0 - law.mean + s);
}

Complex cauchy_transform(const DiscreteMeasure& mu, Complex z) {
  require_upper(z, "cauchy_transform");
  Complex acc = 0.0;
  for (const Atom& a : mu.atoms()) acc += a.weight / (z - a.location);
  return acc;
}

Complex r_transform(const FreeLaw& law, Complex z) {
  switch (law.kind) {
    case FreeLaw::Kind::semicircle:
      return law.parameter * z;
    case FreeLaw::Kind::marchenko_pastur: {
      const Complex denom = 1.0 - z;
      if (std::abs(denom) < 1e-12) throw std::invalid_argument("r_transform: z too close to pole 1");
      return law.parameter / denom;
    }
    case FreeLaw::Kind::dilated_mp: {
      const double t = law.parameter;
      const Complex denom = 1.0 - t * z;
      if (std::abs(denom) < 1e-12) throw std::invalid_argument("r_transform: z too close to pole 1/t");
      return t / denom;
    }
  }
  throw std::invalid_argument("r_transform: unknown law");
}

Complex k_transform(const FreeLaw& law, Complex z) {
  if (z == Complex(0.0)) throw std::invalid_argument("k_transform: z must be nonzero");
  return r_transform(law, z) + 1.0 / z;
}

// ---------------------------------------------------------------------------
// Cubic for gamma_{0,1} boxplus D_t(rho_1)

std::array<Complex, 3> cubic_roots(Complex z, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("cubic_roots: t must be > 0");
  const std::array<Complex, 4> coeffs = {Complex(t), -(1.0 + t * z), z, Complex(-1.0)};
  const auto roots = polynomial_roots(coeffs);
  return {roots[0], roots[1], roots[2]};
}

Complex cubic_residual(Complex g, Complex z, double t) {
  return t * g * g * g - g * g * (1.0 + t * z) + g * z - 1.0;
}

Complex solve_cubic_g(Complex z, double t) {
  require_upper(z, "solve_cubic_g");
  if (!(t > 0.0)) throw std::invalid_argument("solve_cubic_g: t must be > 0");
  const auto roots = cubic_roots(z, t);
  int below = 0;
  Complex pick;
  for (const Complex& g : roots) {
    if (g.imag() < 0.0) {
      ++below;
      pick = g;
    }
  }
  if (below == 1) return pick;

  // Follow the physical branch from far up the ray x + iy, where g ~ 1/z.
  const double x = z.real();
  const double y_end = z.imag();
  const double y_top = std::max(1e3, 10.0 * (std::abs(z) + 1.0 / t + 1.0));
  Complex z0(x, y_top);
  const auto top = cubic_roots(z0, t);
  Complex g = *std::min_element(top.begin(), top.end(), [&](const Complex& a, const Complex& b) {
    return std::abs(z0 * a - 1.0) < std::abs(z0 * b - 1.0);
  });
  constexpr int kSteps = 400;
  const double ratio = std::log(y_end / y_top);
  for (int s = 1; s <= kSteps; ++s) {
    const Complex zs(x, y_top * std::exp(ratio * s / kSteps));
    g = newton_track(g, zs, t);
  }
  // Snap to the nearest root of the target cubic.
  pick = *std::min_element(roots.begin(), roots.end(), [&](const Complex& a, const Complex& b) {
    return std::abs(a - g) < std::abs(b - g);
  });
  if (!(pick.imag() < 0.0)) {
    throw NumericalError("solve_cubic_g: no root with Im g < 0 at z = (" + format_double(z.real()) +
                         ", " + format_double(z.imag()) + "), t = " + format_double(t));
  }
  return pick;
}

// ---------------------------------------------------------------------------
// Support and closed-form density

std::array<double, 5> support_quartic_coefficients(double t) {
  return {-t * t, 2.0 * t + 4.0 * t * t * t, -(1.0 + 6.0 * t * t), -6.0 * t, 4.0 + 27.0 * t * t};
}

double support_quartic(double x, double t) {
  const auto c = support_quartic_coefficients(t);
  long double p = 0.0L;
  for (double ci : c) p = p * x + ci;
  return static_cast<double>(p);
}

SupportEndpoints support_endpoints(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("support_endpoints: t must be > 0");
  const auto coeffs = support_quartic_coefficients(t);
  const auto roots = polynomial_roots(coeffs);
  std::vector<double> real;
  for (const Complex& r : roots) {
    if (std::abs(r.imag()) <= 1e-8 * std::max(1.0, std::abs(r))) real.push_back(r.real());
  }
  if (real.size() != 2) {
    throw NumericalError("support_endpoints: expected 2 real roots, found " +
                         std::to_string(real.size()) + " at t = " + format_double(t));
  }
  std::sort(real.begin(), real.end());
  return {real[0], real[1]};
}

double stieltjes_invert(double t, double x, std::span<const double> eps) {
  if (eps.size() < 2) throw std::invalid_argument("stieltjes_invert: need at least two eps levels");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || (i > 0 && !(eps[i] < eps[i - 1]))) {
      throw std::invalid_argument("stieltjes_invert: eps sequence must be positive and decreasing");
    }
  }
  std::vector<double> levels;
  levels.reserve(eps.size());
  for (double e : eps) levels.push_back(-solve_cubic_g(Complex(x, e), t).imag() / kPi);
  const double fine = levels[levels.size() - 1];
  const double coarse = levels[levels.size() - 2];
  if (std::abs(fine - coarse) > 1e-3) {
    throw NumericalError("stieltjes_invert: levels differ by " + format_double(fine - coarse) +
                         " at x = " + format_double(x) + ", t = " + format_double(t));
  }
  const double r = eps[eps.size() - 2] / eps[eps.size() - 1];
  return (r * fine - coarse) / (r - 1.0);
}

double f_closed_form(double x, double t) {
  if (t == 0.0) {
    throw std::invalid_argument("f_closed_form: t = 0 is the semicircle law itself");
  }
  if (t < 0.0) return f_closed_form(-x, -t);
  const SupportEndpoints s = support_endpoints(t);
  if (x < s.s1 || x > s.s2) return 0.0;
  const ClosedFormValue v = closed_form_unmasked(x, t);
  return v.principal_ok ? v.value : stieltjes_invert(t, x);
}

SemicircleLaw semicircle_convolution(double t) { return SemicircleLaw(0.0, 1.0 + t * t); }

// ---------------------------------------------------------------------------
// ConvolutionModel

ConvolutionModel::ConvolutionModel(double t, Mode mode) : t_(t), abs_t_(std::abs(t)), mode_(mode) {
  if (!std::isfinite(t)) throw std::invalid_argument("ConvolutionModel: t must be finite");
  if (abs_t_ < kSemicircleSwitch) {
    mode_ = Mode::semicircle_limit;
    support_ = {-2.0, 2.0};
    return;
  }
  if (mode_ == Mode::semicircle_limit) {
    throw std::invalid_argument("ConvolutionModel: semicircle mode only applies near t = 0");
  }
  positive_support_ = support_endpoints(abs_t_);
  support_ = t_ > 0 ? Interval{positive_support_.s1, positive_support_.s2}
                    : Interval{-positive_support_.s2, -positive_support_.s1};

  if (mode_ == Mode::closed_form) {
    constexpr int kScan = 1024;
    const double lo = positive_support_.s1;
    const double step = (positive_support_.s2 - lo) / kScan;
    bool open = false;
    for (int i = 0; i <= kScan; ++i) {
      const double u = lo + i * step;
      const bool bad = !closed_form_unmasked(u, abs_t_).principal_ok;
      if (bad && !open) {
        fallback_.push_back({std::max(lo, u - step), u});
        open = true;
      }
      if (bad) fallback_.back().hi = std::min(positive_support_.s2, u + step);
      if (!bad) open = false;
    }
  }
}

double ConvolutionModel::positive_density(double u) const {
  if (u < positive_support_.s1 || u > positive_support_.s2) return 0.0;
  if (mode_ == Mode::numeric_inversion) return std::max(0.0, stieltjes_invert(abs_t_, u));
  for (const Interval& iv : fallback_) {
    if (iv.contains(u)) return std::max(0.0, stieltjes_invert(abs_t_, u));
  }
  const ClosedFormValue v = closed_form_unmasked(u, abs_t_);
  if (!v.principal_ok) return std::max(0.0, stieltjes_invert(abs_t_, u));
  return std::max(0.0, v.value);
}

double ConvolutionModel::density(double x) const {
  if (mode_ == Mode::semicircle_limit) return semicircle_density(x, 0.0, 1.0);
  return positive_density(t_ > 0 ? x : -x);
}

AnalyticDensity ConvolutionModel::as_density() const {
  if (mode_ == Mode::semicircle_limit) return SemicircleLaw(0.0, 1.0).as_density();
  AnalyticDensity::Spec spec;
  spec.kind = DensityKind::free_conv_f;
  spec.params = {{"t", t_}, {"s1", support_.lo}, {"s2", support_.hi}};
  const ConvolutionModel model = *this;
  spec.density = [model](double x) { return model.density(x); };
  spec.support = {support_};
  return AnalyticDensity(std::move(spec));
}

double max_support_extent(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("max_support_extent: bad grid");
  double extent = 0.0;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 0.5));
  for (long i = 0; i <= count; ++i) {
    const Interval s = ConvolutionModel(lo + i * step).support();
    extent = std::max({extent, std::abs(s.lo), std::abs(s.hi)});
  }
  return extent;
}

}  // namespace kronspec
