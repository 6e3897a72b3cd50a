#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "kronspec/measures.hpp"

namespace kronspec {

// Below this |t| the semicircle-plus-dilated-MP model is replaced by its
// t = 0 limit, the standard semicircle.
inline constexpr double kSemicircleSwitch = 1e-3;

inline constexpr std::array<double, 4> kDefaultInversionEps = {1e-3, 1e-4, 1e-5, 1e-6};

// Cauchy transform G(z) = integral 1/(z - x) dmu(x), Im z > 0. The closed
// forms use sqrt(z - a) sqrt(z - b), which selects the branch with z G -> 1.
Complex cauchy_transform(const SemicircleLaw& law, Complex z);
Complex cauchy_transform(const MarchenkoPasturLaw& law, Complex z);
Complex cauchy_transform(const DiscreteMeasure& mu, Complex z);

// Laws with a closed-form R-transform.
struct FreeLaw {
  enum class Kind { semicircle, marchenko_pastur, dilated_mp };
  Kind kind = Kind::semicircle;
  double parameter = 1.0;  // variance, mean, or dilation t

  static FreeLaw semicircle(double variance) { return {Kind::semicircle, variance}; }
  static FreeLaw marchenko_pastur(double mean) { return {Kind::marchenko_pastur, mean}; }
  static FreeLaw dilated_mp(double t) { return {Kind::dilated_mp, t}; }
};

/// sigma^2 z, mean / (1 - z), or t / (1 - t z). Throws near the pole.
Complex r_transform(const FreeLaw& law, Complex z);
/// Functional inverse of G near zero: K(z) = R(z) + 1/z.
Complex k_transform(const FreeLaw& law, Complex z);

/// The three roots of t g^3 - (1 + t z) g^2 + z g - 1 = 0.
std::array<Complex, 3> cubic_roots(Complex z, double t);
Complex cubic_residual(Complex g, Complex z, double t);

/// Cauchy transform of gamma_{0,1} boxplus D_t(rho_1) at z: the root of the
/// cubic with Im g < 0. If rounding leaves that root ambiguous, the branch is
/// followed down the vertical ray from large Im z, where g ~ 1/z.
Complex solve_cubic_g(Complex z, double t);

/// Quartic whose two real roots bound the support of f(.; t).
double support_quartic(double x, double t);
std::array<double, 5> support_quartic_coefficients(double t);

struct SupportEndpoints {
  double s1 = 0.0;
  double s2 = 0.0;
};

/// Real roots s1 < s2 of the support quartic for t > 0. Throws
/// NumericalError unless exactly two roots are real.
SupportEndpoints support_endpoints(double t);

/// Density of gamma_{0,1} boxplus D_t(rho_1) from the closed form in terms of
/// h1, h2, H, masked to [s1(t), s2(t)]. For t < 0 returns f(-x; -t).
/// Rejects t = 0.
double f_closed_form(double x, double t);

/// -(1/pi) Im G(x + i eps) over the eps sequence, with two-point Richardson
/// extrapolation on the last two levels. Independent of the closed form.
double stieltjes_invert(double t, double x,
                        std::span<const double> eps_sequence = kDefaultInversionEps);

/// gamma_{0,1} boxplus D_t(gamma_{0,1}) = gamma_{0, 1 + t^2}.
SemicircleLaw semicircle_convolution(double t);

// gamma_{0,1} boxplus D_t(rho_1) for any real t, with cached support. Uses
// reflection for t < 0 and the semicircle for |t| < kSemicircleSwitch.
class ConvolutionModel {
 public:
  enum class Mode { closed_form, numeric_inversion, semicircle_limit };

  explicit ConvolutionModel(double t, Mode mode = Mode::closed_form);

  double t() const { return t_; }
  Mode mode() const { return mode_; }
  Interval support() const { return support_; }
  double density(double x) const;

  // Sub-intervals of the support where the principal cube-root branch is
  // not usable and evaluation falls back to numeric inversion.
  const std::vector<Interval>& fallback_regions() const { return fallback_; }

  AnalyticDensity as_density() const;

 private:
  double positive_density(double u) const;

  double t_;
  double abs_t_;
  Mode mode_;
  Interval support_;
  SupportEndpoints positive_support_;
  std::vector<Interval> fallback_;
};

/// max(|s1|, |s2|) of the model support over t = lo, lo + step, ..., hi.
double max_support_extent(double lo, double hi, double step);

}  // namespace kronspec
