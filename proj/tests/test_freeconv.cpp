#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "kronspec/freeconv.hpp"
#include "kronspec/quadrature.hpp"

using namespace kronspec;

namespace {

constexpr double kPi = std::numbers::pi;
const std::vector<double> kTs = {0.25, 0.5, 1.0, 2.0, 4.0};

std::vector<Complex> z_grid() {
  std::vector<Complex> zs;
  for (double x : {-6.0, -1.5, -0.3, 0.0, 0.7, 2.0, 4.4, 9.0, 20.0}) {
    for (double y : {1e-6, 1e-3, 0.1, 1.0, 30.0}) zs.emplace_back(x, y);
  }
  return zs;
}

}  // namespace

TEST_CASE("cauchy transform of a point mass") {
  const Complex g = cauchy_transform(DiscreteMeasure::dirac(0.0), Complex(0.0, 1.0));
  CHECK(std::abs(g - Complex(0.0, -1.0)) < 1e-15);
  CHECK_THROWS_AS(cauchy_transform(DiscreteMeasure::dirac(0.0), Complex(1.0, 0.0)), std::invalid_argument);
}

TEST_CASE("semicircle cauchy transform against quadrature") {
  const SemicircleLaw law(0.0, 1.0);
  for (Complex z : {Complex(0.0, 2.0), Complex(1.0, 0.5), Complex(-3.0, 0.2)}) {
    const auto re = integrate([&](double x) { return (1.0 / (z - x)).real() * law.density(x); }, -2.0, 2.0, {1e-13, 50});
    const auto im = integrate([&](double x) { return (1.0 / (z - x)).imag() * law.density(x); }, -2.0, 2.0, {1e-13, 50});
    CHECK(std::abs(cauchy_transform(law, z) - Complex(re.value, im.value)) < 1e-8);
  }
}

TEST_CASE("marchenko-pastur cauchy transform against quadrature") {
  for (double mean : {0.5, 1.0, 2.0}) {
    const MarchenkoPasturLaw law(mean);
    const Complex z(1.3, 0.4);
    const auto f = [&](double x, bool real) {
      const Complex v = 1.0 / (z - x);
      return (real ? v.real() : v.imag()) * law.density(x);
    };
    const double lo = law.lower_edge();
    const double hi = law.upper_edge();
    const double re = integrate([&](double x) { return f(x, true); }, lo, hi, {1e-13, 60}).value;
    const double im = integrate([&](double x) { return f(x, false); }, lo, hi, {1e-13, 60}).value;
    const Complex atom = law.atom_mass() / z;
    CHECK(std::abs(cauchy_transform(law, z) - (Complex(re, im) + atom)) < 1e-7);
  }
}

TEST_CASE("cauchy transforms are normalized at infinity and map to the lower half plane") {
  const Complex far(0.0, 1e6);
  CHECK(std::abs(far * cauchy_transform(SemicircleLaw(0.3, 2.0), far) - 1.0) < 1e-5);
  for (double mean : {0.4, 1.0, 3.0}) {
    CHECK(std::abs(far * cauchy_transform(MarchenkoPasturLaw(mean), far) - 1.0) < 1e-5);
  }
  const DiscreteMeasure mu({{-1.0, 0.25}, {2.0, 0.75}});
  CHECK(std::abs(far * cauchy_transform(mu, far) - 1.0) < 1e-5);
  for (Complex z : z_grid()) {
    CHECK(cauchy_transform(SemicircleLaw(0.0, 1.0), z).imag() < 0.0);
    CHECK(cauchy_transform(MarchenkoPasturLaw(0.7), z).imag() < 0.0);
  }
}

TEST_CASE("r and k transforms") {
  CHECK(std::abs(r_transform(FreeLaw::semicircle(1.0), 0.3) - Complex(0.3)) < 1e-15);
  CHECK(std::abs(r_transform(FreeLaw::marchenko_pastur(1.0), 0.0) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(r_transform(FreeLaw::dilated_mp(2.0), 0.1) - Complex(2.0 / 0.8)) < 1e-15);
  CHECK_THROWS_AS(r_transform(FreeLaw::marchenko_pastur(1.0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(r_transform(FreeLaw::dilated_mp(2.0), 0.5), std::invalid_argument);
  CHECK_THROWS_AS(k_transform(FreeLaw::semicircle(1.0), 0.0), std::invalid_argument);

  // G(K(z)) = z for small z in the lower half plane, where K(z) lands in the upper one.
  for (int i = 1; i < 12; ++i) {
    const double theta = -kPi * i / 12.0;
    const Complex z = 0.1 * std::polar(1.0, theta);
    const Complex ks = k_transform(FreeLaw::semicircle(1.0), z);
    CHECK(std::abs(cauchy_transform(SemicircleLaw(0.0, 1.0), ks) - z) < 1e-10);
    const Complex km = k_transform(FreeLaw::marchenko_pastur(1.0), z);
    CHECK(std::abs(cauchy_transform(MarchenkoPasturLaw(1.0), km) - z) < 1e-10);
  }
}

TEST_CASE("cubic root selection") {
  for (double t : kTs) {
    for (Complex z : z_grid()) {
      const Complex g = solve_cubic_g(z, t);
      CHECK(std::abs(cubic_residual(g, z, t)) <= 1e-12 * std::max(1.0, std::abs(z)));
      CHECK(g.imag() < 0.0);
      const auto roots = cubic_roots(z, t);
      int below = 0;
      for (const Complex& r : roots) below += r.imag() < 0.0 ? 1 : 0;
      CHECK(below == 1);
      const Complex prod = roots[0] * roots[1] * roots[2];
      CHECK(std::abs(prod - 1.0 / t) <= 1e-10 * std::max(1.0, 1.0 / t));
    }
  }
  const Complex z(0.0, 1e4);
  CHECK(std::abs(z * solve_cubic_g(z, 1.0) - 1.0) <= 1e-3);
  CHECK_THROWS_AS(solve_cubic_g(Complex(1.0, -0.1), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_cubic_g(Complex(1.0, 0.1), 0.0), std::invalid_argument);
}

TEST_CASE("support endpoints") {
  for (double t : kTs) {
    const SupportEndpoints s = support_endpoints(t);
    CHECK(s.s1 < s.s2);
    double coeff_scale = 1.0;
    for (double c : support_quartic_coefficients(t)) coeff_scale += std::abs(c);
    CHECK(std::abs(support_quartic(s.s1, t)) <= 1e-8 * coeff_scale);
    CHECK(std::abs(support_quartic(s.s2, t)) <= 1e-8 * coeff_scale);
    CHECK(support_quartic(0.0, t) == doctest::Approx(4.0 + 27.0 * t * t));

    double mode = s.s1;
    double best = -1.0;
    for (int i = 1; i < 1000; ++i) {
      const double x = s.s1 + (s.s2 - s.s1) * i / 1000.0;
      const double f = f_closed_form(x, t);
      if (f > best) {
        best = f;
        mode = x;
      }
    }
    CHECK(s.s1 < mode);
    CHECK(mode < s.s2);
  }
  for (double t : {0.5, 1.0, 2.0}) {
    const SupportEndpoints a = support_endpoints(t);
    const SupportEndpoints b = support_endpoints(t + 1e-4);
    CHECK(std::abs(a.s1 - b.s1) <= 1e-2);
    CHECK(std::abs(a.s2 - b.s2) <= 1e-2);
  }
  for (int i = 1; i <= 80; ++i) CHECK_NOTHROW(support_endpoints(0.05 * i));
  CHECK_THROWS_AS(support_endpoints(0.0), std::invalid_argument);
}

TEST_CASE("closed-form density: normalization, endpoints, sign") {
  for (double t : kTs) {
    const SupportEndpoints s = support_endpoints(t);
    const auto q = integrate([t](double x) { return f_closed_form(x, t); }, s.s1, s.s2, {1e-12, 50});
    CHECK(std::abs(q.value - 1.0) < 1e-6);
    for (int i = 0; i <= 500; ++i) {
      const double x = s.s1 - 1.0 + (s.s2 - s.s1 + 2.0) * i / 500.0;
      CHECK(f_closed_form(x, t) >= -1e-10);
    }
  }
  for (double t : {0.5, 1.0, 2.0}) {
    const SupportEndpoints s = support_endpoints(t);
    CHECK(std::abs(f_closed_form(s.s1, t)) <= 1e-6);
    CHECK(std::abs(f_closed_form(s.s2, t)) <= 1e-6);
  }
  CHECK_THROWS_AS(f_closed_form(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("reflection for negative t") {
  for (double t : {0.3, 1.0, 2.5}) {
    for (double x = -8.0; x <= 8.0; x += 0.37) CHECK(f_closed_form(x, -t) == f_closed_form(-x, t));
  }
}

TEST_CASE("small t approaches the semicircle") {
  double worst = 0.0;
  for (double x = -1.9; x <= 1.9; x += 0.01) {
    worst = std::max(worst, std::abs(f_closed_form(x, 1e-4) - std::sqrt(4.0 - x * x) / (2.0 * kPi)));
  }
  CHECK(worst <= 1e-2);
}

TEST_CASE("stieltjes inversion oracle") {
  for (double t : kTs) {
    const SupportEndpoints s = support_endpoints(t);
    double worst = 0.0;
    for (int i = 1; i <= 200; ++i) {
      const double x = s.s1 + (s.s2 - s.s1) * i / 201.0;
      worst = std::max(worst, std::abs(f_closed_form(x, t) - stieltjes_invert(t, x)));
    }
    CHECK(worst <= 1e-4);
  }
  const SupportEndpoints s = support_endpoints(1.0);
  for (double x : {s.s1 - 3.0, s.s1 - 0.6, s.s2 + 0.6, s.s2 + 5.0}) CHECK(std::abs(stieltjes_invert(1.0, x)) <= 1e-5);
  const double edge = stieltjes_invert(1.0, s.s1 + 1e-3);
  CHECK(edge > 0.0);
  CHECK(std::isfinite(edge));

  const std::vector<double> increasing = {1e-4, 1e-3};
  CHECK_THROWS_AS(stieltjes_invert(1.0, 0.0, increasing), std::invalid_argument);
  const std::vector<double> single = {1e-3};
  CHECK_THROWS_AS(stieltjes_invert(1.0, 0.0, single), std::invalid_argument);
}

TEST_CASE("semicircle self-convolution") {
  CHECK(semicircle_convolution(0.0).variance == 1.0);
  const SemicircleLaw one = semicircle_convolution(1.0);
  CHECK(one.variance == 2.0);
  CHECK(one.support().hi == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(semicircle_convolution(2.0).support().hi == doctest::Approx(2.0 * std::sqrt(5.0)));
}

TEST_CASE("convolution model") {
  const ConvolutionModel near0(5e-4);
  CHECK(near0.mode() == ConvolutionModel::Mode::semicircle_limit);
  CHECK(near0.density(0.0) == doctest::Approx(1.0 / kPi));
  CHECK(near0.as_density().kind() == DensityKind::semicircle);

  const ConvolutionModel pos(1.3);
  const ConvolutionModel neg(-1.3);
  CHECK(neg.support().lo == doctest::Approx(-pos.support().hi));
  CHECK(neg.support().hi == doctest::Approx(-pos.support().lo));
  CHECK(pos.fallback_regions().empty());
  for (double t : {-2.0, -0.4, 0.25, 1.0, 4.0}) {
    const AnalyticDensity d = ConvolutionModel(t).as_density();
    CHECK(std::abs(d.total_mass() - 1.0) < 1e-6);
    CHECK(d.param("t") == t);
  }

  const ConvolutionModel numeric(0.8, ConvolutionModel::Mode::numeric_inversion);
  const ConvolutionModel closed(0.8);
  for (double x = -1.5; x <= 3.0; x += 0.1) CHECK(std::abs(numeric.density(x) - closed.density(x)) < 1e-4);
  CHECK_THROWS_AS(ConvolutionModel(1.0, ConvolutionModel::Mode::semicircle_limit), std::invalid_argument);
}

TEST_CASE("support is uniformly bounded on compact t sets") {
  const double coarse = max_support_extent(-2.0, 2.0, 0.05);
  const double fine = max_support_extent(-2.0, 2.0, 0.025);
  CHECK(std::isfinite(coarse));
  CHECK(std::abs(fine - coarse) <= 1e-2 * coarse);
  MESSAGE("max |endpoint| over t in [-2, 2]: " << coarse);
}
