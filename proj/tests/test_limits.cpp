#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "kronspec/freeconv.hpp"
#include "kronspec/limits.hpp"
#include "kronspec/ensembles.hpp"

using namespace kronspec;

namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("psi families") {
  const PsiFamily sc = PsiFamily::semicircle_variance_1_plus_t2();
  CHECK(sc.tag() == PsiFamilyTag::semicircle_variance_1_plus_t2);
  CHECK(sc.density(1.0, 0.0) == doctest::Approx(semicircle_density(0.0, 0.0, 2.0)));
  CHECK(sc.support(2.0).hi == doctest::Approx(2.0 * std::sqrt(5.0)));

  const PsiFamily fc = PsiFamily::freeconv_f();
  CHECK(fc.density(1.0, 1.0) == doctest::Approx(f_closed_form(1.0, 1.0)).epsilon(1e-14));
  CHECK(fc.density(-1.0, 1.0) == doctest::Approx(f_closed_form(-1.0, 1.0)).epsilon(1e-14));

  const std::vector<double> ts = {-2.0, -1.0, 0.0, 0.5, 2.0};
  CHECK(sc.support_bound(ts) == doctest::Approx(2.0 * std::sqrt(5.0)));
  CHECK(std::isfinite(fc.support_bound(ts)));

  const PsiFamily user = PsiFamily::user_tabulated([](double t) { return SemicircleLaw(t, 1.0).as_density(); });
  CHECK(user.tag() == PsiFamilyTag::user_tabulated);
  CHECK(user.density(1.0, 1.0) == doctest::Approx(1.0 / std::numbers::pi));
  const PsiFamily broken = PsiFamily::user_tabulated([](double) {
    AnalyticDensity::Spec s;
    s.density = [](double) { return 0.5; };
    s.support = {{0.0, 1.0}};
    return AnalyticDensity(std::move(s));
  });
  CHECK_THROWS_AS(broken.support_bound(ts), std::invalid_argument);
}

TEST_CASE("nu with trivial mixing laws") {
  const PsiFamily fc = PsiFamily::freeconv_f();
  const DiscreteMeasure delta0 = DiscreteMeasure::dirac(0.0);
  for (double x : {-1.9, -0.5, 0.0, 1.2, 2.5}) {
    CHECK(nu_density(fc, delta0, x) == doctest::Approx(semicircle_density(x, 0.0, 1.0)).epsilon(1e-14));
  }
  const PsiFamily sc = PsiFamily::semicircle_variance_1_plus_t2();
  const DiscreteMeasure pm({{-1.0, 0.5}, {1.0, 0.5}});
  for (double x : {-2.5, -1.0, 0.0, 0.7, 2.8}) {
    CHECK(nu_density(sc, pm, x) == doctest::Approx(semicircle_density(x, 0.0, 2.0)).epsilon(1e-14));
  }
  const MixtureLaw m = make_mixture(sc, pm);
  CHECK(std::abs(m.law.total_mass() - 1.0) < 1e-12);
}

TEST_CASE("nu moments: 2 and 10, and Fubini interchange") {
  const PsiFamily sc = PsiFamily::semicircle_variance_1_plus_t2();
  const QuadratureRule rule = gauss_chebyshev_rule(64);
  const MixtureLaw nu = make_mixture(sc, rule);
  CHECK(std::abs(nu.law.total_mass() - 1.0) < 1e-6);
  CHECK(std::abs(moment(nu.law, 2) - 2.0) < 1e-7);
  CHECK(std::abs(moment(nu.law, 4) - 10.0) < 1e-7);
  for (int m = 1; m <= 6; ++m) {
    double sum = 0.0;
    for (std::size_t j = 0; j < rule.order(); ++j) sum += rule.weights[j] * moment(sc.law(rule.nodes[j]), m);
    CHECK(std::abs(moment(nu.law, m) - sum) < 1e-7);
  }
  const Interval h = nu.law.hull();
  CHECK(std::isfinite(h.lo));
  CHECK(h.hi <= 2.0 * std::sqrt(5.0) + 1e-12);
}

TEST_CASE("wigner plus gaussian density") {
  CHECK(g_wigner_gaussian(3.0) > 0.0);
  CHECK(g_wigner_gaussian(2.0 * std::sqrt(5.0) + 0.01) == 0.0);
  CHECK(g_wigner_gaussian(-2.0 * std::sqrt(5.0) - 0.01) == 0.0);
  const AnalyticDensity g = wigner_gaussian_density();
  CHECK(std::abs(g.total_mass() - 1.0) < 1e-5);
  CHECK(std::abs(moment(g, 2) - 2.0) < 1e-6);
  CHECK(std::abs(moment(g, 4) - 10.0) < 1e-6);

  // Cross-path: the mixture nu with the gamma_{0,1+t^2} family against a fine rule.
  const std::vector<double> xs = grid(-5.0, 5.0, 401);
  const std::vector<double> nu = nu_density(PsiFamily::semicircle_variance_1_plus_t2(), gauss_chebyshev_rule(4096), xs);
  std::vector<double> gv;
  for (double x : xs) gv.push_back(g_wigner_gaussian(x));
  CHECK(sup_diff(nu, gv) <= 1e-5);
}

TEST_CASE("mixing rule convergence") {
  // Gauss-Chebyshev converges slowly here (square-root kinks in t), so the
  // gap shrinks with the order but 64 vs 128 stays near 1e-3.
  const std::vector<double> xs = grid(-5.0, 5.0, 201);
  const PsiFamily sc = PsiFamily::semicircle_variance_1_plus_t2();
  std::vector<double> exact;
  for (double x : xs) exact.push_back(g_wigner_gaussian(x));
  double previous = 1.0;
  for (int order : {64, 128, 256, 1024}) {
    const double err = sup_diff(nu_density(sc, gauss_chebyshev_rule(order), xs), exact);
    MESSAGE("semicircle family, order " << order << ": sup error " << err);
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 2e-5);

  const std::vector<double> ys = grid(-6.0, 10.0, 161);
  const PsiFamily fc = PsiFamily::freeconv_f();
  const auto w64 = nu_density(fc, gauss_chebyshev_rule(64), ys);
  const auto w128 = nu_density(fc, gauss_chebyshev_rule(128), ys);
  const auto w512 = nu_density(fc, gauss_chebyshev_rule(512), ys);
  const auto w1024 = nu_density(fc, gauss_chebyshev_rule(1024), ys);
  MESSAGE("wishart mixture, 64 vs 128: " << sup_diff(w64, w128) << ", 512 vs 1024: " << sup_diff(w512, w1024));
  CHECK(sup_diff(w512, w1024) < sup_diff(w64, w128));
  CHECK(sup_diff(w512, w1024) < 1e-4);
}

TEST_CASE("wigner plus wishart density") {
  const QuadratureRule rule = gauss_chebyshev_rule(64);
  const AnalyticDensity w = wigner_wishart_density(rule);
  CHECK(std::abs(w.total_mass() - 1.0) < 1e-5);
  for (double x = -8.0; x <= 12.0; x += 0.05) {
    const double v = g_wigner_wishart(x, rule);
    CHECK(v >= 0.0);
    CHECK(v == doctest::Approx(w.density(x)).epsilon(1e-12));
  }
  // Moments of A + tB with A ~ gamma_{0,1}, B ~ rho_1 free: m1(t) = t, m2(t) = 1 + 2t^2,
  // so integrating against gamma_{0,1}(dt) gives m1 = 0, m2 = 3.
  CHECK(std::abs(moment(w, 1)) < 1e-6);
  CHECK(std::abs(moment(w, 2) - 3.0) < 1e-6);

  QuadratureRule other = rule;
  other.target = "uniform";
  CHECK_THROWS_AS(g_wigner_wishart(0.0, other), std::invalid_argument);
}

TEST_CASE("finite-k limit") {
  const PsiFamily sc = PsiFamily::semicircle_variance_1_plus_t2();
  const AnalyticDensity k1 = finite_k_limit(sc, 1);
  for (double x : {-1.0, 0.0, 1.5}) CHECK(k1.density(x) == doctest::Approx(semicircle_density(x, 0.0, 1.0)));
  const AnalyticDensity k2 = finite_k_limit(sc, 2);
  for (double x : {-2.0, 0.0, 2.5}) CHECK(k2.density(x) == doctest::Approx(semicircle_density(x, 0.0, 2.0)));
  for (int k : {2, 3, 10}) CHECK(std::abs(finite_k_limit(sc, k).total_mass() - 1.0) < 1e-6);
  const AnalyticDensity k3 = finite_k_limit(sc, 3);
  CHECK(k3.density(0.5) == doctest::Approx(2.0 / 3.0 * semicircle_density(0.5, 0.0, 2.0) +
                                           1.0 / 3.0 * semicircle_density(0.5, 0.0, 5.0)));
  CHECK_THROWS_AS(finite_k_limit(sc, 0), std::invalid_argument);
  CHECK_THROWS_AS(finite_k_limit(sc, 1025), std::invalid_argument);
}

TEST_CASE("ss law") {
  const std::vector<double> a1 = {0.0}, b1 = {1.0};
  for (double x : {-1.0, 0.3, 2.5}) CHECK(ss_law(a1, b1, x) == semicircle_density(x, 0.0, 1.0));

  const std::vector<double> a2 = {-3.0, 3.0}, b2 = {1.0, 1.0};
  const AnalyticDensity two = ss_law_density(a2, b2);
  CHECK(two.support().size() == 2);
  CHECK(two.cdf(-1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(two.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(two.cdf(5.0) == doctest::Approx(1.0).epsilon(1e-12));

  StreamRng rng({808, 0});
  std::vector<double> al, be;
  for (int j = 0; j < 5; ++j) {
    al.push_back(2.0 * rng.normal());
    be.push_back(0.5 + rng.uniform());
  }
  double expected = 0.0;
  for (int j = 0; j < 5; ++j) expected += (al[j] * al[j] + be[j] * be[j]) / 5.0;
  const AnalyticDensity rnd = ss_law_density(al, be);
  CHECK(std::abs(moment(rnd, 2) - expected) < 1e-8);
  // Independent quadrature of the scalar density.
  const Interval h = rnd.hull();
  const double quad = integrate([&](double x) { return x * x * ss_law(al, be, x); }, h.lo, h.hi, {1e-12, 50}).value;
  CHECK(std::abs(quad - expected) < 1e-7);

  const std::vector<double> a3 = {0.0, 1.0}, b3 = {1.0, 0.0};
  const AnalyticDensity with_atom = ss_law_density(a3, b3);
  CHECK(with_atom.atom_mass() == doctest::Approx(0.5));
  CHECK(std::abs(with_atom.total_mass() - 1.0) < 1e-9);

  const std::vector<double> bad = {1.0, 2.0};
  CHECK_THROWS_AS(ss_law(a1, bad, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ss_law_density(a1, bad), std::invalid_argument);
}
