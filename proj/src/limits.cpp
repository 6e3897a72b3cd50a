#include "kronspec/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "kronspec/csv.hpp"
#include "kronspec/freeconv.hpp"

namespace kronspec {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Atom> rule_atoms(const QuadratureRule& rule) {
  if (rule.nodes.size() != rule.weights.size() || rule.nodes.empty()) {
    throw std::invalid_argument("mixing rule: nodes and weights must be non-empty and equal length");
  }
  std::vector<Atom> atoms;
  atoms.reserve(rule.nodes.size());
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    if (!(rule.weights[j] >= 0.0)) throw std::invalid_argument("mixing rule: negative weight");
    atoms.push_back({rule.nodes[j], rule.weights[j]});
  }
  return atoms;
}

MixtureLaw mixture_from_atoms(const PsiFamily& psi, std::vector<Atom> omega) {
  double mass = 0.0;
  for (const Atom& a : omega) mass += a.weight;
  if (std::abs(mass - 1.0) > kMassTolerance) {
    throw std::invalid_argument("mixing law has total mass " + format_double(mass));
  }
  std::vector<AnalyticDensity::Component> comps;
  comps.reserve(omega.size());
  for (const Atom& a : omega) {
    if (a.weight > 0.0) comps.push_back({a.weight, psi.law(a.location)});
  }
  DensityParams params = {{"psi_family", static_cast<double>(psi.tag())},
                          {"omega_order", static_cast<double>(omega.size())}};
  AnalyticDensity law =
      AnalyticDensity::mixture(DensityKind::tabulated_mixture, std::move(params), std::move(comps));
  return {std::move(omega), std::move(law)};
}

double nu_from_atoms(const PsiFamily& psi, const std::vector<Atom>& omega, double x) {
  double acc = 0.0;
  for (const Atom& a : omega) acc += a.weight * psi.slice(a.location)(x);
  return acc;
}

// Integrand shared by g1 and g2: sqrt(4(1+t^2) - x^2) sqrt(4 - t^2) / (1+t^2).
double wigner_gaussian_integrand(double t, double x) {
  const double u = 1.0 + t * t;
  const double a = 4.0 * u - x * x;
  const double b = 4.0 - t * t;
  if (a <= 0.0 || b <= 0.0) return 0.0;
  return std::sqrt(a) * std::sqrt(b) / u;
}

void require_semicircle_rule(const QuadratureRule& rule) {
  if (rule.target != "semicircle(0,1)") {
    throw std::invalid_argument("mixing rule must target the standard semicircle, got '" +
                                rule.target + "'");
  }
}

}  // namespace

std::string_view to_string(PsiFamilyTag tag) {
  switch (tag) {
    case PsiFamilyTag::semicircle_variance_1_plus_t2: return "semicircle-variance-1-plus-t2";
    case PsiFamilyTag::freeconv_f: return "freeconv-f";
    case PsiFamilyTag::user_tabulated: return "user-tabulated";
  }
  return "unknown";
}

PsiFamily::PsiFamily(PsiFamilyTag tag, LawFactory law, SliceFactory slice)
    : tag_(tag), law_(std::move(law)), slice_(std::move(slice)) {
  if (!law_) throw std::invalid_argument("PsiFamily: missing law factory");
}

PsiFamily PsiFamily::semicircle_variance_1_plus_t2() {
  return PsiFamily(
      PsiFamilyTag::semicircle_variance_1_plus_t2,
      [](double t) { return SemicircleLaw(0.0, 1.0 + t * t).as_density(); },
      [](double t) -> AnalyticDensity::Fn {
        const double v = 1.0 + t * t;
        return [v](double x) { return semicircle_density(x, 0.0, v); };
      });
}

PsiFamily PsiFamily::freeconv_f() {
  return PsiFamily(
      PsiFamilyTag::freeconv_f, [](double t) { return ConvolutionModel(t).as_density(); },
      [](double t) -> AnalyticDensity::Fn {
        ConvolutionModel model(t);
        return [model](double x) { return model.density(x); };
      });
}

PsiFamily PsiFamily::user_tabulated(LawFactory law) {
  return PsiFamily(PsiFamilyTag::user_tabulated, std::move(law));
}

AnalyticDensity::Fn PsiFamily::slice(double t) const {
  if (slice_) return slice_(t);
  AnalyticDensity law = law_(t);
  return [law](double x) { return law.density(x); };
}

double PsiFamily::support_bound(std::span<const double> ts) const {
  double bound = 0.0;
  for (double t : ts) {
    const AnalyticDensity law = law_(t);
    if (!law.is_normalized()) {
      throw std::invalid_argument("psi(" + format_double(t) + ") has total mass " +
                                  format_double(law.total_mass()));
    }
    const Interval h = law.hull();
    if (!std::isfinite(h.lo) || !std::isfinite(h.hi)) {
      throw std::invalid_argument("psi(" + format_double(t) + ") has unbounded support");
    }
    bound = std::max({bound, std::abs(h.lo), std::abs(h.hi)});
  }
  return bound;
}

MixtureLaw make_mixture(const PsiFamily& psi, const QuadratureRule& omega) {
  return mixture_from_atoms(psi, rule_atoms(omega));
}

MixtureLaw make_mixture(const PsiFamily& psi, const DiscreteMeasure& omega) {
  return mixture_from_atoms(psi, omega.atoms());
}

double nu_density(const PsiFamily& psi, const QuadratureRule& omega, double x) {
  return nu_from_atoms(psi, rule_atoms(omega), x);
}

double nu_density(const PsiFamily& psi, const DiscreteMeasure& omega, double x) {
  return nu_from_atoms(psi, omega.atoms(), x);
}

std::vector<double> nu_density(const PsiFamily& psi, const QuadratureRule& omega,
                               std::span<const double> xs) {
  const std::vector<Atom> atoms = rule_atoms(omega);
  std::vector<double> out(xs.size(), 0.0);
  for (const Atom& a : atoms) {
    const AnalyticDensity::Fn f = psi.slice(a.location);
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] += a.weight * f(xs[i]);
  }
  return out;
}

double g_wigner_gaussian(double x) {
  const double ax = std::abs(x);
  const double outer = 2.0 * std::sqrt(5.0);
  if (ax >= outer) return 0.0;
  const double lower = ax > 2.0 ? std::sqrt(ax * ax / 4.0 - 1.0) : 0.0;
  const QuadOptions opts{1e-11, 50};
  const double integral =
      integrate([ax](double t) { return wigner_gaussian_integrand(t, ax); }, lower, 2.0, opts).value;
  return integral / (2.0 * kPi * kPi);
}

AnalyticDensity wigner_gaussian_density() {
  const double outer = 2.0 * std::sqrt(5.0);
  AnalyticDensity::Spec spec;
  spec.kind = DensityKind::wigner_gaussian_g;
  spec.params = {{"outer_edge", outer}};
  spec.density = [](double x) { return g_wigner_gaussian(x); };
  spec.support = {{-outer, outer}};
  return AnalyticDensity(std::move(spec));
}

double g_wigner_wishart(double x, const QuadratureRule& omega_rule) {
  require_semicircle_rule(omega_rule);
  return nu_density(PsiFamily::freeconv_f(), omega_rule, x);
}

AnalyticDensity wigner_wishart_density(const QuadratureRule& omega_rule) {
  require_semicircle_rule(omega_rule);
  return make_mixture(PsiFamily::freeconv_f(), omega_rule).law;
}

AnalyticDensity finite_k_limit(const PsiFamily& psi, int k) {
  if (k < 1 || k > kMaxFiniteK) {
    throw std::invalid_argument("finite_k_limit: k must be in [1, " + std::to_string(kMaxFiniteK) +
                                "], got " + std::to_string(k));
  }
  const double kd = k;
  std::vector<AnalyticDensity::Component> comps;
  if (k > 1) comps.push_back({(kd - 1.0) / kd, psi.law(-1.0)});
  comps.push_back({1.0 / kd, psi.law(kd - 1.0)});
  return AnalyticDensity::mixture(DensityKind::tabulated_mixture, {{"k", kd}}, std::move(comps));
}

double ss_law(std::span<const double> alphas, std::span<const double> betas, double x) {
  if (alphas.size() != betas.size() || alphas.empty()) {
    throw std::invalid_argument("ss_law: alphas and betas must have the same non-zero length");
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    if (betas[j] != 0.0) acc += semicircle_density(x, alphas[j], betas[j] * betas[j]);
  }
  return acc / static_cast<double>(alphas.size());
}

AnalyticDensity ss_law_density(std::span<const double> alphas, std::span<const double> betas) {
  if (alphas.size() != betas.size() || alphas.empty()) {
    throw std::invalid_argument("ss_law: alphas and betas must have the same non-zero length");
  }
  const double w = 1.0 / static_cast<double>(alphas.size());
  std::vector<AnalyticDensity::Component> comps;
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    if (betas[j] != 0.0) {
      comps.push_back({w, SemicircleLaw(alphas[j], betas[j] * betas[j]).as_density()});
    } else {
      AnalyticDensity::Spec atom;
      atom.kind = DensityKind::ss_law;
      atom.density = [](double) { return 0.0; };
      atom.atoms = {{alphas[j], 1.0}};
      atom.known_ac_mass = 0.0;
      comps.push_back({w, AnalyticDensity(std::move(atom))});
    }
  }
  return AnalyticDensity::mixture(DensityKind::ss_law, {{"n", static_cast<double>(alphas.size())}},
                                  std::move(comps));
}

}  // namespace kronspec
