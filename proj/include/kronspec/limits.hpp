#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "kronspec/measures.hpp"
#include "kronspec/quadrature.hpp"

namespace kronspec {

inline constexpr int kDefaultMixingOrder = 64;
inline constexpr int kMaxFiniteK = 1024;

enum class PsiFamilyTag { semicircle_variance_1_plus_t2, freeconv_f, user_tabulated };
std::string_view to_string(PsiFamilyTag tag);

// The family t -> psi(t; .) of limit laws of A + tB. `slice` gives a cheap
// density evaluator for a fixed t; `law` builds the full measure.
class PsiFamily {
 public:
  using LawFactory = std::function<AnalyticDensity(double)>;
  using SliceFactory = std::function<AnalyticDensity::Fn(double)>;

  PsiFamily(PsiFamilyTag tag, LawFactory law, SliceFactory slice = {});

  /// psi(t) = gamma_{0, 1 + t^2}.
  static PsiFamily semicircle_variance_1_plus_t2();
  /// psi(t) = gamma_{0,1} boxplus D_t(rho_1).
  static PsiFamily freeconv_f();
  static PsiFamily user_tabulated(LawFactory law);

  PsiFamilyTag tag() const { return tag_; }
  AnalyticDensity law(double t) const { return law_(t); }
  AnalyticDensity::Fn slice(double t) const;
  double density(double t, double x) const { return slice(t)(x); }
  Interval support(double t) const { return law_(t).hull(); }

  /// Largest |endpoint| over the given t values. Throws if some psi(t) is not
  /// normalized within kMassTolerance or has an unbounded support.
  double support_bound(std::span<const double> ts) const;

 private:
  PsiFamilyTag tag_;
  LawFactory law_;
  SliceFactory slice_;
};

// nu(dx) = integral psi(t; dx) omega(dt) with omega discretized as atoms.
struct MixtureLaw {
  std::vector<Atom> omega;
  AnalyticDensity law;
};

MixtureLaw make_mixture(const PsiFamily& psi, const QuadratureRule& omega);
MixtureLaw make_mixture(const PsiFamily& psi, const DiscreteMeasure& omega);

/// sum_j w_j psi(t_j; x).
double nu_density(const PsiFamily& psi, const QuadratureRule& omega, double x);
double nu_density(const PsiFamily& psi, const DiscreteMeasure& omega, double x);
/// Grid version; each psi(t_j) slice is built once.
std::vector<double> nu_density(const PsiFamily& psi, const QuadratureRule& omega,
                               std::span<const double> xs);

/// Density of the Wigner plus Gaussian-blocks limit: g2 for |x| <= 2, g1 for
/// 2 <= |x| <= 2 sqrt(5), zero beyond. Adaptive quadrature to ~1e-9.
double g_wigner_gaussian(double x);
AnalyticDensity wigner_gaussian_density();

/// integral f(x; t) gamma_{0,1}(dt) by the given semicircle rule.
double g_wigner_wishart(double x, const QuadratureRule& omega_rule);
AnalyticDensity wigner_wishart_density(const QuadratureRule& omega_rule);

/// ((k-1)/k) psi(-1) + (1/k) psi(k-1): the limit when W is the complete
/// graph pattern. Support grows like O(k), hence 1 <= k <= kMaxFiniteK.
AnalyticDensity finite_k_limit(const PsiFamily& psi, int k);

/// (1/n) sum_j gamma_{alpha_j, beta_j^2}; beta_j = 0 terms are atoms at alpha_j.
/// The scalar version returns the a.c. density only.
double ss_law(std::span<const double> alphas, std::span<const double> betas, double x);
AnalyticDensity ss_law_density(std::span<const double> alphas, std::span<const double> betas);

}  // namespace kronspec
