#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "kronspec/spectra.hpp"

namespace kronspec {

inline constexpr int kMaxMomentOrder = 64;
inline constexpr double kMassTolerance = 1e-6;
inline constexpr int kCdfGridPoints = 4096;

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// Finite atomic probability measure. Weights are nonnegative and sum to one
// within 1e-12; atoms are stored sorted by location.
class DiscreteMeasure {
 public:
  explicit DiscreteMeasure(std::vector<Atom> atoms);
  static DiscreteMeasure dirac(double location);

  const std::vector<Atom>& atoms() const { return atoms_; }
  double moment(int k) const;
  double cdf(double x) const;

 private:
  std::vector<Atom> atoms_;
};

class AnalyticDensity;

// Semicircle law gamma_{center, variance} on [center - 2 sigma, center + 2 sigma].
struct SemicircleLaw {
  SemicircleLaw(double center, double variance);

  double center;
  double variance;

  double radius() const;
  Interval support() const;
  double density(double x) const;
  double cdf(double x) const;
  AnalyticDensity as_density() const;
};

// Marchenko-Pastur law rho_mean: atom (1 - mean)^+ at zero plus an absolutely
// continuous part on [(sqrt(mean) - 1)^2, (sqrt(mean) + 1)^2].
struct MarchenkoPasturLaw {
  explicit MarchenkoPasturLaw(double mean);

  double mean;

  double lower_edge() const;
  double upper_edge() const;
  double atom_mass() const;
  double density(double x) const;
  AnalyticDensity as_density() const;
};

double semicircle_density(double x, double center, double variance);

struct MarchenkoPasturValue {
  double atom_mass_at_zero = 0.0;
  double density_value = 0.0;
};
MarchenkoPasturValue marchenko_pastur_density(double x, double mean);

enum class DensityKind {
  semicircle,
  marchenko_pastur,
  free_conv_f,
  wigner_gaussian_g,
  ss_law,
  tabulated_mixture,
};
std::string_view to_string(DensityKind kind);

using DensityParams = std::vector<std::pair<std::string, double>>;

// An evaluable law with an absolutely continuous part on a declared support,
// plus optional atoms. Immutable and cheap to copy (shared state). The CDF
// table is built lazily, once, on first use.
class AnalyticDensity {
 public:
  using Fn = std::function<double(double)>;

  struct Component;

  struct Spec {
    DensityKind kind = DensityKind::tabulated_mixture;
    DensityParams params;
    Fn density;                     // a.c. part; only consulted on the support
    std::vector<Interval> support;  // disjoint, ascending
    std::vector<Atom> atoms;        // weights sum to the atom mass, not to one
    Fn cdf;                         // optional closed form for the a.c. part
    double known_ac_mass = -1.0;    // negative: computed by quadrature
  };

  explicit AnalyticDensity(Spec spec);

  // Convex combination of laws. Components with zero weight are dropped.
  static AnalyticDensity mixture(DensityKind kind, DensityParams params,
                                 std::vector<Component> components);

  DensityKind kind() const;
  const DensityParams& params() const;
  double param(std::string_view name) const;
  const std::vector<Interval>& support() const;
  Interval hull() const;
  const std::vector<Atom>& atoms() const;
  const std::vector<Component>& components() const;

  double atom_mass() const;
  double ac_mass() const;
  double total_mass() const;
  bool is_normalized() const;

  // Density of the a.c. part; exactly zero off the declared support.
  double density(double x) const;
  // Right-continuous CDF, and its left limit (differs only at atoms).
  double cdf(double x) const;
  double cdf_left(double x) const;
  double quantile(double p) const;

 private:
  struct State;
  explicit AnalyticDensity(std::shared_ptr<const State> state) : state_(std::move(state)) {}
  double ac_cdf(double x) const;
  std::shared_ptr<const State> state_;
};

struct AnalyticDensity::Component {
  double weight = 0.0;
  AnalyticDensity law;
};

using Measure = std::variant<DiscreteMeasure, AnalyticDensity>;

/// k-th moment. Exact power sum for atoms; adaptive quadrature (plus atom
/// contributions) for densities, or the weighted component moments for
/// mixtures. Rejects k > 64 and un-normalized measures.
double moment(const DiscreteMeasure& mu, int k);
double moment(const AnalyticDensity& mu, int k);
double moment(const Measure& mu, int k);

/// Pushforward under x -> t x. t = 0 gives the point mass at zero.
DiscreteMeasure dilate(const DiscreteMeasure& mu, double t);
Measure dilate(const AnalyticDensity& mu, double t);
Measure dilate(const Measure& mu, double t);

/// Kolmogorov-Smirnov distance sup_x |F_emp(x) - F(x)|, exact for a step
/// empirical CDF against a monotone theory CDF with possible atoms.
double ks_distance(const SpectralMeasure& empirical, const AnalyticDensity& theory);
double ks_distance(std::span<const double> sorted_values, const AnalyticDensity& theory);

// CSV exports, one row per grid point.
void write_density_csv(std::ostream& out, const AnalyticDensity& mu, std::span<const double> grid);
void write_cdf_csv(std::ostream& out, const AnalyticDensity& mu, std::span<const double> grid);

}  // namespace kronspec
