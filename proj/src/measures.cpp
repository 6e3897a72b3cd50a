#include "kronspec/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "kronspec/csv.hpp"
#include "kronspec/quadrature.hpp"

namespace kronspec {

namespace {

constexpr double kPi = std::numbers::pi;

void check_moment_order(int k) {
  if (k < 0 || k > kMaxMomentOrder) {
    throw std::invalid_argument("moment: order must be in [0, 64], got " + std::to_string(k));
  }
}

std::vector<Interval> merge_intervals(std::vector<Interval> in) {
  std::sort(in.begin(), in.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const Interval& iv : in) {
    if (!(iv.hi > iv.lo)) continue;
    if (!out.empty() && iv.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

std::vector<Atom> merge_atoms(std::vector<Atom> in) {
  std::stable_sort(in.begin(), in.end(),
                   [](const Atom& a, const Atom& b) { return a.location < b.location; });
  std::vector<Atom> out;
  for (const Atom& a : in) {
    if (a.weight == 0.0) continue;
    if (!out.empty() && out.back().location == a.location) {
      out.back().weight += a.weight;
    } else {
      out.push_back(a);
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("DiscreteMeasure: no atoms");
  double total = 0.0;
  for (const Atom& a : atoms_) {
    if (!std::isfinite(a.location)) throw std::invalid_argument("DiscreteMeasure: non-finite atom");
    if (!(a.weight >= 0.0)) throw std::invalid_argument("DiscreteMeasure: negative weight");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("DiscreteMeasure: weights sum to " + format_double(total));
  }
  std::stable_sort(atoms_.begin(), atoms_.end(),
                   [](const Atom& a, const Atom& b) { return a.location < b.location; });
}

DiscreteMeasure DiscreteMeasure::dirac(double location) {
  return DiscreteMeasure({{location, 1.0}});
}

double DiscreteMeasure::moment(int k) const {
  check_moment_order(k);
  double acc = 0.0;
  for (const Atom& a : atoms_) acc += a.weight * std::pow(a.location, k);
  return acc;
}

double DiscreteMeasure::cdf(double x) const {
  double acc = 0.0;
  for (const Atom& a : atoms_) {
    if (a.location > x) break;
    acc += a.weight;
  }
  return std::min(acc, 1.0);
}

// ---------------------------------------------------------------------------
// Closed-form laws

double semicircle_density(double x, double center, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("semicircle_density: variance must be > 0");
  const double d = x - center;
  const double r2 = 4.0 * variance - d * d;
  if (r2 <= 0.0) return 0.0;
  return std::sqrt(r2) / (2.0 * kPi * variance);
}

MarchenkoPasturValue marchenko_pastur_density(double x, double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("marchenko_pastur_density: mean must be > 0");
  const double root = std::sqrt(mean);
  const double a = (root - 1.0) * (root - 1.0);
  const double b = (root + 1.0) * (root + 1.0);
  MarchenkoPasturValue v;
  v.atom_mass_at_zero = std::max(0.0, 1.0 - mean);
  if (x > 0.0 && x >= a && x <= b) {
    v.density_value = std::sqrt(std::max(0.0, (x - a) * (b - x))) / (2.0 * kPi * x);
  }
  return v;
}

SemicircleLaw::SemicircleLaw(double c, double v) : center(c), variance(v) {
  if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(center)) {
    throw std::invalid_argument("SemicircleLaw: variance must be finite and > 0");
  }
}

double SemicircleLaw::radius() const { return 2.0 * std::sqrt(variance); }

Interval SemicircleLaw::support() const { return {center - radius(), center + radius()}; }

double SemicircleLaw::density(double x) const { return semicircle_density(x, center, variance); }

double SemicircleLaw::cdf(double x) const {
  const double u = (x - center) / std::sqrt(variance);
  if (u <= -2.0) return 0.0;
  if (u >= 2.0) return 1.0;
  return 0.5 + u * std::sqrt(4.0 - u * u) / (4.0 * kPi) + std::asin(0.5 * u) / kPi;
}

AnalyticDensity SemicircleLaw::as_density() const {
  const SemicircleLaw law = *this;
  AnalyticDensity::Spec spec;
  spec.kind = DensityKind::semicircle;
  spec.params = {{"center", center}, {"variance", variance}};
  spec.density = [law](double x) { return law.density(x); };
  spec.cdf = [law](double x) { return law.cdf(x); };
  spec.support = {support()};
  spec.known_ac_mass = 1.0;
  return AnalyticDensity(std::move(spec));
}

MarchenkoPasturLaw::MarchenkoPasturLaw(double m) : mean(m) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("MarchenkoPasturLaw: mean must be finite and > 0");
  }
}

double MarchenkoPasturLaw::lower_edge() const {
  const double r = std::sqrt(mean) - 1.0;
  return r * r;
}

double MarchenkoPasturLaw::upper_edge() const {
  const double r = std::sqrt(mean) + 1.0;
  return r * r;
}

double MarchenkoPasturLaw::atom_mass() const { return std::max(0.0, 1.0 - mean); }

double MarchenkoPasturLaw::density(double x) const {
  return marchenko_pastur_density(x, mean).density_value;
}

AnalyticDensity MarchenkoPasturLaw::as_density() const {
  const MarchenkoPasturLaw law = *this;
  AnalyticDensity::Spec spec;
  spec.kind = DensityKind::marchenko_pastur;
  spec.params = {{"mean", mean}};
  spec.density = [law](double x) { return law.density(x); };
  spec.support = {{lower_edge(), upper_edge()}};
  if (atom_mass() > 0.0) spec.atoms = {{0.0, atom_mass()}};
  spec.known_ac_mass = 1.0 - atom_mass();
  return AnalyticDensity(std::move(spec));
}

std::string_view to_string(DensityKind kind) {
  switch (kind) {
    case DensityKind::semicircle: return "semicircle";
    case DensityKind::marchenko_pastur: return "marchenko-pastur";
    case DensityKind::free_conv_f: return "free-conv-f";
    case DensityKind::wigner_gaussian_g: return "wigner-gaussian-g";
    case DensityKind::ss_law: return "ss-law";
    case DensityKind::tabulated_mixture: return "tabulated-mixture";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// AnalyticDensity

struct AnalyticDensity::State {
  DensityKind kind = DensityKind::tabulated_mixture;
  DensityParams params;
  Fn density;
  std::vector<Interval> support;
  std::vector<Atom> atoms;
  Fn cdf;
  std::vector<Component> components;
  double ac_mass = 0.0;
  double atom_mass = 0.0;

  // Cumulative a.c. mass at kCdfGridPoints equispaced nodes over the hull.
  mutable std::once_flag table_once;
  mutable std::vector<double> table;
  double table_lo = 0.0;
  double table_step = 0.0;

  double eval(double x) const {
    for (const Interval& iv : support) {
      if (x < iv.lo) return 0.0;
      if (x <= iv.hi) {
        const double v = density(x);
        return v > 0.0 ? v : 0.0;
      }
    }
    return 0.0;
  }

  void build_table() const {
    const int n = kCdfGridPoints;
    std::vector<double> cum(n, 0.0);
    const QuadOptions opts{1e-12, 50};
    const auto f = [this](double x) { return eval(x); };
    for (int i = 1; i < n; ++i) {
      const double a = table_lo + (i - 1) * table_step;
      const double b = (i == n - 1) ? support.back().hi : table_lo + i * table_step;
      cum[i] = cum[i - 1] + integrate(f, a, b, opts).value;
    }
    table = std::move(cum);
  }
};

AnalyticDensity::AnalyticDensity(Spec spec) {
  if (!spec.density) throw std::invalid_argument("AnalyticDensity: missing density function");
  auto state = std::make_shared<State>();
  state->kind = spec.kind;
  state->params = std::move(spec.params);
  state->density = std::move(spec.density);
  state->support = merge_intervals(std::move(spec.support));
  state->atoms = merge_atoms(std::move(spec.atoms));
  state->cdf = std::move(spec.cdf);
  for (const Atom& a : state->atoms) {
    if (!(a.weight >= 0.0)) throw std::invalid_argument("AnalyticDensity: negative atom weight");
    state->atom_mass += a.weight;
  }
  if (spec.known_ac_mass >= 0.0) {
    state->ac_mass = spec.known_ac_mass;
  } else {
    const QuadOptions opts{1e-10, 50};
    const State* s = state.get();
    for (const Interval& iv : state->support) {
      state->ac_mass += integrate([s](double x) { return s->eval(x); }, iv.lo, iv.hi, opts).value;
    }
  }
  if (!state->support.empty()) {
    state->table_lo = state->support.front().lo;
    state->table_step = (state->support.back().hi - state->table_lo) / (kCdfGridPoints - 1);
  }
  state_ = std::move(state);
}

AnalyticDensity AnalyticDensity::mixture(DensityKind kind, DensityParams params,
                                         std::vector<Component> components) {
  std::vector<Component> kept;
  for (auto& c : components) {
    if (!(c.weight >= 0.0)) throw std::invalid_argument("mixture: negative component weight");
    if (c.weight > 0.0) kept.push_back(std::move(c));
  }
  if (kept.empty()) throw std::invalid_argument("mixture: no components with positive weight");

  auto state = std::make_shared<State>();
  state->kind = kind;
  state->params = std::move(params);
  std::vector<Interval> support;
  std::vector<Atom> atoms;
  for (const Component& c : kept) {
    for (const Interval& iv : c.law.support()) support.push_back(iv);
    for (const Atom& a : c.law.atoms()) atoms.push_back({a.location, c.weight * a.weight});
    state->ac_mass += c.weight * c.law.ac_mass();
  }
  state->support = merge_intervals(std::move(support));
  state->atoms = merge_atoms(std::move(atoms));
  for (const Atom& a : state->atoms) state->atom_mass += a.weight;
  state->components = kept;
  state->density = [kept](double x) {
    double acc = 0.0;
    for (const Component& c : kept) acc += c.weight * c.law.density(x);
    return acc;
  };
  state->cdf = [kept](double x) {
    double acc = 0.0;
    for (const Component& c : kept) acc += c.weight * c.law.ac_cdf(x);
    return acc;
  };
  if (!state->support.empty()) {
    state->table_lo = state->support.front().lo;
    state->table_step = (state->support.back().hi - state->table_lo) / (kCdfGridPoints - 1);
  }
  return AnalyticDensity(std::shared_ptr<const State>(std::move(state)));
}

DensityKind AnalyticDensity::kind() const { return state_->kind; }
const DensityParams& AnalyticDensity::params() const { return state_->params; }

double AnalyticDensity::param(std::string_view name) const {
  for (const auto& [k, v] : state_->params) {
    if (k == name) return v;
  }
  throw std::invalid_argument("AnalyticDensity: no parameter '" + std::string(name) + "'");
}

const std::vector<Interval>& AnalyticDensity::support() const { return state_->support; }

Interval AnalyticDensity::hull() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  if (!state_->support.empty()) {
    lo = state_->support.front().lo;
    hi = state_->support.back().hi;
  }
  for (const Atom& a : state_->atoms) {
    lo = std::min(lo, a.location);
    hi = std::max(hi, a.location);
  }
  return {lo, hi};
}

const std::vector<Atom>& AnalyticDensity::atoms() const { return state_->atoms; }
const std::vector<AnalyticDensity::Component>& AnalyticDensity::components() const {
  return state_->components;
}

double AnalyticDensity::atom_mass() const { return state_->atom_mass; }
double AnalyticDensity::ac_mass() const { return state_->ac_mass; }
double AnalyticDensity::total_mass() const { return state_->atom_mass + state_->ac_mass; }
bool AnalyticDensity::is_normalized() const {
  return std::abs(total_mass() - 1.0) <= kMassTolerance;
}

double AnalyticDensity::density(double x) const { return state_->eval(x); }

double AnalyticDensity::ac_cdf(double x) const {
  const State& s = *state_;
  if (s.support.empty() || x <= s.support.front().lo) return 0.0;
  if (s.cdf) return s.cdf(x);
  std::call_once(s.table_once, [&s] { s.build_table(); });
  if (x >= s.support.back().hi) return s.table.back();
  const int last = kCdfGridPoints - 1;
  int i = static_cast<int>((x - s.table_lo) / s.table_step);
  i = std::clamp(i, 0, last - 1);
  const double node = s.table_lo + i * s.table_step;
  const auto f = [&s](double u) { return s.eval(u); };
  const double partial = x > node ? integrate(f, node, x, QuadOptions{1e-12, 50}).value : 0.0;
  return std::clamp(s.table[i] + partial, s.table[i], s.table[i + 1]);
}

double AnalyticDensity::cdf(double x) const {
  double atoms = 0.0;
  for (const Atom& a : state_->atoms) {
    if (a.location > x) break;
    atoms += a.weight;
  }
  return std::clamp(atoms + ac_cdf(x), 0.0, 1.0);
}

double AnalyticDensity::cdf_left(double x) const {
  double atoms = 0.0;
  for (const Atom& a : state_->atoms) {
    if (a.location >= x) break;
    atoms += a.weight;
  }
  return std::clamp(atoms + ac_cdf(x), 0.0, 1.0);
}

double AnalyticDensity::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p must be in [0, 1]");
  const Interval h = hull();
  double lo = h.lo;
  double hi = h.hi;
  if (cdf(lo) >= p) return lo;
  // Smallest x with cdf(x) >= p, by bisection.
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) >= p) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Moments, dilation, distance

double moment(const DiscreteMeasure& mu, int k) { return mu.moment(k); }

double moment(const AnalyticDensity& mu, int k) {
  check_moment_order(k);
  if (!mu.is_normalized()) {
    throw std::invalid_argument("moment: measure has total mass " + format_double(mu.total_mass()));
  }
  if (!mu.components().empty()) {
    double acc = 0.0;
    for (const auto& c : mu.components()) acc += c.weight * moment(c.law, k);
    return acc;
  }
  double acc = 0.0;
  for (const Atom& a : mu.atoms()) acc += a.weight * std::pow(a.location, k);
  const QuadOptions opts{1e-11, 50};
  for (const Interval& iv : mu.support()) {
    acc += integrate([&mu, k](double x) { return std::pow(x, k) * mu.density(x); }, iv.lo, iv.hi,
                     opts)
               .value;
  }
  return acc;
}

double moment(const Measure& mu, int k) {
  return std::visit([k](const auto& m) { return moment(m, k); }, mu);
}

DiscreteMeasure dilate(const DiscreteMeasure& mu, double t) {
  if (t == 0.0) return DiscreteMeasure::dirac(0.0);
  std::vector<Atom> atoms;
  atoms.reserve(mu.atoms().size());
  for (const Atom& a : mu.atoms()) atoms.push_back({t * a.location, a.weight});
  return DiscreteMeasure(std::move(atoms));
}

Measure dilate(const AnalyticDensity& mu, double t) {
  if (t == 0.0) return DiscreteMeasure::dirac(0.0);
  if (mu.kind() == DensityKind::semicircle) {
    return SemicircleLaw(t * mu.param("center"), t * t * mu.param("variance")).as_density();
  }
  DensityParams params = mu.params();
  params.emplace_back("dilation", t);
  if (!mu.components().empty()) {
    std::vector<AnalyticDensity::Component> comps;
    for (const auto& c : mu.components()) {
      comps.push_back({c.weight, std::get<AnalyticDensity>(dilate(c.law, t))});
    }
    return AnalyticDensity::mixture(mu.kind(), std::move(params), std::move(comps));
  }
  AnalyticDensity::Spec spec;
  spec.kind = mu.kind();
  spec.params = std::move(params);
  const double scale = std::abs(t);
  spec.density = [mu, t, scale](double x) { return mu.density(x / t) / scale; };
  for (const Interval& iv : mu.support()) {
    spec.support.push_back(t > 0 ? Interval{t * iv.lo, t * iv.hi} : Interval{t * iv.hi, t * iv.lo});
  }
  for (const Atom& a : mu.atoms()) spec.atoms.push_back({t * a.location, a.weight});
  spec.known_ac_mass = mu.ac_mass();
  return AnalyticDensity(std::move(spec));
}

Measure dilate(const Measure& mu, double t) {
  return std::visit([t](const auto& m) -> Measure { return dilate(m, t); }, mu);
}

double ks_distance(std::span<const double> v, const AnalyticDensity& theory) {
  if (v.empty()) throw std::invalid_argument("ks_distance: empty empirical measure");
  if (!theory.is_normalized()) {
    throw std::invalid_argument("ks_distance: theory has total mass " +
                                format_double(theory.total_mass()));
  }
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    // Empirical CDF is i/n just below v[i] and j/n at v[i].
    d = std::max(d, std::abs(static_cast<double>(i) / n - theory.cdf_left(v[i])));
    d = std::max(d, std::abs(static_cast<double>(j) / n - theory.cdf(v[i])));
    i = j;
  }
  return std::min(d, 1.0);
}

double ks_distance(const SpectralMeasure& empirical, const AnalyticDensity& theory) {
  return ks_distance(empirical.eigenvalues(), theory);
}

void write_density_csv(std::ostream& out, const AnalyticDensity& mu, std::span<const double> grid) {
  std::vector<double> xs(grid.begin(), grid.end());
  std::vector<double> ys;
  ys.reserve(xs.size());
  for (double x : xs) ys.push_back(mu.density(x));
  const std::vector<double> cols[] = {xs, ys};
  write_columns_csv(out, "x,density", cols);
}

void write_cdf_csv(std::ostream& out, const AnalyticDensity& mu, std::span<const double> grid) {
  std::vector<double> xs(grid.begin(), grid.end());
  std::vector<double> ys;
  ys.reserve(xs.size());
  for (double x : xs) ys.push_back(mu.cdf(x));
  const std::vector<double> cols[] = {xs, ys};
  write_columns_csv(out, "x,cdf", cols);
}

}  // namespace kronspec
