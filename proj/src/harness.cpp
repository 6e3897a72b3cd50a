#include "kronspec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "kronspec/blockops.hpp"
#include "kronspec/csv.hpp"
#include "kronspec/errors.hpp"
#include "kronspec/limits.hpp"

namespace kronspec {

using nlohmann::json;

namespace {

constexpr int kTheoryGridPoints = 1001;
constexpr int kDefaultWishartMixingOrder = 128;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

void reject_unknown_keys(const json& j, const std::string& where,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&key](const char* a) { return key == a; });
    if (!ok) field_error(where.empty() ? key : where + "." + key, "unknown field");
  }
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::int64_t get_int(const json& j, const char* key, const std::string& field, bool required,
                     std::int64_t fallback) {
  const json* v = find(j, key);
  if (!v) {
    if (required) field_error(field, "missing");
    return fallback;
  }
  if (!v->is_number_integer()) field_error(field, "expected an integer");
  return v->get<std::int64_t>();
}

double get_double(const json& j, const char* key, const std::string& field, double fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_number()) field_error(field, "expected a number");
  return v->get<double>();
}

std::vector<double> get_doubles(const json& v, const std::string& field) {
  if (!v.is_array()) field_error(field, "expected an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) field_error(field, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

MatrixSource parse_source(const json& j, const std::string& field) {
  if (j.is_string()) {
    try {
      return MatrixSource::parse(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      field_error(field, e.what());
    }
  }
  if (!j.is_object()) field_error(field, "expected a source name or object");
  const json* kind = find(j, "kind");
  if (!kind || !kind->is_string()) field_error(field + ".kind", "missing or not a string");
  MatrixSource src;
  try {
    src = MatrixSource::parse(kind->get<std::string>());
  } catch (const std::invalid_argument& e) {
    field_error(field + ".kind", e.what());
  }
  if (src.kind == MatrixSource::Kind::diagonal) {
    reject_unknown_keys(j, field, {"kind", "values"});
    const json* values = find(j, "values");
    if (!values) field_error(field + ".values", "missing");
    src.values = get_doubles(*values, field + ".values");
  } else if (src.is_random() && src.ensemble == EnsembleKind::wishart) {
    reject_unknown_keys(j, field, {"kind", "ratio", "p"});
    src.ratio = get_double(j, "ratio", field + ".ratio", 1.0);
    src.p = get_int(j, "p", field + ".p", false, 0);
  } else {
    reject_unknown_keys(j, field, {"kind"});
  }
  return src;
}

json source_to_json(const MatrixSource& s) {
  json j = {{"kind", s.name()}};
  if (s.kind == MatrixSource::Kind::diagonal) j["values"] = s.values;
  if (s.is_random() && s.ensemble == EnsembleKind::wishart) {
    j["ratio"] = s.ratio;
    j["p"] = s.p;
  }
  return j;
}

std::vector<double> diagonal_of(const MatrixSource& s, std::int64_t n, const char* which) {
  switch (s.kind) {
    case MatrixSource::Kind::diagonal: return s.values;
    case MatrixSource::Kind::zero: return std::vector<double>(static_cast<std::size_t>(n), 0.0);
    case MatrixSource::Kind::identity: return std::vector<double>(static_cast<std::size_t>(n), 1.0);
    default:
      field_error(std::string("theory.params"),
                  std::string("ss-law needs alphas and betas, or fixed diagonal ") + which);
  }
}

// Fills theory defaults so the echoed config is fully resolved.
void resolve_theory(ExperimentConfig& c) {
  json& p = c.theory.params;
  const std::string& kind = c.theory.kind;
  const std::string field = "theory.params";
  if (kind == "none" || kind == "wigner-gaussian") {
    reject_unknown_keys(p, field, {});
  } else if (kind == "wigner-wishart") {
    reject_unknown_keys(p, field, {"order"});
    p["order"] = get_int(p, "order", field + ".order", false, kDefaultWishartMixingOrder);
  } else if (kind == "ss-law") {
    reject_unknown_keys(p, field, {"alphas", "betas"});
    if (!find(p, "alphas")) p["alphas"] = diagonal_of(c.a, c.n, "A");
    if (!find(p, "betas")) p["betas"] = diagonal_of(c.b, c.n, "B");
    get_doubles(p["alphas"], field + ".alphas");
    get_doubles(p["betas"], field + ".betas");
  } else if (kind == "finite-k") {
    reject_unknown_keys(p, field, {"family"});
    if (!find(p, "family")) p["family"] = std::string(to_string(PsiFamilyTag::semicircle_variance_1_plus_t2));
    if (!p["family"].is_string()) field_error(field + ".family", "expected a string");
  } else if (kind == "semicircle") {
    reject_unknown_keys(p, field, {"center", "variance"});
    p["center"] = get_double(p, "center", field + ".center", 0.0);
    p["variance"] = get_double(p, "variance", field + ".variance", 1.0);
  } else if (kind == "marchenko-pastur") {
    reject_unknown_keys(p, field, {"mean"});
    p["mean"] = get_double(p, "mean", field + ".mean", 1.0);
  } else {
    field_error("theory.kind", "unknown theory '" + kind + "'");
  }
}

PsiFamily psi_family_from_name(const std::string& name) {
  if (name == to_string(PsiFamilyTag::semicircle_variance_1_plus_t2)) {
    return PsiFamily::semicircle_variance_1_plus_t2();
  }
  if (name == to_string(PsiFamilyTag::freeconv_f)) return PsiFamily::freeconv_f();
  field_error("theory.params.family", "unknown family '" + name + "'");
}

struct TrialResult {
  std::vector<double> eigenvalues;
  bool failed = false;
  std::string error;
};

TrialResult run_trial(const ExperimentConfig& c, std::uint64_t trial) {
  TrialResult out;
  try {
    BlockMatrixSpec spec{c.w.build(c.k, {c.seed, 3 * trial + 2}), c.a.build(c.n, {c.seed, 3 * trial}),
                         c.b.build(c.n, {c.seed, 3 * trial + 1})};
    out.eigenvalues = hermitian_eigenvalues(assemble(spec));
  } catch (const NumericalError& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// MatrixSource

MatrixSource MatrixSource::parse(const std::string& name) {
  MatrixSource s;
  if (name == "zero") {
    s.kind = Kind::zero;
  } else if (name == "identity") {
    s.kind = Kind::identity;
  } else if (name == "complete-graph") {
    s.kind = Kind::complete_graph;
  } else if (name == "diagonal") {
    s.kind = Kind::diagonal;
  } else {
    s.kind = Kind::ensemble;
    s.ensemble = ensemble_kind_from_string(name);
  }
  return s;
}

std::string MatrixSource::name() const {
  switch (kind) {
    case Kind::ensemble: return std::string(to_string(ensemble));
    case Kind::zero: return "zero";
    case Kind::identity: return "identity";
    case Kind::complete_graph: return "complete-graph";
    case Kind::diagonal: return "diagonal";
  }
  return "unknown";
}

HermitianMatrix MatrixSource::build(Eigen::Index order, RngSeed seed) const {
  switch (kind) {
    case Kind::ensemble: {
      EnsembleSpec spec{ensemble, order, 0};
      if (ensemble == EnsembleKind::wishart) {
        spec.shape = p > 0 ? p : static_cast<Eigen::Index>(std::llround(ratio * order));
      }
      return sample(spec, seed);
    }
    case Kind::zero: return HermitianMatrix::zero(order);
    case Kind::identity: return HermitianMatrix::identity(order);
    case Kind::complete_graph: return complete_graph_w(order).w;
    case Kind::diagonal:
      if (static_cast<Eigen::Index>(values.size()) != order) {
        throw std::invalid_argument("diagonal source has " + std::to_string(values.size()) +
                                    " values, expected " + std::to_string(order));
      }
      return HermitianMatrix::diagonal(values);
  }
  throw std::invalid_argument("unknown matrix source");
}

// ---------------------------------------------------------------------------
// ExperimentConfig

void ExperimentConfig::validate() const {
  if (schema_version != kConfigSchemaVersion) {
    field_error("schema_version", "unsupported version " + std::to_string(schema_version));
  }
  if (n < 1) field_error("n", "must be >= 1");
  if (k < 1) field_error("k", "must be >= 1");
  if (n * k > kMaxEigensolveOrder) {
    field_error("n", "n*k = " + std::to_string(n * k) + " exceeds the eigensolve guard " +
                         std::to_string(kMaxEigensolveOrder));
  }
  if (trials < 1) field_error("trials", "must be >= 1");
  if (bins < 10) field_error("bins", "must be >= 10");
  if (!(tolerances.ks_max > 0.0)) field_error("tolerances.ks_max", "must be > 0");
  for (const auto& [order, rel] : tolerances.moment_rel) {
    if (order < 1 || order > kReportMomentCount) {
      field_error("tolerances.moment_rel", "moment order must be in [1, 6]");
    }
    if (!(rel > 0.0)) field_error("tolerances.moment_rel", "tolerances must be > 0");
  }
  const auto check_source = [](const MatrixSource& s, std::int64_t order, const char* name) {
    if (s.kind == MatrixSource::Kind::complete_graph && std::string(name) != "w") {
      field_error(name, "complete-graph is only available for w");
    }
    if (s.kind == MatrixSource::Kind::diagonal &&
        static_cast<std::int64_t>(s.values.size()) != order) {
      field_error(std::string(name) + ".values", "expected " + std::to_string(order) + " values");
    }
    if (s.is_random() && s.ensemble == EnsembleKind::wishart) {
      if (s.p < 0) field_error(std::string(name) + ".p", "must be >= 1");
      if (s.p == 0 && std::llround(s.ratio * order) < 1) {
        field_error(std::string(name) + ".ratio", "gives p < 1");
      }
    }
  };
  check_source(a, n, "a");
  check_source(b, n, "b");
  check_source(w, k, "w");
  if (theory.kind == "finite-k" && w.kind != MatrixSource::Kind::complete_graph) {
    field_error("theory.kind", "finite-k requires w = complete-graph");
  }
  if (theory.kind == "finite-k" && k > kMaxFiniteK) field_error("k", "finite-k allows k <= 1024");
}

json ExperimentConfig::to_json() const {
  json tol = {{"ks_max", tolerances.ks_max}, {"moment_rel", json::object()}};
  for (const auto& [order, rel] : tolerances.moment_rel) tol["moment_rel"][std::to_string(order)] = rel;
  return {{"schema_version", schema_version},
          {"n", n},
          {"k", k},
          {"trials", trials},
          {"seed", seed},
          {"a", source_to_json(a)},
          {"b", source_to_json(b)},
          {"w", source_to_json(w)},
          {"theory", {{"kind", theory.kind}, {"params", theory.params}}},
          {"bins", bins},
          {"tolerances", tol}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  reject_unknown_keys(j, "", {"schema_version", "n", "k", "trials", "seed", "a", "b", "w", "theory",
                              "bins", "tolerances"});
  ExperimentConfig c;
  c.schema_version = static_cast<int>(get_int(j, "schema_version", "schema_version", false,
                                              kConfigSchemaVersion));
  c.n = get_int(j, "n", "n", true, 0);
  c.k = get_int(j, "k", "k", true, 0);
  c.trials = static_cast<int>(get_int(j, "trials", "trials", false, 1));
  if (const json* s = find(j, "seed")) {
    if (!s->is_number_unsigned()) field_error("seed", "expected a nonnegative integer");
    c.seed = s->get<std::uint64_t>();
  }
  for (const char* name : {"a", "b", "w"}) {
    const json* v = find(j, name);
    if (!v) field_error(name, "missing");
    MatrixSource src = parse_source(*v, name);
    if (name[0] == 'a') c.a = std::move(src);
    if (name[0] == 'b') c.b = std::move(src);
    if (name[0] == 'w') c.w = std::move(src);
  }
  if (const json* t = find(j, "theory")) {
    if (t->is_string()) {
      c.theory.kind = t->get<std::string>();
    } else if (t->is_object()) {
      reject_unknown_keys(*t, "theory", {"kind", "params"});
      const json* kind = find(*t, "kind");
      if (!kind || !kind->is_string()) field_error("theory.kind", "missing or not a string");
      c.theory.kind = kind->get<std::string>();
      if (const json* p = find(*t, "params")) {
        if (!p->is_object()) field_error("theory.params", "expected an object");
        c.theory.params = *p;
      }
    } else {
      field_error("theory", "expected a name or object");
    }
  }
  c.bins = static_cast<int>(get_int(j, "bins", "bins", false, 100));
  if (const json* tol = find(j, "tolerances")) {
    if (!tol->is_object()) field_error("tolerances", "expected an object");
    reject_unknown_keys(*tol, "tolerances", {"ks_max", "moment_rel", "moment_orders"});
    c.tolerances.ks_max = get_double(*tol, "ks_max", "tolerances.ks_max", c.tolerances.ks_max);
    if (const json* rel = find(*tol, "moment_rel")) {
      if (rel->is_object()) {
        for (const auto& [key, value] : rel->items()) {
          int order = 0;
          try {
            order = std::stoi(key);
          } catch (const std::exception&) {
            field_error("tolerances.moment_rel." + key, "key must be a moment order");
          }
          if (!value.is_number()) field_error("tolerances.moment_rel." + key, "expected a number");
          c.tolerances.moment_rel.emplace_back(order, value.get<double>());
        }
      } else if (rel->is_number()) {
        std::vector<double> orders = {2.0, 4.0};
        if (const json* o = find(*tol, "moment_orders")) {
          orders = get_doubles(*o, "tolerances.moment_orders");
        }
        for (double order : orders) c.tolerances.moment_rel.emplace_back(static_cast<int>(order), rel->get<double>());
      } else {
        field_error("tolerances.moment_rel", "expected a number or an object");
      }
    }
    std::sort(c.tolerances.moment_rel.begin(), c.tolerances.moment_rel.end());
  }
  c.validate();
  resolve_theory(c);
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("config parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + e.what());
  }
  return ExperimentConfig::from_json(j);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::optional<AnalyticDensity> build_theory(const ExperimentConfig& c) {
  const std::string& kind = c.theory.kind;
  const json& p = c.theory.params;
  if (kind == "none") return std::nullopt;
  if (kind == "wigner-gaussian") return wigner_gaussian_density();
  if (kind == "wigner-wishart") {
    return wigner_wishart_density(gauss_chebyshev_rule(static_cast<int>(p.at("order").get<std::int64_t>())));
  }
  if (kind == "ss-law") {
    const auto alphas = p.at("alphas").get<std::vector<double>>();
    const auto betas = p.at("betas").get<std::vector<double>>();
    return ss_law_density(alphas, betas);
  }
  if (kind == "finite-k") {
    return finite_k_limit(psi_family_from_name(p.at("family").get<std::string>()), static_cast<int>(c.k));
  }
  if (kind == "semicircle") {
    return SemicircleLaw(p.at("center").get<double>(), p.at("variance").get<double>()).as_density();
  }
  if (kind == "marchenko-pastur") return MarchenkoPasturLaw(p.at("mean").get<double>()).as_density();
  field_error("theory.kind", "unknown theory '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Running

ExperimentOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  const auto trials = static_cast<std::size_t>(config.trials);
  std::vector<TrialResult> results(trials);
  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                          : options.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (std::size_t t = next++; t < trials; t = next++) {
      try {
        results[t] = run_trial(config, t);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<SpectralMeasure> parts;
  json failed = json::array();
  for (std::size_t t = 0; t < trials; ++t) {
    if (results[t].failed) {
      failed.push_back({{"trial", t}, {"error", results[t].error}});
    } else {
      parts.emplace_back(std::move(results[t].eigenvalues));
    }
  }

  ExperimentOutcome out;
  out.pooled = SpectralMeasure::pooled(parts);
  out.theory = build_theory(config);

  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["config"] = config.to_json();
  report["seed"] = config.seed;
  report["pooled_count"] = out.pooled.size();
  report["expected_count"] = static_cast<std::uint64_t>(config.trials) * config.n * config.k;
  report["failed_trials"] = failed;

  json empirical = json::object();
  if (!out.pooled.empty()) {
    for (int m = 1; m <= kReportMomentCount; ++m) empirical["m" + std::to_string(m)] = out.pooled.moment(m);
    out.histogram = histogram(out.pooled, config.bins);
  }
  report["empirical_moments"] = empirical;

  json checks = json::array();
  bool pass = failed.empty() && !out.pooled.empty();
  if (out.theory) {
    json theory_moments = json::object();
    std::vector<double> tm(kReportMomentCount + 1, 0.0);
    for (int m = 1; m <= kReportMomentCount; ++m) {
      tm[m] = moment(*out.theory, m);
      theory_moments["m" + std::to_string(m)] = tm[m];
    }
    report["theory_moments"] = theory_moments;
    const double ks = out.pooled.empty() ? 1.0 : ks_distance(out.pooled, *out.theory);
    report["ks"] = ks;
    const bool ks_ok = ks <= config.tolerances.ks_max;
    checks.push_back({{"name", "ks"}, {"value", ks}, {"limit", config.tolerances.ks_max}, {"pass", ks_ok}});
    pass = pass && ks_ok;
    for (const auto& [order, rel] : config.tolerances.moment_rel) {
      const double emp = out.pooled.empty() ? 0.0 : out.pooled.moment(order);
      const double scale = std::abs(tm[order]) > 0.0 ? std::abs(tm[order]) : 1.0;
      const double err = std::abs(emp - tm[order]) / scale;
      const bool ok = err <= rel;
      checks.push_back({{"name", "m" + std::to_string(order)},
                        {"value", emp},
                        {"theory", tm[order]},
                        {"relative_error", err},
                        {"limit", rel},
                        {"pass", ok}});
      pass = pass && ok;
    }
  } else {
    report["theory_moments"] = nullptr;
    report["ks"] = nullptr;
  }
  report["checks"] = checks;
  report["pass"] = pass;
  if (options.include_runtime) {
    report["runtime_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  out.report = std::move(report);
  out.pass = pass;
  return out;
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

void write_outcome(const ExperimentOutcome& outcome, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
    return f;
  };
  {
    auto f = open(dir / "report.json");
    f << dump_report(outcome.report);
  }
  {
    auto f = open(dir / "eigenvalues.csv");
    write_eigenvalues_csv(f, outcome.pooled);
  }
  if (!outcome.pooled.empty()) {
    auto f = open(dir / "histogram.csv");
    write_histogram_csv(f, outcome.histogram);
  }
  if (outcome.theory) {
    const Interval h = outcome.theory->hull();
    double lo = h.lo;
    double hi = h.hi;
    if (!outcome.pooled.empty()) {
      lo = std::min(lo, outcome.pooled.min());
      hi = std::max(hi, outcome.pooled.max());
    }
    std::vector<double> grid(kTheoryGridPoints);
    for (int i = 0; i < kTheoryGridPoints; ++i) grid[i] = lo + (hi - lo) * i / (kTheoryGridPoints - 1);
    auto f = open(dir / "theory_density.csv");
    write_density_csv(f, *outcome.theory, grid);
  }
}

}  // namespace kronspec
