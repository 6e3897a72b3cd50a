#include "kronspec/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "kronspec/csv.hpp"
#include "kronspec/errors.hpp"
#include "kronspec/freeconv.hpp"
#include "kronspec/limits.hpp"

namespace kronspec {

using nlohmann::json;

namespace {

double parse_number(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + ": '" + std::string(s) + "' is not a number");
  }
  return v;
}

std::vector<double> parse_list(std::string_view s, std::string_view what) {
  std::vector<double> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    out.push_back(parse_number(s.substr(0, comma), what));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  return f;
}

struct ModelArgs {
  std::string model;
  double t = 1.0;
  bool t_set = false;
  int order = 128;
  int k = 2;
  std::string family = std::string(to_string(PsiFamilyTag::semicircle_variance_1_plus_t2));
  std::string alphas;
  std::string betas;
};

void add_model_options(CLI::App* cmd, ModelArgs& m, bool required) {
  auto* opt = cmd->add_option("--model", m.model,
                              "wigner-gaussian | wigner-wishart | freeconv-f | ss-law | finite-k");
  if (required) opt->required();
  cmd->add_option("--t", m.t, "dilation t for freeconv-f")->capture_default_str();
  cmd->add_option("--order", m.order, "mixing rule order for wigner-wishart")->capture_default_str();
  cmd->add_option("--k", m.k, "block count for finite-k")->capture_default_str();
  cmd->add_option("--family", m.family, "psi family for finite-k")->capture_default_str();
  cmd->add_option("--alphas", m.alphas, "comma-separated alphas for ss-law");
  cmd->add_option("--betas", m.betas, "comma-separated betas for ss-law");
}

json model_args_json(const ModelArgs& m) {
  json j = {{"model", m.model}};
  if (m.model == "freeconv-f") j["t"] = m.t;
  if (m.model == "wigner-wishart") j["order"] = m.order;
  if (m.model == "finite-k") {
    j["k"] = m.k;
    j["family"] = m.family;
  }
  if (m.model == "ss-law") {
    j["alphas"] = parse_list(m.alphas, "--alphas");
    j["betas"] = parse_list(m.betas, "--betas");
  }
  return j;
}

AnalyticDensity build_model(const ModelArgs& m) {
  if (m.model == "wigner-gaussian") return wigner_gaussian_density();
  if (m.model == "wigner-wishart") return wigner_wishart_density(gauss_chebyshev_rule(m.order));
  if (m.model == "freeconv-f") return ConvolutionModel(m.t).as_density();
  if (m.model == "ss-law") {
    if (m.alphas.empty() || m.betas.empty()) {
      throw std::invalid_argument("ss-law needs --alphas and --betas");
    }
    return ss_law_density(parse_list(m.alphas, "--alphas"), parse_list(m.betas, "--betas"));
  }
  if (m.model == "finite-k") {
    PsiFamily psi = m.family == to_string(PsiFamilyTag::freeconv_f)
                        ? PsiFamily::freeconv_f()
                        : PsiFamily::semicircle_variance_1_plus_t2();
    if (m.family != to_string(PsiFamilyTag::freeconv_f) &&
        m.family != to_string(PsiFamilyTag::semicircle_variance_1_plus_t2)) {
      throw std::invalid_argument("unknown --family '" + m.family + "'");
    }
    return finite_k_limit(psi, m.k);
  }
  throw std::invalid_argument("unknown --model '" + m.model + "'");
}

json support_json(const AnalyticDensity& law) {
  json support = json::array();
  for (const Interval& iv : law.support()) support.push_back({iv.lo, iv.hi});
  return support;
}

json atoms_json(const AnalyticDensity& law) {
  json atoms = json::array();
  for (const Atom& a : law.atoms()) atoms.push_back({{"location", a.location}, {"weight", a.weight}});
  return atoms;
}

void print_resolved(std::ostream& err, const std::string& command, const json& resolved) {
  err << "kronspec " << command << " resolved config: " << resolved.dump() << "\n";
}

// ---------------------------------------------------------------------------
// Subcommands

struct SampleArgs {
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::string a = "gue";
  std::string b = "gue";
  std::string w = "wigner-rademacher";
  int trials = 1;
  std::uint64_t seed = 0;
  int bins = 100;
  unsigned threads = 1;
  std::string out = ".";
};

int cmd_sample(const SampleArgs& s, std::ostream& out, std::ostream& err) {
  ExperimentConfig c;
  c.n = s.n;
  c.k = s.k;
  c.a = parse_cli_source(s.a);
  c.b = parse_cli_source(s.b);
  c.w = parse_cli_source(s.w);
  c.trials = s.trials;
  c.seed = s.seed;
  c.bins = s.bins;
  c.validate();
  json resolved = c.to_json();
  resolved.erase("theory");
  resolved.erase("tolerances");
  resolved["threads"] = s.threads;
  resolved["out"] = s.out;
  print_resolved(err, "sample", resolved);

  const ExperimentOutcome o = run_experiment(c, {s.threads, false});
  std::filesystem::create_directories(s.out);
  const std::filesystem::path dir(s.out);
  {
    auto f = open_output((dir / "eigenvalues.csv").string());
    write_eigenvalues_csv(f, o.pooled);
  }
  {
    auto f = open_output((dir / "histogram.csv").string());
    write_histogram_csv(f, o.histogram);
  }
  out << "wrote " << o.pooled.size() << " eigenvalues to " << (dir / "eigenvalues.csv").string()
      << "\n";
  return o.report["failed_trials"].empty() ? kExitPass : kExitNumerical;
}

int cmd_predict(const ModelArgs& m, const std::string& grid_spec, const std::string& out_path,
                std::ostream& out, std::ostream& err) {
  const std::vector<double> grid = parse_grid(grid_spec);
  json resolved = model_args_json(m);
  resolved["grid"] = grid_spec;
  resolved["grid_points"] = grid.size();
  resolved["out"] = out_path;
  print_resolved(err, "predict", resolved);

  const AnalyticDensity law = build_model(m);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = law.density(grid[i]);
  double trapezoid = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    trapezoid += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
  }
  {
    auto f = open_output(out_path);
    write_density_csv(f, law, grid);
  }
  json side = resolved;
  side.erase("out");
  side["density_kind"] = std::string(to_string(law.kind()));
  json params = json::object();
  for (const auto& [k, v] : law.params()) params[k] = v;
  side["params"] = params;
  side["support"] = support_json(law);
  side["atoms"] = atoms_json(law);
  side["total_mass"] = law.total_mass();
  side["ac_mass"] = law.ac_mass();
  side["grid_trapezoid_mass"] = trapezoid;
  if (m.model == "freeconv-f" && std::abs(m.t) >= kSemicircleSwitch) {
    side["s1"] = law.param("s1");
    side["s2"] = law.param("s2");
  }
  std::filesystem::path sidecar(out_path);
  sidecar.replace_extension(".json");
  {
    auto f = open_output(sidecar.string());
    f << side.dump(2) << "\n";
  }
  out << "wrote " << grid.size() << " rows to " << out_path << " (grid mass "
      << format_double(trapezoid) << ")\n";
  return kExitPass;
}

int cmd_compare(const std::string& config_path, const std::string& out_dir, unsigned threads,
                bool timing, std::ostream& out, std::ostream& err) {
  const ExperimentConfig c = load_config(config_path);
  json resolved = c.to_json();
  resolved["threads"] = threads;
  resolved["out"] = out_dir;
  resolved["timing"] = timing;
  print_resolved(err, "compare", resolved);

  const ExperimentOutcome o = run_experiment(c, {threads, timing});
  write_outcome(o, out_dir);
  out << "pooled " << o.pooled.size() << " eigenvalues";
  if (o.theory) out << ", ks " << format_double(o.report["ks"].get<double>());
  out << ", " << (o.pass ? "PASS" : "FAIL") << "\n";
  for (const json& check : o.report["checks"]) {
    out << "  " << check["name"].get<std::string>() << " = " << format_double(check["value"].get<double>())
        << " (limit " << format_double(check["limit"].get<double>()) << ") "
        << (check["pass"].get<bool>() ? "ok" : "FAIL") << "\n";
  }
  if (!o.report["failed_trials"].empty()) return kExitNumerical;
  return o.pass ? kExitPass : kExitToleranceFail;
}

int cmd_moments(const ModelArgs& m, const std::string& eigen_path, int max_order,
                std::ostream& out, std::ostream& err) {
  if (max_order < 1 || max_order > kMaxMomentOrder) {
    throw std::invalid_argument("--max-order must be in [1, 64]");
  }
  json resolved = eigen_path.empty() ? model_args_json(m) : json{{"eigenvalues", eigen_path}};
  resolved["max_order"] = max_order;
  print_resolved(err, "moments", resolved);

  json moments = json::object();
  if (!eigen_path.empty()) {
    std::ifstream in(eigen_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + eigen_path + "'");
    const SpectralMeasure mu = read_eigenvalues_csv(in);
    for (int k = 1; k <= max_order; ++k) moments["m" + std::to_string(k)] = mu.moment(k);
  } else {
    if (m.model.empty()) throw std::invalid_argument("moments needs --model or --eigenvalues");
    const AnalyticDensity law = build_model(m);
    for (int k = 1; k <= max_order; ++k) moments["m" + std::to_string(k)] = moment(law, k);
  }
  out << json{{"source", resolved}, {"moments", moments}}.dump(2) << "\n";
  return kExitPass;
}

int cmd_support(double t, std::ostream& out, std::ostream& err) {
  print_resolved(err, "support", json{{"t", t}});
  if (t == 0.0) {
    throw std::invalid_argument(
        "t = 0 has no quartic; the law is the standard semicircle with support [-2, 2]");
  }
  const double at = std::abs(t);
  const SupportEndpoints s = support_endpoints(at);
  const double r1 = support_quartic(s.s1, at);
  const double r2 = support_quartic(s.s2, at);
  const double lo = t > 0 ? s.s1 : -s.s2;
  const double hi = t > 0 ? s.s2 : -s.s1;
  const json report = {{"t", t},
                       {"s1", lo},
                       {"s2", hi},
                       {"residual_s1", t > 0 ? r1 : r2},
                       {"residual_s2", t > 0 ? r2 : r1}};
  out << report.dump(2) << "\n";
  return kExitPass;
}

}  // namespace

std::vector<double> parse_grid(std::string_view spec) {
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string_view::npos || spec.find(':', c2 + 1) != std::string_view::npos) {
    throw std::invalid_argument("grid '" + std::string(spec) + "' must be start:stop:step");
  }
  const double start = parse_number(spec.substr(0, c1), "grid start");
  const double stop = parse_number(spec.substr(c1 + 1, c2 - c1 - 1), "grid stop");
  const double step = parse_number(spec.substr(c2 + 1), "grid step");
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be > 0");
  if (!(stop >= start)) throw std::invalid_argument("grid stop must be >= start");
  const double count = std::floor((stop - start) / step + 0.5) + 1.0;
  if (count > 1e7) throw std::invalid_argument("grid has more than 1e7 points");
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = start + static_cast<double>(i) * step;
  return grid;
}

MatrixSource parse_cli_source(std::string_view text) {
  const auto colon = text.find(':');
  const std::string head(text.substr(0, colon));
  MatrixSource s = MatrixSource::parse(head);
  if (colon == std::string_view::npos) {
    if (s.kind == MatrixSource::Kind::diagonal) {
      throw std::invalid_argument("diagonal source needs values, e.g. diagonal:0,1,-1,2");
    }
    return s;
  }
  const std::string_view rest = text.substr(colon + 1);
  if (s.kind == MatrixSource::Kind::diagonal) {
    s.values = parse_list(rest, "diagonal values");
  } else if (s.is_random() && s.ensemble == EnsembleKind::wishart) {
    s.ratio = parse_number(rest, "wishart ratio");
    if (!(s.ratio > 0.0)) throw std::invalid_argument("wishart ratio must be > 0");
  } else {
    throw std::invalid_argument("source '" + head + "' takes no parameters");
  }
  return s;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectra of random block matrices I_k (x) A + W (x) B", "kronspec"};
  app.require_subcommand(1);

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "simulate and write pooled eigenvalues");
  sample->add_option("--n", sa.n, "block order")->required();
  sample->add_option("--k", sa.k, "number of blocks")->required();
  sample->add_option("--a", sa.a, "source for A")->capture_default_str();
  sample->add_option("--b", sa.b, "source for B")->capture_default_str();
  sample->add_option("--w", sa.w, "source for W")->capture_default_str();
  sample->add_option("--trials", sa.trials)->capture_default_str();
  sample->add_option("--seed", sa.seed)->capture_default_str();
  sample->add_option("--bins", sa.bins)->capture_default_str();
  sample->add_option("--threads", sa.threads, "0 uses all cores")->capture_default_str();
  sample->add_option("--out", sa.out, "output directory")->capture_default_str();

  ModelArgs pm;
  std::string grid;
  std::string predict_out = "density.csv";
  auto* predict = app.add_subcommand("predict", "tabulate a limiting density");
  add_model_options(predict, pm, true);
  predict->add_option("--grid", grid, "start:stop:step")->required();
  predict->add_option("--out", predict_out, "CSV path; a .json sidecar is written next to it")
      ->capture_default_str();

  std::string config_path;
  std::string compare_out = "compare-out";
  unsigned compare_threads = 1;
  bool timing = false;
  auto* compare = app.add_subcommand("compare", "run an experiment config against its theory");
  compare->add_option("--config", config_path, "experiment JSON")->required();
  compare->add_option("--out", compare_out, "output directory")->capture_default_str();
  compare->add_option("--threads", compare_threads, "0 uses all cores")->capture_default_str();
  compare->add_flag("--timing", timing, "add runtime_seconds to the report");

  ModelArgs mm;
  std::string eigen_path;
  int max_order = 6;
  auto* moments = app.add_subcommand("moments", "moments of a model or an eigenvalue CSV");
  add_model_options(moments, mm, false);
  moments->add_option("--eigenvalues", eigen_path, "index,eigenvalue CSV");
  moments->add_option("--max-order", max_order)->capture_default_str();

  double support_t = 0.0;
  auto* support = app.add_subcommand("support", "support endpoints of f(.; t)");
  support->add_option("--t", support_t)->required();

  std::vector<const char*> argv = {"kronspec"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*sample) return cmd_sample(sa, out, err);
    if (*predict) return cmd_predict(pm, grid, predict_out, out, err);
    if (*compare) return cmd_compare(config_path, compare_out, compare_threads, timing, out, err);
    if (*moments) return cmd_moments(mm, eigen_path, max_order, out, err);
    if (*support) return cmd_support(support_t, out, err);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace kronspec
