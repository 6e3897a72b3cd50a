#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "kronspec/ensembles.hpp"
#include "kronspec/measures.hpp"
#include "kronspec/spectra.hpp"

namespace kronspec {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kReportMomentCount = 6;

// Bad or unreadable experiment configuration. The message names the field or
// the line and column.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Where one of A, B, W comes from: a random ensemble or a fixed matrix.
struct MatrixSource {
  enum class Kind { ensemble, zero, identity, complete_graph, diagonal };
  Kind kind = Kind::ensemble;
  EnsembleKind ensemble = EnsembleKind::gue;
  double ratio = 1.0;            // wishart: p = round(ratio * order) unless p is set
  std::int64_t p = 0;
  std::vector<double> values;    // diagonal

  static MatrixSource parse(const std::string& name);  // "gue", "zero", "wishart", ...
  std::string name() const;
  bool is_random() const { return kind == Kind::ensemble; }
  HermitianMatrix build(Eigen::Index order, RngSeed seed) const;
};

struct TheorySpec {
  std::string kind = "none";  // wigner-gaussian | wigner-wishart | ss-law | finite-k |
                              // semicircle | marchenko-pastur | none
  nlohmann::json params = nlohmann::json::object();
};

struct Tolerances {
  double ks_max = 0.05;
  std::vector<std::pair<int, double>> moment_rel;  // (order, relative tolerance)
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::int64_t n = 1;
  std::int64_t k = 1;
  int trials = 1;
  std::uint64_t seed = 0;
  MatrixSource a;
  MatrixSource b;
  MatrixSource w;
  TheorySpec theory;
  int bins = 100;
  Tolerances tolerances;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

/// Reads and validates a config file. Parse errors carry line and column.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

/// Theory law named by config.theory; nullopt for "none".
std::optional<AnalyticDensity> build_theory(const ExperimentConfig& config);

struct RunOptions {
  unsigned threads = 1;  // 0 means hardware concurrency
  bool include_runtime = false;
};

struct ExperimentOutcome {
  nlohmann::json report;
  SpectralMeasure pooled;
  std::optional<AnalyticDensity> theory;
  Histogram histogram;
  bool pass = true;
};

/// Seeds for trial t are (seed, 3t), (seed, 3t + 1), (seed, 3t + 2) for A, B
/// and W. Trials run on a thread pool; results are merged by trial index, so
/// the report does not depend on the thread count.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Writes report.json, eigenvalues.csv, histogram.csv and, when a theory is
/// set, theory_density.csv into dir.
void write_outcome(const ExperimentOutcome& outcome, const std::filesystem::path& dir);

std::string dump_report(const nlohmann::json& report);

}  // namespace kronspec
