#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "kronspec/hermitian.hpp"

namespace kronspec {

// (master seed, stream index). Identical pairs reproduce identical matrices;
// distinct stream indices give independent generators.
struct RngSeed {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;
};

// Per-stream generator: mt19937_64 keyed through std::seed_seq on the four
// 32-bit halves of (master, stream). Normals come from Box-Muller on 53-bit
// uniforms, so the draws do not depend on the standard library's
// distribution implementations.
class StreamRng {
 public:
  explicit StreamRng(RngSeed seed);

  double uniform();  // in (0, 1)
  double normal();   // N(0, 1)
  bool coin();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class EntryLaw { rademacher, gaussian };

enum class EnsembleKind { wigner_rademacher, wigner_gaussian, gue, wishart };
std::string_view to_string(EnsembleKind kind);
EnsembleKind ensemble_kind_from_string(std::string_view name);

// Random ensemble of order n. For wishart, shape is the row count p of X.
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::gue;
  Eigen::Index order = 1;
  Eigen::Index shape = 0;

  void validate() const;
};

/// Wigner matrix with E|A_ij|^2 = 1/n off the diagonal and E A_ii^2 = 1/n.
/// rademacher: real entries +-1/sqrt(n); gaussian: complex off-diagonal with
/// independent N(0, 1/(2n)) parts, real N(0, 1/n) diagonal.
HermitianMatrix sample_wigner(Eigen::Index n, EntryLaw law, RngSeed seed);

/// X^* X for a p x n matrix X with independent complex entries whose real and
/// imaginary parts are N(0, 1/(2n)).
HermitianMatrix sample_wishart(Eigen::Index n, Eigen::Index p, RngSeed seed);

HermitianMatrix sample(const EnsembleSpec& spec, RngSeed seed);

}  // namespace kronspec
