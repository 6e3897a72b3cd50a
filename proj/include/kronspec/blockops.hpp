#pragma once

#include "kronspec/hermitian.hpp"
#include "kronspec/measures.hpp"

namespace kronspec {

inline constexpr int kMaxWordLength = 12;
inline constexpr int kMaxTraceMomentOrder = 10;
inline constexpr Eigen::Index kMaxExactTraceOrder = 256;

/// Kronecker product: block (i, j) of the result is a(i, j) * b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Normalized trace (1/n) sum_i m(i, i).
Complex normalized_trace(const Matrix& m);

// I_k (x) A + W (x) B with W of order k and A, B of order n.
struct BlockMatrixSpec {
  HermitianMatrix w;
  HermitianMatrix a;
  HermitianMatrix b;

  Eigen::Index k() const { return w.order(); }
  Eigen::Index n() const { return a.order(); }
  void validate() const;
};

HermitianMatrix assemble(const BlockMatrixSpec& spec);

/// Sum of all words in A and B with a_count copies of A and b_count copies
/// of B, each word evaluated as a matrix product. Words are enumerated as
/// bitmasks (bit set = B) in increasing mask order.
Matrix phi_expansion(const Matrix& a, const Matrix& b, int a_count, int b_count);

struct TraceMoments {
  double lhs = 0.0;  // tr_{nk}(B^m) of the assembled matrix
  double rhs = 0.0;  // sum_j tr_k(W^j) tr_n(phi(A, B; m - j, j))
};

TraceMoments trace_moment_decomposition(const BlockMatrixSpec& spec, int m);

struct CompleteGraphPattern {
  HermitianMatrix w;
  DiscreteMeasure spectrum;
};

/// k x k matrix with zero diagonal and ones elsewhere, with its exact
/// spectral measure ((k-1)/k) delta_{-1} + (1/k) delta_{k-1}.
CompleteGraphPattern complete_graph_w(Eigen::Index k);

}  // namespace kronspec
