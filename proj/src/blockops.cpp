#include "kronspec/blockops.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace kronspec {

Matrix kron(const Matrix& a, const Matrix& b) {
  const Eigen::Index br = b.rows();
  const Eigen::Index bc = b.cols();
  Matrix out(a.rows() * br, a.cols() * bc);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * br, j * bc, br, bc) = a(i, j) * b;
    }
  }
  return out;
}

Complex normalized_trace(const Matrix& m) {
  if (m.rows() == 0) throw std::invalid_argument("normalized_trace: empty matrix");
  return m.trace() / static_cast<double>(m.rows());
}

void BlockMatrixSpec::validate() const {
  if (w.order() < 1 || a.order() < 1) {
    throw std::invalid_argument("BlockMatrixSpec: orders must be >= 1");
  }
  if (b.order() != a.order()) {
    throw std::invalid_argument("BlockMatrixSpec: A has order " + std::to_string(a.order()) +
                                " but B has order " + std::to_string(b.order()));
  }
}

HermitianMatrix assemble(const BlockMatrixSpec& spec) {
  spec.validate();
  const Eigen::Index k = spec.k();
  const Eigen::Index n = spec.n();
  const Matrix& a = spec.a.matrix();
  const Matrix& b = spec.b.matrix();
  const Matrix& w = spec.w.matrix();
  Matrix out = Matrix::Zero(n * k, n * k);
  // Upper block triangle only; from_upper mirrors the rest.
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i; j < k; ++j) {
      auto blk = out.block(i * n, j * n, n, n);
      if (w(i, j) != Complex(0.0, 0.0)) blk = w(i, j) * b;
      if (i == j) blk += a;
    }
  }
  return HermitianMatrix::from_upper(std::move(out));
}

Matrix phi_expansion(const Matrix& a, const Matrix& b, int a_count, int b_count) {
  if (a_count < 0 || b_count < 0) throw std::invalid_argument("phi_expansion: negative count");
  const int len = a_count + b_count;
  if (len > kMaxWordLength) {
    throw std::invalid_argument("phi_expansion: word length " + std::to_string(len) +
                                " exceeds " + std::to_string(kMaxWordLength));
  }
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw std::invalid_argument("phi_expansion: A and B must be square of equal order");
  }
  const Eigen::Index n = a.rows();
  Matrix sum = Matrix::Zero(n, n);
  Matrix word(n, n);
  for (unsigned mask = 0; mask < (1u << len); ++mask) {
    if (std::popcount(mask) != b_count) continue;
    word.setIdentity();
    for (int pos = 0; pos < len; ++pos) {
      word = word * (((mask >> pos) & 1u) ? b : a);
    }
    sum += word;
  }
  return sum;
}

TraceMoments trace_moment_decomposition(const BlockMatrixSpec& spec, int m) {
  spec.validate();
  if (m < 0 || m > kMaxTraceMomentOrder) {
    throw std::invalid_argument("trace_moment_decomposition: m must be in [0, 10]");
  }
  if (spec.n() * spec.k() > kMaxExactTraceOrder) {
    throw std::invalid_argument("trace_moment_decomposition: nk exceeds 256");
  }
  TraceMoments out;
  const Matrix big = assemble(spec).matrix();
  Matrix power = Matrix::Identity(big.rows(), big.cols());
  for (int i = 0; i < m; ++i) power = power * big;
  out.lhs = normalized_trace(power).real();

  const Matrix& w = spec.w.matrix();
  Matrix w_power = Matrix::Identity(w.rows(), w.cols());
  for (int j = 0; j <= m; ++j) {
    const Complex tw = normalized_trace(w_power);
    const Complex tp = normalized_trace(phi_expansion(spec.a.matrix(), spec.b.matrix(), m - j, j));
    out.rhs += (tw * tp).real();
    w_power = w_power * w;
  }
  return out;
}

CompleteGraphPattern complete_graph_w(Eigen::Index k) {
  if (k < 1) throw std::invalid_argument("complete_graph_w: k must be >= 1");
  Matrix w = Matrix::Ones(k, k);
  w.diagonal().setZero();
  const double kd = static_cast<double>(k);
  if (k == 1) return {HermitianMatrix::from_upper(std::move(w)), DiscreteMeasure::dirac(0.0)};
  DiscreteMeasure spectrum({{-1.0, (kd - 1.0) / kd}, {kd - 1.0, 1.0 / kd}});
  return {HermitianMatrix::from_upper(std::move(w)), std::move(spectrum)};
}

}  // namespace kronspec
