#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <span>

namespace kronspec {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Dense complex Hermitian matrix. Every constructor mirrors the upper
// triangle, so entries(i, j) == conj(entries(j, i)) holds exactly and the
// diagonal is real.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  static HermitianMatrix from_upper(Matrix m);
  static HermitianMatrix zero(Eigen::Index n);
  static HermitianMatrix identity(Eigen::Index n);
  static HermitianMatrix diagonal(std::span<const double> values);

  Eigen::Index order() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  explicit HermitianMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

// Debug dump: 8-byte magic "KSPCHERM", little-endian u64 order, then
// row-major little-endian f64 (re, im) pairs.
inline constexpr Eigen::Index kMaxBinaryOrder = 1 << 16;
void write_matrix_binary(std::ostream& out, const HermitianMatrix& m);
HermitianMatrix read_matrix_binary(std::istream& in);

}  // namespace kronspec
