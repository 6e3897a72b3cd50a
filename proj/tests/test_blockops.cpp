#include <stdexcept>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "kronspec/blockops.hpp"
#include "kronspec/ensembles.hpp"
#include "kronspec/spectra.hpp"

using namespace kronspec;

namespace {

Matrix random_complex(Eigen::Index rows, Eigen::Index cols, StreamRng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
  }
  return m;
}

HermitianMatrix random_hermitian(Eigen::Index n, std::uint64_t stream) {
  return sample_wigner(n, EntryLaw::gaussian, {555, stream});
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("kronecker product identities") {
  StreamRng rng({1, 0});
  const Matrix b = random_complex(3, 3, rng);
  const Matrix k = kron(Matrix::Identity(2, 2), b);
  CHECK(k.rows() == 6);
  CHECK(max_abs(k.block(0, 0, 3, 3) - b) == 0.0);
  CHECK(max_abs(k.block(3, 3, 3, 3) - b) == 0.0);
  CHECK(max_abs(k.block(0, 3, 3, 3)) == 0.0);

  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 4.0;
  CHECK(kron(a, d).trace().real() == doctest::Approx(21.0));

  const Matrix A = random_complex(2, 2, rng);
  const Matrix B = random_complex(2, 2, rng);
  const Matrix C = random_complex(2, 2, rng);
  const Matrix D = random_complex(2, 2, rng);
  CHECK(max_abs(kron(A, B) * kron(C, D) - kron(A * C, B * D)) <= 1e-12);
}

TEST_CASE("assembly special cases") {
  const HermitianMatrix a = random_hermitian(3, 1);
  const HermitianMatrix b = random_hermitian(3, 2);

  // W = 0: k copies of the spectrum of A.
  const auto ev = hermitian_eigenvalues(assemble({HermitianMatrix::zero(4), a, b}));
  const auto ea = hermitian_eigenvalues(a);
  REQUIRE(ev.size() == 12);
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(std::abs(ev[i] - ea[i / 4]) < 1e-12);

  // A = 0, W = I: k copies of the spectrum of B.
  const auto ev2 = hermitian_eigenvalues(assemble({HermitianMatrix::identity(2), HermitianMatrix::zero(3), b}));
  const auto eb = hermitian_eigenvalues(b);
  for (std::size_t i = 0; i < ev2.size(); ++i) CHECK(std::abs(ev2[i] - eb[i / 2]) < 1e-12);

  const std::vector<double> av = {0.5}, bv = {2.0}, wv = {-3.0};
  const HermitianMatrix s = assemble(
      {HermitianMatrix::diagonal(wv), HermitianMatrix::diagonal(av), HermitianMatrix::diagonal(bv)});
  CHECK(s(0, 0).real() == doctest::Approx(0.5 - 6.0));

  CHECK_THROWS_AS(assemble({HermitianMatrix::zero(2), a, random_hermitian(4, 3)}), std::invalid_argument);
}

TEST_CASE("assembly is linear in A and B") {
  const HermitianMatrix w = random_hermitian(3, 10);
  const HermitianMatrix a1 = random_hermitian(2, 11), a2 = random_hermitian(2, 12);
  const HermitianMatrix b1 = random_hermitian(2, 13), b2 = random_hermitian(2, 14);
  const HermitianMatrix a12 = HermitianMatrix::from_upper(a1.matrix() + a2.matrix());
  const HermitianMatrix b12 = HermitianMatrix::from_upper(b1.matrix() + b2.matrix());
  const HermitianMatrix z = HermitianMatrix::zero(2);
  const Matrix lhs = assemble({w, a12, b1}).matrix();
  const Matrix rhs = assemble({w, a1, b1}).matrix() + assemble({w, a2, z}).matrix();
  CHECK(max_abs(lhs - rhs) <= 1e-14);
  const Matrix lhs_b = assemble({w, a1, b12}).matrix();
  const Matrix rhs_b = assemble({w, a1, b1}).matrix() + assemble({w, z, b2}).matrix();
  CHECK(max_abs(lhs_b - rhs_b) <= 1e-14);
}

TEST_CASE("phi expansion small cases") {
  StreamRng rng({2, 0});
  const Matrix a = random_complex(3, 3, rng);
  const Matrix b = random_complex(3, 3, rng);
  CHECK(max_abs(phi_expansion(a, b, 1, 1) - (a * b + b * a)) <= 1e-13);
  CHECK(max_abs(phi_expansion(a, b, 2, 0) - a * a) <= 1e-13);
  CHECK(max_abs(phi_expansion(a, b, 0, 0) - Matrix::Identity(3, 3)) == 0.0);
  CHECK_THROWS_AS(phi_expansion(a, b, 7, 6), std::invalid_argument);
}

TEST_CASE("binomial word expansion equals (A + tB)^m") {
  for (std::uint64_t inst = 0; inst < 5; ++inst) {
    const Matrix a = random_hermitian(3, 100 + inst).matrix();
    const Matrix b = random_hermitian(3, 200 + inst).matrix();
    for (double t : {0.0, 0.7, -1.3}) {
      for (int m = 0; m <= 5; ++m) {
        Matrix sum = Matrix::Zero(3, 3);
        for (int j = 0; j <= m; ++j) sum += std::pow(t, j) * phi_expansion(a, b, m - j, j);
        Matrix direct = Matrix::Identity(3, 3);
        const Matrix apb = a + t * b;
        for (int i = 0; i < m; ++i) direct = direct * apb;
        CHECK(max_abs(sum - direct) <= 1e-10 * std::max(1.0, max_abs(direct)));
      }
    }
  }
}

TEST_CASE("trace moment decomposition") {
  const BlockMatrixSpec spec{random_hermitian(2, 1), random_hermitian(3, 2), random_hermitian(3, 3)};
  const TraceMoments t0 = trace_moment_decomposition(spec, 0);
  CHECK(t0.lhs == doctest::Approx(1.0));
  CHECK(t0.rhs == doctest::Approx(1.0));

  const TraceMoments t1 = trace_moment_decomposition(spec, 1);
  const double expected = normalized_trace(spec.a.matrix()).real() +
                          normalized_trace(spec.w.matrix()).real() * normalized_trace(spec.b.matrix()).real();
  CHECK(std::abs(t1.lhs - expected) < 1e-12);
  CHECK(std::abs(t1.rhs - expected) < 1e-12);

  const TraceMoments t5 = trace_moment_decomposition(spec, 5);
  CHECK(std::abs(t5.lhs - t5.rhs) <= 1e-10 * std::max(1.0, std::abs(t5.lhs)));

  CHECK_THROWS_AS(trace_moment_decomposition(spec, 11), std::invalid_argument);
}

TEST_CASE("trace moments as an integral against the spectral measure of W") {
  // tr_{nk}(B^m) = sum over eigenvalues t of W of (1/k) tr_n((A + tB)^m).
  const BlockMatrixSpec spec{random_hermitian(3, 21), random_hermitian(2, 22), random_hermitian(2, 23)};
  const auto wev = hermitian_eigenvalues(spec.w);
  for (int m = 1; m <= 6; ++m) {
    double rhs = 0.0;
    for (double t : wev) {
      const Matrix apb = spec.a.matrix() + t * spec.b.matrix();
      Matrix p = Matrix::Identity(2, 2);
      for (int i = 0; i < m; ++i) p = p * apb;
      rhs += normalized_trace(p).real() / static_cast<double>(wev.size());
    }
    const double lhs = trace_moment_decomposition(spec, m).lhs;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("complete graph pattern") {
  const CompleteGraphPattern k2 = complete_graph_w(2);
  CHECK(k2.spectrum.atoms().size() == 2);
  CHECK(k2.spectrum.atoms()[0].location == -1.0);
  CHECK(k2.spectrum.atoms()[0].weight == 0.5);
  CHECK(k2.spectrum.atoms()[1].location == 1.0);

  const CompleteGraphPattern k1 = complete_graph_w(1);
  CHECK(k1.w(0, 0) == Complex(0.0));
  CHECK(k1.spectrum.atoms().size() == 1);
  CHECK(k1.spectrum.atoms()[0].location == 0.0);

  for (Eigen::Index k : {3, 5, 8}) {
    const CompleteGraphPattern p = complete_graph_w(k);
    const auto ev = hermitian_eigenvalues(p.w);
    for (Eigen::Index i = 0; i + 1 < k; ++i) CHECK(std::abs(ev[i] + 1.0) < 1e-10);
    CHECK(std::abs(ev.back() - static_cast<double>(k - 1)) < 1e-10);
    CHECK(p.spectrum.atoms()[0].weight == doctest::Approx(double(k - 1) / k));
  }
}
