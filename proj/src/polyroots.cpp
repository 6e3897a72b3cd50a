#include "kronspec/polyroots.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "kronspec/errors.hpp"

namespace kronspec {

namespace {

using LComplex = std::complex<long double>;

void horner(std::span<const std::complex<double>> c, LComplex x, LComplex& p, LComplex& dp) {
  p = LComplex(c[0].real(), c[0].imag());
  dp = 0.0L;
  for (std::size_t i = 1; i < c.size(); ++i) {
    dp = dp * x + p;
    p = p * x + LComplex(c[i].real(), c[i].imag());
  }
}

std::complex<double> polish(std::span<const std::complex<double>> c, std::complex<double> root) {
  LComplex x(root.real(), root.imag());
  LComplex p;
  LComplex dp;
  horner(c, x, p, dp);
  for (int it = 0; it < 12; ++it) {
    if (std::abs(dp) == 0.0L) break;
    const LComplex next = x - p / dp;
    LComplex pn;
    LComplex dpn;
    horner(c, next, pn, dpn);
    if (!(std::abs(pn) < std::abs(p))) break;
    x = next;
    p = pn;
    dp = dpn;
  }
  return {static_cast<double>(x.real()), static_cast<double>(x.imag())};
}

}  // namespace

std::complex<double> polynomial_value(std::span<const std::complex<double>> coeffs,
                                      std::complex<double> x) {
  std::complex<double> p = 0.0;
  for (const auto& c : coeffs) p = p * x + c;
  return p;
}

std::vector<std::complex<double>> polynomial_roots(std::span<const std::complex<double>> coeffs) {
  if (coeffs.size() < 2) throw std::invalid_argument("polynomial_roots: degree must be >= 1");
  if (coeffs[0] == std::complex<double>(0.0)) {
    throw std::invalid_argument("polynomial_roots: leading coefficient is zero");
  }
  const auto d = static_cast<Eigen::Index>(coeffs.size() - 1);
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) companion(0, j) = -coeffs[j + 1] / coeffs[0];
  for (Eigen::Index i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("polynomial_roots: companion eigensolve did not converge");
  }
  std::vector<std::complex<double>> roots;
  roots.reserve(d);
  for (Eigen::Index i = 0; i < d; ++i) roots.push_back(polish(coeffs, solver.eigenvalues()(i)));
  return roots;
}

std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs) {
  std::vector<std::complex<double>> c(coeffs.begin(), coeffs.end());
  return polynomial_roots(c);
}

}  // namespace kronspec
