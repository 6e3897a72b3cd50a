#pragma once

#include <complex>
#include <span>
#include <vector>

namespace kronspec {

/// All complex roots of sum_i coeffs[i] x^(d-i) (highest degree first), from
/// the eigenvalues of the companion matrix of the monic polynomial, then
/// Newton-polished in extended precision. The leading coefficient must be
/// nonzero.
std::vector<std::complex<double>> polynomial_roots(std::span<const std::complex<double>> coeffs);
std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs);

std::complex<double> polynomial_value(std::span<const std::complex<double>> coeffs,
                                      std::complex<double> x);

}  // namespace kronspec
