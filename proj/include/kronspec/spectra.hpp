#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "kronspec/hermitian.hpp"

namespace kronspec {

inline constexpr Eigen::Index kMaxEigensolveOrder = 8192;

// Empirical spectral measure (1/n) sum_i delta_{lambda_i}, eigenvalues kept
// in ascending order.
class SpectralMeasure {
 public:
  SpectralMeasure() = default;
  explicit SpectralMeasure(std::vector<double> eigenvalues);

  // Concatenates in the given order, then sorts.
  static SpectralMeasure pooled(std::span<const SpectralMeasure> parts);

  std::span<const double> eigenvalues() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

  // (1/n) sum lambda_i^k, summed in ascending order.
  double moment(int k) const;

 private:
  std::vector<double> values_;
};

/// All eigenvalues of a Hermitian matrix, ascending. Throws NumericalError on
/// solver failure and std::invalid_argument above kMaxEigensolveOrder.
std::vector<double> hermitian_eigenvalues(const HermitianMatrix& m);

SpectralMeasure spectral_measure(const HermitianMatrix& m);

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
};

Histogram histogram(const SpectralMeasure& mu, int bins, double lo, double hi);
// Range taken from the smallest and largest eigenvalue.
Histogram histogram(const SpectralMeasure& mu, int bins);

void write_eigenvalues_csv(std::ostream& out, const SpectralMeasure& mu);
SpectralMeasure read_eigenvalues_csv(std::istream& in);
void write_histogram_csv(std::ostream& out, const Histogram& h);

}  // namespace kronspec
