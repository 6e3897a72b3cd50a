#include "kronspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "kronspec/csv.hpp"
#include "kronspec/errors.hpp"

namespace kronspec {

SpectralMeasure::SpectralMeasure(std::vector<double> eigenvalues) : values_(std::move(eigenvalues)) {
  std::sort(values_.begin(), values_.end());
}

SpectralMeasure SpectralMeasure::pooled(std::span<const SpectralMeasure> parts) {
  std::vector<double> all;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  all.reserve(total);
  for (const auto& p : parts) all.insert(all.end(), p.values_.begin(), p.values_.end());
  return SpectralMeasure(std::move(all));
}

double SpectralMeasure::moment(int k) const {
  if (k < 0) throw std::invalid_argument("SpectralMeasure::moment: negative order");
  if (values_.empty()) throw std::invalid_argument("SpectralMeasure::moment: empty measure");
  double acc = 0.0;
  for (double v : values_) acc += std::pow(v, k);
  return acc / static_cast<double>(values_.size());
}

std::vector<double> hermitian_eigenvalues(const HermitianMatrix& m) {
  if (m.order() > kMaxEigensolveOrder) {
    throw std::invalid_argument("hermitian_eigenvalues: order " + std::to_string(m.order()) +
                                " exceeds guard " + std::to_string(kMaxEigensolveOrder));
  }
  if (m.order() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("hermitian_eigenvalues: eigensolver did not converge (order " +
                         std::to_string(m.order()) + ")");
  }
  const Eigen::VectorXd& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

SpectralMeasure spectral_measure(const HermitianMatrix& m) {
  return SpectralMeasure(hermitian_eigenvalues(m));
}

Histogram histogram(const SpectralMeasure& mu, int bins, double lo, double hi) {
  if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
  if (!(hi > lo)) {
    // Degenerate range (all eigenvalues equal): widen symmetrically.
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  h.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * i / bins;
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / bins;
  for (double v : mu.eigenvalues()) {
    if (v < lo || v > hi) continue;
    int b = static_cast<int>((v - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    ++h.counts[b];
  }
  return h;
}

Histogram histogram(const SpectralMeasure& mu, int bins) {
  if (mu.empty()) throw std::invalid_argument("histogram: empty measure");
  return histogram(mu, bins, mu.min(), mu.max());
}

void write_eigenvalues_csv(std::ostream& out, const SpectralMeasure& mu) {
  out << "index,eigenvalue\n";
  std::size_t i = 0;
  for (double v : mu.eigenvalues()) out << i++ << ',' << format_double(v) << '\n';
}

SpectralMeasure read_eigenvalues_csv(std::istream& in) {
  CsvTable t = read_columns_csv(in);
  if (t.header.size() != 2 || t.header[0] != "index" || t.header[1] != "eigenvalue") {
    throw std::invalid_argument("eigenvalue csv: expected header 'index,eigenvalue'");
  }
  return SpectralMeasure(std::move(t.columns[1]));
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_left,bin_right,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << format_double(h.edges[i]) << ',' << format_double(h.edges[i + 1]) << ',' << h.counts[i]
        << '\n';
  }
}

}  // namespace kronspec
