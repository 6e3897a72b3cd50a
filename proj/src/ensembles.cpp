#include "kronspec/ensembles.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace kronspec {

namespace {

std::mt19937_64 make_engine(RngSeed seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed.master),
                    static_cast<std::uint32_t>(seed.master >> 32),
                    static_cast<std::uint32_t>(seed.stream),
                    static_cast<std::uint32_t>(seed.stream >> 32)};
  return std::mt19937_64(seq);
}

void check_order(Eigen::Index n, const char* what) {
  if (n < 1) throw std::invalid_argument(std::string(what) + ": order must be >= 1");
}

}  // namespace

StreamRng::StreamRng(RngSeed seed) : engine_(make_engine(seed)) {}

double StreamRng::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double StreamRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

bool StreamRng::coin() { return (engine_() >> 63) != 0; }

std::string_view to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::wigner_rademacher: return "wigner-rademacher";
    case EnsembleKind::wigner_gaussian: return "wigner-gaussian";
    case EnsembleKind::gue: return "gue";
    case EnsembleKind::wishart: return "wishart";
  }
  return "unknown";
}

EnsembleKind ensemble_kind_from_string(std::string_view name) {
  if (name == "wigner-rademacher") return EnsembleKind::wigner_rademacher;
  if (name == "wigner-gaussian") return EnsembleKind::wigner_gaussian;
  if (name == "gue") return EnsembleKind::gue;
  if (name == "wishart") return EnsembleKind::wishart;
  throw std::invalid_argument("unknown ensemble '" + std::string(name) + "'");
}

void EnsembleSpec::validate() const {
  check_order(order, "EnsembleSpec");
  if (kind == EnsembleKind::wishart && shape < 1) {
    throw std::invalid_argument("EnsembleSpec: wishart requires shape p >= 1");
  }
}

HermitianMatrix sample_wigner(Eigen::Index n, EntryLaw law, RngSeed seed) {
  check_order(n, "sample_wigner");
  StreamRng rng(seed);
  Matrix m = Matrix::Zero(n, n);
  const double nd = static_cast<double>(n);
  if (law == EntryLaw::rademacher) {
    const double s = 1.0 / std::sqrt(nd);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) m(i, j) = rng.coin() ? s : -s;
    }
  } else {
    const double diag_sd = 1.0 / std::sqrt(nd);
    const double off_sd = 1.0 / std::sqrt(2.0 * nd);
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = diag_sd * rng.normal();
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double re = off_sd * rng.normal();
        const double im = off_sd * rng.normal();
        m(i, j) = Complex(re, im);
      }
    }
  }
  return HermitianMatrix::from_upper(std::move(m));
}

HermitianMatrix sample_wishart(Eigen::Index n, Eigen::Index p, RngSeed seed) {
  check_order(n, "sample_wishart");
  if (p < 1) throw std::invalid_argument("sample_wishart: shape p must be >= 1");
  StreamRng rng(seed);
  const double sd = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  Matrix x(p, n);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = sd * rng.normal();
      const double im = sd * rng.normal();
      x(i, j) = Complex(re, im);
    }
  }
  Matrix b = x.adjoint() * x;
  return HermitianMatrix::from_upper(std::move(b));
}

HermitianMatrix sample(const EnsembleSpec& spec, RngSeed seed) {
  spec.validate();
  switch (spec.kind) {
    case EnsembleKind::wigner_rademacher:
      return sample_wigner(spec.order, EntryLaw::rademacher, seed);
    case EnsembleKind::wigner_gaussian:
    case EnsembleKind::gue:
      return sample_wigner(spec.order, EntryLaw::gaussian, seed);
    case EnsembleKind::wishart:
      return sample_wishart(spec.order, spec.shape, seed);
  }
  throw std::invalid_argument("sample: unknown ensemble kind");
}

// ---------------------------------------------------------------------------
// HermitianMatrix

HermitianMatrix HermitianMatrix::from_upper(Matrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("HermitianMatrix: matrix is not square");
  const Eigen::Index n = m.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = Complex(m(i, i).real(), 0.0);
    for (Eigen::Index j = i + 1; j < n; ++j) m(j, i) = std::conj(m(i, j));
  }
  return HermitianMatrix(std::move(m));
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index n) { return HermitianMatrix(Matrix::Zero(n, n)); }

HermitianMatrix HermitianMatrix::identity(Eigen::Index n) {
  return HermitianMatrix(Matrix::Identity(n, n));
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> values) {
  const auto n = static_cast<Eigen::Index>(values.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = values[static_cast<std::size_t>(i)];
  return HermitianMatrix(std::move(m));
}

namespace {

constexpr char kMagic[8] = {'K', 'S', 'P', 'C', 'H', 'E', 'R', 'M'};

template <class T>
void put_le(std::ostream& out, T v) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, 8);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

template <class T>
T get_le(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw std::invalid_argument("read_matrix_binary: truncated input");
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  T v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_matrix_binary(std::ostream& out, const HermitianMatrix& m) {
  out.write(kMagic, 8);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.order()));
  for (Eigen::Index i = 0; i < m.order(); ++i) {
    for (Eigen::Index j = 0; j < m.order(); ++j) {
      put_le<double>(out, m(i, j).real());
      put_le<double>(out, m(i, j).imag());
    }
  }
}

HermitianMatrix read_matrix_binary(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw std::invalid_argument("read_matrix_binary: bad magic");
  }
  const auto n = static_cast<Eigen::Index>(get_le<std::uint64_t>(in));
  if (n > kMaxBinaryOrder) throw std::invalid_argument("read_matrix_binary: order too large");
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = get_le<double>(in);
      const double im = get_le<double>(in);
      m(i, j) = Complex(re, im);
    }
  }
  return HermitianMatrix::from_upper(std::move(m));
}

}  // namespace kronspec
