#include "sstep/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "sstep/numfmt.hpp"

namespace sstep {

CsrMatrix::CsrMatrix(std::size_t n, std::vector<std::size_t> row_ptr,
                     std::vector<std::size_t> col_idx, std::vector<double> values)
    : n_(n), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values)) {
  if (row_ptr_.size() != n_ + 1 || row_ptr_.front() != 0 || row_ptr_.back() != values_.size() ||
      col_idx_.size() != values_.size()) {
    throw std::invalid_argument("CsrMatrix: inconsistent row_ptr/col_idx/values");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1]) throw std::invalid_argument("CsrMatrix: row_ptr decreasing");
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] >= n_) throw std::invalid_argument("CsrMatrix: column index out of range");
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])
        throw std::invalid_argument("CsrMatrix: columns not strictly increasing");
      if (!std::isfinite(values_[k])) throw std::invalid_argument("CsrMatrix: non-finite value");
    }
  }
}

CsrMatrix CsrMatrix::from_dense(const DenseMat& a) {
  if (a.rows() != a.cols()) throw DimensionError("CsrMatrix::from_dense: not square");
  const std::size_t n = a.rows();
  std::vector<std::size_t> rp(n + 1, 0);
  std::vector<std::size_t> ci;
  std::vector<double> vals;
  ci.reserve(n * n);
  vals.reserve(n * n);
  // Dense pattern is kept in full, explicit zeros included.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      ci.push_back(j);
      vals.push_back(a(i, j));
    }
    rp[i + 1] = ci.size();
  }
  return {n, std::move(rp), std::move(ci), std::move(vals)};
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  std::vector<std::size_t> rp(n + 1);
  std::vector<std::size_t> ci(n);
  for (std::size_t i = 0; i <= n; ++i) rp[i] = i;
  for (std::size_t i = 0; i < n; ++i) ci[i] = i;
  return {n, std::move(rp), std::move(ci), std::vector<double>(n, 1.0)};
}

DenseMat CsrMatrix::to_dense() const {
  DenseMat d(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, col_idx_[k]) += values_[k];
  return d;
}

Vector CsrMatrix::diagonal() const {
  Vector d(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      if (col_idx_[k] == i) d[i] = values_[k];
  return d;
}

double CsrMatrix::frobenius_norm() const { return norm2(values_); }

bool CsrMatrix::is_symmetric() const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t j = col_idx_[k];
      auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[j]);
      auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[j + 1]);
      auto it = std::lower_bound(first, last, i);
      if (it == last || *it != i) {
        if (values_[k] != 0.0) return false;
        continue;
      }
      if (values_[static_cast<std::size_t>(it - col_idx_.begin())] != values_[k]) return false;
    }
  }
  return true;
}

Vector spmv(const CsrMatrix& a, std::span<const double> x) {
  if (x.size() != a.n()) throw DimensionError("spmv: length mismatch");
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  Vector y(a.n(), 0.0);
  for (std::size_t i = 0; i < a.n(); ++i) {
    double acc = 0.0;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) acc += v[k] * x[ci[k]];
    y[i] = acc;
  }
  return y;
}

Preconditioner Preconditioner::jacobi(Vector diag) {
  for (std::size_t i = 0; i < diag.size(); ++i) {
    if (diag[i] == 0.0)
      throw std::invalid_argument("jacobi preconditioner: zero diagonal at row " + std::to_string(i));
  }
  Preconditioner p;
  p.kind_ = Kind::jacobi;
  p.diag_ = std::move(diag);
  return p;
}

Vector apply_preconditioner_inverse(const Preconditioner& p, std::span<const double> x) {
  Vector y(x.begin(), x.end());
  if (p.is_identity()) return y;
  const auto d = p.diag();
  if (d.size() != x.size()) throw DimensionError("preconditioner: length mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] /= d[i];
  return y;
}

// ---------------------------------------------------------------------------

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool is_blank_or_comment(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '%';
}

}  // namespace

CsrMatrix parse_matrix_market(std::istream& in, MatrixMarketInfo* info) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw MatrixMarketError(1, "empty input");
  ++lineno;

  std::istringstream hs(line);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw MatrixMarketError(lineno, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw MatrixMarketError(lineno, "object must be 'matrix'");
  if (format != "coordinate") throw MatrixMarketError(lineno, "only coordinate format is supported");
  if (field != "real" && field != "double")
    throw MatrixMarketError(lineno, "unsupported field '" + field + "' (need real)");
  if (symmetry != "general" && symmetry != "symmetric")
    throw MatrixMarketError(lineno, "unsupported symmetry '" + symmetry + "'");
  const bool symmetric = symmetry == "symmetric";

  std::size_t nrows = 0, ncols = 0, nnz = 0;
  bool have_size = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    std::istringstream ss(line);
    if (!(ss >> nrows >> ncols >> nnz)) throw MatrixMarketError(lineno, "malformed size line");
    have_size = true;
    break;
  }
  if (!have_size) throw MatrixMarketError(lineno, "missing size line");
  if (nrows != ncols) throw MatrixMarketError(lineno, "matrix is not square");
  const std::size_t n = nrows;

  // Ordered per-row accumulation: sorts columns and sums duplicates.
  std::vector<std::map<std::size_t, double>> rows(n);
  std::size_t seen = 0;
  while (seen < nnz && std::getline(in, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    std::istringstream ss(line);
    long long i = 0, j = 0;
    std::string vtok;
    if (!(ss >> i >> j >> vtok)) throw MatrixMarketError(lineno, "malformed entry");
    double v = 0.0;
    try {
      v = parse_double(vtok);
    } catch (const std::invalid_argument&) {
      throw MatrixMarketError(lineno, "malformed value '" + vtok + "'");
    }
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(j) > n)
      throw MatrixMarketError(lineno, "index out of declared bounds");
    if (!std::isfinite(v)) throw MatrixMarketError(lineno, "non-finite value");
    const auto r = static_cast<std::size_t>(i - 1);
    const auto c = static_cast<std::size_t>(j - 1);
    rows[r][c] += v;
    if (symmetric && r != c) rows[c][r] += v;
    ++seen;
  }
  if (seen < nnz) throw MatrixMarketError(lineno, "fewer entries than declared");

  std::vector<std::size_t> rp(n + 1, 0);
  std::vector<std::size_t> ci;
  std::vector<double> vals;
  for (std::size_t r = 0; r < n; ++r) {
    for (const auto& [c, v] : rows[r]) {
      ci.push_back(c);
      vals.push_back(v);
    }
    rp[r + 1] = ci.size();
  }
  if (info) info->symmetric_storage = symmetric;
  return {n, std::move(rp), std::move(ci), std::move(vals)};
}

CsrMatrix read_matrix_market_file(const std::string& path, MatrixMarketInfo* info) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open matrix file '" + path + "'");
  return parse_matrix_market(f, info);
}

void write_matrix_market(std::ostream& out, const CsrMatrix& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.n() << ' ' << a.n() << ' ' << a.nnz() << '\n';
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
      out << (i + 1) << ' ' << (ci[k] + 1) << ' ' << format_shortest(v[k]) << '\n';
}

// ---------------------------------------------------------------------------

DenseMat gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  DenseMat m(rows, cols);
  for (double& v : m.data()) v = dist(rng);
  return m;
}

RandSvdProblem gen_randsvd(const RandSvdSpec& spec) {
  if (spec.n < 2) throw std::invalid_argument("randsvd: n must be >= 2");
  if (!(spec.kappa >= 1.0)) throw std::invalid_argument("randsvd: kappa must be >= 1");
  if (spec.mode < 1 || spec.mode > 5) throw std::invalid_argument("randsvd: mode must be 1..5");

  const std::size_t n = spec.n;
  const double k = spec.kappa;
  const double nm1 = static_cast<double>(n - 1);
  std::vector<double> sigma(n);
  std::mt19937_64 rng(spec.seed);

  switch (spec.mode) {
    case 1:
      for (std::size_t i = 0; i < n; ++i) sigma[i] = i == 0 ? 1.0 : 1.0 / k;
      break;
    case 2:
      for (std::size_t i = 0; i < n; ++i) sigma[i] = i + 1 < n ? 1.0 : 1.0 / k;
      break;
    case 3:
      for (std::size_t i = 0; i < n; ++i) sigma[i] = std::pow(k, -static_cast<double>(i) / nm1);
      break;
    case 4:
      for (std::size_t i = 0; i < n; ++i) sigma[i] = 1.0 - (1.0 - 1.0 / k) * static_cast<double>(i) / nm1;
      break;
    case 5: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (double& s : sigma) s = std::exp(-unif(rng) * std::log(k));
      std::sort(sigma.begin(), sigma.end(), std::greater<double>());
      break;
    }
    default:
      break;
  }

  const std::uint64_t useed = rng();
  const std::uint64_t vseed = rng();
  DenseMat u = householder_qr(gaussian_matrix(n, n, useed)).q;
  DenseMat v = householder_qr(gaussian_matrix(n, n, vseed)).q;

  DenseMat us = u;
  for (std::size_t j = 0; j < n; ++j) scale(sigma[j], us.col(j));
  DenseMat a(n, n);
  // A = (U Σ) Vᵀ
  for (std::size_t j = 0; j < n; ++j) {
    auto aj = a.col(j);
    for (std::size_t kk = 0; kk < n; ++kk) axpy(v(j, kk), us.col(kk), aj);
  }
  return {std::move(a), std::move(v), std::move(sigma)};
}

Vector right_singular_vector(const DenseMat& v, std::size_t k) {
  if (k < 1 || k > v.cols())
    throw std::out_of_range("right_singular_vector: index " + std::to_string(k) + " out of range");
  auto c = v.col(k - 1);
  return {c.begin(), c.end()};
}

}  // namespace sstep
