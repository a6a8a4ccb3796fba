#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sstep {

/// Unit roundoff of IEEE double (2^-53).
inline constexpr double unit_roundoff = std::numeric_limits<double>::epsilon() / 2.0;

using Vector = std::vector<double>;

/// Column-major dense matrix. Every working block of the solver (K, B, Z, W, V)
/// lives in one of these; columns are contiguous so block projections and
/// QR sweeps touch memory linearly.
class DenseMat {
 public:
  DenseMat() = default;
  DenseMat(std::size_t rows, std::size_t cols);
  DenseMat(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMat identity(std::size_t n);
  /// Builds from row-major nested lists; handy in tests.
  static DenseMat from_rows(const std::vector<std::vector<double>>& rows);
  static DenseMat diagonal(std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  /// Copy of columns [first, first + count).
  DenseMat cols_range(std::size_t first, std::size_t count) const;
  /// Copy of the leading block rows [0, nr) x cols [0, nc).
  DenseMat leading(std::size_t nr, std::size_t nc) const;
  /// Copy of rows [r0, r0+nr) x cols [c0, c0+nc).
  DenseMat block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const DenseMat& b);

  void append_col(std::span<const double> v);
  void append_cols(const DenseMat& m);
  /// Drops trailing columns down to ncols.
  void truncate_cols(std::size_t ncols);

  DenseMat transpose() const;
  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Basic BLAS-like helpers. All accumulate in index order so results are
// bit-reproducible for a fixed input.
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double frobenius_norm(const DenseMat& m);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);

DenseMat matmul(const DenseMat& a, const DenseMat& b);
/// aᵀ·b without forming the transpose.
DenseMat matmul_tn(const DenseMat& a, const DenseMat& b);
Vector matvec(const DenseMat& a, std::span<const double> x);
DenseMat operator-(const DenseMat& a, const DenseMat& b);
DenseMat operator+(const DenseMat& a, const DenseMat& b);
/// c -= a·b in place.
void sub_matmul(DenseMat& c, const DenseMat& a, const DenseMat& b);

struct QrResult {
  DenseMat q;  // rows x cols, orthonormal columns
  DenseMat r;  // cols x cols, upper triangular, nonnegative diagonal
  /// First column whose Householder pivot fell to rank_threshold(M) or below.
  std::optional<std::size_t> rank_deficient_col;
};

/// Thin Householder QR. Requires rows >= cols.
/// u·max(rows, cols)·‖M‖_F: pivots at or below this mark numerical dependence.
double rank_threshold(const DenseMat& m);

QrResult householder_qr(const DenseMat& m);

struct GivensRotation {
  double c = 1.0;
  double s = 0.0;
  std::size_t row = 0;  // rotation acts on rows (row, row + 1)
};

/// Rotation with [c s; -s c]·(a, b)ᵀ = (ρ, 0)ᵀ and ρ >= 0.
GivensRotation compute_givens(double a, double b, std::size_t row = 0);
/// Applies g to entries (x[g.row], x[g.row + 1]).
void apply_givens(const GivensRotation& g, std::span<double> x);

struct SvdValues {
  std::vector<double> values;  // descending
  bool converged = true;
  int sweeps = 0;
};

/// Singular values by one-sided (Hestenes) Jacobi on the triangular factor of
/// a Householder QR. Requires rows >= cols.
SvdValues jacobi_svd_values(const DenseMat& m);

struct SvdNotConverged : std::runtime_error {
  explicit SvdNotConverged(std::vector<double> best)
      : std::runtime_error("one-sided Jacobi SVD did not converge"), values(std::move(best)) {}
  std::vector<double> values;
};

/// 2-norm condition number σ_max/σ_min; +inf when σ_min == 0.
/// Throws SvdNotConverged.
double cond2(const DenseMat& m);

struct ColumnScaling {
  std::vector<double> d;  // strictly positive column norms
};

struct ZeroColumnError : std::invalid_argument {
  explicit ZeroColumnError(std::size_t col)
      : std::invalid_argument("zero column at index " + std::to_string(col)), index(col) {}
  std::size_t index;
};

struct NormalizedColumns {
  DenseMat m;
  ColumnScaling scaling;
};

NormalizedColumns normalize_columns(const DenseMat& m);

/// Solves the leading k x k upper-triangular system R·y = g by back substitution.
Vector back_substitute(const DenseMat& r, std::span<const double> g, std::size_t k);

}  // namespace sstep
