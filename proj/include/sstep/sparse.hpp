#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sstep/dense.hpp"

namespace sstep {

/// Square sparse matrix in compressed sparse row form. Immutable once built;
/// the constructor checks the structural invariants.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::size_t> col_idx,
            std::vector<double> values);

  static CsrMatrix from_dense(const DenseMat& a);
  static CsrMatrix identity(std::size_t n);

  std::size_t n() const { return n_; }
  std::size_t nnz() const { return values_.size(); }
  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  DenseMat to_dense() const;
  Vector diagonal() const;
  double frobenius_norm() const;
  bool is_symmetric() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

/// y = A·x, left-to-right accumulation per row.
Vector spmv(const CsrMatrix& a, std::span<const double> x);

/// M_L or M_R of the preconditioned system. Jacobi stores the diagonal.
class Preconditioner {
 public:
  enum class Kind { identity, jacobi };

  Preconditioner() = default;
  static Preconditioner identity() { return {}; }
  static Preconditioner jacobi(Vector diag);
  static Preconditioner jacobi_from(const CsrMatrix& a) { return jacobi(a.diagonal()); }

  Kind kind() const { return kind_; }
  bool is_identity() const { return kind_ == Kind::identity; }
  std::span<const double> diag() const { return diag_; }

 private:
  Kind kind_ = Kind::identity;
  Vector diag_;
};

Vector apply_preconditioner_inverse(const Preconditioner& p, std::span<const double> x);

// ---------------------------------------------------------------------------
// Matrix Market

struct MatrixMarketError : std::runtime_error {
  MatrixMarketError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_number(line) {}
  std::size_t line_number;
};

struct MatrixMarketInfo {
  bool symmetric_storage = false;
};

/// Parses `%%MatrixMarket matrix coordinate real {general|symmetric}`.
/// Symmetric storage is expanded, duplicates summed, rows sorted by column.
CsrMatrix parse_matrix_market(std::istream& in, MatrixMarketInfo* info = nullptr);
CsrMatrix read_matrix_market_file(const std::string& path, MatrixMarketInfo* info = nullptr);

/// Writes coordinate real general, 1-based, values in shortest round-trip form.
void write_matrix_market(std::ostream& out, const CsrMatrix& a);

// ---------------------------------------------------------------------------
// Synthetic problems

struct RandSvdSpec {
  std::size_t n = 2;
  double kappa = 1.0;
  int mode = 1;
  std::uint64_t seed = 0;
};

struct RandSvdProblem {
  DenseMat a;
  DenseMat v;                       // right singular vectors, columns ordered by sigma
  std::vector<double> sigma;        // descending
};

/// A = U·diag(σ)·Vᵀ with U, V Haar-distributed (Q factors of Gaussian matrices
/// drawn from std::mt19937_64 seeded with spec.seed).
///   mode 1: σ_1 = 1, the rest 1/κ
///   mode 2: σ_i = 1 for i < n, σ_n = 1/κ
///   mode 3: σ_i = κ^{-(i-1)/(n-1)}
///   mode 4: σ_i = 1 - (1 - 1/κ)(i-1)/(n-1)
///   mode 5: log-uniform in [1/κ, 1]
RandSvdProblem gen_randsvd(const RandSvdSpec& spec);

/// Column k (1-based) of V.
Vector right_singular_vector(const DenseMat& v, std::size_t k);

/// Seeded standard-normal fill, shared by generators and tests.
DenseMat gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

}  // namespace sstep
