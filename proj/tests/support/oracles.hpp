#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "sstep/dense.hpp"
#include "sstep/sparse.hpp"

namespace oracle {

using sstep::DenseMat;
using sstep::Vector;

/// Singular values (descending) from LAPACK dgesvd.
std::vector<double> singular_values(const DenseMat& a);
/// Eigenvalues of a general square matrix from LAPACK dgeev.
std::vector<std::complex<double>> eigenvalues(const DenseMat& a);
/// Orthonormal basis of range(a) from LAPACK dgeqrf + dorgqr.
DenseMat orthonormal_basis(const DenseMat& a);
/// min ‖rhs - H y‖ through the normal equations HᵀH y = Hᵀrhs (dposv).
Vector normal_equations_ls(const DenseMat& h, const Vector& rhs);
/// Largest principal angle between range(a) and range(b) (equal column counts).
double max_principal_angle(const DenseMat& a, const DenseMat& b);

/// The single column of gaussian_matrix(n, 1, seed).
Vector gaussian_vector(std::size_t n, std::uint64_t seed);

/// rows x cols matrix with singular values log-spaced between 1 and 1/cond.
DenseMat matrix_with_cond(std::size_t rows, std::size_t cols, double cond, std::uint64_t seed);

/// max_j ‖x_j - Q t_j‖ / ‖x_j‖
double columnwise_residual(const DenseMat& x, const DenseMat& q, const DenseMat& t);

/// Directory of vendored test fixtures (SSTEP_FIXTURES).
std::string fixture(const std::string& name);

}  // namespace oracle
