#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sstep/dense.hpp"
#include "sstep/operator.hpp"

namespace sstep {

using Complex = std::complex<double>;

enum class BasisFamily { monomial, newton, chebyshev };

std::string to_string(BasisFamily f);
BasisFamily basis_family_from_string(const std::string& s);

struct MonomialBasis {};

/// Leja-ordered shifts; complex shifts come in adjacent conjugate pairs with the
/// positive imaginary part first. Consumed cyclically.
struct NewtonBasis {
  std::vector<Complex> shifts;
};

/// Scaled Chebyshev recurrence on the ellipse with the given center and focal
/// distance (focal > 0).
struct ChebyshevBasis {
  double center = 0.0;
  double focal = 1.0;
};

using BasisKind = std::variant<MonomialBasis, NewtonBasis, ChebyshevBasis>;

struct RitzSet {
  std::vector<Complex> values;
};

/// Largest supported Hessenberg size for the Ritz eigensolver.
inline constexpr std::size_t max_ritz_size = 64;

/// Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.
/// Complex eigenvalues are returned as exact conjugate pairs.
std::vector<Complex> hessenberg_eigenvalues(DenseMat h);

/// s steps of Arnoldi on `op` from r, then the eigenvalues of the s x s
/// Hessenberg block. A breakdown before s steps pads with the last value.
RitzSet compute_ritz_values(const LinearMap& op, std::span<const double> r, std::size_t s);

/// Greedy Leja ordering with conjugates kept adjacent.
std::vector<Complex> leja_order(std::span<const Complex> values);

struct ChebyshevFit {
  double center = 0.0;
  double focal = 0.0;
  bool degenerate = false;  // focal == 0; the caller falls back to monomial
};

ChebyshevFit chebyshev_params(const RitzSet& ritz);

/// Builds the BasisKind for `family` from warm-up Ritz values.
BasisKind make_basis(BasisFamily family, const RitzSet& ritz);

/// Columns p_0(op)v, ..., p_{s-1}(op)v. The first column is v itself; later
/// columns are divided by their 2-norm when `normalize` is set. If the
/// recurrence produces a zero column, the block is returned truncated.
DenseMat build_krylov_block(const LinearMap& op, std::span<const double> v, std::size_t s,
                            const BasisKind& kind, bool normalize = true);

}  // namespace sstep
