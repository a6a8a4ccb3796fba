#pragma once

#include <functional>
#include <span>

#include "sstep/dense.hpp"
#include "sstep/sparse.hpp"

namespace sstep {

/// A linear map x ↦ y on R^n.
using LinearMap = std::function<Vector(std::span<const double>)>;

/// Which operator drives the polynomial recurrence of the Krylov block.
enum class BasisOperator {
  plain,           // p_k(A)
  preconditioned,  // p_k(M_L⁻¹ A M_R⁻¹)
};

/// A together with its left and right preconditioners. Holds a reference to
/// the matrix, which must outlive the system.
struct PreconditionedSystem {
  const CsrMatrix* a = nullptr;
  Preconditioner left;
  Preconditioner right;

  std::size_t n() const { return a->n(); }
  Vector apply_a(std::span<const double> x) const { return spmv(*a, x); }
  /// M_L⁻¹ A M_R⁻¹ x
  Vector apply_preconditioned(std::span<const double> x) const {
    return apply_preconditioner_inverse(left, spmv(*a, apply_preconditioner_inverse(right, x)));
  }
  LinearMap basis_map(BasisOperator which) const {
    if (which == BasisOperator::plain || (left.is_identity() && right.is_identity()))
      return [this](std::span<const double> x) { return apply_a(x); };
    return [this](std::span<const double> x) { return apply_preconditioned(x); };
  }
};

}  // namespace sstep
