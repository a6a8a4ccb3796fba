#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sstep/block_orth.hpp"
#include "sstep/dense.hpp"
#include "sstep/operator.hpp"
#include "sstep/poly_basis.hpp"

namespace sstep {

enum class ArnoldiVariant { classical, modified };

std::string to_string(ArnoldiVariant v);
ArnoldiVariant arnoldi_variant_from_string(const std::string& s);

/// Everything the block Arnoldi process carries between steps:
/// B (basis), Z = M_R⁻¹B, W = M_L⁻¹AZ and the running factorization
/// [r | W] = V·R kept in `vr` (V = vr.q, R = vr.t).
struct ArnoldiState {
  DenseMat b;
  DenseMat z;
  DenseMat w;
  QrState vr;
  std::vector<std::size_t> block_starts;  // first W column of each block
  ArnoldiVariant variant = ArnoldiVariant::classical;
  bool converged_by_breakdown = false;
  OrthCounters counters;
  /// Triangular factor of the extra QR in the modified process; kept for logs only.
  DenseMat last_projection_s;

  std::size_t p() const { return w.cols(); }
  const DenseMat& v() const { return vr.q; }
  const DenseMat& r() const { return vr.t; }
};

/// State after Algorithm-1 setup: V₁ = r/β, R₁₁ = β, no basis columns yet.
ArnoldiState start_arnoldi(std::span<const double> r, ArnoldiVariant variant);

/// Static pieces of one Arnoldi step.
struct ArnoldiSetup {
  const PreconditionedSystem* system = nullptr;
  BasisKind basis = MonomialBasis{};
  OrthoScheme scheme = OrthoScheme::bcgsi_plus;
  BasisOperator basis_operator = BasisOperator::plain;
  bool normalize_columns = true;
};

struct StepOutcome {
  std::size_t new_cols = 0;
  /// W column (0-based, global) at which [r | W] lost rank; state already truncated.
  std::optional<std::size_t> breakdown_col;
  /// Modified process only: the twice-projected Krylov block was numerically rank deficient.
  bool projected_block_rank_deficient = false;
};

/// Classical step: B-block = K built from the newest Arnoldi vector.
StepOutcome classical_step(ArnoldiState& state, const ArnoldiSetup& setup, std::size_t width);

/// Modified step: B-block = Q factor of (I - V Vᵀ)² K, projecting against all
/// Arnoldi vectors except the newest one.
StepOutcome modified_step(ArnoldiState& state, const ArnoldiSetup& setup, std::size_t width);

StepOutcome arnoldi_step(ArnoldiState& state, const ArnoldiSetup& setup, std::size_t width);

/// Keeps W columns [0, col] (and the matching B, Z, V, R) and flags the state
/// as converged by breakdown.
void happy_breakdown_truncate(ArnoldiState& state, std::size_t col);

}  // namespace sstep
