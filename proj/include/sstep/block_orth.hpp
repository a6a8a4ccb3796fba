#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sstep/dense.hpp"

namespace sstep {

enum class OrthoScheme { bcgsi_plus, bmgs };

std::string to_string(OrthoScheme s);
OrthoScheme ortho_scheme_from_string(const std::string& s);

/// Running factorization X = Q·T, grown one column block at a time.
struct QrState {
  DenseMat q;                            // n x m
  DenseMat t;                            // m x m upper triangular
  std::vector<std::size_t> block_starts;  // first column of each block

  std::size_t cols() const { return q.cols(); }
  /// Drops everything past column m.
  void truncate(std::size_t m);
};

/// Work done by orthogonalization calls, counted in block operations.
struct OrthCounters {
  std::size_t projections = 0;  // X ← X - Q(QᵀX) passes
  std::size_t intra_qrs = 0;    // Householder factorizations of a block

  OrthCounters& operator+=(const OrthCounters& o) {
    projections += o.projections;
    intra_qrs += o.intra_qrs;
    return *this;
  }
};

struct OrthStep {
  /// First new column (0-based within the block) whose diagonal entry of T
  /// fell to rank_threshold(X_new) or below: exact linear dependence.
  std::optional<std::size_t> breakdown_col;
  OrthCounters counters;
};

/// Seeds an empty state with a single column x = (x/‖x‖)·‖x‖.
void qr_seed(QrState& state, std::span<const double> x);

/// One step of block classical Gram-Schmidt with full reorthogonalization
/// (two projections, two intra-block Householder QRs).
OrthStep bcgsi_plus_step(QrState& state, const DenseMat& x_new);

/// One step of block modified Gram-Schmidt: sequential projection against each
/// earlier block, then an intra-block Householder QR.
OrthStep bmgs_step(QrState& state, const DenseMat& x_new);

OrthStep orth_step(OrthoScheme scheme, QrState& state, const DenseMat& x_new);

/// ‖QᵀQ - I‖_F
double loss_of_orthogonality(const DenseMat& q);

struct ProjectedQr {
  DenseMat q;  // Q factor of (I - VVᵀ)²X
  DenseMat s;  // its triangular factor
  std::optional<std::size_t> rank_deficient_col;
  OrthCounters counters;
};

/// Q-factor of X after two explicit passes X ← X - V(VᵀX). With V empty this
/// is a plain Householder QR of X.
ProjectedQr twice_projected_qr(const DenseMat& v, const DenseMat& x);

}  // namespace sstep
