#include "sstep/arnoldi.hpp"

#include <stdexcept>

namespace sstep {

std::string to_string(ArnoldiVariant v) { return v == ArnoldiVariant::classical ? "classical" : "modified"; }

ArnoldiVariant arnoldi_variant_from_string(const std::string& s) {
  if (s == "classical") return ArnoldiVariant::classical;
  if (s == "modified") return ArnoldiVariant::modified;
  throw std::invalid_argument("unknown Arnoldi variant '" + s + "'");
}

ArnoldiState start_arnoldi(std::span<const double> r, ArnoldiVariant variant) {
  ArnoldiState st;
  st.variant = variant;
  st.b = DenseMat(r.size(), 0);
  st.z = DenseMat(r.size(), 0);
  st.w = DenseMat(r.size(), 0);
  qr_seed(st.vr, r);
  return st;
}

namespace {

DenseMat apply_columns(const DenseMat& x, const auto& f) {
  DenseMat out(x.rows(), 0);
  for (std::size_t j = 0; j < x.cols(); ++j) out.append_col(f(x.col(j)));
  return out;
}

/// Z ← M_R⁻¹B, W ← M_L⁻¹AZ and the [r | W] factorization update, shared
/// by both variants.
StepOutcome finish_step(ArnoldiState& state, const ArnoldiSetup& setup, DenseMat b_block) {
  const PreconditionedSystem& sys = *setup.system;
  DenseMat z_block = apply_columns(b_block, [&](std::span<const double> c) {
    return apply_preconditioner_inverse(sys.right, c);
  });
  DenseMat w_block = apply_columns(z_block, [&](std::span<const double> c) {
    return apply_preconditioner_inverse(sys.left, sys.apply_a(c));
  });

  const std::size_t p_old = state.p();
  OrthStep orth = orth_step(setup.scheme, state.vr, w_block);
  state.counters += orth.counters;
  state.block_starts.push_back(p_old);
  state.b.append_cols(b_block);
  state.z.append_cols(z_block);
  state.w.append_cols(w_block);

  StepOutcome out;
  out.new_cols = w_block.cols();
  if (orth.breakdown_col) {
    out.breakdown_col = p_old + *orth.breakdown_col;
    happy_breakdown_truncate(state, *out.breakdown_col);
    out.new_cols = state.p() - p_old;
  }
  return out;
}

DenseMat krylov_block(const ArnoldiState& state, const ArnoldiSetup& setup, std::size_t width) {
  if (setup.system == nullptr) throw std::invalid_argument("arnoldi step: no system");
  if (width == 0) throw std::invalid_argument("arnoldi step: zero block width");
  const DenseMat& v = state.v();
  return build_krylov_block(setup.system->basis_map(setup.basis_operator), v.col(v.cols() - 1), width,
                            setup.basis, setup.normalize_columns);
}

}  // namespace

StepOutcome classical_step(ArnoldiState& state, const ArnoldiSetup& setup, std::size_t width) {
  return finish_step(state, setup, krylov_block(state, setup, width));
}

StepOutcome modified_step(ArnoldiState& state, const ArnoldiSetup& setup, std::size_t width) {
  DenseMat k = krylov_block(state, setup, width);
  if (width == 1) {
    // K is the newest column of V itself.
    state.last_projection_s = DenseMat::identity(1);
    return finish_step(state, setup, std::move(k));
  }
  const DenseMat& v = state.v();
  const DenseMat prior = v.cols_range(0, v.cols() - 1);
  ProjectedQr pq = twice_projected_qr(prior, k);
  state.counters += pq.counters;
  state.last_projection_s = std::move(pq.s);
  StepOutcome out = finish_step(state, setup, std::move(pq.q));
  out.projected_block_rank_deficient = pq.rank_deficient_col.has_value();
  return out;
}

StepOutcome arnoldi_step(ArnoldiState& state, const ArnoldiSetup& setup, std::size_t width) {
  return state.variant == ArnoldiVariant::classical ? classical_step(state, setup, width)
                                                    : modified_step(state, setup, width);
}

void happy_breakdown_truncate(ArnoldiState& state, std::size_t col) {
  if (col >= state.p()) throw std::out_of_range("happy_breakdown_truncate: column out of range");
  const std::size_t keep = col + 1;
  state.b.truncate_cols(keep);
  state.z.truncate_cols(keep);
  state.w.truncate_cols(keep);
  state.vr.truncate(keep + 1);
  while (!state.block_starts.empty() && state.block_starts.back() >= keep) state.block_starts.pop_back();
  state.converged_by_breakdown = true;
}

}  // namespace sstep
