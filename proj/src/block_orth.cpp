#include "sstep/block_orth.hpp"

#include <cmath>
#include <stdexcept>

namespace sstep {

std::string to_string(OrthoScheme s) { return s == OrthoScheme::bcgsi_plus ? "bcgsi+" : "bmgs"; }

OrthoScheme ortho_scheme_from_string(const std::string& s) {
  if (s == "bcgsi+" || s == "bcgsi_plus") return OrthoScheme::bcgsi_plus;
  if (s == "bmgs") return OrthoScheme::bmgs;
  throw std::invalid_argument("unknown orthogonalization scheme '" + s + "'");
}

void QrState::truncate(std::size_t m) {
  if (m >= q.cols()) return;
  q.truncate_cols(m);
  t = t.leading(m, m);
  while (!block_starts.empty() && block_starts.back() >= m) block_starts.pop_back();
}

namespace {

/// Grows T by the new block column [off; diag].
void extend_t(QrState& state, const DenseMat& off, const DenseMat& diag) {
  const std::size_t m = state.t.rows();
  const std::size_t w = diag.cols();
  DenseMat t(m + w, m + w);
  t.set_block(0, 0, state.t);
  if (m > 0) t.set_block(0, m, off);
  t.set_block(m, m, diag);
  state.t = std::move(t);
}

std::optional<std::size_t> find_breakdown(const DenseMat& diag_block, const DenseMat& x) {
  const double threshold = rank_threshold(x);
  for (std::size_t k = 0; k < diag_block.cols(); ++k)
    if (!(std::abs(diag_block(k, k)) > threshold)) return k;
  return std::nullopt;
}

void check_input(const QrState& state, const DenseMat& x_new) {
  if (x_new.cols() == 0) throw std::invalid_argument("orthogonalization step: empty block");
  if (state.q.cols() > 0 && state.q.rows() != x_new.rows())
    throw DimensionError("orthogonalization step: row mismatch");
  if (x_new.cols() > x_new.rows()) throw DimensionError("orthogonalization step: block wider than tall");
}

}  // namespace

void qr_seed(QrState& state, std::span<const double> x) {
  const double beta = norm2(x);
  if (beta == 0.0) throw std::invalid_argument("qr_seed: zero vector");
  Vector q(x.begin(), x.end());
  scale(1.0 / beta, q);
  state.q = DenseMat(x.size(), 0);
  state.q.append_col(q);
  state.t = DenseMat(1, 1);
  state.t(0, 0) = beta;
  state.block_starts = {0};
}

OrthStep bcgsi_plus_step(QrState& state, const DenseMat& x_new) {
  check_input(state, x_new);
  OrthStep out;
  const std::size_t m = state.q.cols();

  if (m == 0) {
    // No previous basis: both projections vanish, leaving the two intra QRs.
    auto qr1 = householder_qr(x_new);
    auto qr2 = householder_qr(qr1.q);
    out.counters.intra_qrs += 2;
    DenseMat diag = matmul(qr2.r, qr1.r);
    state.q = std::move(qr2.q);
    state.t = DenseMat(0, 0);
    extend_t(state, DenseMat(0, diag.cols()), diag);
    state.block_starts = {0};
    out.breakdown_col = find_breakdown(diag, x_new);
    return out;
  }

  // First pass: S1 = QᵀX, W1 = X - Q·S1, W1 = U·T1.
  DenseMat s1 = matmul_tn(state.q, x_new);
  DenseMat w1 = x_new;
  sub_matmul(w1, state.q, s1);
  auto qr1 = householder_qr(w1);
  // Second pass: S2 = QᵀU, W2 = U - Q·S2, W2 = Q_new·T2.
  DenseMat s2 = matmul_tn(state.q, qr1.q);
  DenseMat w2 = qr1.q;
  sub_matmul(w2, state.q, s2);
  auto qr2 = householder_qr(w2);
  out.counters.projections += 2;
  out.counters.intra_qrs += 2;

  DenseMat off = s1 + matmul(s2, qr1.r);
  DenseMat diag = matmul(qr2.r, qr1.r);
  state.block_starts.push_back(m);
  state.q.append_cols(qr2.q);
  extend_t(state, off, diag);
  out.breakdown_col = find_breakdown(diag, x_new);
  return out;
}

OrthStep bmgs_step(QrState& state, const DenseMat& x_new) {
  check_input(state, x_new);
  OrthStep out;
  const std::size_t m = state.q.cols();

  DenseMat w = x_new;
  DenseMat off(m, x_new.cols());
  for (std::size_t b = 0; b < state.block_starts.size(); ++b) {
    const std::size_t first = state.block_starts[b];
    const std::size_t last = b + 1 < state.block_starts.size() ? state.block_starts[b + 1] : m;
    DenseMat qb = state.q.cols_range(first, last - first);
    DenseMat sb = matmul_tn(qb, w);
    sub_matmul(w, qb, sb);
    off.set_block(first, 0, sb);
    ++out.counters.projections;
  }
  auto qr = householder_qr(w);
  ++out.counters.intra_qrs;

  if (m == 0) {
    state.q = DenseMat(x_new.rows(), 0);
    state.t = DenseMat(0, 0);
    state.block_starts.clear();
  }
  state.block_starts.push_back(m);
  state.q.append_cols(qr.q);
  extend_t(state, off, qr.r);
  out.breakdown_col = find_breakdown(qr.r, x_new);
  return out;
}

OrthStep orth_step(OrthoScheme scheme, QrState& state, const DenseMat& x_new) {
  return scheme == OrthoScheme::bcgsi_plus ? bcgsi_plus_step(state, x_new) : bmgs_step(state, x_new);
}

double loss_of_orthogonality(const DenseMat& q) {
  DenseMat g = matmul_tn(q, q);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return frobenius_norm(g);
}

ProjectedQr twice_projected_qr(const DenseMat& v, const DenseMat& x) {
  ProjectedQr out;
  DenseMat w = x;
  if (v.cols() > 0) {
    for (int pass = 0; pass < 2; ++pass) {
      DenseMat c = matmul_tn(v, w);
      sub_matmul(w, v, c);
      ++out.counters.projections;
    }
  }
  auto qr = householder_qr(w);
  ++out.counters.intra_qrs;
  out.q = std::move(qr.q);
  out.s = std::move(qr.r);
  out.rank_deficient_col = find_breakdown(out.s, x);
  return out;
}

}  // namespace sstep
