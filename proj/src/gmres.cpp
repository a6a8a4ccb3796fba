#include "sstep/gmres.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sstep {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged_backward:
      return "converged_backward";
    case SolveStatus::converged_ls:
      return "converged_ls";
    case SolveStatus::key_dimension_reached:
      return "key_dimension_reached";
    case SolveStatus::breakdown_converged:
      return "breakdown_converged";
    case SolveStatus::max_iters:
      return "max_iters";
    case SolveStatus::non_finite:
      return "non_finite";
  }
  return "?";
}

void LsState::truncate(std::size_t k) {
  if (k >= cols()) return;
  t = t.leading(k, k);
  chain.resize(k);
  const double tail = k == 0 ? beta : residual_history[k - 1];
  g.resize(k + 1);
  g[k] = tail;
  residual_history.resize(k);
}

void givens_update(LsState& ls, const DenseMat& h_new) {
  const std::size_t p_old = ls.cols();
  const std::size_t p_new = p_old + h_new.cols();
  if (h_new.rows() != p_new + 1) throw DimensionError("givens_update: H block must have p_new + 1 rows");

  DenseMat t(p_new, p_new);
  t.set_block(0, 0, ls.t);
  for (std::size_t c = 0; c < h_new.cols(); ++c) {
    const std::size_t j = p_old + c;
    Vector col(h_new.col(c).begin(), h_new.col(c).end());
    for (std::size_t i = j + 2; i < col.size(); ++i)
      if (col[i] != 0.0) throw std::invalid_argument("givens_update: H is not upper Hessenberg");
    for (const auto& g : ls.chain) apply_givens(g, col);
    const GivensRotation rot = compute_givens(col[j], col[j + 1], j);
    apply_givens(rot, col);
    col[j + 1] = 0.0;
    for (std::size_t i = 0; i <= j; ++i) t(i, j) = col[i];
    ls.chain.push_back(rot);
    ls.g.push_back(0.0);
    apply_givens(rot, ls.g);
    ls.residual_history.push_back(ls.g[j + 1]);
  }
  ls.t = std::move(t);
}

DenseMat hessenberg_columns(const DenseMat& r, std::size_t first, std::size_t count) {
  const std::size_t rows = first + count + 1;
  DenseMat h(rows, count);
  for (std::size_t c = 0; c < count; ++c)
    for (std::size_t i = 0; i < rows; ++i) h(i, c) = r(i, first + c + 1);
  return h;
}

std::optional<Vector> form_solution(const LsState& ls, const DenseMat& z, std::span<const double> x0,
                                    std::size_t k) {
  if (k > ls.cols() || k > z.cols()) throw DimensionError("form_solution: too many columns");
  const DenseMat tk = ls.t.leading(k, k);
  const double threshold = unit_roundoff * frobenius_norm(tk);
  for (std::size_t i = 0; i < k; ++i)
    if (!(std::abs(tk(i, i)) > threshold)) return std::nullopt;
  const Vector y = back_substitute(tk, ls.g, k);
  Vector x(x0.begin(), x0.end());
  for (std::size_t j = 0; j < k; ++j) axpy(y[j], z.col(j), x);
  return x;
}

namespace {

/// Forms the provisional solution with k columns, dropping trailing blocks
/// while the triangular factor is numerically singular.
Vector form_with_fallback(const LsState& ls, const ArnoldiState& state, std::span<const double> x0,
                          std::size_t& k) {
  while (k > 0) {
    if (auto x = form_solution(ls, state.z, x0, k)) return *std::move(x);
    std::size_t next = 0;
    for (std::size_t s : state.block_starts)
      if (s < k) next = std::max(next, s);
    k = next;
  }
  return {x0.begin(), x0.end()};
}

}  // namespace

StopCheck check_stop(const LsState& ls, const ArnoldiState& state, const StopContext& ctx,
                     std::size_t first_new, bool backward_due) {
  StopCheck out;
  const std::size_t p = state.p();
  const DenseMat& r = state.r();

  if (ctx.key_dimension_stop) {
    double w_sq = 0.0;
    for (std::size_t j = 0; j < first_new; ++j) w_sq += dot(state.w.col(j), state.w.col(j));
    for (std::size_t j = first_new; j < p; ++j) {
      w_sq += dot(state.w.col(j), state.w.col(j));
      if (std::abs(r(j + 1, j + 1)) <= ctx.tol_h * std::sqrt(w_sq)) {
        out.key_dimension = j + 1;
        break;
      }
    }
  }

  std::size_t k = out.key_dimension.value_or(p);
  out.ls_fired = ls.residual_estimate(k) <= ctx.tol_ls * ls.beta;

  const bool evaluate = backward_due || out.ls_fired || out.key_dimension || state.converged_by_breakdown;
  if (!evaluate) return out;

  out.provisional_x = form_with_fallback(ls, state, ctx.x0, k);
  out.solution_cols = k;
  out.backward_error = relative_backward_error(*ctx.a, out.provisional_x, ctx.b, ctx.norm_a_f);

  if (out.backward_error <= ctx.tol) {
    out.stop = out.ls_fired ? SolveStatus::converged_ls : SolveStatus::converged_backward;
  } else if (state.converged_by_breakdown) {
    out.stop = SolveStatus::breakdown_converged;
  } else if (out.key_dimension) {
    out.stop = SolveStatus::key_dimension_reached;
  }
  return out;
}

namespace {

bool converged(SolveStatus s) {
  return s == SolveStatus::converged_backward || s == SolveStatus::converged_ls;
}

void truncate_to(ArnoldiState& state, std::size_t p) {
  if (p >= state.p()) return;
  const bool flag = state.converged_by_breakdown;
  happy_breakdown_truncate(state, p - 1);
  state.converged_by_breakdown = flag;
}

}  // namespace

SolveResult solve(const CsrMatrix& a, std::span<const double> b, std::span<const double> x0,
                  const SolverConfig& cfg) {
  const std::size_t n = a.n();
  if (b.size() != n || x0.size() != n) throw DimensionError("solve: dimension mismatch");
  if (cfg.s < 1 || cfg.s > n) throw std::invalid_argument("solve: need 1 <= s <= n");
  if (cfg.restart && (*cfg.restart < cfg.s || *cfg.restart > n))
    throw std::invalid_argument("solve: need s <= restart <= n");
  if (cfg.check_backward_every == 0) throw std::invalid_argument("solve: check_backward_every must be >= 1");

  const double nd = static_cast<double>(n);
  StopContext ctx;
  ctx.a = &a;
  ctx.b = b;
  ctx.norm_a_f = a.frobenius_norm();
  ctx.tol = cfg.tol.value_or(nd * unit_roundoff);
  ctx.tol_ls = cfg.tol_ls.value_or(ctx.tol);
  ctx.tol_h = cfg.tol_h.value_or(std::sqrt(nd) * unit_roundoff);
  ctx.key_dimension_stop = cfg.key_dimension_stop;
  if (!(ctx.tol > 0.0) || !(ctx.tol_ls > 0.0) || !(ctx.tol_h > 0.0))
    throw std::invalid_argument("solve: tolerances must be positive");

  PreconditionedSystem sys;
  sys.a = &a;
  if (cfg.precond == PreconditionerChoice::jacobi) {
    auto p = Preconditioner::jacobi_from(a);
    (cfg.precond_side == PreconditionerSide::left ? sys.left : sys.right) = std::move(p);
  }

  ArnoldiSetup setup;
  setup.system = &sys;
  setup.scheme = cfg.scheme;
  setup.basis_operator = cfg.basis_operator;

  const bool restarted = cfg.restart.has_value();
  const std::size_t max_cycles = restarted ? cfg.max_outer.value_or(10) : 1;
  const std::size_t step_cap = restarted ? std::numeric_limits<std::size_t>::max()
                                         : cfg.max_outer.value_or((n + cfg.s - 1) / cfg.s);
  const std::size_t col_cap = restarted ? *cfg.restart : n;

  SolveResult result;
  result.tol = ctx.tol;
  Vector x(x0.begin(), x0.end());
  bool done = false;

  for (std::size_t cycle = 0; cycle < max_cycles && !done; ++cycle) {
    result.restart_cycles = cycle + 1;
    Vector res = spmv(a, x);
    for (std::size_t i = 0; i < n; ++i) res[i] = b[i] - res[i];
    Vector r = apply_preconditioner_inverse(sys.left, res);
    const double beta = norm2(r);
    if (beta == 0.0) {
      result.status = SolveStatus::converged_backward;
      done = true;
      break;
    }

    setup.basis = MonomialBasis{};
    if (cfg.basis != BasisFamily::monomial && cfg.s > 1) {
      const RitzSet ritz = compute_ritz_values(sys.basis_map(cfg.basis_operator), r, cfg.s);
      setup.basis = make_basis(cfg.basis, ritz);
    }

    ArnoldiState state = start_arnoldi(r, cfg.variant);
    LsState ls(beta);
    ctx.x0 = x;
    Vector cycle_x;
    std::optional<SolveStatus> cycle_stop;
    std::size_t steps = 0;

    while (state.p() < col_cap && steps < step_cap) {
      const std::size_t p_old = state.p();
      const std::size_t width = std::min(cfg.s, col_cap - p_old);
      const StepOutcome outcome = arnoldi_step(state, setup, width);
      ++steps;
      ++result.outer_iterations;

      IterationRecord rec;
      rec.outer = result.outer_iterations;
      rec.restart_cycle = cycle;
      if (!state.w.all_finite() || !state.r().all_finite()) {
        rec.inner_cols = state.p();
        rec.stop_reason = to_string(SolveStatus::non_finite);
        result.records.push_back(rec);
        result.status = SolveStatus::non_finite;
        done = true;
        break;
      }

      givens_update(ls, hessenberg_columns(state.r(), p_old, state.p() - p_old));

      const bool last_step = state.p() >= col_cap || steps >= step_cap;
      const bool diag_due = cfg.diag_every > 0 && (result.outer_iterations % cfg.diag_every == 0 || last_step);
      const bool backward_due = result.outer_iterations % cfg.check_backward_every == 0 || last_step ||
                                outcome.breakdown_col.has_value() || diag_due;
      StopCheck chk = check_stop(ls, state, ctx, p_old, backward_due);
      if (chk.key_dimension) {
        truncate_to(state, *chk.key_dimension);
        ls.truncate(*chk.key_dimension);
      }

      const std::size_t k = chk.provisional_x.empty() ? state.p() : chk.solution_cols;
      rec = measure(state, ls.residual_estimate(std::min(k, ls.cols())), chk.provisional_x, a, b,
                    ctx.norm_a_f, diag_due);
      rec.outer = result.outer_iterations;
      rec.restart_cycle = cycle;
      if (!chk.provisional_x.empty()) cycle_x = std::move(chk.provisional_x);
      if (chk.stop) rec.stop_reason = to_string(*chk.stop);
      result.records.push_back(rec);

      if (chk.stop && converged(*chk.stop)) {
        x = std::move(cycle_x);
        result.status = *chk.stop;
        done = true;
        break;
      }
      if (chk.stop) {
        cycle_stop = chk.stop;
        break;
      }
    }
    if (done) break;

    if (cycle_x.empty()) {
      std::size_t k = state.p();
      cycle_x = form_with_fallback(ls, state, x, k);
    }
    x = std::move(cycle_x);
    result.counters += state.counters;
    if (!restarted) {
      result.status = cycle_stop.value_or(SolveStatus::max_iters);
      done = true;
    }
  }
  if (restarted && !done) result.status = SolveStatus::max_iters;

  result.final_backward_error = relative_backward_error(a, x, b, ctx.norm_a_f);
  result.x = std::move(x);
  return result;
}

SolveResult solve_restarted(const CsrMatrix& a, std::span<const double> b, std::span<const double> x0,
                            const SolverConfig& cfg) {
  if (!cfg.restart) throw std::invalid_argument("solve_restarted: restart length not set");
  return solve(a, b, x0, cfg);
}

}  // namespace sstep
