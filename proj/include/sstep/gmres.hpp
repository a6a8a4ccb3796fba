#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sstep/arnoldi.hpp"
#include "sstep/diagnostics.hpp"
#include "sstep/poly_basis.hpp"
#include "sstep/sparse.hpp"

namespace sstep {

enum class PreconditionerChoice { none, jacobi };
enum class PreconditionerSide { left, right };

struct SolverConfig {
  std::size_t s = 1;
  /// Block-step cap without restarts (default ⌈n/s⌉); restart-cycle cap with
  /// restarts (default 10).
  std::optional<std::size_t> max_outer;
  BasisFamily basis = BasisFamily::monomial;
  ArnoldiVariant variant = ArnoldiVariant::classical;
  OrthoScheme scheme = OrthoScheme::bcgsi_plus;
  std::optional<double> tol;     // backward-error threshold, default n·u
  std::optional<double> tol_ls;  // LS-residual threshold, default tol
  std::optional<double> tol_h;   // key-dimension threshold, default √n·u
  /// Evaluate |R_{p+1,p+1}| <= tolH·‖W_{1:p}‖_F at all.
  bool key_dimension_stop = true;
  std::optional<std::size_t> restart;  // columns per cycle
  PreconditionerChoice precond = PreconditionerChoice::none;
  PreconditionerSide precond_side = PreconditionerSide::right;
  BasisOperator basis_operator = BasisOperator::plain;
  std::size_t check_backward_every = 1;
  /// Conditioning diagnostics cadence in block steps; 0 disables them.
  std::size_t diag_every = 1;
  std::uint64_t seed = 0;
};

enum class SolveStatus {
  converged_backward,
  converged_ls,
  key_dimension_reached,
  breakdown_converged,
  max_iters,
  non_finite,
};

std::string to_string(SolveStatus s);

/// Givens-reduced Hessenberg least-squares problem min‖βe₁ - H y‖.
struct LsState {
  double beta = 0.0;
  std::vector<GivensRotation> chain;
  DenseMat t;                          // p x p upper triangular
  Vector g;                            // length p + 1, β·Gᵀe₁
  std::vector<double> residual_history;  // g_k right after column k-1 was reduced

  explicit LsState(double beta_ = 0.0) : beta(beta_), g{beta_} {}
  std::size_t cols() const { return t.cols(); }
  double residual_estimate() const { return std::abs(g.back()); }
  /// Residual of the LS problem restricted to the first k columns.
  double residual_estimate(std::size_t k) const { return k == 0 ? beta : std::abs(residual_history.at(k - 1)); }
  void truncate(std::size_t k);
};

/// Reduces new Hessenberg columns. `h_new` holds H(0..p_new, p_old..p_new-1)
/// with p_new + 1 rows; entries below the subdiagonal must be zero.
void givens_update(LsState& ls, const DenseMat& h_new);

/// Columns [first, first+count) of H = R(:, 1:) from the [r | W] factor.
DenseMat hessenberg_columns(const DenseMat& r, std::size_t first, std::size_t count);

/// x0 + Z_{1:k} y with T_{1:k} y = g_{1:k}. Returns nullopt when a diagonal
/// entry of T is at or below u·‖T‖_F.
std::optional<Vector> form_solution(const LsState& ls, const DenseMat& z, std::span<const double> x0,
                                    std::size_t k);

/// Inputs of the stopping test that do not change between block steps.
struct StopContext {
  const CsrMatrix* a = nullptr;
  std::span<const double> b;
  std::span<const double> x0;
  double norm_a_f = 0.0;
  double tol = 0.0;
  double tol_ls = 0.0;
  double tol_h = 0.0;
  bool key_dimension_stop = true;
};

struct StopCheck {
  std::optional<SolveStatus> stop;
  /// Column count p at which |R_{p+1,p+1}| <= tolH·‖W_{1:p}‖_F first held.
  std::optional<std::size_t> key_dimension;
  bool ls_fired = false;
  /// Column count used for the provisional solution (if one was formed).
  std::size_t solution_cols = 0;
  double backward_error = missing_value;
  Vector provisional_x;
};

/// Evaluates the LS, key-dimension and backward-error criteria after a block
/// step whose new columns start at `first_new`. The backward-error test runs
/// when `backward_due` or when either cheap criterion fired. Never mutates
/// solver state.
StopCheck check_stop(const LsState& ls, const ArnoldiState& state, const StopContext& ctx,
                     std::size_t first_new, bool backward_due);

struct SolveResult {
  Vector x;
  SolveStatus status = SolveStatus::max_iters;
  std::vector<IterationRecord> records;
  std::size_t outer_iterations = 0;  // block steps, all cycles
  std::size_t restart_cycles = 0;
  double final_backward_error = missing_value;
  double tol = 0.0;
  OrthCounters counters;
};

/// s-step GMRES. With cfg.restart set this is the restarted method.
SolveResult solve(const CsrMatrix& a, std::span<const double> b, std::span<const double> x0,
                  const SolverConfig& cfg);

/// Same as solve; requires cfg.restart.
SolveResult solve_restarted(const CsrMatrix& a, std::span<const double> b, std::span<const double> x0,
                            const SolverConfig& cfg);

}  // namespace sstep
