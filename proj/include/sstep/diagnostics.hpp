#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sstep/arnoldi.hpp"
#include "sstep/sparse.hpp"

namespace sstep {

/// Marks a field that was not measured on this step.
inline constexpr double missing_value = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// One row of per-block-step measurements. Unmeasured scalars hold NaN.
struct IterationRecord {
  std::size_t outer = 0;       // block step index, counted across restarts
  std::size_t inner_cols = 0;  // p, Krylov columns in the current cycle
  double backward_error = missing_value;
  double ls_residual_estimate = missing_value;
  double cond_B_tilde = missing_value;
  double cond_B_subblock = missing_value;
  double cond_V = missing_value;
  double ortho_loss_V = missing_value;
  std::string stop_reason;  // empty unless the step ended the solve or a cycle
  std::size_t restart_cycle = 0;
};

/// ‖b - Ax‖ / (‖A‖_F‖x‖ + ‖b‖)
double relative_backward_error(const CsrMatrix& a, std::span<const double> x, std::span<const double> b,
                               double norm_a_f);

/// Condition number of the column-normalized matrix; NaN if the SVD does not
/// converge or a column is zero.
double normalized_cond(const DenseMat& m);

/// Fills the diagnostic fields of a record from the current Arnoldi state.
/// `conditioning` toggles the SVD-based fields.
IterationRecord measure(const ArnoldiState& state, double ls_residual_estimate,
                        std::span<const double> provisional_x, const CsrMatrix& a,
                        std::span<const double> b, double norm_a_f, bool conditioning = true);

inline constexpr const char* csv_header =
    "outer,inner_cols,backward_error,ls_residual_estimate,cond_B_tilde,cond_B_subblock,cond_V,"
    "ortho_loss_V,stop_reason,restart_cycle";

void write_csv(std::span<const IterationRecord> records, std::ostream& sink);
/// Inverse of write_csv; used by tests and tooling.
std::vector<IterationRecord> read_csv(std::istream& source);

}  // namespace sstep
