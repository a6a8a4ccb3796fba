#include "sstep/diagnostics.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sstep/numfmt.hpp"

namespace sstep {

double relative_backward_error(const CsrMatrix& a, std::span<const double> x, std::span<const double> b,
                               double norm_a_f) {
  Vector res = spmv(a, x);
  for (std::size_t i = 0; i < res.size(); ++i) res[i] = b[i] - res[i];
  const double denom = norm_a_f * norm2(x) + norm2(b);
  if (denom == 0.0) return 0.0;
  return norm2(res) / denom;
}

double normalized_cond(const DenseMat& m) {
  if (m.cols() == 0) return missing_value;
  try {
    return cond2(normalize_columns(m).m);
  } catch (const SvdNotConverged&) {
    return missing_value;
  } catch (const ZeroColumnError&) {
    return missing_value;
  }
}

IterationRecord measure(const ArnoldiState& state, double ls_residual_estimate,
                        std::span<const double> provisional_x, const CsrMatrix& a,
                        std::span<const double> b, double norm_a_f, bool conditioning) {
  IterationRecord rec;
  rec.inner_cols = state.p();
  rec.ls_residual_estimate = ls_residual_estimate;
  if (!provisional_x.empty()) rec.backward_error = relative_backward_error(a, provisional_x, b, norm_a_f);
  if (conditioning && state.p() > 0) {
    rec.cond_B_tilde = normalized_cond(state.b);
    const std::size_t first = state.block_starts.empty() ? 0 : state.block_starts.back();
    rec.cond_B_subblock = normalized_cond(state.b.cols_range(first, state.p() - first));
    // Breakdown: V_{1:p} only.
    const DenseMat v = state.converged_by_breakdown ? state.v().cols_range(0, state.p()) : state.v();
    try {
      rec.cond_V = cond2(v);
    } catch (const SvdNotConverged&) {
      rec.cond_V = missing_value;
    }
    rec.ortho_loss_V = loss_of_orthogonality(v);
  }
  return rec;
}

namespace {

std::string field(double v) { return is_missing(v) ? std::string() : format_shortest(v); }

double parse_field(const std::string& s) { return s.empty() ? missing_value : parse_double(s); }

}  // namespace

void write_csv(std::span<const IterationRecord> records, std::ostream& sink) {
  sink << csv_header << '\n';
  for (const auto& r : records) {
    sink << r.outer << ',' << r.inner_cols << ',' << field(r.backward_error) << ','
         << field(r.ls_residual_estimate) << ',' << field(r.cond_B_tilde) << ',' << field(r.cond_B_subblock)
         << ',' << field(r.cond_V) << ',' << field(r.ortho_loss_V) << ',' << r.stop_reason << ','
         << r.restart_cycle << '\n';
  }
  if (!sink) throw std::runtime_error("write_csv: sink write failed");
}

std::vector<IterationRecord> read_csv(std::istream& source) {
  std::string line;
  if (!std::getline(source, line) || line != csv_header) throw std::runtime_error("read_csv: bad header");
  std::vector<IterationRecord> out;
  while (std::getline(source, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 10) throw std::runtime_error("read_csv: expected 10 fields");
    IterationRecord r;
    r.outer = std::stoull(f[0]);
    r.inner_cols = std::stoull(f[1]);
    r.backward_error = parse_field(f[2]);
    r.ls_residual_estimate = parse_field(f[3]);
    r.cond_B_tilde = parse_field(f[4]);
    r.cond_B_subblock = parse_field(f[5]);
    r.cond_V = parse_field(f[6]);
    r.ortho_loss_V = parse_field(f[7]);
    r.stop_reason = f[8];
    r.restart_cycle = std::stoull(f[9]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace sstep
