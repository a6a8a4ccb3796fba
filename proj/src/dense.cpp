#include "sstep/dense.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace sstep {

DenseMat::DenseMat(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMat::DenseMat(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("DenseMat: data length does not match rows x cols");
  }
}

DenseMat DenseMat::identity(std::size_t n) {
  DenseMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMat DenseMat::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t nr = rows.size();
  const std::size_t nc = nr == 0 ? 0 : rows.front().size();
  DenseMat m(nr, nc);
  for (std::size_t i = 0; i < nr; ++i) {
    if (rows[i].size() != nc) throw DimensionError("from_rows: ragged rows");
    for (std::size_t j = 0; j < nc; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

DenseMat DenseMat::diagonal(std::span<const double> d) {
  DenseMat m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

DenseMat DenseMat::cols_range(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw DimensionError("cols_range out of bounds");
  DenseMat out(rows_, count);
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(first * rows_), count * rows_,
              out.data_.begin());
  return out;
}

DenseMat DenseMat::leading(std::size_t nr, std::size_t nc) const { return block(0, 0, nr, nc); }

DenseMat DenseMat::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionError("block out of bounds");
  DenseMat out(nr, nc);
  for (std::size_t j = 0; j < nc; ++j)
    for (std::size_t i = 0; i < nr; ++i) out(i, j) = (*this)(r0 + i, c0 + j);
  return out;
}

void DenseMat::set_block(std::size_t r0, std::size_t c0, const DenseMat& b) {
  if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw DimensionError("set_block out of bounds");
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t i = 0; i < b.rows(); ++i) (*this)(r0 + i, c0 + j) = b(i, j);
}

void DenseMat::append_col(std::span<const double> v) {
  if (cols_ == 0 && rows_ == 0) rows_ = v.size();
  if (v.size() != rows_) throw DimensionError("append_col: length mismatch");
  data_.insert(data_.end(), v.begin(), v.end());
  ++cols_;
}

void DenseMat::append_cols(const DenseMat& m) {
  if (m.cols() == 0) return;
  if (cols_ == 0 && rows_ == 0) rows_ = m.rows();
  if (m.rows() != rows_) throw DimensionError("append_cols: row mismatch");
  data_.insert(data_.end(), m.data_.begin(), m.data_.end());
  cols_ += m.cols();
}

void DenseMat::truncate_cols(std::size_t ncols) {
  if (ncols > cols_) throw DimensionError("truncate_cols: cannot grow");
  cols_ = ncols;
  data_.resize(rows_ * cols_);
}

DenseMat DenseMat::transpose() const {
  DenseMat t(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
  return t;
}

bool DenseMat::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double norm2(std::span<const double> x) {
  // Scaled accumulation so tiny or huge columns neither underflow nor overflow.
  double scale_v = 0.0;
  double ssq = 1.0;
  for (double v : x) {
    if (v == 0.0) continue;
    const double a = std::abs(v);
    if (scale_v < a) {
      ssq = 1.0 + ssq * (scale_v / a) * (scale_v / a);
      scale_v = a;
    } else {
      ssq += (a / scale_v) * (a / scale_v);
    }
  }
  return scale_v * std::sqrt(ssq);
}

double frobenius_norm(const DenseMat& m) { return norm2(m.data()); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

DenseMat matmul(const DenseMat& a, const DenseMat& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimension mismatch");
  DenseMat c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto cj = c.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k) axpy(b(k, j), a.col(k), cj);
  }
  return c;
}

DenseMat matmul_tn(const DenseMat& a, const DenseMat& b) {
  if (a.rows() != b.rows()) throw DimensionError("matmul_tn: row mismatch");
  DenseMat c(a.cols(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t i = 0; i < a.cols(); ++i) c(i, j) = dot(a.col(i), b.col(j));
  return c;
}

Vector matvec(const DenseMat& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionError("matvec: length mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t k = 0; k < a.cols(); ++k) axpy(x[k], a.col(k), y);
  return y;
}

namespace {
DenseMat elementwise(const DenseMat& a, const DenseMat& b, const std::function<double(double, double)>& f) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("shape mismatch");
  DenseMat c(a.rows(), a.cols());
  auto ad = a.data();
  auto bd = b.data();
  auto cd = c.data();
  for (std::size_t i = 0; i < cd.size(); ++i) cd[i] = f(ad[i], bd[i]);
  return c;
}
}  // namespace

DenseMat operator-(const DenseMat& a, const DenseMat& b) {
  return elementwise(a, b, std::minus<double>());
}

DenseMat operator+(const DenseMat& a, const DenseMat& b) {
  return elementwise(a, b, std::plus<double>());
}

void sub_matmul(DenseMat& c, const DenseMat& a, const DenseMat& b) {
  if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols())
    throw DimensionError("sub_matmul: shape mismatch");
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto cj = c.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k) axpy(-b(k, j), a.col(k), cj);
  }
}

double rank_threshold(const DenseMat& m) {
  return unit_roundoff * static_cast<double>(std::max(m.rows(), m.cols())) * frobenius_norm(m);
}

QrResult householder_qr(const DenseMat& m) {
  const std::size_t nr = m.rows();
  const std::size_t nc = m.cols();
  if (nr < nc) throw DimensionError("householder_qr: rows < cols");

  QrResult out;
  const double threshold = rank_threshold(m);
  DenseMat a = m;
  std::vector<double> tau(nc, 0.0);
  DenseMat r(nc, nc);

  for (std::size_t k = 0; k < nc; ++k) {
    auto ak = a.col(k);
    const double alpha = ak[k];
    const double xnorm = norm2(ak.subspan(k + 1));
    const double pivot = std::hypot(alpha, xnorm);
    if (!out.rank_deficient_col && pivot <= threshold) out.rank_deficient_col = k;

    double beta = alpha;
    if (xnorm != 0.0) {
      beta = alpha >= 0.0 ? -pivot : pivot;
      tau[k] = (beta - alpha) / beta;
      const double inv = 1.0 / (alpha - beta);
      for (std::size_t i = k + 1; i < nr; ++i) ak[i] *= inv;
      ak[k] = 1.0;
      // Apply H_k = I - tau v vᵀ to the trailing columns.
      for (std::size_t j = k + 1; j < nc; ++j) {
        auto aj = a.col(j);
        double w = 0.0;
        for (std::size_t i = k; i < nr; ++i) w += ak[i] * aj[i];
        w *= tau[k];
        for (std::size_t i = k; i < nr; ++i) aj[i] -= w * ak[i];
      }
    }
    r(k, k) = beta;
    for (std::size_t j = k + 1; j < nc; ++j) r(k, j) = a(k, j);
  }

  // Accumulate the thin Q by applying the reflectors to the leading identity columns.
  DenseMat q(nr, nc);
  for (std::size_t j = 0; j < nc; ++j) q(j, j) = 1.0;
  for (std::size_t kk = nc; kk-- > 0;) {
    if (tau[kk] == 0.0) continue;
    auto v = a.col(kk);
    for (std::size_t j = kk; j < nc; ++j) {
      auto qj = q.col(j);
      double w = qj[kk];
      for (std::size_t i = kk + 1; i < nr; ++i) w += v[i] * qj[i];
      w *= tau[kk];
      qj[kk] -= w;
      for (std::size_t i = kk + 1; i < nr; ++i) qj[i] -= w * v[i];
    }
  }

  for (std::size_t k = 0; k < nc; ++k) {
    if (r(k, k) < 0.0) {
      for (std::size_t j = k; j < nc; ++j) r(k, j) = -r(k, j);
      scale(-1.0, q.col(k));
    }
  }
  out.q = std::move(q);
  out.r = std::move(r);
  return out;
}

GivensRotation compute_givens(double a, double b, std::size_t row) {
  GivensRotation g;
  g.row = row;
  if (b == 0.0) {
    g.c = a >= 0.0 ? 1.0 : -1.0;
    g.s = 0.0;
    return g;
  }
  const double rho = std::hypot(a, b);
  g.c = a / rho;
  g.s = b / rho;
  return g;
}

void apply_givens(const GivensRotation& g, std::span<double> x) {
  const double a = x[g.row];
  const double b = x[g.row + 1];
  x[g.row] = g.c * a + g.s * b;
  x[g.row + 1] = -g.s * a + g.c * b;
}

namespace {

constexpr int kMaxJacobiSweeps = 60;

double jacobi_tolerance(std::size_t n) {
  return std::max(1e-15, unit_roundoff * std::sqrt(static_cast<double>(n)));
}

}  // namespace

SvdValues jacobi_svd_values(const DenseMat& m) {
  SvdValues out;
  if (m.rows() < m.cols()) return jacobi_svd_values(m.transpose());
  const std::size_t n = m.cols();
  if (n == 0) return out;

  // Rᵀ has the same singular values as M and is square; Jacobi on it converges
  // in far fewer sweeps than on the raw tall matrix.
  DenseMat u = householder_qr(m).r.transpose();
  const double tol = jacobi_tolerance(n);

  std::vector<double> sq(n);
  for (std::size_t j = 0; j < n; ++j) sq[j] = dot(u.col(j), u.col(j));

  bool converged = false;
  int sweep = 0;
  while (sweep < kMaxJacobiSweeps) {
    ++sweep;
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double alpha = sq[i];
        const double beta = sq[j];
        if (alpha == 0.0 || beta == 0.0) continue;
        auto ui = u.col(i);
        auto uj = u.col(j);
        const double gamma = dot(ui, uj);
        if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < n; ++k) {
          const double x = ui[k];
          const double y = uj[k];
          ui[k] = c * x - s * y;
          uj[k] = s * x + c * y;
        }
        sq[i] = dot(ui, ui);
        sq[j] = dot(uj, uj);
      }
    }
    if (!rotated) {
      converged = true;
      break;
    }
  }

  out.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.values[j] = norm2(u.col(j));
  std::sort(out.values.begin(), out.values.end(), std::greater<double>());
  out.converged = converged;
  out.sweeps = sweep;
  return out;
}

double cond2(const DenseMat& m) {
  auto sv = jacobi_svd_values(m);
  if (!sv.converged) throw SvdNotConverged(std::move(sv.values));
  if (sv.values.empty()) return 1.0;
  const double smax = sv.values.front();
  const double smin = sv.values.back();
  if (smax == 0.0) throw std::invalid_argument("cond2: zero matrix");
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

NormalizedColumns normalize_columns(const DenseMat& m) {
  NormalizedColumns out{m, {}};
  out.scaling.d.resize(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const double nrm = norm2(m.col(j));
    if (nrm == 0.0) throw ZeroColumnError(j);
    out.scaling.d[j] = nrm;
    for (double& v : out.m.col(j)) v /= nrm;
  }
  return out;
}

Vector back_substitute(const DenseMat& r, std::span<const double> g, std::size_t k) {
  if (k > r.rows() || k > r.cols() || k > g.size()) throw DimensionError("back_substitute: size");
  Vector y(k, 0.0);
  for (std::size_t ii = k; ii-- > 0;) {
    double acc = g[ii];
    for (std::size_t j = ii + 1; j < k; ++j) acc -= r(ii, j) * y[j];
    y[ii] = acc / r(ii, ii);
  }
  return y;
}

}  // namespace sstep
