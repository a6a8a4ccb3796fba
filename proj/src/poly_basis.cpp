#include "sstep/poly_basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sstep {

std::string to_string(BasisFamily f) {
  switch (f) {
    case BasisFamily::monomial:
      return "monomial";
    case BasisFamily::newton:
      return "newton";
    case BasisFamily::chebyshev:
      return "chebyshev";
  }
  return "?";
}

BasisFamily basis_family_from_string(const std::string& s) {
  if (s == "monomial") return BasisFamily::monomial;
  if (s == "newton") return BasisFamily::newton;
  if (s == "chebyshev") return BasisFamily::chebyshev;
  throw std::invalid_argument("unknown basis '" + s + "'");
}

// Francis double-shift QR on an upper Hessenberg matrix, following the
// classical EISPACK hqr structure. Indices below are 1-based to keep the
// bulge-chase bookkeeping readable.
std::vector<Complex> hessenberg_eigenvalues(DenseMat h) {
  const int n = static_cast<int>(h.rows());
  if (h.rows() != h.cols()) throw DimensionError("hessenberg_eigenvalues: not square");
  if (h.rows() > max_ritz_size) throw std::invalid_argument("hessenberg_eigenvalues: size exceeds 64");
  std::vector<double> wr(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> wi(static_cast<std::size_t>(n) + 1, 0.0);
  auto a = [&h](int i, int j) -> double& {
    return h(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1));
  };

  double anorm = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(a(i, j));

  int nn = n;
  double t = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, w = 0.0, x = 0.0, y = 0.0, z = 0.0;
  while (nn >= 1) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 2; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= unit_roundoff * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn] = 0.0;
        --nn;
      } else {
        y = a(nn - 1, nn - 1);
        w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + w;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + std::copysign(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn] = z;
            wi[nn - 1] = -z;
          }
          nn -= 2;
        } else {
          if (its == 60) throw std::runtime_error("hessenberg_eigenvalues: no convergence");
          if (its == 10 || its == 20 || its == 40) {
            // Exceptional shift.
            t += x;
            for (int i = 1; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= unit_roundoff * v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = a(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            s = std::copysign(std::sqrt(p * p + q * q + r * r), p);
            if (s != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k != nn - 1) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k != nn - 1) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (nn >= 1 && l < nn - 1);
  }

  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) out.emplace_back(wr[i], wi[i]);
  return out;
}

RitzSet compute_ritz_values(const LinearMap& op, std::span<const double> r, std::size_t s) {
  if (s == 0) throw std::invalid_argument("compute_ritz_values: s must be >= 1");
  if (s > max_ritz_size) throw std::invalid_argument("compute_ritz_values: s exceeds 64");
  if (s > r.size()) throw std::invalid_argument("compute_ritz_values: s exceeds n");
  const double beta = norm2(r);
  if (beta == 0.0) throw std::invalid_argument("compute_ritz_values: zero start vector");

  DenseMat v(r.size(), 0);
  Vector v0(r.begin(), r.end());
  scale(1.0 / beta, v0);
  v.append_col(v0);
  DenseMat h(s + 1, s);
  std::size_t steps = 0;
  for (std::size_t j = 0; j < s; ++j) {
    Vector w = op(v.col(j));
    const double wnorm = norm2(w);
    // Modified Gram-Schmidt with one reorthogonalization pass.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i <= j; ++i) {
        const double hij = dot(v.col(i), w);
        h(i, j) += hij;
        axpy(-hij, v.col(i), w);
      }
    }
    const double hnext = norm2(w);
    h(j + 1, j) = hnext;
    steps = j + 1;
    if (hnext <= unit_roundoff * wnorm || hnext == 0.0) break;
    scale(1.0 / hnext, w);
    v.append_col(w);
  }

  RitzSet out;
  out.values = hessenberg_eigenvalues(h.leading(steps, steps));
  const Complex last = out.values.back();
  while (out.values.size() < s) out.values.emplace_back(last.imag() == 0.0 ? last : Complex(last.real(), 0.0));
  return out;
}

namespace {

bool lex_greater(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

}  // namespace

std::vector<Complex> leja_order(std::span<const Complex> values) {
  std::vector<Complex> remaining(values.begin(), values.end());
  std::vector<bool> used(remaining.size(), false);
  std::vector<Complex> out;
  out.reserve(remaining.size());

  while (out.size() < remaining.size()) {
    std::size_t best = remaining.size();
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      if (used[i]) continue;
      const Complex& z = remaining[i];
      // Conjugate pairs score identically; consider only the upper member.
      if (z.imag() < 0.0) {
        bool has_partner = false;
        for (std::size_t k = 0; k < remaining.size(); ++k)
          if (!used[k] && k != i && remaining[k] == std::conj(z)) has_partner = true;
        if (has_partner) continue;
      }
      double score = 0.0;
      if (out.empty()) {
        score = std::abs(z);
      } else {
        for (const Complex& c : out) score += std::log(std::abs(z - c));
      }
      const bool better = best == remaining.size() || score > best_score ||
                          (score == best_score && lex_greater(z, remaining[best]));
      if (better) {
        best = i;
        best_score = score;
      }
    }
    used[best] = true;
    const Complex chosen = remaining[best];
    out.push_back(chosen);
    if (chosen.imag() != 0.0) {
      // Place the nearest unused conjugate right after.
      std::size_t partner = remaining.size();
      double dist = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < remaining.size(); ++k) {
        if (used[k]) continue;
        const double d = std::abs(remaining[k] - std::conj(chosen));
        if (d < dist) {
          dist = d;
          partner = k;
        }
      }
      if (partner < remaining.size() && dist <= 1e-12 * std::max(1.0, std::abs(chosen))) {
        used[partner] = true;
        out.push_back(remaining[partner]);
      }
    }
  }
  return out;
}

ChebyshevFit chebyshev_params(const RitzSet& ritz) {
  if (ritz.values.empty()) throw std::invalid_argument("chebyshev_params: empty Ritz set");
  double re_min = std::numeric_limits<double>::infinity();
  double re_max = -std::numeric_limits<double>::infinity();
  double im_max = 0.0;
  for (const Complex& z : ritz.values) {
    re_min = std::min(re_min, z.real());
    re_max = std::max(re_max, z.real());
    im_max = std::max(im_max, std::abs(z.imag()));
  }
  ChebyshevFit fit;
  fit.center = 0.5 * (re_max + re_min);
  const double a = 0.5 * (re_max - re_min);
  const double b = im_max;
  fit.focal = a >= b ? std::sqrt(a * a - b * b) : a;
  fit.degenerate = !(fit.focal > 0.0);
  return fit;
}

BasisKind make_basis(BasisFamily family, const RitzSet& ritz) {
  switch (family) {
    case BasisFamily::monomial:
      return MonomialBasis{};
    case BasisFamily::newton:
      return NewtonBasis{leja_order(ritz.values)};
    case BasisFamily::chebyshev: {
      const auto fit = chebyshev_params(ritz);
      if (fit.degenerate) return MonomialBasis{};
      return ChebyshevBasis{fit.center, fit.focal};
    }
  }
  return MonomialBasis{};
}

namespace {

/// Appends w (scaled to unit norm when normalizing) and returns the factor it
/// was divided by, or 0 when w is numerically zero relative to `ref`.
double push_column(DenseMat& k, Vector& w, double ref, bool normalize) {
  const double nrm = norm2(w);
  if (nrm == 0.0 || nrm <= unit_roundoff * ref) return 0.0;
  const double factor = normalize ? nrm : 1.0;
  if (normalize) scale(1.0 / factor, w);
  k.append_col(w);
  return factor;
}

}  // namespace

DenseMat build_krylov_block(const LinearMap& op, std::span<const double> v, std::size_t s,
                            const BasisKind& kind, bool normalize) {
  if (s == 0) throw std::invalid_argument("build_krylov_block: s must be >= 1");
  if (norm2(v) == 0.0) throw std::invalid_argument("build_krylov_block: zero start vector");
  DenseMat k(v.size(), 0);
  k.append_col(v);

  if (std::holds_alternative<MonomialBasis>(kind)) {
    while (k.cols() < s) {
      Vector w = op(k.col(k.cols() - 1));
      if (push_column(k, w, norm2(w), normalize) == 0.0) break;
    }
  } else if (const auto* nb = std::get_if<NewtonBasis>(&kind)) {
    const auto& shifts = nb->shifts;
    if (shifts.empty()) throw std::invalid_argument("build_krylov_block: Newton basis without shifts");
    std::size_t idx = 0;
    while (k.cols() < s) {
      const Complex theta = shifts[idx % shifts.size()];
      const std::size_t j = k.cols() - 1;
      Vector w = op(k.col(j));
      const double ref = norm2(w) + std::abs(theta.real()) * norm2(k.col(j));
      axpy(-theta.real(), k.col(j), w);
      const double f1 = push_column(k, w, ref, normalize);
      if (f1 == 0.0) break;
      if (theta.imag() == 0.0) {
        idx += 1;
        continue;
      }
      idx += 2;
      if (k.cols() >= s) break;
      // Second half of the conjugate pair: (op - Re θ)q_{j+1} + (Im θ)^2 q_j / f1.
      const double b2 = theta.imag() * theta.imag();
      Vector w2 = op(k.col(j + 1));
      const double ref2 = norm2(w2) + std::abs(theta.real()) + b2 / f1;
      axpy(-theta.real(), k.col(j + 1), w2);
      axpy(b2 / f1, k.col(j), w2);
      if (push_column(k, w2, ref2, normalize) == 0.0) break;
    }
  } else {
    const auto& cb = std::get<ChebyshevBasis>(kind);
    if (!(cb.focal > 0.0)) throw std::invalid_argument("build_krylov_block: Chebyshev focal must be > 0");
    const double d = cb.center;
    const double c = cb.focal;
    // t_1 = (op - d) t_0 / c
    double prev_ratio = 0.0;  // μ_{j-1} / μ_j of the stored (scaled) columns
    if (k.cols() < s) {
      Vector w = op(k.col(0));
      const double ref = (norm2(w) + std::abs(d)) / c;
      axpy(-d, k.col(0), w);
      scale(1.0 / c, w);
      const double f = push_column(k, w, ref, normalize);
      prev_ratio = f == 0.0 ? 0.0 : 1.0 / f;
    }
    while (k.cols() < s && prev_ratio != 0.0) {
      const std::size_t j = k.cols() - 1;
      // t_{j+1} = (2/c)(op - d) t_j - t_{j-1}
      Vector w = op(k.col(j));
      const double ref = 2.0 * (norm2(w) + std::abs(d)) / c + prev_ratio;
      axpy(-d, k.col(j), w);
      scale(2.0 / c, w);
      axpy(-prev_ratio, k.col(j - 1), w);
      const double f = push_column(k, w, ref, normalize);
      if (f == 0.0) break;
      prev_ratio = 1.0 / f;
    }
  }
  return k;
}

}  // namespace sstep
