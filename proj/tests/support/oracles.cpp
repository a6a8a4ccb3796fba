#include "oracles.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace oracle {

std::vector<double> singular_values(const DenseMat& a) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  std::vector<double> work(a.data().begin(), a.data().end());
  std::vector<double> s(std::min(m, n)), superb(std::max<lapack_int>(1, std::min(m, n)));
  const lapack_int info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'N', 'N', m, n, work.data(), std::max<lapack_int>(1, m),
                                         s.data(), nullptr, 1, nullptr, 1, superb.data());
  if (info != 0) throw std::runtime_error("dgesvd failed");
  return s;
}

std::vector<std::complex<double>> eigenvalues(const DenseMat& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  std::vector<double> work(a.data().begin(), a.data().end()), wr(n), wi(n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, wr.data(), wi.data(),
                                        nullptr, 1, nullptr, 1);
  if (info != 0) throw std::runtime_error("dgeev failed");
  std::vector<std::complex<double>> out;
  for (lapack_int i = 0; i < n; ++i) out.emplace_back(wr[i], wi[i]);
  return out;
}

DenseMat orthonormal_basis(const DenseMat& a) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  DenseMat q = a;
  std::vector<double> tau(n);
  if (LAPACKE_dgeqrf(LAPACK_COL_MAJOR, m, n, q.data().data(), m, tau.data()) != 0)
    throw std::runtime_error("dgeqrf failed");
  if (LAPACKE_dorgqr(LAPACK_COL_MAJOR, m, n, n, q.data().data(), m, tau.data()) != 0)
    throw std::runtime_error("dorgqr failed");
  return q;
}

Vector normal_equations_ls(const DenseMat& h, const Vector& rhs) {
  const DenseMat hth = sstep::matmul_tn(h, h);
  DenseMat r(rhs.size(), 1, rhs);
  DenseMat htb = sstep::matmul_tn(h, r);
  const lapack_int n = static_cast<lapack_int>(h.cols());
  DenseMat work = hth;
  if (LAPACKE_dposv(LAPACK_COL_MAJOR, 'U', n, 1, work.data().data(), n, htb.data().data(), n) != 0)
    throw std::runtime_error("dposv failed");
  return {htb.data().begin(), htb.data().end()};
}

double max_principal_angle(const DenseMat& a, const DenseMat& b) {
  const DenseMat qa = orthonormal_basis(a);
  const DenseMat qb = orthonormal_basis(b);
  DenseMat resid = qb;
  sstep::sub_matmul(resid, qa, sstep::matmul_tn(qa, qb));
  const double sin_max = singular_values(resid).front();
  return std::asin(std::min(1.0, sin_max));
}

Vector gaussian_vector(std::size_t n, std::uint64_t seed) {
  const DenseMat g = sstep::gaussian_matrix(n, 1, seed);
  return Vector(g.col(0).begin(), g.col(0).end());
}

DenseMat matrix_with_cond(std::size_t rows, std::size_t cols, double cond, std::uint64_t seed) {
  const DenseMat u = orthonormal_basis(sstep::gaussian_matrix(rows, cols, seed));
  const DenseMat v = orthonormal_basis(sstep::gaussian_matrix(cols, cols, seed + 0x9e3779b97f4a7c15ULL));
  std::vector<double> sigma(cols, 1.0);
  for (std::size_t i = 0; i < cols && cols > 1; ++i)
    sigma[i] = std::pow(cond, -static_cast<double>(i) / static_cast<double>(cols - 1));
  DenseMat us = u;
  for (std::size_t j = 0; j < cols; ++j) sstep::scale(sigma[j], us.col(j));
  return sstep::matmul(us, v.transpose());
}

double columnwise_residual(const DenseMat& x, const DenseMat& q, const DenseMat& t) {
  DenseMat r = x;
  sstep::sub_matmul(r, q, t);
  double worst = 0.0;
  for (std::size_t j = 0; j < x.cols(); ++j)
    worst = std::max(worst, sstep::norm2(r.col(j)) / sstep::norm2(x.col(j)));
  return worst;
}

std::string fixture(const std::string& name) {
  const char* dir = std::getenv("SSTEP_FIXTURES");
  return std::string(dir ? dir : "tests/fixtures") + "/" + name;
}

}  // namespace oracle
