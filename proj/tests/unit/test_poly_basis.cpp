#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sstep/poly_basis.hpp"

using namespace sstep;

namespace {

LinearMap dense_map(const DenseMat& a) {
  return [a](std::span<const double> x) { return matvec(a, x); };
}

DenseMat diag_of(std::vector<double> d) { return DenseMat::diagonal(d); }

std::vector<double> sorted_real(const std::vector<Complex>& z) {
  std::vector<double> out;
  for (const auto& c : z) out.push_back(c.real());
  std::sort(out.begin(), out.end());
  return out;
}

DenseMat monomial_reference(const DenseMat& a, std::span<const double> v, std::size_t s) {
  DenseMat k(v.size(), 0);
  Vector w(v.begin(), v.end());
  for (std::size_t j = 0; j < s; ++j) {
    k.append_col(w);
    w = matvec(a, w);
  }
  return k;
}

bool conjugate_closed(const std::vector<Complex>& z) {
  for (const auto& c : z) {
    if (c.imag() == 0.0) continue;
    bool found = false;
    for (const auto& d : z) found = found || d == std::conj(c);
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("basis family names round trip") {
  for (auto f : {BasisFamily::monomial, BasisFamily::newton, BasisFamily::chebyshev})
    CHECK(basis_family_from_string(to_string(f)) == f);
  CHECK_THROWS(basis_family_from_string("legendre"));
}

TEST_CASE("hessenberg_eigenvalues matches the LAPACK oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t n = 4 + 3 * seed;
    DenseMat h = gaussian_matrix(n, n, 50 + seed);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = j + 2; i < n; ++i) h(i, j) = 0.0;
    auto mine = hessenberg_eigenvalues(h);
    auto ref = oracle::eigenvalues(h);
    REQUIRE(mine.size() == ref.size());
    CHECK(conjugate_closed(mine));
    for (const auto& z : ref) {
      double best = 1e300;
      for (const auto& w : mine) best = std::min(best, std::abs(z - w));
      CHECK(best <= 1e-10 * std::max(1.0, std::abs(z)));
    }
  }
}

TEST_CASE("hessenberg_eigenvalues small cases") {
  const auto one = hessenberg_eigenvalues(DenseMat::from_rows({{7}}));
  CHECK(one.size() == 1);
  CHECK(one[0] == Complex(7, 0));
  const auto rot = hessenberg_eigenvalues(DenseMat::from_rows({{0, -1}, {1, 0}}));
  REQUIRE(rot.size() == 2);
  CHECK(std::abs(rot[0].imag()) == doctest::Approx(1.0));
  CHECK(rot[0] == std::conj(rot[1]));
}

TEST_CASE("Ritz values of a diagonal matrix with a full Krylov space") {
  const double r3 = 1.0 / std::sqrt(3.0);
  const RitzSet r = compute_ritz_values(dense_map(diag_of({1, 2, 3})), std::vector<double>{r3, r3, r3}, 3);
  const auto v = sorted_real(r.values);
  CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(v[1] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(v[2] == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("Ritz values of the identity pad after breakdown") {
  const RitzSet r = compute_ritz_values(dense_map(DenseMat::identity(5)), std::vector<double>{1, 2, 3, 4, 5}, 4);
  REQUIRE(r.values.size() == 4);
  for (const auto& z : r.values) CHECK(z == Complex(1.0, 0.0));
}

TEST_CASE("Ritz values lie in the field-of-values box") {
  const DenseMat a = gaussian_matrix(100, 100, 77);
  DenseMat herm(100, 100), skew(100, 100);
  for (std::size_t i = 0; i < 100; ++i)
    for (std::size_t j = 0; j < 100; ++j) {
      herm(i, j) = 0.5 * (a(i, j) + a(j, i));
      skew(i, j) = 0.5 * (a(i, j) - a(j, i));
    }
  double re_lo = 1e300, re_hi = -1e300;
  for (const auto& z : oracle::eigenvalues(herm)) {
    re_lo = std::min(re_lo, z.real());
    re_hi = std::max(re_hi, z.real());
  }
  double im_hi = 0.0;
  for (const auto& z : oracle::eigenvalues(skew)) im_hi = std::max(im_hi, std::abs(z.imag()));
  const RitzSet r = compute_ritz_values(dense_map(a), gaussian_matrix(100, 1, 78).col(0), 8);
  REQUIRE(r.values.size() == 8);
  CHECK(conjugate_closed(r.values));
  for (const auto& z : r.values) {
    CHECK(z.real() >= re_lo - 1e-10);
    CHECK(z.real() <= re_hi + 1e-10);
    CHECK(std::abs(z.imag()) <= im_hi + 1e-10);
  }
}

TEST_CASE("compute_ritz_values input checks") {
  const LinearMap id = dense_map(DenseMat::identity(3));
  CHECK_THROWS(compute_ritz_values(id, std::vector<double>{0, 0, 0}, 2));
  CHECK_THROWS(compute_ritz_values(id, std::vector<double>{1, 0, 0}, 4));
  CHECK_THROWS(compute_ritz_values(id, std::vector<double>{1, 0, 0}, 0));
}

TEST_CASE("leja_order examples") {
  const std::vector<Complex> a{1, 2, 3};
  CHECK(leja_order(a) == std::vector<Complex>{3, 1, 2});
  const std::vector<Complex> b{5};
  CHECK(leja_order(b) == std::vector<Complex>{5});
  const std::vector<Complex> c{{2, -1}, {0, 0}, {2, 1}};
  CHECK(leja_order(c) == std::vector<Complex>{{2, 1}, {2, -1}, {0, 0}});
}

TEST_CASE("leja_order breaks ties lexicographically and keeps pairs adjacent") {
  const std::vector<Complex> sym{-1, 1};
  CHECK(leja_order(sym) == std::vector<Complex>{1, -1});
  const std::vector<Complex> many{{1, 3}, {1, -3}, {-2, 0}, {4, 0}, {0, 1}, {0, -1}};
  const auto out = leja_order(many);
  REQUIRE(out.size() == many.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].imag() > 0.0) {
      REQUIRE(i + 1 < out.size());
      CHECK(out[i + 1] == std::conj(out[i]));
    }
  }
  CHECK(out[0] == Complex(4, 0));
}

TEST_CASE("leja_order is greedy on real sets") {
  const std::vector<Complex> pts{0.5, 7, -3, 2.25, 9, 1};
  const auto out = leja_order(pts);
  for (std::size_t k = 1; k < out.size(); ++k) {
    auto score = [&](const Complex& z) {
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) s += std::log(std::abs(z - out[i]));
      return s;
    };
    for (std::size_t m = k + 1; m < out.size(); ++m) CHECK(score(out[k]) >= score(out[m]));
  }
}

TEST_CASE("chebyshev_params examples") {
  const ChebyshevFit a = chebyshev_params({{1, 9}});
  CHECK(a.center == 5.0);
  CHECK(a.focal == 4.0);
  CHECK_FALSE(a.degenerate);

  const ChebyshevFit b = chebyshev_params({{3, 3, 3}});
  CHECK(b.center == 3.0);
  CHECK(b.focal == 0.0);
  CHECK(b.degenerate);

  const ChebyshevFit c = chebyshev_params({{{2, 1}, {2, -1}, {6, 1}, {6, -1}}});
  CHECK(c.center == 4.0);
  CHECK(c.focal == doctest::Approx(std::sqrt(3.0)));

  const ChebyshevFit tall = chebyshev_params({{{1, 5}, {1, -5}, {3, 0}}});
  CHECK(tall.focal == 1.0);
  CHECK(std::holds_alternative<MonomialBasis>(make_basis(BasisFamily::chebyshev, {{3, 3}})));
}

TEST_CASE("monomial block before normalization") {
  const Vector e1{1, 0, 0};
  const DenseMat k = build_krylov_block(dense_map(diag_of({2, 2, 2})), e1, 3, MonomialBasis{}, false);
  REQUIRE(k.cols() == 3);
  CHECK(k(0, 0) == 1.0);
  CHECK(k(0, 1) == 2.0);
  CHECK(k(0, 2) == 4.0);
  const DenseMat kn = build_krylov_block(dense_map(diag_of({2, 2, 2})), e1, 3, MonomialBasis{});
  CHECK(kn(0, 2) == 1.0);
}

TEST_CASE("s = 1 returns v for every kind") {
  const Vector v{0.3, -1, 2};
  const LinearMap op = dense_map(gaussian_matrix(3, 3, 1));
  for (const BasisKind& kind : {BasisKind{MonomialBasis{}}, BasisKind{NewtonBasis{{Complex(1, 0)}}},
                                BasisKind{ChebyshevBasis{0.0, 1.0}}}) {
    const DenseMat k = build_krylov_block(op, v, 1, kind);
    REQUIRE(k.cols() == 1);
    CHECK(Vector(k.col(0).begin(), k.col(0).end()) == v);
  }
}

TEST_CASE("Newton with zero shifts equals monomial columnwise") {
  const DenseMat a = gaussian_matrix(12, 12, 5);
  const Vector v(12, 0.5);
  const DenseMat m = build_krylov_block(dense_map(a), v, 5, MonomialBasis{});
  const DenseMat n = build_krylov_block(dense_map(a), v, 5, NewtonBasis{{0, 0, 0, 0}});
  REQUIRE(n.cols() == 5);
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t i = 0; i < 12; ++i) CHECK(n(i, j) == m(i, j));
}

TEST_CASE("Newton block from its own Ritz values is better conditioned than monomial") {
  const DenseMat a = diag_of({1, 2, 3, 4});
  const Vector v(4, 0.5);
  const RitzSet ritz = compute_ritz_values(dense_map(a), v, 4);
  const DenseMat newton = build_krylov_block(dense_map(a), v, 4, make_basis(BasisFamily::newton, ritz));
  const DenseMat mono = build_krylov_block(dense_map(a), v, 4, MonomialBasis{});
  CHECK(cond2(newton) < cond2(mono));
}

TEST_CASE("complex Newton pairs produce finite real blocks spanning the Krylov space") {
  const DenseMat a = DenseMat::from_rows({{0, -2, 0, 0, 0},
                                          {2, 0, 0, 0, 0},
                                          {0, 0, 1, 1, 0},
                                          {0, 0, -1, 1, 0},
                                          {0, 0, 0, 0, 3}});
  const Vector v{1, 0.5, -1, 2, 1};
  const NewtonBasis nb{{{1, 1}, {1, -1}, {0, 2}, {0, -2}}};
  const DenseMat k = build_krylov_block(dense_map(a), v, 5, nb);
  REQUIRE(k.cols() == 5);
  CHECK(k.all_finite());
  CHECK(oracle::max_principal_angle(k, monomial_reference(a, v, 5)) <= 1e-8);
}

TEST_CASE("all kinds span the Krylov space") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const std::size_t n = 10 + 6 * seed;
    const DenseMat a = oracle::matrix_with_cond(n, n, 50.0, 300 + seed);
    const Vector v = oracle::gaussian_vector(n, 400 + seed);
    for (std::size_t s = 2; s <= 5; ++s) {
      const RitzSet ritz = compute_ritz_values(dense_map(a), v, s);
      const DenseMat ref = monomial_reference(a, v, s);
      for (auto fam : {BasisFamily::monomial, BasisFamily::newton, BasisFamily::chebyshev}) {
        const DenseMat k = build_krylov_block(dense_map(a), v, s, make_basis(fam, ritz));
        REQUIRE(k.cols() == s);
        CHECK(oracle::max_principal_angle(k, ref) <= 1e-8);
      }
    }
  }
}

TEST_CASE("Chebyshev on a symmetric spectrum is competitive") {
  const std::size_t n = 32, s = 8;
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = 1.0 + 9.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  const DenseMat a = diag_of(d);
  const Vector v = oracle::gaussian_vector(n, 12);
  const DenseMat cheb = build_krylov_block(dense_map(a), v, s, ChebyshevBasis{5.5, 4.5});
  const RitzSet ritz = compute_ritz_values(dense_map(a), v, s);
  const DenseMat newton = build_krylov_block(dense_map(a), v, s, make_basis(BasisFamily::newton, ritz));
  const DenseMat mono = build_krylov_block(dense_map(a), v, s, MonomialBasis{});
  CHECK(cond2(cheb) <= 1.5 * std::min(cond2(mono), cond2(newton)));
}

TEST_CASE("an invariant subspace truncates the block") {
  const Vector e1{1, 0, 0};
  const DenseMat k = build_krylov_block(dense_map(diag_of({2, 3, 4})), e1, 3, NewtonBasis{{2, 5}});
  CHECK(k.cols() == 1);
  const DenseMat z = build_krylov_block(dense_map(DenseMat(3, 3)), e1, 3, MonomialBasis{});
  CHECK(z.cols() == 1);
  CHECK_THROWS(build_krylov_block(dense_map(DenseMat::identity(3)), std::vector<double>{0, 0, 0}, 2,
                                  MonomialBasis{}));
}
