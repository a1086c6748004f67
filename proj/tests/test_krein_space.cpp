#include <doctest.h>

#include "test_support.hpp"

using namespace kcat;
using namespace kcat::testing;

TEST_CASE("krein space validation rejects degenerate forms") {
  CHECK_THROWS_AS(make_krein_space(mat2(1, 0, 0, 0)), InputError);
  CHECK_THROWS_AS(make_krein_space(mat2(0, 1, 0, 0)), InputError);
  CHECK_NOTHROW(make_krein_space(mat2(1, 0, 0, -1)));
}

TEST_CASE("canonical decomposition examples") {
  const KreinSpaceSpec minkowski = make_krein_space(mat2(1, 0, 0, -1));
  FundamentalDecomposition d = canonical_decomposition(minkowski);
  CHECK(approx_equal(d.j, mat2(1, 0, 0, -1)));
  CHECK(d.signature == std::pair<Index, Index>{1, 1});

  const KreinSpaceSpec euclid = make_krein_space(Matrix::Identity(3, 3));
  d = canonical_decomposition(euclid);
  CHECK(approx_equal(d.j, Matrix::Identity(3, 3)));
  CHECK(d.signature == std::pair<Index, Index>{3, 0});

  // hand eigendecomposition of the flip: eigenvalues -+1 with K+ = span (1,1)/sqrt 2
  const KreinSpaceSpec flip = make_krein_space(mat2(0, 1, 1, 0));
  d = canonical_decomposition(flip);
  CHECK(approx_equal(d.j, mat2(0, 1, 1, 0)));
  CHECK(d.signature == std::pair<Index, Index>{1, 1});
  Vector plus(2);
  plus << 1.0, 1.0;
  plus /= std::sqrt(2.0);
  CHECK(approx_equal(d.p_plus, plus * plus.adjoint()));

  CHECK(decomposition_report(flip, d).pass());
}

TEST_CASE("canonical decomposition passes the symmetry check on random spaces") {
  Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const Index dim = 2 + static_cast<Index>(rng() % 5);
    const Index minus = static_cast<Index>(rng() % dim);
    const KreinSpaceSpec space = make_krein_space(generic_gram(rng, dim, minus));
    const FundamentalDecomposition d = canonical_decomposition(space);
    CHECK(decomposition_report(space, d).pass());
    CHECK(all_symmetry_check(space, d.j));
    CHECK(d.signature.second == minus);
  }
}

TEST_CASE("all_symmetry_check accepts the hyperbolic conjugate") {
  const KreinSpaceSpec space = make_krein_space(mat2(1, 0, 0, -1));
  CHECK(all_symmetry_check(space, mat2(1, 0, 0, -1)));
  CHECK_FALSE(all_symmetry_check(space, Matrix::Identity(2, 2)));

  // S = [[cosh 1, sinh 1], [sinh 1, cosh 1]] preserves the form; its
  // conjugate of the canonical symmetry passes all three conditions
  const double c = std::cosh(1.0);
  const double s = std::sinh(1.0);
  const Matrix hyperbolic = mat2(c, s, s, c);
  CHECK(approx_equal(hyperbolic.adjoint() * space.gram * hyperbolic, space.gram));
  const Matrix j2 = hyperbolic * mat2(1, 0, 0, -1) * hyperbolic.inverse();
  CHECK(all_symmetry_check(space, j2));
}

TEST_CASE("krein adjoint examples") {
  const KreinSpaceSpec euclid = make_krein_space(Matrix::Identity(2, 2));
  const Matrix t = mat2(1, 2, 3, 4);
  CHECK(approx_equal(krein_adjoint(t, euclid, euclid), t.adjoint()));

  // direct product: diag(1,-1) e12† diag(1,-1) = -e21
  const KreinSpaceSpec minkowski = make_krein_space(mat2(1, 0, 0, -1));
  CHECK(approx_equal(krein_adjoint(mat2(0, 1, 0, 0), minkowski, minkowski),
                     mat2(0, 0, -1, 0)));
  CHECK(approx_equal(krein_adjoint(Matrix::Identity(2, 2), minkowski, minkowski),
                     Matrix::Identity(2, 2)));
  CHECK_THROWS_AS(krein_adjoint(Matrix::Zero(3, 2), minkowski, minkowski), InputError);
}

TEST_CASE("krein adjoint pairing identity and contravariance") {
  Rng rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const Index da = 2 + static_cast<Index>(rng() % 3);
    const Index db = 2 + static_cast<Index>(rng() % 3);
    const KreinSpaceSpec dom = make_krein_space(generic_gram(rng, da, 1));
    const KreinSpaceSpec cod = make_krein_space(generic_gram(rng, db, 1));
    const Matrix t = random_matrix(rng, db, da);
    const Matrix ts = krein_adjoint(t, dom, cod);
    for (int k = 0; k < 5; ++k) {
      const Vector x = random_vector(rng, da);
      const Vector y = random_vector(rng, db);
      const Complex lhs = (t * x).adjoint() * cod.gram * y;
      const Complex rhs = x.adjoint() * dom.gram * (ts * y);
      CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(lhs)));
    }
    CHECK(approx_equal(krein_adjoint(ts, cod, dom), t, 1e-8));

    const Matrix s = random_matrix(rng, da, db);  // s : cod -> dom
    const Matrix st = s * t;                      // dom -> dom... s after t
    CHECK(approx_equal(krein_adjoint(st, dom, dom),
                       krein_adjoint(t, dom, cod) * krein_adjoint(s, cod, dom), 1e-8));
  }
}

TEST_CASE("j_norm examples") {
  const KreinSpaceSpec minkowski = make_krein_space(mat2(1, 0, 0, -1));
  const FundamentalDecomposition d = canonical_decomposition(minkowski);
  Vector x(2);
  x << 0.0, 1.0;
  CHECK(j_norm(x, d, minkowski) == doctest::Approx(1.0).epsilon(1e-12));

  const KreinSpaceSpec euclid = make_krein_space(Matrix::Identity(2, 2));
  const FundamentalDecomposition de = canonical_decomposition(euclid);
  x << 3.0, 4.0;
  CHECK(j_norm(x, de, euclid) == doctest::Approx(5.0).epsilon(1e-12));

  const KreinSpaceSpec flip = make_krein_space(mat2(0, 1, 1, 0));
  const FundamentalDecomposition df = canonical_decomposition(flip);
  x << 1.0, 0.0;
  CHECK(j_norm(x, df, flip) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("norm equivalence certificates") {
  Rng rng(31);
  const KreinSpaceSpec minkowski = make_krein_space(mat2(1, 0, 0, -1));
  const Matrix j1 = mat2(1, 0, 0, -1);

  auto [c_same, big_same] = norm_equivalence(minkowski, j1, j1, 50, 1e-9, rng);
  CHECK(c_same == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(big_same == doctest::Approx(1.0).epsilon(1e-12));

  // generalized eigendecomposition of (gram J1, gram J2) by hand gives e^-2
  // and e^2, so the norm constants are e^-1 and e
  const double ch = std::cosh(1.0);
  const double sh = std::sinh(1.0);
  const Matrix hyperbolic = mat2(ch, sh, sh, ch);
  const Matrix j2 = hyperbolic * j1 * hyperbolic.inverse();
  auto [c, big] = norm_equivalence(minkowski, j1, j2, 200, 1e-9, rng);
  CHECK(c == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
  CHECK(big == doctest::Approx(std::exp(1.0)).epsilon(1e-10));

  const KreinSpaceSpec euclid = make_krein_space(Matrix::Identity(2, 2));
  auto [ce, bige] =
      norm_equivalence(euclid, Matrix::Identity(2, 2), Matrix::Identity(2, 2), 50, 1e-9, rng);
  CHECK(ce == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bige == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(norm_equivalence(minkowski, j1, Matrix::Identity(2, 2), 10, 1e-9, rng),
                  InputError);
}

TEST_CASE("j_norm ratios respect certified constants") {
  Rng rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    const Index dim = 2 + static_cast<Index>(rng() % 4);
    const Index minus = 1 + static_cast<Index>(rng() % (dim - 1));
    const KreinSpaceSpec space = make_krein_space(generic_gram(rng, dim, minus));
    const FundamentalDecomposition d = canonical_decomposition(space);
    const Matrix j2 = conjugated_symmetry(rng, space, d.j);
    REQUIRE(all_symmetry_check(space, j2));
    auto [c, big] = norm_equivalence(space, d.j, j2, 0, 1e-9, rng);
    CHECK(c <= 1.0 + 1e-9);
    CHECK(big >= 1.0 - 1e-9);
    FundamentalDecomposition d2 = d;
    d2.j = j2;
    for (int k = 0; k < 200; ++k) {
      const Vector x = random_vector(rng, dim);
      const double n1 = j_norm(x, d, space);
      const double n2 = j_norm(x, d2, space);
      CHECK(n1 <= big * n2 + 1e-9 * (1.0 + n1));
      CHECK(n1 >= c * n2 - 1e-9 * (1.0 + n1));
    }
  }
}

TEST_CASE("inertia is stable under unitary congruence") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Index dim = 2 + static_cast<Index>(rng() % 5);
    const Index minus = static_cast<Index>(rng() % dim);
    const Matrix gram = generic_gram(rng, dim, minus);
    const Matrix u = random_unitary(rng, dim);
    const auto sig1 = canonical_decomposition(make_krein_space(gram)).signature;
    const auto sig2 =
        canonical_decomposition(make_krein_space(u * gram * u.adjoint())).signature;
    CHECK(sig1 == sig2);
  }
}
