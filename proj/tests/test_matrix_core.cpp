#include <doctest.h>

#include "test_support.hpp"

using namespace kcat;
using namespace kcat::testing;

namespace {

// independent oracle: power iteration on M†M, norm = sqrt of top eigenvalue
double power_iteration_norm(const Matrix& m) {
  const Matrix gram = m.adjoint() * m;
  Vector v = Vector::Ones(gram.rows());
  v /= v.norm();
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    v = gram * v;
    lambda = v.norm();
    v /= lambda;
  }
  return std::sqrt(lambda);
}

}  // namespace

TEST_CASE("op_norm matches the stated examples") {
  CHECK(op_norm(mat2(0, 2, 0, 0)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(op_norm(Matrix::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-12));

  // oracle first: power iteration reproduces the golden ratio
  const Matrix shear = mat2(1, 1, 0, 1);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(power_iteration_norm(shear) == doctest::Approx(golden).epsilon(1e-10));
  CHECK(op_norm(shear) == doctest::Approx(1.6180339887498949).epsilon(1e-12));

  Matrix bad = mat2(1, 0, 0, 1);
  bad(0, 1) = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(op_norm(bad), InputError);
}

TEST_CASE("op_norm squared equals the top eigenvalue of M†M") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 8);
    const Matrix m = random_matrix(rng, n, n);
    const HermitianEigen eig = herm_eig(m.adjoint() * m);
    const double nrm = op_norm(m);
    CHECK(std::abs(nrm * nrm - eig.eigenvalues(n - 1)) <= 1e-9 * (1.0 + m.norm() * m.norm()));
  }
}

TEST_CASE("herm_eig examples") {
  Matrix diag = mat2(3, 0, 0, -1);
  HermitianEigen eig = herm_eig(diag);
  CHECK(eig.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(eig.eigenvalues(1) == doctest::Approx(3.0).epsilon(1e-12));

  // characteristic polynomial by hand: t^2 - 1, eigenvectors (1, -+1)/sqrt(2)
  const Matrix flip = mat2(0, 1, 1, 0);
  eig = herm_eig(flip);
  CHECK(eig.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(eig.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-12));
  Vector minus(2);
  minus << 1.0, -1.0;
  minus /= std::sqrt(2.0);
  CHECK(std::abs(std::abs((minus.adjoint() * eig.eigenvectors.col(0))(0, 0)) - 1.0) < 1e-12);

  eig = herm_eig(Matrix::Zero(2, 2));
  CHECK(eig.eigenvalues.cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(herm_eig(mat2(0, 1, 0, 0)), InputError);
}

TEST_CASE("herm_eig residuals stay within tolerance on random input") {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 8);
    const Matrix m = random_hermitian(rng, n);
    const HermitianEigen eig = herm_eig(m);
    const Matrix recon =
        eig.eigenvectors * eig.eigenvalues.asDiagonal() * eig.eigenvectors.adjoint();
    CHECK((m - recon).norm() <= 1e-9 * (1.0 + m.norm()));
    CHECK((eig.eigenvectors.adjoint() * eig.eigenvectors - Matrix::Identity(n, n)).norm() <=
          1e-9);
  }
}

TEST_CASE("is_positive examples and z*z property") {
  const Matrix z = mat2(1, 2, 0, 1);
  CHECK(is_positive(z.adjoint() * z));
  CHECK_FALSE(is_positive(mat2(1, 0, 0, -1)));
  CHECK_FALSE(is_positive(mat2(0, 1, 0, 0)));
  CHECK_THROWS_AS(is_positive(Matrix::Zero(2, 3)), InputError);

  Rng rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 6);
    const Matrix w = random_matrix(rng, n, n);
    CHECK(is_positive(w.adjoint() * w));
  }
}

TEST_CASE("saturate_span closes the matrix unit algebra") {
  ClosureRule rule;
  rule.star = [](const Matrix& m) { return Matrix(m.adjoint()); };
  Matrix e12 = mat2(0, 1, 0, 0);
  SubspaceBasis basis = saturate_span(2, 2, {e12}, rule);
  CHECK(basis.dim() == 4);
  // explicit products: e12 e21 = e11, e21 e12 = e22
  CHECK(basis.contains(mat2(1, 0, 0, 0), 1e-9));
  CHECK(basis.contains(mat2(0, 0, 0, 1), 1e-9));
  CHECK(basis.contains(mat2(0, 0, 1, 0), 1e-9));

  SubspaceBasis unit_only = saturate_span(2, 2, {Matrix::Identity(2, 2)}, rule);
  CHECK(unit_only.dim() == 1);

  SubspaceBasis diag = saturate_span(2, 2, {mat2(1, 0, 0, -1)}, rule);
  CHECK(diag.dim() == 2);
  CHECK(diag.contains(mat2(1, 0, 0, 0), 1e-9));
  CHECK_FALSE(diag.contains(e12, 1e-9));
}

TEST_CASE("saturate_span is idempotent") {
  Rng rng(17);
  ClosureRule rule;
  rule.star = [](const Matrix& m) { return Matrix(m.adjoint()); };
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 2 + static_cast<Index>(rng() % 3);
    const SubspaceBasis first = saturate_span(n, n, {random_matrix(rng, n, n)}, rule);
    const SubspaceBasis second = saturate_span(n, n, first.elements(), rule);
    CHECK(second.dim() == first.dim());
  }
}

TEST_CASE("subspace basis arithmetic") {
  Rng rng(19);
  const Index n = 3;
  std::vector<Matrix> gens;
  for (int i = 0; i < 5; ++i) gens.push_back(random_matrix(rng, n, n));
  gens.push_back(gens[0] + gens[1]);  // deliberately dependent
  const SubspaceBasis basis = orthonormalize_span(n, n, gens);
  CHECK(basis.dim() == 5);
  for (Index i = 0; i < basis.dim(); ++i) {
    for (Index j = 0; j < basis.dim(); ++j) {
      const Complex p = (basis.element(i).adjoint() * basis.element(j)).trace();
      CHECK(std::abs(p - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
  }
  const Matrix inside = basis.from_coords(random_vector(rng, basis.dim()));
  CHECK(basis.contains(inside, 1e-9));
  CHECK((basis.from_coords(basis.coords(inside)) - inside).norm() < 1e-10);
}
