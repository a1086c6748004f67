#pragma once

#include <vector>

#include "kcat/gns_repr.hpp"
#include "kcat/sampling.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace kcat::testing {

inline Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline bool approx_equal(const Matrix& a, const Matrix& b, double tol = 1e-9) {
  return (a - b).norm() <= tol * (1.0 + a.norm() + b.norm());
}

/// Gram form that is a unitary conjugate of a signature matrix (so its
/// canonical decomposition has an exactly flat J-metric).
inline Matrix involutive_gram(Rng& rng, Index dim, Index n_minus) {
  const Matrix u = random_unitary(rng, dim);
  RealVector signs = RealVector::Ones(dim);
  for (Index i = 0; i < n_minus; ++i) signs(dim - 1 - i) = -1.0;
  return u * signs.asDiagonal() * u.adjoint();
}

/// Generic nondegenerate Hermitian Gram form with mixed signature and
/// eigenvalues bounded away from zero.
inline Matrix generic_gram(Rng& rng, Index dim, Index n_minus) {
  const Matrix u = random_unitary(rng, dim);
  RealVector vals(dim);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  for (Index i = 0; i < dim; ++i) vals(i) = mag(rng) * (i < dim - n_minus ? 1.0 : -1.0);
  return u * vals.asDiagonal() * u.adjoint();
}

/// A second fundamental symmetry: conjugate of J by a random Krein-unitary
/// exp(X) with X skew for the indefinite pairing.
inline Matrix conjugated_symmetry(Rng& rng, const KreinSpaceSpec& space, const Matrix& j,
                                  double strength = 0.5) {
  const Matrix y = strength * random_matrix(rng, space.dim, space.dim);
  const Matrix ysharp = space.gram.inverse() * y.adjoint() * space.gram;
  const Matrix x = y - ysharp;
  const Matrix u = x.exp();
  return u * j * u.inverse();
}

/// Full operator category on the given dimensions with the Hilbert adjoint;
/// the hom bases are matrix units.
inline OperatorCategory full_adjoint_category(const std::vector<Index>& dims) {
  OperatorCategory cat;
  WeightFamily weights;
  weights.tag = InvolutionTag::adjoint;
  for (size_t a = 0; a < dims.size(); ++a) {
    cat.objects.push_back(CatObject{"O" + std::to_string(a), dims[a], std::nullopt});
    weights.weight.push_back(Matrix::Identity(dims[a], dims[a]));
    weights.weight_inv.push_back(Matrix::Identity(dims[a], dims[a]));
  }
  for (int a = 0; a < cat.object_count(); ++a) {
    for (int b = 0; b < cat.object_count(); ++b) {
      SubspaceBasis basis(dims[static_cast<size_t>(b)], dims[static_cast<size_t>(a)]);
      for (Index i = 0; i < dims[static_cast<size_t>(b)]; ++i) {
        for (Index j = 0; j < dims[static_cast<size_t>(a)]; ++j) {
          Matrix unit = Matrix::Zero(dims[static_cast<size_t>(b)], dims[static_cast<size_t>(a)]);
          unit(i, j) = 1.0;
          basis.push_raw(std::move(unit));
        }
      }
      cat.homs.emplace(HomKey{a, b}, std::move(basis));
    }
  }
  cat.involution = std::move(weights);
  return cat;
}

/// Full operator category over a family of Krein spaces with the Krein
/// adjoint involution, plus the canonical symmetry family Ad J.
inline std::pair<OperatorCategory, CategorySymmetry> krein_space_category(
    const std::vector<KreinSpaceSpec>& spaces, double tol = kDefaultTol) {
  std::vector<Index> dims;
  for (const auto& s : spaces) dims.push_back(s.dim);
  OperatorCategory cat = full_adjoint_category(dims);
  WeightFamily weights;
  weights.tag = InvolutionTag::krein;
  AdSymmetryFamily sym;
  for (size_t a = 0; a < spaces.size(); ++a) {
    cat.objects[a].gram = spaces[a].gram;
    weights.weight.push_back(spaces[a].gram);
    weights.weight_inv.push_back(spaces[a].gram.inverse());
    const Matrix j = canonical_decomposition(spaces[a], tol).j;
    sym.s.push_back(j);
    sym.s_inv.push_back(j.inverse());
  }
  cat.involution = std::move(weights);
  return {std::move(cat), CategorySymmetry{std::move(sym)}};
}

/// B(K) for a random Krein space: full matrix algebra with the Krein
/// adjoint and the canonical symmetry Ad J.
inline std::pair<MatrixStarAlgebra, SymmetryAutomorphism> full_krein_algebra(
    const KreinSpaceSpec& space, double tol = kDefaultTol) {
  MatrixStarAlgebra algebra;
  algebra.ambient_dim = space.dim;
  SubspaceBasis basis(space.dim, space.dim);
  for (Index i = 0; i < space.dim; ++i) {
    for (Index j = 0; j < space.dim; ++j) {
      Matrix unit = Matrix::Zero(space.dim, space.dim);
      unit(i, j) = 1.0;
      basis.push_raw(std::move(unit));
    }
  }
  algebra.basis = std::move(basis);
  algebra.unit = Matrix::Identity(space.dim, space.dim);
  algebra.involution = krein_involution(space);
  const Matrix j = canonical_decomposition(space, tol).j;
  return {std::move(algebra), SymmetryAutomorphism{make_ad_symmetry(j)}};
}

/// Proper Krein subalgebra of B(K): generated by a random element and its
/// image under Ad J, so the span is symmetry-stable.
inline std::pair<MatrixStarAlgebra, SymmetryAutomorphism> random_krein_subalgebra(
    Rng& rng, const KreinSpaceSpec& space, double tol = kDefaultTol) {
  const Matrix j = canonical_decomposition(space, tol).j;
  const Matrix x = random_matrix(rng, space.dim, space.dim);
  MatrixStarAlgebra algebra = algebra_from_generators(
      space.dim, {x, Matrix(j * x * j.inverse())}, krein_involution(space), tol);
  return {std::move(algebra), SymmetryAutomorphism{make_ad_symmetry(j)}};
}

}  // namespace kcat::testing
