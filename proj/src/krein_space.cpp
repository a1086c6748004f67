#include "kcat/krein_space.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "kcat/sampling.hpp"

namespace kcat {

KreinSpaceSpec make_krein_space(Matrix gram, double tol) {
  check_finite(gram);
  if (gram.rows() != gram.cols() || gram.rows() == 0) {
    throw InputError("krein space: gram form must be square and nonempty");
  }
  const double scale = 1.0 + gram.norm();
  if (hermiticity_residual(gram) > tol * scale) {
    throw InputError("krein space: gram form is not Hermitian within tolerance");
  }
  HermitianEigen eig = herm_eig(gram, tol);
  for (Index i = 0; i < eig.eigenvalues.size(); ++i) {
    if (std::abs(eig.eigenvalues(i)) < tol * scale) {
      throw InputError("krein space: gram form is singular within tolerance");
    }
  }
  KreinSpaceSpec space;
  space.dim = gram.rows();
  space.gram = std::move(gram);
  return space;
}

FundamentalDecomposition canonical_decomposition(const KreinSpaceSpec& space, double tol) {
  // re-validate: callers may hand-roll the struct
  KreinSpaceSpec checked = make_krein_space(space.gram, tol);
  HermitianEigen eig = herm_eig(checked.gram, tol);

  const Index n = checked.dim;
  Matrix p_plus = Matrix::Zero(n, n);
  Matrix p_minus = Matrix::Zero(n, n);
  Index n_plus = 0;
  Index n_minus = 0;
  for (Index k = 0; k < n; ++k) {
    const Matrix v = eig.eigenvectors.col(k);
    if (eig.eigenvalues(k) > 0.0) {
      p_plus += v * v.adjoint();
      ++n_plus;
    } else {
      p_minus += v * v.adjoint();
      ++n_minus;
    }
  }
  FundamentalDecomposition decomp;
  decomp.j = p_plus - p_minus;
  decomp.p_plus = std::move(p_plus);
  decomp.p_minus = std::move(p_minus);
  decomp.signature = {n_plus, n_minus};
  return decomp;
}

Report decomposition_report(const KreinSpaceSpec& space,
                            const FundamentalDecomposition& decomp, double tol) {
  Report report;
  report.command = "decomposition";
  const Index n = space.dim;
  const Matrix id = Matrix::Identity(n, n);
  const double scale = 1.0 + space.gram.norm();
  const double bound = tol * scale;

  report.add("j_equals_projection_difference",
             (decomp.j - (decomp.p_plus - decomp.p_minus)).norm(), bound);
  report.add("projections_resolve_identity",
             (decomp.p_plus + decomp.p_minus - id).norm(), bound);
  report.add("p_plus_idempotent", (decomp.p_plus * decomp.p_plus - decomp.p_plus).norm(),
             bound);
  report.add("p_minus_idempotent",
             (decomp.p_minus * decomp.p_minus - decomp.p_minus).norm(), bound);
  report.add("projections_annihilate", (decomp.p_plus * decomp.p_minus).norm(), bound);
  report.add("j_involutive", (decomp.j * decomp.j - id).norm(), bound);

  const Matrix gj = space.gram * decomp.j;
  report.add("gram_j_hermitian", (gj - gj.adjoint()).norm(), bound);
  Eigen::SelfAdjointEigenSolver<Matrix> solver((gj + gj.adjoint()) / 2.0);
  const double min_eig = solver.eigenvalues()(0);
  report.add_bool("gram_j_positive_definite", min_eig > bound,
                  "min eigenvalue " + std::to_string(min_eig));
  report.add("subspaces_gram_orthogonal",
             (decomp.p_plus.adjoint() * space.gram * decomp.p_minus).norm(), bound);
  return report;
}

bool all_symmetry_check(const KreinSpaceSpec& space, const Matrix& j_candidate, double tol) {
  if (j_candidate.rows() != space.dim || j_candidate.cols() != space.dim) {
    throw InputError("all_symmetry_check: candidate shape mismatch");
  }
  check_finite(j_candidate);
  const Index n = space.dim;
  const double scale = 1.0 + space.gram.norm() + j_candidate.norm();
  const double bound = tol * scale;

  if ((j_candidate * j_candidate - Matrix::Identity(n, n)).norm() > bound) return false;

  const Matrix gj = space.gram * j_candidate;
  if ((gj - gj.adjoint()).norm() > bound) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> solver((gj + gj.adjoint()) / 2.0);
  if (solver.eigenvalues()(0) <= bound) return false;

  // gram-self-adjointness: J† gram = gram J
  return (j_candidate.adjoint() * space.gram - space.gram * j_candidate).norm() <= bound;
}

Matrix krein_adjoint(const Matrix& t, const KreinSpaceSpec& domain,
                     const KreinSpaceSpec& codomain) {
  check_finite(t);
  if (t.cols() != domain.dim || t.rows() != codomain.dim) {
    throw InputError("krein_adjoint: operator shape does not match the spaces");
  }
  return domain.gram.inverse() * t.adjoint() * codomain.gram;
}

double j_norm(const Vector& x, const FundamentalDecomposition& decomp,
              const KreinSpaceSpec& space, double tol) {
  if (x.size() != space.dim) throw InputError("j_norm: vector dimension mismatch");
  if (!all_symmetry_check(space, decomp.j, tol)) {
    throw InputError("j_norm: decomposition is not valid for this space");
  }
  const Complex q = x.adjoint() * (space.gram * decomp.j) * x;
  return std::sqrt(std::max(0.0, q.real()));
}

std::pair<double, double> norm_equivalence(const KreinSpaceSpec& space, const Matrix& j1,
                                           const Matrix& j2, int samples, double tol,
                                           Rng& rng) {
  if (!all_symmetry_check(space, j1, tol) || !all_symmetry_check(space, j2, tol)) {
    throw InputError("norm_equivalence: candidate fails the symmetry check");
  }
  const Matrix a = space.gram * j1;  // |x|_J1^2 = x† a x
  const Matrix b = space.gram * j2;
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver((a + a.adjoint()) / 2.0,
                                                          (b + b.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success) {
    throw InputError("norm_equivalence: generalized eigensolver failed");
  }
  const RealVector& vals = solver.eigenvalues();
  const double c = std::sqrt(std::max(0.0, vals(0)));
  const double big_c = std::sqrt(std::max(0.0, vals(vals.size() - 1)));

  FundamentalDecomposition d1{j1, Matrix(), Matrix(), {0, 0}};
  FundamentalDecomposition d2{j2, Matrix(), Matrix(), {0, 0}};
  for (int s = 0; s < samples; ++s) {
    const Vector x = random_vector(rng, space.dim);
    const double n1 = j_norm(x, d1, space, tol);
    const double n2 = j_norm(x, d2, space, tol);
    const double slack = tol * (1.0 + n1 + n2);
    if (n1 > big_c * n2 + slack || n1 < c * n2 - slack) {
      throw ConstructionError("norm_equivalence: certified bounds violated by a sample");
    }
  }
  return {c, big_c};
}

}  // namespace kcat
