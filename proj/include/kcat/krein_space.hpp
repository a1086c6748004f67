#pragma once

#include <utility>

#include "kcat/matrix_core.hpp"
#include "kcat/report.hpp"

namespace kcat {

/// Finite-dimensional Krein space on C^dim: a Hermitian invertible Gram form.
/// The indefinite pairing is <x, y> = x† gram y (linear in the second slot).
struct KreinSpaceSpec {
  Index dim = 0;
  Matrix gram;
};

/// Validates hermiticity and invertibility (minimum |eigenvalue| must clear
/// tol * (1 + |gram|)); eigenvalues inside the tolerance band are an error,
/// never a sign decision.
KreinSpaceSpec make_krein_space(Matrix gram, double tol = kDefaultTol);

/// J = p_plus - p_minus with J^2 = I, gram * J positive definite, and the
/// two subspaces gram-orthogonal. signature = (dim K+, dim K-).
struct FundamentalDecomposition {
  Matrix j;
  Matrix p_plus;
  Matrix p_minus;
  std::pair<Index, Index> signature;
};

/// Spectral sign decomposition of the Gram form: K+ spans the positive
/// eigenvectors, K- the negative ones.
FundamentalDecomposition canonical_decomposition(const KreinSpaceSpec& space,
                                                 double tol = kDefaultTol);

/// Residual records for every FundamentalDecomposition invariant.
Report decomposition_report(const KreinSpaceSpec& space,
                            const FundamentalDecomposition& decomp,
                            double tol = kDefaultTol);

/// Membership test for fundamental symmetries beyond the canonical one:
/// J^2 = I, gram * J Hermitian positive definite, J gram-self-adjoint.
bool all_symmetry_check(const KreinSpaceSpec& space, const Matrix& j_candidate,
                        double tol = kDefaultTol);

/// T^# = gram_domain^{-1} T† gram_codomain, the adjoint for the indefinite
/// pairings: <T x, y>_codomain = <x, T^# y>_domain.
Matrix krein_adjoint(const Matrix& t, const KreinSpaceSpec& domain,
                     const KreinSpaceSpec& codomain);

/// Norm of the Hilbert space |K|_J: sqrt(x† (gram J) x).
double j_norm(const Vector& x, const FundamentalDecomposition& decomp,
              const KreinSpaceSpec& space, double tol = kDefaultTol);

/// Certified constants with c |x|_J2 <= |x|_J1 <= C |x|_J2 for all x,
/// computed as extreme generalized eigenvalues of (gram J1, gram J2) and
/// spot-checked on `samples` random vectors. Throws InputError when either
/// candidate fails all_symmetry_check.
std::pair<double, double> norm_equivalence(const KreinSpaceSpec& space, const Matrix& j1,
                                           const Matrix& j2, int samples, double tol,
                                           Rng& rng);

}  // namespace kcat
