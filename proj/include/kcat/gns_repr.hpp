#pragma once

#include "kcat/cstar_category.hpp"

namespace kcat {

/// State on an operator category: one linear functional per hom-space,
/// stored as the values on the hom basis, so omega(x) = values . coords(x).
struct CategoryState {
  std::map<HomKey, Vector> values;

  Complex value(const OperatorCategory& cat, int from, int to, const Matrix& x) const;
};

/// omega(x : A -> B) = <xi_B, x xi_A> in the category's inner products; the
/// vectors are normalized per object. One vector per object is required.
CategoryState vector_state(const OperatorCategory& cat, const std::vector<Vector>& vectors,
                           double tol = kDefaultTol);

/// Normalized trace on the diagonal homs, zero on off-diagonal homs.
CategoryState trace_state(const OperatorCategory& cat);

CategoryState mix_states(const std::vector<CategoryState>& states,
                         const std::vector<double>& weights);

/// Hermiticity, normalization, per-hom Gram positivity and the block Gram
/// over all morphisms into each object. Shape mismatches throw InputError;
/// property failures are report records.
Report verify_state(const OperatorCategory& cat, const CategoryState& omega,
                    double tol = kDefaultTol);

/// GNS data: per-object spaces carry the reduced block Gram inner product
/// in orthonormal coordinates, pi acts by left multiplication.
struct GNSRepresentation {
  std::vector<Index> space_dims;
  std::map<HomKey, Index> pair_dims;
  StarFunctor pi;
  std::vector<Vector> cyclic;
};

/// GNS construction for a verified state. Throws InputError when the state
/// fails verification, ConstructionError if a self-check exceeds tolerance.
GNSRepresentation gns(const OperatorCategory& cat, const CategoryState& omega,
                      double tol = kDefaultTol);

/// Norm-achieving vector states: per hom basis element the maximizer of
/// |x xi| over unit xi (so omega(x* x) = |x|^2), plus count_per_object
/// random unit vectors per object.
std::vector<CategoryState> vector_states(const OperatorCategory& cat, int count_per_object,
                                         Rng& rng, double tol = kDefaultTol);

/// Direct sum of the GNS representations over the vector-state family,
/// extended with more random states until faithful. Certifies isometry
/// |pi(x)| = |x| on every basis element and on random samples; a violation
/// beyond tol raises CertificateError with the worst witness.
GNSRepresentation gelfand_naimark(const OperatorCategory& cat, int samples, double tol,
                                  Rng& rng);

/// Representation of a Krein algebra/category on Krein spaces
/// K_A = H_{A+} (+) (-H_{A-}) with fundamental symmetries J_A flipping the
/// negative summand. pi is stored over the original hom bases.
struct KreinRepresentation {
  std::vector<KreinSpaceSpec> spaces;
  std::vector<Matrix> symmetries;
  std::vector<std::pair<Index, Index>> signatures;
  StarFunctor pi;
  Report certificates;
};

KreinRepresentation represent_krein_algebra(const MatrixStarAlgebra& algebra,
                                            const SymmetryAutomorphism& alpha, int samples,
                                            double tol, Rng& rng);

KreinRepresentation represent_krein_category(const OperatorCategory& cat,
                                             const CategorySymmetry& alpha, int samples,
                                             double tol, Rng& rng);

}  // namespace kcat
