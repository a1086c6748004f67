#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "kcat/krein_space.hpp"
#include "kcat/report.hpp"

namespace kcat {

enum class InvolutionTag { adjoint, krein, twisted };

/// Involution x -> weight^{-1} x† weight. weight = I is the Hilbert adjoint,
/// weight = gram the Krein adjoint; twisting by Ad_S stays in this family
/// with weight -> weight S^{-1}.
struct WeightedAdjoint {
  InvolutionTag tag = InvolutionTag::adjoint;
  Matrix weight;
  Matrix weight_inv;
};

/// Anti-linear involution in coordinates of a fixed algebra basis:
/// star(x) = from_coords(sigma conj(coords(x))). Only produced by twisting
/// with a symmetry that is not inner in the ambient algebra.
struct CoordinateStar {
  Matrix sigma;
};

using AlgebraInvolution = std::variant<WeightedAdjoint, CoordinateStar>;

WeightedAdjoint hilbert_adjoint(Index n);
WeightedAdjoint krein_involution(const KreinSpaceSpec& space);

/// Unital *-closed subalgebra of ambient square matrices, presented by a
/// trace-orthonormal basis. The unit is the ambient identity.
struct MatrixStarAlgebra {
  Index ambient_dim = 0;
  SubspaceBasis basis;
  Matrix unit;
  AlgebraInvolution involution;

  Index dim() const { return basis.dim(); }
  Matrix star(const Matrix& x) const;
};

/// alpha = Ad_S: x -> S x S^{-1}.
struct AdSymmetry {
  Matrix s;
  Matrix s_inv;
};
AdSymmetry make_ad_symmetry(const Matrix& s);

/// Explicit linear map on the coordinates of the algebra basis.
struct LinearSymmetry {
  Matrix coeffs;
};

using SymmetryAutomorphism = std::variant<AdSymmetry, LinearSymmetry>;

SymmetryAutomorphism identity_symmetry(Index ambient_dim);
Matrix apply_symmetry(const SymmetryAutomorphism& alpha, const MatrixStarAlgebra& algebra,
                      const Matrix& x);

/// Positive-definite frame under which a weighted involution becomes the
/// honest Hilbert adjoint; carries W^{1/2} and W^{-1/2}.
struct NormFrame {
  Matrix sqrt;
  Matrix inv_sqrt;
};

/// An HPD representative of `weight` if one exists (Hermitian and definite
/// up to an overall sign), otherwise nullopt.
std::optional<Matrix> definite_norm_weight(const Matrix& weight, double tol = kDefaultTol);
NormFrame make_norm_frame(const Matrix& hpd_weight, double tol = kDefaultTol);

/// Operator norm of x : domain -> codomain measured in the weighted inner
/// products: |codomain.sqrt * x * domain.inv_sqrt|.
double framed_op_norm(const Matrix& x, const NormFrame& codomain, const NormFrame& domain);

/// C*-norm attached to the algebra involution when its weight is definite;
/// falls back to the ambient operator norm otherwise.
struct AlgebraNorm {
  std::optional<NormFrame> frame;
  double operator()(const Matrix& x) const;
};
AlgebraNorm algebra_norm(const MatrixStarAlgebra& algebra, double tol = kDefaultTol);

/// Smallest unital algebra containing the generators, closed under product
/// and the tagged involution. Generators must be ambient_dim square.
MatrixStarAlgebra algebra_from_generators(Index ambient_dim,
                                          const std::vector<Matrix>& generators,
                                          AlgebraInvolution involution,
                                          double tol = kDefaultTol);

/// Weight of the twisted involution x -> alpha(x*) when both the involution
/// and the symmetry have matrix form; nullopt otherwise.
std::optional<Matrix> twisted_weight(const AlgebraInvolution& involution,
                                     const SymmetryAutomorphism& alpha);

/// Checks the Krein C*-algebra axioms for (algebra, alpha): alpha is an
/// involutive *-automorphism, the C*-identity |alpha(x*) x| = |x|^2 holds in
/// the twisted C*-norm, and alpha(x*) x is positive in the twisted sense.
/// Failures are report records with witnesses, never exceptions.
Report verify_krein_cstar(const MatrixStarAlgebra& algebra,
                          const SymmetryAutomorphism& alpha, int samples, double tol,
                          Rng& rng);

/// Eigenspace split A+ = {alpha(x) = x}, A- = {alpha(x) = -x} via the
/// projections (x ± alpha(x)) / 2. Throws InputError when alpha is not
/// involutive on the algebra.
std::pair<SubspaceBasis, SubspaceBasis> even_odd_split(const MatrixStarAlgebra& algebra,
                                                       const SymmetryAutomorphism& alpha,
                                                       double tol = kDefaultTol);

/// Same span with involution x -> alpha(x*). Twisting twice restores the
/// original involution action on every basis element.
MatrixStarAlgebra twist_involution(const MatrixStarAlgebra& algebra,
                                   const SymmetryAutomorphism& alpha,
                                   double tol = kDefaultTol);

}  // namespace kcat
