#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kcat/star_algebra.hpp"

namespace kcat {

/// Object of an operator category: an ambient Hilbert dimension, plus the
/// Gram form when the involution is a Krein adjoint.
struct CatObject {
  std::string label;
  Index dim = 0;
  std::optional<Matrix> gram;
};

using HomKey = std::pair<int, int>;  // (from, to)

/// Per-object adjoint weights: star(x : A -> B) = W_A^{-1} x† W_B.
struct WeightFamily {
  InvolutionTag tag = InvolutionTag::adjoint;
  std::vector<Matrix> weight;
  std::vector<Matrix> weight_inv;
};

/// Per-hom anti-linear coordinate maps Hom(a,b) -> Hom(b,a).
struct CoordinateStarFamily {
  std::map<HomKey, Matrix> sigma;
};

using CategoryInvolution = std::variant<WeightFamily, CoordinateStarFamily>;

/// Finite operator category: morphisms in Hom(a,b) are d_b x d_a matrices,
/// composition is the matrix product Hom(b,c) x Hom(a,b) -> Hom(a,c).
struct OperatorCategory {
  std::vector<CatObject> objects;
  std::map<HomKey, SubspaceBasis> homs;
  CategoryInvolution involution;

  int object_count() const { return static_cast<int>(objects.size()); }
  const SubspaceBasis& hom(int from, int to) const;
  Matrix identity(int obj) const;
  /// Involution Hom(from,to) -> Hom(to,from).
  Matrix star(int from, int to, const Matrix& x) const;
};

/// Identity-on-objects symmetry, either Ad by per-object invertibles or
/// explicit linear maps on hom coordinates.
struct AdSymmetryFamily {
  std::vector<Matrix> s;
  std::vector<Matrix> s_inv;
};
struct LinearSymmetryFamily {
  std::map<HomKey, Matrix> coeffs;
};
using CategorySymmetry = std::variant<AdSymmetryFamily, LinearSymmetryFamily>;

CategorySymmetry identity_category_symmetry(const OperatorCategory& cat);
Matrix apply_symmetry(const CategorySymmetry& alpha, const OperatorCategory& cat, int from,
                      int to, const Matrix& x);

/// Covariant *-functor stored concretely: images of every hom basis element.
struct StarFunctor {
  std::vector<int> object_map;
  std::vector<Index> target_dims;  // ambient dimension per target object
  std::map<HomKey, std::vector<Matrix>> images;

  Matrix apply(const OperatorCategory& source, int from, int to, const Matrix& x) const;
};

StarFunctor identity_functor(const OperatorCategory& cat);
/// A symmetry viewed as an endo-functor of its category.
StarFunctor symmetry_functor(const OperatorCategory& cat, const CategorySymmetry& alpha);

/// Hom-space norms: weighted operator norms when every object weight is
/// definite, ambient operator norms otherwise.
struct CategoryNorm {
  std::optional<std::vector<NormFrame>> frames;
  double operator()(int from, int to, const Matrix& x) const;
};
CategoryNorm category_norm(const OperatorCategory& cat, double tol = kDefaultTol);
/// Norm of the twisted involution x -> alpha(x*); this is the C*-norm the
/// Krein axioms are measured in when the twisted weights are definite.
CategoryNorm twisted_category_norm(const OperatorCategory& cat, const CategorySymmetry& alpha,
                                   double tol = kDefaultTol);

/// Smallest hom family containing the generators that is closed under
/// composition and the involution, with all identities present.
OperatorCategory category_from_generators(std::vector<CatObject> objects,
                                          const std::map<HomKey, std::vector<Matrix>>& generators,
                                          CategoryInvolution involution,
                                          double tol = kDefaultTol);

OperatorCategory one_object_category(const MatrixStarAlgebra& algebra, std::string label = "A");
CategorySymmetry to_category_symmetry(const SymmetryAutomorphism& alpha,
                                      const MatrixStarAlgebra& algebra);

/// Diagonal hom Hom(a,a) packaged as a matrix *-algebra.
MatrixStarAlgebra diagonal_algebra(const OperatorCategory& cat, int obj);

/// C*-category axioms: identities, closure, submultiplicativity, the
/// C*-identity and positivity of x* x in the diagonal algebras.
Report verify_cstar_category(const OperatorCategory& cat, int samples, double tol, Rng& rng);

/// The four Krein C*-category axioms for (cat, alpha).
Report verify_krein_cstar_category(const OperatorCategory& cat, const CategorySymmetry& alpha,
                                   int samples, double tol, Rng& rng);

/// *-functor sanity: images in the declared homs, multiplicative on
/// composable pairs, involution-compatible, unital.
Report verify_functor(const OperatorCategory& source, const OperatorCategory& target,
                      const StarFunctor& phi, double tol = kDefaultTol);

/// Same homs with involution x -> alpha(x*).
OperatorCategory twist_category(const OperatorCategory& cat, const CategorySymmetry& alpha,
                                double tol = kDefaultTol);

/// Two-object category over a unital algebra and an involutive bimodule
/// inside the same ambient matrix algebra; compositions are ambient
/// products. Throws InputError with the offending product on a
/// compatibility failure.
OperatorCategory linking_category(const MatrixStarAlgebra& algebra_plus,
                                  const SubspaceBasis& module_odd, double tol = kDefaultTol);

/// The two-object category [A+, A-] of a Krein algebra with symmetry,
/// carrying the original involution and the restricted symmetry.
std::pair<OperatorCategory, CategorySymmetry> krein_link(const MatrixStarAlgebra& algebra,
                                                         const SymmetryAutomorphism& alpha,
                                                         double tol = kDefaultTol);

/// Block matrix algebra on the direct sum of the object spaces, with the
/// embedding functor iota sending Hom(a,b) to block (b,a).
struct Envelope {
  MatrixStarAlgebra algebra;
  StarFunctor iota;
  std::vector<Index> offsets;                     // block offset per object
  std::vector<std::pair<HomKey, Index>> basis_index;  // envelope basis -> hom element
};
Envelope envelope(const OperatorCategory& cat);

/// Unital *-homomorphism between envelope algebras, stored as images of the
/// source envelope basis.
struct AlgebraHom {
  std::vector<Matrix> images;
  Matrix apply(const MatrixStarAlgebra& source, const Matrix& x) const;
};

/// Block-wise lift E(phi) with E(phi) o iota_C = iota_D o phi; the returned
/// report certifies the intertwining, multiplicativity and involution
/// compatibility. Throws InputError when phi itself is not functorial.
std::pair<AlgebraHom, Report> envelope_functor(const OperatorCategory& source,
                                               const StarFunctor& phi,
                                               const OperatorCategory& target,
                                               const Envelope& source_env,
                                               const Envelope& target_env,
                                               double tol = kDefaultTol);

/// Objects doubled into (A,+), (A,-) with even/odd hom parts; coincides
/// with krein_link for one-object categories.
std::pair<OperatorCategory, CategorySymmetry> doubling(const OperatorCategory& cat,
                                                       const CategorySymmetry& alpha,
                                                       double tol = kDefaultTol);

/// Category spanned by the images of a functor with injective object map;
/// the target-side involution is the Hilbert adjoint.
OperatorCategory image_category(const OperatorCategory& source, const StarFunctor& phi,
                                double tol = kDefaultTol);

/// Weakened envelope statement for a Krein algebra: x+ + x- -> x+ + x- is a
/// linear bijection A+ (+) A- -> A that is multiplicative on composable
/// pairs and involution-compatible for the twisted star.
Report weakened_envelope_iso_report(const MatrixStarAlgebra& algebra,
                                    const SymmetryAutomorphism& alpha,
                                    double tol = kDefaultTol);

}  // namespace kcat
