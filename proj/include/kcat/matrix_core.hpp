#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "kcat/types.hpp"

namespace kcat {

/// Eigendecomposition of a Hermitian matrix: M = V diag(eigenvalues) V†
/// with eigenvalues ascending and V unitary.
struct HermitianEigen {
  RealVector eigenvalues;
  Matrix eigenvectors;
};

/// Trace-orthonormal basis of a subspace of rows x cols complex matrices.
/// The pairing is <M, N> = trace(M† N), i.e. the standard inner product on
/// vectorized matrices, so coordinates are plain dot products.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;
  SubspaceBasis(Index rows, Index cols) : rows_(rows), cols_(cols) {}

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index dim() const { return static_cast<Index>(elements_.size()); }
  const std::vector<Matrix>& elements() const { return elements_; }
  const Matrix& element(Index k) const { return elements_.at(static_cast<size_t>(k)); }

  Vector coords(const Matrix& x) const;
  Matrix from_coords(const Vector& c) const;
  Matrix project(const Matrix& x) const;
  /// Frobenius norm of the component of x orthogonal to the span.
  double span_residual(const Matrix& x) const;
  bool contains(const Matrix& x, double tol) const;

  /// Appends the normalized orthogonal component of x when it is larger than
  /// tol * (1 + |x|). Returns true when the basis grew.
  bool absorb(const Matrix& x, double tol);

  /// Pushes an element assumed to be already orthonormal against the basis.
  void push_raw(Matrix m) { elements_.push_back(std::move(m)); }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Matrix> elements_;
};

/// Which closure operations saturate_span applies. The star map is the
/// involution that closes the span; leaving it empty disables that rule.
struct ClosureRule {
  bool multiply = true;
  bool unit = true;
  std::optional<std::function<Matrix(const Matrix&)>> star;
};

void check_finite(const Matrix& m);

double frob_norm(const Matrix& m);

/// Frobenius norm of M - M†; zero exactly when M is Hermitian.
double hermiticity_residual(const Matrix& m);

/// Largest singular value. Throws InputError on non-finite entries.
double op_norm(const Matrix& m);

/// Hermitian eigendecomposition. Throws InputError when the input is not
/// Hermitian within tol * (1 + |M|).
HermitianEigen herm_eig(const Matrix& m, double tol = kDefaultTol);

/// True iff M is Hermitian within tolerance and its minimum eigenvalue is
/// >= -tol * (1 + |M|). Throws InputError for non-square input.
bool is_positive(const Matrix& m, double tol = kDefaultTol);

/// Hermitian square root of a positive semidefinite matrix; eigenvalues
/// below the tolerance floor are clamped to zero.
Matrix psd_sqrt(const Matrix& m, double tol = kDefaultTol);

/// Trace-orthonormal basis of the span of the given matrices, rank decided
/// by singular values against tol * (1 + largest singular value).
SubspaceBasis orthonormalize_span(Index rows, Index cols,
                                  const std::vector<Matrix>& gens, double tol = kDefaultTol);

/// Smallest subspace containing the seeds that is closed under the rule.
/// Terminates because the dimension is bounded by rows * cols.
SubspaceBasis saturate_span(Index rows, Index cols, const std::vector<Matrix>& seed,
                            const ClosureRule& rule, double tol = kDefaultTol);

}  // namespace kcat
