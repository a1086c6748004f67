#include "kcat/matrix_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace kcat {

namespace {

Vector vectorize(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvectorize(const Vector& v, Index rows, Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

}  // namespace

void check_finite(const Matrix& m) {
  if (!m.allFinite()) throw InputError("matrix has non-finite entries");
}

double frob_norm(const Matrix& m) { return m.norm(); }

double hermiticity_residual(const Matrix& m) {
  if (m.rows() != m.cols()) throw InputError("hermiticity check needs a square matrix");
  return (m - m.adjoint()).norm();
}

double op_norm(const Matrix& m) {
  check_finite(m);
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

HermitianEigen herm_eig(const Matrix& m, double tol) {
  check_finite(m);
  if (m.rows() != m.cols()) throw InputError("herm_eig needs a square matrix");
  const double scale = 1.0 + m.norm();
  if (hermiticity_residual(m) > tol * scale) {
    throw InputError("herm_eig: input is not Hermitian within tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver((m + m.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success) throw InputError("herm_eig: eigensolver failed");
  return HermitianEigen{solver.eigenvalues(), solver.eigenvectors()};
}

bool is_positive(const Matrix& m, double tol) {
  check_finite(m);
  if (m.rows() != m.cols()) throw InputError("is_positive needs a square matrix");
  if (m.size() == 0) return true;
  const double scale = 1.0 + m.norm();
  if (hermiticity_residual(m) > tol * scale) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> solver((m + m.adjoint()) / 2.0);
  return solver.eigenvalues()(0) >= -tol * scale;
}

Matrix psd_sqrt(const Matrix& m, double tol) {
  HermitianEigen eig = herm_eig(m, tol);
  RealVector vals = eig.eigenvalues;
  for (Index i = 0; i < vals.size(); ++i) vals(i) = std::sqrt(std::max(0.0, vals(i)));
  return eig.eigenvectors * vals.asDiagonal() * eig.eigenvectors.adjoint();
}

Vector SubspaceBasis::coords(const Matrix& x) const {
  Vector c(dim());
  for (Index k = 0; k < dim(); ++k) {
    c(k) = (elements_[static_cast<size_t>(k)].adjoint() * x).trace();
  }
  return c;
}

Matrix SubspaceBasis::from_coords(const Vector& c) const {
  if (c.size() != dim()) throw InputError("from_coords: coefficient count mismatch");
  Matrix out = Matrix::Zero(rows_, cols_);
  for (Index k = 0; k < dim(); ++k) out += c(k) * elements_[static_cast<size_t>(k)];
  return out;
}

Matrix SubspaceBasis::project(const Matrix& x) const { return from_coords(coords(x)); }

double SubspaceBasis::span_residual(const Matrix& x) const {
  if (x.rows() != rows_ || x.cols() != cols_) {
    throw InputError("span_residual: shape mismatch with ambient");
  }
  return (x - project(x)).norm();
}

bool SubspaceBasis::contains(const Matrix& x, double tol) const {
  return span_residual(x) <= tol * (1.0 + x.norm());
}

bool SubspaceBasis::absorb(const Matrix& x, double tol) {
  if (rows_ == 0 && cols_ == 0) {
    rows_ = x.rows();
    cols_ = x.cols();
  }
  if (x.rows() != rows_ || x.cols() != cols_) {
    throw InputError("absorb: shape mismatch with ambient");
  }
  Matrix r = x - project(x);
  r -= project(r);  // second pass keeps near-parallel candidates orthogonal
  if (r.norm() <= tol * (1.0 + x.norm())) return false;
  elements_.push_back(r / r.norm());
  return true;
}

SubspaceBasis orthonormalize_span(Index rows, Index cols,
                                  const std::vector<Matrix>& gens, double tol) {
  SubspaceBasis out(rows, cols);
  if (gens.empty()) return out;
  Matrix stacked(static_cast<Index>(gens.size()), rows * cols);
  for (size_t i = 0; i < gens.size(); ++i) {
    const Matrix& g = gens[i];
    if (g.rows() != rows || g.cols() != cols) {
      throw InputError("orthonormalize_span: generators disagree on ambient shape");
    }
    check_finite(g);
    stacked.row(static_cast<Index>(i)) = vectorize(g).transpose();
  }
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return out;
  const double cut = tol * (1.0 + sv(0));
  for (Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= cut) break;
    // row space of `stacked` is spanned by conjugated columns of V
    out.push_raw(unvectorize(svd.matrixV().col(k).conjugate(), rows, cols));
  }
  return out;
}

SubspaceBasis saturate_span(Index rows, Index cols, const std::vector<Matrix>& seed,
                            const ClosureRule& rule, double tol) {
  if (rule.multiply && rows != cols) {
    throw InputError("saturate_span: multiplicative closure needs square matrices");
  }
  SubspaceBasis basis(rows, cols);
  if (rule.unit) {
    if (rows != cols) throw InputError("saturate_span: unit rule needs square matrices");
    basis.absorb(Matrix::Identity(rows, cols), tol);
  }
  for (const Matrix& s : seed) {
    if (s.rows() != rows || s.cols() != cols) {
      throw InputError("saturate_span: seed shape mismatch");
    }
    check_finite(s);
    basis.absorb(s, tol);
  }

  const Index max_dim = rows * cols;
  bool grew = true;
  while (grew && basis.dim() < max_dim) {
    grew = false;
    const Index n = basis.dim();
    if (rule.star) {
      for (Index i = 0; i < n; ++i) {
        grew |= basis.absorb((*rule.star)(basis.element(i)), tol);
      }
    }
    if (rule.multiply) {
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
          grew |= basis.absorb(basis.element(i) * basis.element(j), tol);
          if (basis.dim() >= max_dim) break;
        }
        if (basis.dim() >= max_dim) break;
      }
    }
  }
  return basis;
}

}  // namespace kcat
