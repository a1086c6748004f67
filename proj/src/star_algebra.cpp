#include "kcat/star_algebra.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "kcat/sampling.hpp"

namespace kcat {

namespace {

double rel(double residual, double scale) { return residual / scale; }

}  // namespace

WeightedAdjoint hilbert_adjoint(Index n) {
  WeightedAdjoint inv;
  inv.tag = InvolutionTag::adjoint;
  inv.weight = Matrix::Identity(n, n);
  inv.weight_inv = Matrix::Identity(n, n);
  return inv;
}

WeightedAdjoint krein_involution(const KreinSpaceSpec& space) {
  WeightedAdjoint inv;
  inv.tag = InvolutionTag::krein;
  inv.weight = space.gram;
  inv.weight_inv = space.gram.inverse();
  return inv;
}

Matrix MatrixStarAlgebra::star(const Matrix& x) const {
  if (const auto* w = std::get_if<WeightedAdjoint>(&involution)) {
    return w->weight_inv * x.adjoint() * w->weight;
  }
  const auto& cs = std::get<CoordinateStar>(involution);
  return basis.from_coords(cs.sigma * basis.coords(x).conjugate());
}

AdSymmetry make_ad_symmetry(const Matrix& s) {
  check_finite(s);
  if (s.rows() != s.cols()) throw InputError("symmetry: Ad matrix must be square");
  Eigen::FullPivLU<Matrix> lu(s);
  if (!lu.isInvertible()) throw InputError("symmetry: Ad matrix is singular");
  return AdSymmetry{s, lu.inverse()};
}

SymmetryAutomorphism identity_symmetry(Index ambient_dim) {
  return AdSymmetry{Matrix::Identity(ambient_dim, ambient_dim),
                    Matrix::Identity(ambient_dim, ambient_dim)};
}

Matrix apply_symmetry(const SymmetryAutomorphism& alpha, const MatrixStarAlgebra& algebra,
                      const Matrix& x) {
  if (const auto* ad = std::get_if<AdSymmetry>(&alpha)) {
    return ad->s * x * ad->s_inv;
  }
  const auto& lin = std::get<LinearSymmetry>(alpha);
  if (lin.coeffs.rows() != algebra.dim() || lin.coeffs.cols() != algebra.dim()) {
    throw InputError("symmetry: coordinate map does not match the algebra dimension");
  }
  return algebra.basis.from_coords(lin.coeffs * algebra.basis.coords(x));
}

std::optional<Matrix> definite_norm_weight(const Matrix& weight, double tol) {
  const double scale = 1.0 + weight.norm();
  if (hermiticity_residual(weight) > tol * scale) return std::nullopt;
  Matrix h = (weight + weight.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  const RealVector& vals = solver.eigenvalues();
  if (vals(0) > tol * scale) return h;
  if (vals(vals.size() - 1) < -tol * scale) return Matrix(-h);
  return std::nullopt;
}

NormFrame make_norm_frame(const Matrix& hpd_weight, double tol) {
  HermitianEigen eig = herm_eig(hpd_weight, tol);
  RealVector s(eig.eigenvalues.size());
  RealVector si(eig.eigenvalues.size());
  for (Index i = 0; i < s.size(); ++i) {
    if (eig.eigenvalues(i) <= 0.0) {
      throw InputError("norm frame: weight is not positive definite");
    }
    s(i) = std::sqrt(eig.eigenvalues(i));
    si(i) = 1.0 / s(i);
  }
  NormFrame frame;
  frame.sqrt = eig.eigenvectors * s.asDiagonal() * eig.eigenvectors.adjoint();
  frame.inv_sqrt = eig.eigenvectors * si.asDiagonal() * eig.eigenvectors.adjoint();
  return frame;
}

double framed_op_norm(const Matrix& x, const NormFrame& codomain, const NormFrame& domain) {
  return op_norm(codomain.sqrt * x * domain.inv_sqrt);
}

double AlgebraNorm::operator()(const Matrix& x) const {
  if (frame) return framed_op_norm(x, *frame, *frame);
  return op_norm(x);
}

AlgebraNorm algebra_norm(const MatrixStarAlgebra& algebra, double tol) {
  AlgebraNorm norm;
  if (const auto* w = std::get_if<WeightedAdjoint>(&algebra.involution)) {
    if (auto hpd = definite_norm_weight(w->weight, tol)) {
      norm.frame = make_norm_frame(*hpd, tol);
    }
  }
  return norm;
}

MatrixStarAlgebra algebra_from_generators(Index ambient_dim,
                                          const std::vector<Matrix>& generators,
                                          AlgebraInvolution involution, double tol) {
  const auto* w = std::get_if<WeightedAdjoint>(&involution);
  if (w == nullptr) {
    throw InputError("algebra_from_generators: closure needs a matrix-form involution");
  }
  if (w->weight.rows() != ambient_dim) {
    throw InputError("algebra_from_generators: involution weight shape mismatch");
  }
  for (const Matrix& g : generators) {
    if (g.rows() != ambient_dim || g.cols() != ambient_dim) {
      throw InputError("algebra_from_generators: generator shape mismatch");
    }
  }
  ClosureRule rule;
  rule.multiply = true;
  rule.unit = true;
  const Matrix wi = w->weight_inv;
  const Matrix ww = w->weight;
  rule.star = [wi, ww](const Matrix& x) { return Matrix(wi * x.adjoint() * ww); };

  MatrixStarAlgebra algebra;
  algebra.ambient_dim = ambient_dim;
  algebra.basis = saturate_span(ambient_dim, ambient_dim, generators, rule, tol);
  algebra.unit = Matrix::Identity(ambient_dim, ambient_dim);
  algebra.involution = std::move(involution);
  return algebra;
}

std::optional<Matrix> twisted_weight(const AlgebraInvolution& involution,
                                     const SymmetryAutomorphism& alpha) {
  const auto* w = std::get_if<WeightedAdjoint>(&involution);
  const auto* ad = std::get_if<AdSymmetry>(&alpha);
  if (w == nullptr || ad == nullptr) return std::nullopt;
  return Matrix(w->weight * ad->s_inv);
}

Report verify_krein_cstar(const MatrixStarAlgebra& algebra,
                          const SymmetryAutomorphism& alpha, int samples, double tol,
                          Rng& rng) {
  Report report;
  report.command = "verify_krein_cstar";
  const auto& basis = algebra.basis.elements();
  const Index dim = algebra.dim();

  auto act = [&](const Matrix& x) { return apply_symmetry(alpha, algebra, x); };

  // alpha an involutive unital *-automorphism preserving the span
  double worst_invol = 0.0;
  double worst_star = 0.0;
  double worst_span = 0.0;
  std::optional<Matrix> invol_witness;
  for (const Matrix& b : basis) {
    const Matrix ab = act(b);
    const double scale = 1.0 + b.norm();
    const double r_invol = rel((act(ab) - b).norm(), scale);
    if (r_invol > worst_invol) {
      worst_invol = r_invol;
      invol_witness = b;
    }
    worst_star = std::max(worst_star, rel((act(algebra.star(b)) - algebra.star(ab)).norm(), scale));
    worst_span = std::max(worst_span, rel(algebra.basis.span_residual(ab), scale));
  }
  auto& invol_rec = report.add("alpha_involutive", worst_invol, tol);
  if (!invol_rec.pass) invol_rec.witness = invol_witness;
  report.add("alpha_unital", (act(algebra.unit) - algebra.unit).norm(), tol);
  report.add("alpha_star_compatible", worst_star, tol);
  report.add("alpha_preserves_span", worst_span, tol);

  double worst_mult = 0.0;
  std::optional<Matrix> mult_witness;
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) {
      const Matrix& x = algebra.basis.element(i);
      const Matrix& y = algebra.basis.element(j);
      const double r =
          rel((act(x * y) - act(x) * act(y)).norm(), 1.0 + x.norm() * y.norm());
      if (r > worst_mult) {
        worst_mult = r;
        mult_witness = x * y;
      }
    }
  }
  auto& mult_rec = report.add("alpha_multiplicative", worst_mult, tol);
  if (!mult_rec.pass) mult_rec.witness = mult_witness;

  // C*-norm of the twisted involution; ambient operator norm when the
  // twisted weight is not definite (then no weighted C*-norm exists)
  AlgebraNorm norm;
  std::string norm_detail = "ambient operator norm";
  if (auto tw = twisted_weight(algebra.involution, alpha)) {
    if (auto hpd = definite_norm_weight(*tw, tol)) {
      norm.frame = make_norm_frame(*hpd, tol);
      norm_detail = "weighted operator norm from the twisted involution";
    }
  }
  report.add_bool("twisted_cstar_norm", true, norm_detail);

  // the twisted star, used for Hermiticity of alpha(x*) x
  auto twisted_star = [&](const Matrix& x) { return act(algebra.star(x)); };

  double worst_identity = 0.0;
  std::optional<Matrix> identity_witness;
  double worst_herm = 0.0;
  double worst_spec = 0.0;
  std::optional<Matrix> spec_witness;

  auto check_element = [&](const Matrix& x) {
    const Matrix y = act(algebra.star(x)) * x;
    const double nx = norm(x);
    const double r_id = std::abs(norm(y) - nx * nx) / (1.0 + nx * nx);
    if (r_id > worst_identity) {
      worst_identity = r_id;
      identity_witness = x;
    }
    const double y_scale = 1.0 + y.norm();
    worst_herm = std::max(worst_herm, rel((twisted_star(y) - y).norm(), y_scale));

    double neg = 0.0;
    if (norm.frame) {
      const Matrix h = norm.frame->sqrt * y * norm.frame->inv_sqrt;
      const Matrix hh = (h + h.adjoint()) / 2.0;
      Eigen::SelfAdjointEigenSolver<Matrix> solver(hh);
      neg = std::max(0.0, -solver.eigenvalues()(0)) + (h - h.adjoint()).norm() / 2.0;
    } else {
      Eigen::ComplexEigenSolver<Matrix> solver(y);
      double min_real = 0.0;
      double max_imag = 0.0;
      for (Index k = 0; k < solver.eigenvalues().size(); ++k) {
        min_real = std::min(min_real, solver.eigenvalues()(k).real());
        max_imag = std::max(max_imag, std::abs(solver.eigenvalues()(k).imag()));
      }
      neg = std::max(0.0, -min_real) + max_imag;
    }
    const double r_spec = rel(neg, y_scale);
    if (r_spec > worst_spec) {
      worst_spec = r_spec;
      spec_witness = x;
    }
  };

  for (const Matrix& b : basis) check_element(b);
  for (int s = 0; s < samples; ++s) check_element(random_span_element(rng, algebra.basis));

  auto& id_rec = report.add("cstar_identity", worst_identity, tol);
  if (!id_rec.pass) id_rec.witness = identity_witness;
  report.add("twisted_hermitian", worst_herm, tol);
  auto& spec_rec = report.add("positivity_twisted_sense", worst_spec, tol);
  if (!spec_rec.pass) spec_rec.witness = spec_witness;

  return report;
}

std::pair<SubspaceBasis, SubspaceBasis> even_odd_split(const MatrixStarAlgebra& algebra,
                                                       const SymmetryAutomorphism& alpha,
                                                       double tol) {
  std::vector<Matrix> even;
  std::vector<Matrix> odd;
  for (const Matrix& b : algebra.basis.elements()) {
    const Matrix ab = apply_symmetry(alpha, algebra, b);
    if ((apply_symmetry(alpha, algebra, ab) - b).norm() > tol * (1.0 + b.norm())) {
      throw InputError("even_odd_split: symmetry is not involutive on the algebra");
    }
    even.push_back((b + ab) / 2.0);
    odd.push_back((b - ab) / 2.0);
  }
  const Index n = algebra.ambient_dim;
  SubspaceBasis plus = orthonormalize_span(n, n, even, tol);
  SubspaceBasis minus = orthonormalize_span(n, n, odd, tol);
  if (plus.dim() + minus.dim() != algebra.dim()) {
    throw InputError("even_odd_split: eigenspaces do not resolve the algebra");
  }
  return {std::move(plus), std::move(minus)};
}

MatrixStarAlgebra twist_involution(const MatrixStarAlgebra& algebra,
                                   const SymmetryAutomorphism& alpha, double tol) {
  for (const Matrix& b : algebra.basis.elements()) {
    const Matrix ab = apply_symmetry(alpha, algebra, b);
    if ((apply_symmetry(alpha, algebra, ab) - b).norm() > tol * (1.0 + b.norm())) {
      throw InputError("twist_involution: symmetry is not involutive on the algebra");
    }
  }
  MatrixStarAlgebra twisted = algebra;
  const auto* w = std::get_if<WeightedAdjoint>(&algebra.involution);
  const auto* ad = std::get_if<AdSymmetry>(&alpha);
  if (w != nullptr && ad != nullptr) {
    WeightedAdjoint inv;
    inv.tag = InvolutionTag::twisted;
    inv.weight = w->weight * ad->s_inv;
    inv.weight_inv = ad->s * w->weight_inv;
    twisted.involution = std::move(inv);
    return twisted;
  }
  // coordinate fallback: record the twisted star columnwise over the basis
  CoordinateStar cs;
  cs.sigma = Matrix(algebra.dim(), algebra.dim());
  for (Index k = 0; k < algebra.dim(); ++k) {
    const Matrix t = apply_symmetry(alpha, algebra, algebra.star(algebra.basis.element(k)));
    cs.sigma.col(k) = algebra.basis.coords(t);
  }
  twisted.involution = std::move(cs);
  return twisted;
}

}  // namespace kcat
