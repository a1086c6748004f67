#include "kcat/gns_repr.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

#include "kcat/sampling.hpp"

namespace kcat {

namespace {

double rel(double residual, double scale) { return residual / scale; }

Vector vectorize(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

/// HPD inner-product weights per object (identity when the involution is
/// the plain adjoint or carries no definite weight).
std::vector<Matrix> state_weights(const OperatorCategory& cat, double tol) {
  std::vector<Matrix> weights;
  const auto* w = std::get_if<WeightFamily>(&cat.involution);
  bool definite = w != nullptr;
  if (definite) {
    for (const Matrix& weight : w->weight) {
      auto hpd = definite_norm_weight(weight, tol);
      if (!hpd) {
        definite = false;
        break;
      }
      weights.push_back(*hpd);
    }
  }
  if (!definite) {
    weights.clear();
    for (const auto& obj : cat.objects) {
      weights.push_back(Matrix::Identity(obj.dim, obj.dim));
    }
  }
  return weights;
}

/// Slot layout of the direct sum over sources of Hom(source, target).
struct ObjectLayout {
  std::vector<Index> offset;  // per source object
  Index total = 0;
};

ObjectLayout layout_for(const OperatorCategory& cat, int target) {
  ObjectLayout layout;
  for (int s = 0; s < cat.object_count(); ++s) {
    layout.offset.push_back(layout.total);
    layout.total += cat.hom(s, target).dim();
  }
  return layout;
}

Matrix block_gram(const OperatorCategory& cat, const CategoryState& omega, int target,
                  const ObjectLayout& layout) {
  Matrix gram = Matrix::Zero(layout.total, layout.total);
  for (int a = 0; a < cat.object_count(); ++a) {
    const auto& ha = cat.hom(a, target);
    for (Index k = 0; k < ha.dim(); ++k) {
      const Matrix ys = cat.star(a, target, ha.element(k));  // Hom(target, a)
      for (int b = 0; b < cat.object_count(); ++b) {
        const auto& hb = cat.hom(b, target);
        for (Index l = 0; l < hb.dim(); ++l) {
          const Matrix prod = ys * hb.element(l);  // Hom(b, a)
          gram(layout.offset[static_cast<size_t>(a)] + k,
               layout.offset[static_cast<size_t>(b)] + l) = omega.value(cat, b, a, prod);
        }
      }
    }
  }
  return (gram + gram.adjoint()) / 2.0;
}

struct Reduction {
  Matrix map;       // rank x total, reduced coordinates = map * raw
  Matrix pinv;      // total x rank, right inverse of map
  Index rank = 0;
};

Reduction reduce_gram(const Matrix& gram, double tol) {
  Reduction red;
  if (gram.rows() == 0) {
    red.map = Matrix(0, 0);
    red.pinv = Matrix(0, 0);
    return red;
  }
  HermitianEigen eig = herm_eig(gram, std::max(tol, 1e-7));
  const double cut = tol * (1.0 + std::max(std::abs(eig.eigenvalues(0)),
                                           std::abs(eig.eigenvalues(eig.eigenvalues.size() - 1))));
  std::vector<Index> kept;
  for (Index i = eig.eigenvalues.size() - 1; i >= 0; --i) {
    if (eig.eigenvalues(i) > cut) kept.push_back(i);  // descending order
  }
  red.rank = static_cast<Index>(kept.size());
  red.map = Matrix(red.rank, gram.rows());
  red.pinv = Matrix(gram.rows(), red.rank);
  for (Index r = 0; r < red.rank; ++r) {
    const double s = std::sqrt(eig.eigenvalues(kept[static_cast<size_t>(r)]));
    red.map.row(r) = s * eig.eigenvectors.col(kept[static_cast<size_t>(r)]).adjoint();
    red.pinv.col(r) = eig.eigenvectors.col(kept[static_cast<size_t>(r)]) / s;
  }
  return red;
}

}  // namespace

Complex CategoryState::value(const OperatorCategory& cat, int from, int to,
                             const Matrix& x) const {
  auto it = values.find({from, to});
  if (it == values.end()) throw InputError("state: missing functional for a hom-space");
  const Vector c = cat.hom(from, to).coords(x);
  if (c.size() != it->second.size()) {
    throw InputError("state: coefficient vector does not match the hom basis");
  }
  Complex out = 0.0;
  for (Index k = 0; k < c.size(); ++k) out += it->second(k) * c(k);
  return out;
}

CategoryState vector_state(const OperatorCategory& cat, const std::vector<Vector>& vectors,
                           double tol) {
  if (static_cast<int>(vectors.size()) != cat.object_count()) {
    throw InputError("vector_state: one vector per object required");
  }
  const std::vector<Matrix> weights = state_weights(cat, tol);
  std::vector<Vector> xi = vectors;
  for (int a = 0; a < cat.object_count(); ++a) {
    if (xi[static_cast<size_t>(a)].size() != cat.objects[static_cast<size_t>(a)].dim) {
      throw InputError("vector_state: vector dimension mismatch");
    }
    const Complex q = xi[static_cast<size_t>(a)].adjoint() * weights[static_cast<size_t>(a)] *
                      xi[static_cast<size_t>(a)];
    if (q.real() <= 0.0) throw InputError("vector_state: vector has nonpositive weight norm");
    xi[static_cast<size_t>(a)] /= std::sqrt(q.real());
  }
  CategoryState omega;
  for (const auto& [key, basis] : cat.homs) {
    const auto [a, b] = key;
    Vector vals(basis.dim());
    for (Index k = 0; k < basis.dim(); ++k) {
      vals(k) = (xi[static_cast<size_t>(b)].adjoint() * weights[static_cast<size_t>(b)] *
                 basis.element(k) * xi[static_cast<size_t>(a)])(0, 0);
    }
    omega.values[key] = std::move(vals);
  }
  return omega;
}

CategoryState trace_state(const OperatorCategory& cat) {
  CategoryState omega;
  for (const auto& [key, basis] : cat.homs) {
    Vector vals = Vector::Zero(basis.dim());
    if (key.first == key.second) {
      for (Index k = 0; k < basis.dim(); ++k) {
        vals(k) = basis.element(k).trace() / double(basis.rows());
      }
    }
    omega.values[key] = std::move(vals);
  }
  return omega;
}

CategoryState mix_states(const std::vector<CategoryState>& states,
                         const std::vector<double>& weights) {
  if (states.empty() || states.size() != weights.size()) {
    throw InputError("mix_states: one weight per state required");
  }
  CategoryState out;
  for (const auto& [key, vals] : states[0].values) {
    Vector acc = weights[0] * vals;
    for (size_t i = 1; i < states.size(); ++i) {
      acc += weights[i] * states[i].values.at(key);
    }
    out.values[key] = std::move(acc);
  }
  return out;
}

Report verify_state(const OperatorCategory& cat, const CategoryState& omega, double tol) {
  Report report;
  report.command = "verify_state";
  for (const auto& [key, basis] : cat.homs) {
    auto it = omega.values.find(key);
    if (it == omega.values.end() || it->second.size() != basis.dim()) {
      throw InputError("verify_state: coefficient vectors do not match the hom bases");
    }
  }

  double worst_herm = 0.0;
  for (const auto& [key, basis] : cat.homs) {
    const auto [a, b] = key;
    for (Index k = 0; k < basis.dim(); ++k) {
      const Complex direct = omega.values.at(key)(k);
      const Complex starred = omega.value(cat, b, a, cat.star(a, b, basis.element(k)));
      worst_herm = std::max(worst_herm,
                            std::abs(starred - std::conj(direct)) / (1.0 + std::abs(direct)));
    }
  }
  report.add("state_hermitian", worst_herm, tol);

  double worst_norm = 0.0;
  for (int a = 0; a < cat.object_count(); ++a) {
    worst_norm =
        std::max(worst_norm, std::abs(omega.value(cat, a, a, cat.identity(a)) - Complex(1.0)));
  }
  report.add("state_normalized", worst_norm, tol);

  double worst_pair = 0.0;
  for (const auto& [key, basis] : cat.homs) {
    const auto [a, b] = key;
    if (basis.dim() == 0) continue;
    Matrix gram(basis.dim(), basis.dim());
    for (Index k = 0; k < basis.dim(); ++k) {
      const Matrix ys = cat.star(a, b, basis.element(k));
      for (Index l = 0; l < basis.dim(); ++l) {
        gram(k, l) = omega.value(cat, a, a, ys * basis.element(l));
      }
    }
    const Matrix h = (gram + gram.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    worst_pair = std::max(worst_pair,
                          rel(std::max(0.0, -solver.eigenvalues()(0)) + (gram - h).norm(),
                              1.0 + gram.norm()));
  }
  report.add("state_positive_per_hom", worst_pair, tol);

  double worst_block = 0.0;
  for (int b = 0; b < cat.object_count(); ++b) {
    const ObjectLayout layout = layout_for(cat, b);
    if (layout.total == 0) continue;
    const Matrix gram = block_gram(cat, omega, b, layout);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
    worst_block = std::max(
        worst_block, rel(std::max(0.0, -solver.eigenvalues()(0)), 1.0 + gram.norm()));
  }
  report.add("state_positive_block", worst_block, tol);
  return report;
}

GNSRepresentation gns(const OperatorCategory& cat, const CategoryState& omega, double tol) {
  Report state_report = verify_state(cat, omega, tol);
  if (!state_report.pass()) {
    throw InputError("gns: state fails verification: " + state_report.first_failure()->name);
  }

  const int n = cat.object_count();
  std::vector<ObjectLayout> layouts;
  std::vector<Reduction> reductions;
  GNSRepresentation rep;
  for (int b = 0; b < n; ++b) {
    layouts.push_back(layout_for(cat, b));
    const Matrix gram = block_gram(cat, omega, b, layouts.back());
    reductions.push_back(reduce_gram(gram, tol));
    rep.space_dims.push_back(reductions.back().rank);

    // per-pair dimensions from the diagonal sub-Grams
    for (int a = 0; a < n; ++a) {
      const Index off = layouts.back().offset[static_cast<size_t>(a)];
      const Index d = cat.hom(a, b).dim();
      rep.pair_dims[{a, b}] = reduce_gram(gram.block(off, off, d, d), tol).rank;
    }
  }

  rep.pi.object_map.resize(static_cast<size_t>(n));
  for (int a = 0; a < n; ++a) rep.pi.object_map[static_cast<size_t>(a)] = a;
  rep.pi.target_dims = rep.space_dims;

  // left multiplication in raw coordinates, then compressed by the
  // reductions: pi(x) = R_b M_x R_a^+
  for (const auto& [key, basis] : cat.homs) {
    const auto [a, b] = key;
    auto& imgs = rep.pi.images[key];
    for (Index k = 0; k < basis.dim(); ++k) {
      const Matrix& x = basis.element(k);
      Matrix mx = Matrix::Zero(layouts[static_cast<size_t>(b)].total,
                               layouts[static_cast<size_t>(a)].total);
      for (int s = 0; s < n; ++s) {
        const auto& hsa = cat.hom(s, a);
        const auto& hsb = cat.hom(s, b);
        for (Index j = 0; j < hsa.dim(); ++j) {
          mx.block(layouts[static_cast<size_t>(b)].offset[static_cast<size_t>(s)],
                   layouts[static_cast<size_t>(a)].offset[static_cast<size_t>(s)] + j,
                   hsb.dim(), 1) = hsb.coords(x * hsa.element(j));
        }
      }
      imgs.push_back(reductions[static_cast<size_t>(b)].map * mx *
                     reductions[static_cast<size_t>(a)].pinv);
    }
  }

  for (int a = 0; a < n; ++a) {
    Vector raw = Vector::Zero(layouts[static_cast<size_t>(a)].total);
    const Vector unit_coords = cat.hom(a, a).coords(cat.identity(a));
    raw.segment(layouts[static_cast<size_t>(a)].offset[static_cast<size_t>(a)],
                unit_coords.size()) = unit_coords;
    rep.cyclic.push_back(reductions[static_cast<size_t>(a)].map * raw);
  }

  // self-checks: cyclic norms and reconstruction
  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    worst = std::max(worst, std::abs(rep.cyclic[static_cast<size_t>(a)].norm() - 1.0));
  }
  for (const auto& [key, basis] : cat.homs) {
    const auto [a, b] = key;
    for (Index k = 0; k < basis.dim(); ++k) {
      const Complex expected = omega.values.at(key)(k);
      const Complex got = rep.cyclic[static_cast<size_t>(b)].adjoint() *
                          rep.pi.images.at(key)[static_cast<size_t>(k)] *
                          rep.cyclic[static_cast<size_t>(a)];
      worst = std::max(worst, std::abs(got - expected) / (1.0 + std::abs(expected)));
    }
  }
  if (worst > tol) {
    throw ConstructionError("gns: reconstruction self-check failed, residual " +
                            std::to_string(worst));
  }
  return rep;
}

std::vector<CategoryState> vector_states(const OperatorCategory& cat, int count_per_object,
                                         Rng& rng, double tol) {
  const int n = cat.object_count();
  const std::vector<Matrix> weights = state_weights(cat, tol);
  std::vector<std::vector<Vector>> pools(static_cast<size_t>(n));

  // per hom basis element: unit maximizer of |x xi| in the weighted norms,
  // so the resulting state attains omega(x* x) = |x|^2
  for (const auto& [key, basis] : cat.homs) {
    const auto [a, b] = key;
    for (Index k = 0; k < basis.dim(); ++k) {
      const Matrix& x = basis.element(k);
      const Matrix quad = x.adjoint() * weights[static_cast<size_t>(b)] * x;
      Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(
          (quad + quad.adjoint()) / 2.0, weights[static_cast<size_t>(a)]);
      if (solver.info() == Eigen::Success) {
        pools[static_cast<size_t>(a)].push_back(
            solver.eigenvectors().col(solver.eigenvectors().cols() - 1));
      }
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int c = 0; c < count_per_object; ++c) {
      pools[static_cast<size_t>(a)].push_back(
          random_unit_vector(rng, cat.objects[static_cast<size_t>(a)].dim));
    }
  }

  size_t n_states = 0;
  for (const auto& pool : pools) n_states = std::max(n_states, pool.size());
  std::vector<CategoryState> states;
  for (size_t i = 0; i < n_states; ++i) {
    std::vector<Vector> family;
    for (int a = 0; a < n; ++a) {
      const auto& pool = pools[static_cast<size_t>(a)];
      family.push_back(pool[i % pool.size()]);
    }
    states.push_back(vector_state(cat, family, tol));
  }
  return states;
}

namespace {

GNSRepresentation direct_sum(const OperatorCategory& cat,
                             const std::vector<GNSRepresentation>& reps) {
  GNSRepresentation total;
  const int n = cat.object_count();
  total.space_dims.assign(static_cast<size_t>(n), 0);
  for (const auto& rep : reps) {
    for (int a = 0; a < n; ++a) {
      total.space_dims[static_cast<size_t>(a)] += rep.space_dims[static_cast<size_t>(a)];
    }
    for (const auto& [key, d] : rep.pair_dims) total.pair_dims[key] += d;
  }
  total.pi.object_map.resize(static_cast<size_t>(n));
  for (int a = 0; a < n; ++a) total.pi.object_map[static_cast<size_t>(a)] = a;
  total.pi.target_dims = total.space_dims;

  for (const auto& [key, basis] : cat.homs) {
    const auto [a, b] = key;
    auto& imgs = total.pi.images[key];
    for (Index k = 0; k < basis.dim(); ++k) {
      Matrix big = Matrix::Zero(total.space_dims[static_cast<size_t>(b)],
                                total.space_dims[static_cast<size_t>(a)]);
      Index row = 0;
      Index col = 0;
      for (const auto& rep : reps) {
        const Matrix& blk = rep.pi.images.at(key)[static_cast<size_t>(k)];
        big.block(row, col, blk.rows(), blk.cols()) = blk;
        row += blk.rows();
        col += blk.cols();
      }
      imgs.push_back(std::move(big));
    }
  }
  // cyclic vector of the first summand, zero-padded
  for (int a = 0; a < n; ++a) {
    Vector xi = Vector::Zero(total.space_dims[static_cast<size_t>(a)]);
    if (!reps.empty()) {
      xi.segment(0, reps[0].cyclic[static_cast<size_t>(a)].size()) =
          reps[0].cyclic[static_cast<size_t>(a)];
    }
    total.cyclic.push_back(std::move(xi));
  }
  return total;
}

bool is_faithful(const OperatorCategory& cat, const GNSRepresentation& rep, double tol) {
  for (const auto& [key, basis] : cat.homs) {
    if (basis.dim() == 0) continue;
    const auto& imgs = rep.pi.images.at(key);
    Matrix stacked(imgs[0].size(), basis.dim());
    for (Index k = 0; k < basis.dim(); ++k) {
      stacked.col(k) = vectorize(imgs[static_cast<size_t>(k)]);
    }
    Eigen::JacobiSVD<Matrix> svd(stacked);
    const auto& sv = svd.singularValues();
    if (sv.size() < basis.dim() || sv(basis.dim() - 1) <= tol * (1.0 + sv(0))) {
      return false;
    }
  }
  return true;
}

}  // namespace

GNSRepresentation gelfand_naimark(const OperatorCategory& cat, int samples, double tol,
                                  Rng& rng) {
  Report pre = verify_cstar_category(cat, samples, tol, rng);
  if (!pre.pass()) {
    throw InputError("gelfand_naimark: input fails verify_cstar_category: " +
                     pre.first_failure()->name);
  }
  std::vector<CategoryState> states = vector_states(cat, 2, rng, tol);
  constexpr size_t kMaxStates = 24;
  if (states.size() > kMaxStates) states.resize(kMaxStates);

  std::vector<GNSRepresentation> reps;
  for (const auto& omega : states) reps.push_back(gns(cat, omega, tol));
  GNSRepresentation total = direct_sum(cat, reps);

  for (int attempt = 0; attempt < 4 && !is_faithful(cat, total, tol); ++attempt) {
    std::vector<Vector> family;
    for (const auto& obj : cat.objects) family.push_back(random_unit_vector(rng, obj.dim));
    reps.push_back(gns(cat, vector_state(cat, family, tol), tol));
    total = direct_sum(cat, reps);
  }
  if (!is_faithful(cat, total, tol)) {
    Report report;
    report.command = "gelfand_naimark";
    report.add_bool("faithful", false, "representation rank deficient on a hom-space");
    throw CertificateError("gelfand_naimark: representation is not faithful", report);
  }

  // isometry certificate, on bases and random samples
  CategoryNorm norm = category_norm(cat, tol);
  double worst = 0.0;
  std::optional<Matrix> witness;
  auto check = [&](int a, int b, const Matrix& x) {
    const double nx = norm(a, b, x);
    const double r = std::abs(op_norm(total.pi.apply(cat, a, b, x)) - nx) / (1.0 + nx);
    if (r > worst) {
      worst = r;
      witness = x;
    }
  };
  std::vector<HomKey> keys;
  for (const auto& [key, basis] : cat.homs) {
    for (Index k = 0; k < basis.dim(); ++k) check(key.first, key.second, basis.element(k));
    if (basis.dim() > 0) keys.push_back(key);
  }
  if (!keys.empty()) {
    std::uniform_int_distribution<size_t> pick(0, keys.size() - 1);
    for (int s = 0; s < samples; ++s) {
      const HomKey key = keys[pick(rng)];
      check(key.first, key.second, random_span_element(rng, cat.hom(key.first, key.second)));
    }
  }
  if (worst > tol) {
    Report report;
    report.command = "gelfand_naimark";
    auto& rec = report.add("isometric", worst, tol);
    rec.witness = witness;
    throw CertificateError("gelfand_naimark: isometry certificate failed", report);
  }
  return total;
}

namespace {

Matrix assemble_blocks(const Matrix& pp, const Matrix& mp, const Matrix& pm,
                       const Matrix& mm) {
  Matrix out(pp.rows() + pm.rows(), pp.cols() + mp.cols());
  out.topLeftCorner(pp.rows(), pp.cols()) = pp;
  out.topRightCorner(mp.rows(), mp.cols()) = mp;
  out.bottomLeftCorner(pm.rows(), pm.cols()) = pm;
  out.bottomRightCorner(mm.rows(), mm.cols()) = mm;
  return out;
}

Matrix signature_matrix(Index plus, Index minus) {
  Matrix j = Matrix::Identity(plus + minus, plus + minus);
  j.bottomRightCorner(minus, minus) *= -1.0;
  return j;
}

}  // namespace

KreinRepresentation represent_krein_algebra(const MatrixStarAlgebra& algebra,
                                            const SymmetryAutomorphism& alpha, int samples,
                                            double tol, Rng& rng) {
  Report input_report = verify_krein_cstar(algebra, alpha, samples, tol, rng);
  if (!input_report.pass()) {
    throw InputError("represent_krein_algebra: input fails verify_krein_cstar: " +
                     input_report.first_failure()->name);
  }

  auto [cat, csym] = krein_link(algebra, alpha, tol);
  const OperatorCategory twisted = twist_category(cat, csym, tol);
  const GNSRepresentation rho = gelfand_naimark(twisted, samples, tol, rng);

  const Index rp = rho.space_dims[0];
  const Index rm = rho.space_dims[1];
  const Matrix j = signature_matrix(rp, rm);

  KreinRepresentation rep;
  rep.spaces.push_back(make_krein_space(j, tol));
  rep.symmetries.push_back(j);
  rep.signatures.emplace_back(rp, rm);
  rep.pi.object_map = {0};
  rep.pi.target_dims = {rp + rm};

  auto act = [&](const Matrix& x) { return apply_symmetry(alpha, algebra, x); };
  auto& imgs = rep.pi.images[{0, 0}];
  for (Index k = 0; k < algebra.dim(); ++k) {
    const Matrix& x = algebra.basis.element(k);
    const Matrix xp = (x + act(x)) / 2.0;
    const Matrix xm = (x - act(x)) / 2.0;
    imgs.push_back(assemble_blocks(rho.pi.apply(twisted, 0, 0, xp),
                                   rho.pi.apply(twisted, 1, 0, xm),
                                   rho.pi.apply(twisted, 0, 1, xm),
                                   rho.pi.apply(twisted, 1, 1, xp)));
  }

  const OperatorCategory algebra_cat = one_object_category(algebra);
  auto pi_of = [&](const Matrix& x) { return rep.pi.apply(algebra_cat, 0, 0, x); };

  Report& cert = rep.certificates;
  cert.command = "represent_krein_algebra";

  double worst_mult = 0.0;
  for (Index i = 0; i < algebra.dim(); ++i) {
    for (Index l = 0; l < algebra.dim(); ++l) {
      const Matrix p = algebra.basis.element(i) * algebra.basis.element(l);
      const double r = rel((pi_of(p) - imgs[static_cast<size_t>(i)] *
                                          imgs[static_cast<size_t>(l)]).norm(),
                           1.0 + p.norm());
      worst_mult = std::max(worst_mult, r);
    }
  }
  cert.add("pi_multiplicative", worst_mult, tol);
  cert.add("pi_unital", (pi_of(algebra.unit) - Matrix::Identity(rp + rm, rp + rm)).norm(), tol);

  const MatrixStarAlgebra twisted_alg = twist_involution(algebra, alpha, tol);
  double worst_twisted = 0.0;
  double worst_krein = 0.0;
  double worst_covariant = 0.0;
  for (Index k = 0; k < algebra.dim(); ++k) {
    const Matrix& x = algebra.basis.element(k);
    const Matrix px = imgs[static_cast<size_t>(k)];
    const double scale = 1.0 + x.norm();
    worst_twisted =
        std::max(worst_twisted, rel((pi_of(twisted_alg.star(x)) - px.adjoint()).norm(), scale));
    worst_krein = std::max(
        worst_krein, rel((pi_of(algebra.star(x)) - j * px.adjoint() * j).norm(), scale));
    worst_covariant =
        std::max(worst_covariant, rel((pi_of(act(x)) - j * px * j).norm(), scale));
  }
  cert.add("twisted_involution_to_adjoint", worst_twisted, tol);
  cert.add("involution_to_krein_adjoint", worst_krein, tol);
  cert.add("alpha_covariant", worst_covariant, tol);

  // faithfulness: the coefficient map x -> pi(x) has full rank
  Matrix stacked(imgs[0].size(), algebra.dim());
  for (Index k = 0; k < algebra.dim(); ++k) {
    stacked.col(k) = vectorize(imgs[static_cast<size_t>(k)]);
  }
  Eigen::JacobiSVD<Matrix> svd(stacked);
  const auto& sv = svd.singularValues();
  const bool faithful =
      sv.size() >= algebra.dim() && sv(algebra.dim() - 1) > tol * (1.0 + sv(0));
  cert.add_bool("faithful", faithful,
                "smallest stacked singular value " +
                    std::to_string(sv.size() > 0 ? sv(sv.size() - 1) : 0.0));

  if (!cert.pass()) {
    throw CertificateError("represent_krein_algebra: certificates failed", cert);
  }
  return rep;
}

KreinRepresentation represent_krein_category(const OperatorCategory& cat,
                                             const CategorySymmetry& alpha, int samples,
                                             double tol, Rng& rng) {
  Report input_report = verify_krein_cstar_category(cat, alpha, samples, tol, rng);
  if (!input_report.pass()) {
    throw InputError("represent_krein_category: input fails verify_krein_cstar_category: " +
                     input_report.first_failure()->name);
  }

  auto [doubled, dsym] = doubling(cat, alpha, tol);
  const OperatorCategory twisted = twist_category(doubled, dsym, tol);
  const GNSRepresentation rho = gelfand_naimark(twisted, samples, tol, rng);

  const int n = cat.object_count();
  KreinRepresentation rep;
  for (int a = 0; a < n; ++a) {
    const Index rp = rho.space_dims[static_cast<size_t>(2 * a)];
    const Index rm = rho.space_dims[static_cast<size_t>(2 * a + 1)];
    const Matrix j = signature_matrix(rp, rm);
    rep.spaces.push_back(make_krein_space(j, tol));
    rep.symmetries.push_back(j);
    rep.signatures.emplace_back(rp, rm);
    rep.pi.object_map.push_back(a);
    rep.pi.target_dims.push_back(rp + rm);
  }

  auto act = [&](int a, int b, const Matrix& x) {
    return apply_symmetry(alpha, cat, a, b, x);
  };
  for (const auto& [key, basis] : cat.homs) {
    const auto [a, b] = key;
    auto& imgs = rep.pi.images[key];
    for (Index k = 0; k < basis.dim(); ++k) {
      const Matrix& x = basis.element(k);
      const Matrix xp = (x + act(a, b, x)) / 2.0;
      const Matrix xm = (x - act(a, b, x)) / 2.0;
      imgs.push_back(assemble_blocks(rho.pi.apply(twisted, 2 * a, 2 * b, xp),
                                     rho.pi.apply(twisted, 2 * a + 1, 2 * b, xm),
                                     rho.pi.apply(twisted, 2 * a, 2 * b + 1, xm),
                                     rho.pi.apply(twisted, 2 * a + 1, 2 * b + 1, xp)));
    }
  }

  Report& cert = rep.certificates;
  cert.command = "represent_krein_category";

  auto pi_of = [&](int a, int b, const Matrix& x) { return rep.pi.apply(cat, a, b, x); };

  double worst_unital = 0.0;
  for (int a = 0; a < n; ++a) {
    const Index d = rep.pi.target_dims[static_cast<size_t>(a)];
    worst_unital = std::max(
        worst_unital, (pi_of(a, a, cat.identity(a)) - Matrix::Identity(d, d)).norm());
  }
  cert.add("pi_unital", worst_unital, tol);

  double worst_mult = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        const auto& ab = cat.hom(a, b);
        const auto& bc = cat.hom(b, c);
        for (Index i = 0; i < bc.dim(); ++i) {
          for (Index l = 0; l < ab.dim(); ++l) {
            const Matrix p = bc.element(i) * ab.element(l);
            const Matrix lhs = pi_of(a, c, cat.hom(a, c).project(p));
            const Matrix rhs = pi_of(b, c, bc.element(i)) * pi_of(a, b, ab.element(l));
            worst_mult = std::max(worst_mult, rel((lhs - rhs).norm(), 1.0 + p.norm()));
          }
        }
      }
    }
  }
  cert.add("pi_functorial", worst_mult, tol);

  double worst_block = 0.0;
  double worst_covariant = 0.0;
  double worst_krein = 0.0;
  double worst_twisted = 0.0;
  for (const auto& [key, basis] : cat.homs) {
    const auto [a, b] = key;
    const Matrix& ja = rep.symmetries[static_cast<size_t>(a)];
    const Matrix& jb = rep.symmetries[static_cast<size_t>(b)];
    for (Index k = 0; k < basis.dim(); ++k) {
      const Matrix& x = basis.element(k);
      const Matrix px = rep.pi.images.at(key)[static_cast<size_t>(k)];
      const double scale = 1.0 + x.norm();
      const Matrix p_alpha = pi_of(a, b, act(a, b, x));
      worst_covariant = std::max(worst_covariant, rel((p_alpha - jb * px * ja).norm(), scale));
      // block form: the even/odd parts land on diagonal/antidiagonal blocks,
      // certified through the independent J-conjugation route
      const Matrix p_even = pi_of(a, b, (x + act(a, b, x)) / 2.0);
      const Matrix p_odd = pi_of(a, b, (x - act(a, b, x)) / 2.0);
      worst_block = std::max(worst_block,
                             rel((p_even - (px + jb * px * ja) / 2.0).norm() +
                                     (p_odd - (px - jb * px * ja) / 2.0).norm(),
                                 scale));
      worst_krein = std::max(
          worst_krein,
          rel((pi_of(b, a, cat.star(a, b, x)) - ja * px.adjoint() * jb).norm(), scale));
      worst_twisted = std::max(
          worst_twisted,
          rel((pi_of(b, a, act(b, a, cat.star(a, b, x))) - px.adjoint()).norm(), scale));
    }
  }
  cert.add("alpha_covariant", worst_covariant, tol);
  cert.add("block_form", worst_block, tol);
  cert.add("involution_to_krein_adjoint", worst_krein, tol);
  cert.add("twisted_involution_to_adjoint", worst_twisted, tol);

  bool faithful = true;
  for (const auto& [key, basis] : cat.homs) {
    if (basis.dim() == 0) continue;
    const auto& imgs = rep.pi.images.at(key);
    Matrix stacked(imgs[0].size(), basis.dim());
    for (Index k = 0; k < basis.dim(); ++k) {
      stacked.col(k) = vectorize(imgs[static_cast<size_t>(k)]);
    }
    Eigen::JacobiSVD<Matrix> svd(stacked);
    const auto& sv = svd.singularValues();
    faithful = faithful && sv.size() >= basis.dim() &&
               sv(basis.dim() - 1) > tol * (1.0 + sv(0));
  }
  cert.add_bool("faithful_per_hom", faithful);

  if (!cert.pass()) {
    throw CertificateError("represent_krein_category: certificates failed", cert);
  }
  return rep;
}

}  // namespace kcat
