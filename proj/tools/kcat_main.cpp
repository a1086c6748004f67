#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kcat/sampling.hpp"
#include "kcat/serialize.hpp"

namespace fs = std::filesystem;
using namespace kcat;

namespace {

struct CommonFlags {
  double tol = kDefaultTol;
  int samples = 200;
  std::uint64_t seed = 42;
  std::string report_path;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--tol", flags.tol, "verification tolerance")->capture_default_str();
  cmd->add_option("--samples", flags.samples, "random samples per randomized check")
      ->capture_default_str();
  cmd->add_option("--seed", flags.seed, "seed for all randomized sampling")
      ->capture_default_str();
  cmd->add_option("--report", flags.report_path, "report output path (default: stdout)");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string flags_digest_part(const CommonFlags& flags) {
  std::ostringstream out;
  out << "tol=" << flags.tol << ";samples=" << flags.samples << ";seed=" << flags.seed;
  return out.str();
}

/// Resolves a state's category reference relative to the state file.
std::string resolve_relative(const std::string& base_file, const std::string& ref) {
  const fs::path ref_path(ref);
  if (ref_path.is_absolute()) return ref;
  return (fs::path(base_file).parent_path() / ref_path).string();
}

Matrix load_bare_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw InputError("malformed JSON in " + path + ": " + e.what());
  }
  return matrix_from_json(j, "$");
}

const AlgebraDoc& as_algebra(const Document& doc) {
  if (const auto* alg = std::get_if<AlgebraDoc>(&doc.payload)) return *alg;
  throw InputError("expected an algebra document");
}

const CategoryDoc& as_category(const Document& doc) {
  if (const auto* cat = std::get_if<CategoryDoc>(&doc.payload)) return *cat;
  throw InputError("expected a category document");
}

SymmetryAutomorphism symmetry_or_identity(const std::optional<SymmetryAutomorphism>& sym,
                                          const MatrixStarAlgebra& algebra) {
  return sym ? *sym : identity_symmetry(algebra.ambient_dim);
}

CategorySymmetry symmetry_or_identity(const std::optional<CategorySymmetry>& sym,
                                      const OperatorCategory& cat) {
  return sym ? *sym : identity_category_symmetry(cat);
}

int finish(Report report, const CommonFlags& flags,
           const std::vector<std::pair<std::string, std::string>>& digest_parts,
           std::chrono::steady_clock::time_point started) {
  auto parts = digest_parts;
  parts.emplace_back("flags", flags_digest_part(flags));
  report.inputs_digest = digest_inputs(parts);
  report.duration_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - started)
                           .count();
  emit_report(report, flags.report_path);
  std::cerr << report.command << ": " << (report.pass() ? "pass" : "fail") << " ("
            << report.duration_ms << " ms)\n";
  return report.pass() ? 0 : 1;
}

std::string dims_string(const std::vector<Index>& dims) {
  std::ostringstream out;
  out << "[";
  for (size_t i = 0; i < dims.size(); ++i) out << (i ? ", " : "") << dims[i];
  out << "]";
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for Krein spaces, Krein C*-algebras and C*-categories"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string input;
  std::string matrix_path;
  std::string domain_path;
  std::string codomain_path;
  std::string category_path;
  std::string state_path;

  auto* cmd_check_space = app.add_subcommand("check-space", "verify a Krein space document");
  cmd_check_space->add_option("--input", input)->required();
  add_common(cmd_check_space, flags);

  auto* cmd_decompose = app.add_subcommand("decompose", "canonical fundamental decomposition");
  cmd_decompose->add_option("--input", input)->required();
  add_common(cmd_decompose, flags);

  auto* cmd_adjoint = app.add_subcommand("adjoint", "Krein adjoint of an operator");
  cmd_adjoint->add_option("--matrix", matrix_path)->required();
  cmd_adjoint->add_option("--domain", domain_path)->required();
  cmd_adjoint->add_option("--codomain", codomain_path);
  add_common(cmd_adjoint, flags);

  auto* cmd_check_algebra =
      app.add_subcommand("check-algebra", "verify the Krein C*-algebra axioms");
  cmd_check_algebra->add_option("--input", input)->required();
  add_common(cmd_check_algebra, flags);

  auto* cmd_split = app.add_subcommand("split", "even/odd split under the symmetry");
  cmd_split->add_option("--input", input)->required();
  add_common(cmd_split, flags);

  auto* cmd_twist = app.add_subcommand("twist", "twist the involution by the symmetry");
  cmd_twist->add_option("--input", input)->required();
  add_common(cmd_twist, flags);

  auto* cmd_link = app.add_subcommand("link", "two-object linking category of a Krein algebra");
  cmd_link->add_option("--input", input)->required();
  add_common(cmd_link, flags);

  auto* cmd_envelope = app.add_subcommand("envelope", "block matrix envelope");
  cmd_envelope->add_option("--input", input)->required();
  add_common(cmd_envelope, flags);

  auto* cmd_check_category = app.add_subcommand("check-category", "verify the C*-category axioms");
  cmd_check_category->add_option("--input", input)->required();
  add_common(cmd_check_category, flags);

  auto* cmd_check_krein_category =
      app.add_subcommand("check-krein-category", "verify the Krein C*-category axioms");
  cmd_check_krein_category->add_option("--input", input)->required();
  add_common(cmd_check_krein_category, flags);

  auto* cmd_check_state = app.add_subcommand("check-state", "verify a category state");
  cmd_check_state->add_option("--input", input)->required();
  add_common(cmd_check_state, flags);

  auto* cmd_gns = app.add_subcommand("gns", "GNS representation of a state");
  cmd_gns->add_option("--category", category_path)->required();
  cmd_gns->add_option("--state", state_path)->required();
  add_common(cmd_gns, flags);

  auto* cmd_repr_algebra =
      app.add_subcommand("represent-algebra", "Krein space representation of a Krein algebra");
  cmd_repr_algebra->add_option("--input", input)->required();
  add_common(cmd_repr_algebra, flags);

  auto* cmd_repr_category =
      app.add_subcommand("represent-category", "Krein space representation of a Krein category");
  cmd_repr_category->add_option("--input", input)->required();
  add_common(cmd_repr_category, flags);

  auto* cmd_double = app.add_subcommand("double", "doubled category of a Krein category");
  cmd_double->add_option("--input", input)->required();
  add_common(cmd_double, flags);

  CLI11_PARSE(app, argc, argv);
  const auto started = std::chrono::steady_clock::now();

  try {
    Rng rng(flags.seed);

    if (cmd_check_space->parsed()) {
      const Document doc = load_document(input);
      const auto* space_doc = std::get_if<SpaceDoc>(&doc.payload);
      if (space_doc == nullptr) throw InputError("expected a space document");
      Report report;
      report.command = "check-space";
      const Matrix& gram = space_doc->gram;
      const double scale = 1.0 + gram.norm();
      const bool square = gram.rows() == gram.cols() && gram.rows() > 0;
      report.add_bool("gram_square", square);
      if (square) {
        report.add("gram_hermitian", hermiticity_residual(gram) / scale, flags.tol);
        const HermitianEigen eig = herm_eig((gram + gram.adjoint()) / 2.0, flags.tol);
        double min_abs = std::abs(eig.eigenvalues(0));
        Index n_plus = 0;
        Index n_minus = 0;
        for (Index i = 0; i < eig.eigenvalues.size(); ++i) {
          min_abs = std::min(min_abs, std::abs(eig.eigenvalues(i)));
          (eig.eigenvalues(i) > 0 ? n_plus : n_minus) += 1;
        }
        report.add_bool("gram_invertible", min_abs >= flags.tol * scale,
                        "min |eigenvalue| = " + std::to_string(min_abs));
        if (report.pass()) {
          report.add_bool("signature", true,
                          "(" + std::to_string(n_plus) + ", " + std::to_string(n_minus) + ")");
        }
      }
      return finish(std::move(report), flags, {{input, slurp(input)}}, started);
    }

    if (cmd_decompose->parsed()) {
      const Document doc = load_document(input);
      const auto* space_doc = std::get_if<SpaceDoc>(&doc.payload);
      if (space_doc == nullptr) throw InputError("expected a space document");
      const KreinSpaceSpec space = build_space(*space_doc, flags.tol);
      const FundamentalDecomposition decomp = canonical_decomposition(space, flags.tol);
      Report report = decomposition_report(space, decomp, flags.tol);
      report.command = "decompose";
      auto& rec = report.add_bool(
          "signature", true,
          "(" + std::to_string(decomp.signature.first) + ", " +
              std::to_string(decomp.signature.second) + ")");
      rec.witness = decomp.j;
      return finish(std::move(report), flags, {{input, slurp(input)}}, started);
    }

    if (cmd_adjoint->parsed()) {
      const Matrix t = load_bare_matrix(matrix_path);
      const Document dom_doc = load_document(domain_path);
      const auto* dom_space = std::get_if<SpaceDoc>(&dom_doc.payload);
      if (dom_space == nullptr) throw InputError("expected a space document for --domain");
      const KreinSpaceSpec domain = build_space(*dom_space, flags.tol);
      KreinSpaceSpec codomain = domain;
      std::vector<std::pair<std::string, std::string>> digest = {
          {matrix_path, slurp(matrix_path)}, {domain_path, slurp(domain_path)}};
      if (!codomain_path.empty()) {
        const Document cod_doc = load_document(codomain_path);
        const auto* cod_space = std::get_if<SpaceDoc>(&cod_doc.payload);
        if (cod_space == nullptr) throw InputError("expected a space document for --codomain");
        codomain = build_space(*cod_space, flags.tol);
        digest.emplace_back(codomain_path, slurp(codomain_path));
      }
      const Matrix tsharp = krein_adjoint(t, domain, codomain);
      double worst = 0.0;
      for (int s = 0; s < flags.samples; ++s) {
        const Vector x = random_vector(rng, domain.dim);
        const Vector y = random_vector(rng, codomain.dim);
        const Complex lhs = (t * x).adjoint() * codomain.gram * y;
        const Complex rhs = x.adjoint() * domain.gram * (tsharp * y);
        worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
      }
      Report report;
      report.command = "adjoint";
      report.add("adjoint_identity", worst, flags.tol);
      auto& rec = report.add_bool("krein_adjoint", true, "T# attached as witness");
      rec.witness = tsharp;
      return finish(std::move(report), flags, digest, started);
    }

    if (cmd_check_algebra->parsed()) {
      const Document doc = load_document(input);
      auto [algebra, sym] = build_algebra(as_algebra(doc), flags.tol);
      Report report = verify_krein_cstar(algebra, symmetry_or_identity(sym, algebra),
                                         flags.samples, flags.tol, rng);
      report.command = "check-algebra";
      return finish(std::move(report), flags, {{input, slurp(input)}}, started);
    }

    if (cmd_split->parsed()) {
      const Document doc = load_document(input);
      auto [algebra, sym] = build_algebra(as_algebra(doc), flags.tol);
      if (!sym) throw InputError("split: the algebra document carries no symmetry");
      auto [plus, minus] = even_odd_split(algebra, *sym, flags.tol);
      Report report;
      report.command = "split";
      report.add_bool("split_dimensions", plus.dim() + minus.dim() == algebra.dim(),
                      "dim A+ = " + std::to_string(plus.dim()) +
                          ", dim A- = " + std::to_string(minus.dim()));
      double worst = 0.0;
      for (const auto& p : plus.elements()) {
        for (const auto& q : plus.elements()) worst = std::max(worst, plus.span_residual(p * q));
        for (const auto& m : minus.elements()) {
          worst = std::max(worst, minus.span_residual(p * m));
          worst = std::max(worst, minus.span_residual(m * p));
        }
      }
      for (const auto& m : minus.elements()) {
        for (const auto& m2 : minus.elements()) worst = std::max(worst, plus.span_residual(m * m2));
      }
      report.add("grading_products", worst, flags.tol);
      return finish(std::move(report), flags, {{input, slurp(input)}}, started);
    }

    if (cmd_twist->parsed()) {
      const Document doc = load_document(input);
      auto [algebra, sym] = build_algebra(as_algebra(doc), flags.tol);
      const SymmetryAutomorphism alpha = symmetry_or_identity(sym, algebra);
      const MatrixStarAlgebra twisted = twist_involution(algebra, alpha, flags.tol);
      const MatrixStarAlgebra restored = twist_involution(twisted, alpha, flags.tol);
      Report report;
      report.command = "twist";
      double worst = 0.0;
      for (const auto& b : algebra.basis.elements()) {
        worst = std::max(worst,
                         (restored.star(b) - algebra.star(b)).norm() / (1.0 + b.norm()));
      }
      report.add("double_twist_restores_involution", worst, flags.tol);
      double worst_id = 0.0;
      for (const auto& b : algebra.basis.elements()) {
        const double n = op_norm(b);
        worst_id = std::max(worst_id, std::abs((twisted.star(b) -
                                                apply_symmetry(alpha, algebra, algebra.star(b)))
                                                   .norm()) /
                                          (1.0 + n));
      }
      report.add("twisted_star_is_alpha_of_star", worst_id, flags.tol);
      return finish(std::move(report), flags, {{input, slurp(input)}}, started);
    }

    if (cmd_link->parsed()) {
      const Document doc = load_document(input);
      auto [algebra, sym] = build_algebra(as_algebra(doc), flags.tol);
      const SymmetryAutomorphism alpha = symmetry_or_identity(sym, algebra);
      auto [cat, csym] = krein_link(algebra, alpha, flags.tol);
      Report report = verify_krein_cstar_category(cat, csym, flags.samples, flags.tol, rng);
      report.command = "link";
      report.add_bool("hom_dimensions", true,
                      "diagonal " + std::to_string(cat.hom(0, 0).dim()) + ", off-diagonal " +
                          std::to_string(cat.hom(0, 1).dim()));
      return finish(std::move(report), flags, {{input, slurp(input)}}, started);
    }

    if (cmd_envelope->parsed()) {
      const Document doc = load_document(input);
      OperatorCategory cat;
      if (const auto* cat_doc = std::get_if<CategoryDoc>(&doc.payload)) {
        cat = build_category(*cat_doc, flags.tol).first;
      } else {
        cat = one_object_category(build_algebra(as_algebra(doc), flags.tol).first);
      }
      const Envelope env = envelope(cat);
      Report report = verify_functor(cat, one_object_category(env.algebra), env.iota, flags.tol);
      report.command = "envelope";
      // iota is unital only in the summed sense: sum of object identities
      for (auto& rec : report.checks) {
        if (rec.name == "functor_unital") {
          Matrix total = Matrix::Zero(env.algebra.ambient_dim, env.algebra.ambient_dim);
          for (int a = 0; a < cat.object_count(); ++a) {
            total += env.iota.apply(cat, a, a, cat.identity(a));
          }
          rec.residual = (total - env.algebra.unit).norm();
          rec.pass = rec.residual <= flags.tol;
          rec.detail = "object identities sum to the envelope unit";
        }
      }
      report.add_bool("envelope_dimension", true,
                      "ambient " + std::to_string(env.algebra.ambient_dim) + ", basis " +
                          std::to_string(env.algebra.dim()));
      return finish(std::move(report), flags, {{input, slurp(input)}}, started);
    }

    if (cmd_check_category->parsed()) {
      const Document doc = load_document(input);
      auto [cat, sym] = build_category(as_category(doc), flags.tol);
      Report report = verify_cstar_category(cat, flags.samples, flags.tol, rng);
      report.command = "check-category";
      return finish(std::move(report), flags, {{input, slurp(input)}}, started);
    }

    if (cmd_check_krein_category->parsed()) {
      const Document doc = load_document(input);
      auto [cat, sym] = build_category(as_category(doc), flags.tol);
      Report report = verify_krein_cstar_category(cat, symmetry_or_identity(sym, cat),
                                                  flags.samples, flags.tol, rng);
      report.command = "check-krein-category";
      return finish(std::move(report), flags, {{input, slurp(input)}}, started);
    }

    if (cmd_check_state->parsed()) {
      const Document doc = load_document(input);
      const auto* state_doc = std::get_if<StateDoc>(&doc.payload);
      if (state_doc == nullptr) throw InputError("expected a state document");
      const std::string cat_file = resolve_relative(input, state_doc->category_path);
      const Document cat_doc = load_document(cat_file);
      auto [cat, sym] = build_category(as_category(cat_doc), flags.tol);
      const CategoryState omega = build_state(*state_doc, cat, flags.tol);
      Report report = verify_state(cat, omega, flags.tol);
      report.command = "check-state";
      return finish(std::move(report), flags,
                    {{input, slurp(input)}, {cat_file, slurp(cat_file)}}, started);
    }

    if (cmd_gns->parsed()) {
      const Document cat_doc = load_document(category_path);
      auto [cat, sym] = build_category(as_category(cat_doc), flags.tol);
      const Document state_doc_file = load_document(state_path);
      const auto* state_doc = std::get_if<StateDoc>(&state_doc_file.payload);
      if (state_doc == nullptr) throw InputError("expected a state document");
      const CategoryState omega = build_state(*state_doc, cat, flags.tol);
      const GNSRepresentation rep = gns(cat, omega, flags.tol);
      Report report;
      report.command = "gns";
      double worst = 0.0;
      for (const auto& [key, basis] : cat.homs) {
        const auto [a, b] = key;
        for (Index k = 0; k < basis.dim(); ++k) {
          const Complex expected = omega.values.at(key)(k);
          const Complex got = rep.cyclic[static_cast<size_t>(b)].adjoint() *
                              rep.pi.images.at(key)[static_cast<size_t>(k)] *
                              rep.cyclic[static_cast<size_t>(a)];
          worst = std::max(worst, std::abs(got - expected));
        }
      }
      report.add("gns_reconstruction", worst, flags.tol);
      double worst_xi = 0.0;
      for (const auto& xi : rep.cyclic) worst_xi = std::max(worst_xi, std::abs(xi.norm() - 1.0));
      report.add("cyclic_vectors_normalized", worst_xi, flags.tol);
      report.add_bool("gns_space_dims", true, "H dims " + dims_string(rep.space_dims));
      return finish(std::move(report), flags,
                    {{category_path, slurp(category_path)}, {state_path, slurp(state_path)}},
                    started);
    }

    if (cmd_repr_algebra->parsed()) {
      const Document doc = load_document(input);
      auto [algebra, sym] = build_algebra(as_algebra(doc), flags.tol);
      try {
        const KreinRepresentation rep = represent_krein_algebra(
            algebra, symmetry_or_identity(sym, algebra), flags.samples, flags.tol, rng);
        Report report = rep.certificates;
        report.command = "represent-algebra";
        report.add_bool("krein_signature", true,
                        "(" + std::to_string(rep.signatures[0].first) + ", " +
                            std::to_string(rep.signatures[0].second) + ")");
        return finish(std::move(report), flags, {{input, slurp(input)}}, started);
      } catch (const CertificateError& e) {
        Report report = e.report();
        report.command = "represent-algebra";
        return finish(std::move(report), flags, {{input, slurp(input)}}, started);
      }
    }

    if (cmd_repr_category->parsed()) {
      const Document doc = load_document(input);
      auto [cat, sym] = build_category(as_category(doc), flags.tol);
      try {
        const KreinRepresentation rep = represent_krein_category(
            cat, symmetry_or_identity(sym, cat), flags.samples, flags.tol, rng);
        Report report = rep.certificates;
        report.command = "represent-category";
        std::ostringstream sig;
        for (size_t a = 0; a < rep.signatures.size(); ++a) {
          sig << (a ? ", " : "") << "(" << rep.signatures[a].first << ", "
              << rep.signatures[a].second << ")";
        }
        report.add_bool("krein_signatures", true, sig.str());
        return finish(std::move(report), flags, {{input, slurp(input)}}, started);
      } catch (const CertificateError& e) {
        Report report = e.report();
        report.command = "represent-category";
        return finish(std::move(report), flags, {{input, slurp(input)}}, started);
      }
    }

    if (cmd_double->parsed()) {
      const Document doc = load_document(input);
      auto [cat, sym] = build_category(as_category(doc), flags.tol);
      auto [doubled, dsym] = doubling(cat, symmetry_or_identity(sym, cat), flags.tol);
      Report report = verify_krein_cstar_category(doubled, dsym, flags.samples, flags.tol, rng);
      report.command = "double";
      report.add_bool("doubled_objects", true,
                      std::to_string(doubled.object_count()) + " objects");
      return finish(std::move(report), flags, {{input, slurp(input)}}, started);
    }

    throw InputError("no subcommand dispatched");
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const ConstructionError& e) {
    std::cerr << "construction error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
}
