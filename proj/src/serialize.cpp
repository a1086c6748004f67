#include "kcat/serialize.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

namespace kcat {

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
  throw InputError("parse error at " + path + ": " + what);
}

const Json& need(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) parse_fail(path + "." + key, "missing field");
  return j.at(key);
}

double need_number(const Json& j, const std::string& path) {
  if (!j.is_number()) parse_fail(path, "expected a number");
  return j.get<double>();
}

std::string need_string(const Json& j, const char* key, const std::string& path) {
  const Json& v = need(j, key, path);
  if (!v.is_string()) parse_fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

Index need_count(const Json& j, const char* key, const std::string& path) {
  const Json& v = need(j, key, path);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    parse_fail(path + "." + key, "expected a nonnegative integer");
  }
  return static_cast<Index>(v.get<long long>());
}

}  // namespace

Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) parse_fail(path, "complex scalar must be [re, im]");
  return Complex(need_number(j.at(0), path + "[0]"), need_number(j.at(1), path + "[1]"));
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Matrix matrix_from_json(const Json& j, const std::string& path) {
  const Index rows = need_count(j, "rows", path);
  const Index cols = need_count(j, "cols", path);
  const Json& data = need(j, "data", path);
  if (!data.is_array() || static_cast<Index>(data.size()) != rows) {
    parse_fail(path + ".data", "expected " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = data.at(static_cast<size_t>(i));
    const std::string row_path = path + ".data[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      parse_fail(row_path, "expected " + std::to_string(cols) + " entries");
    }
    for (Index k = 0; k < cols; ++k) {
      m(i, k) = complex_from_json(row.at(static_cast<size_t>(k)),
                                  row_path + "[" + std::to_string(k) + "]");
    }
  }
  if (!m.allFinite()) parse_fail(path, "matrix has non-finite entries");
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

Vector vector_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) parse_fail(path, "expected an array of complex scalars");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) {
    v(i) = complex_from_json(j.at(static_cast<size_t>(i)), path + "[" + std::to_string(i) + "]");
  }
  return v;
}

namespace {

Json involution_to_json(const InvolutionDoc& inv) {
  Json j{{"tag", inv.tag}};
  if (inv.gram) j["gram"] = matrix_to_json(*inv.gram);
  return j;
}

InvolutionDoc involution_from_json(const Json& j, const std::string& path) {
  InvolutionDoc inv;
  inv.tag = need_string(j, "tag", path);
  if (inv.tag != "adjoint" && inv.tag != "krein") {
    parse_fail(path + ".tag", "expected \"adjoint\" or \"krein\"");
  }
  if (j.contains("gram")) inv.gram = matrix_from_json(j.at("gram"), path + ".gram");
  return inv;
}

}  // namespace

Json document_to_json(const Document& doc) {
  Json j{{"version", doc.version}, {"kind", doc.kind}};
  if (const auto* space = std::get_if<SpaceDoc>(&doc.payload)) {
    j["gram"] = matrix_to_json(space->gram);
  } else if (const auto* alg = std::get_if<AlgebraDoc>(&doc.payload)) {
    j["ambient_dim"] = alg->ambient_dim;
    Json gens = Json::array();
    for (const auto& g : alg->generators) gens.push_back(matrix_to_json(g));
    j["generators"] = std::move(gens);
    j["involution"] = involution_to_json(alg->involution);
    if (alg->symmetry) {
      j["symmetry"] = Json{{"kind", alg->symmetry->kind},
                           {"matrix", matrix_to_json(alg->symmetry->matrix)}};
    }
  } else if (const auto* cat = std::get_if<CategoryDoc>(&doc.payload)) {
    Json objs = Json::array();
    for (const auto& o : cat->objects) {
      Json jo{{"label", o.label}, {"dim", o.dim}};
      if (o.gram) jo["gram"] = matrix_to_json(*o.gram);
      objs.push_back(std::move(jo));
    }
    j["objects"] = std::move(objs);
    Json homs = Json::array();
    for (const auto& h : cat->homs) {
      Json gens = Json::array();
      for (const auto& g : h.generators) gens.push_back(matrix_to_json(g));
      homs.push_back(Json{{"from", h.from}, {"to", h.to}, {"generators", std::move(gens)}});
    }
    j["homs"] = std::move(homs);
    j["involution"] = involution_to_json(cat->involution);
    if (cat->symmetry) {
      Json sym{{"kind", cat->symmetry->kind}};
      if (cat->symmetry->kind == "ad") {
        Json mats = Json::array();
        for (const auto& [label, m] : cat->symmetry->ad_matrices) {
          mats.push_back(Json{{"object", label}, {"matrix", matrix_to_json(m)}});
        }
        sym["matrices"] = std::move(mats);
      } else {
        Json maps = Json::array();
        for (const auto& [from, to, m] : cat->symmetry->linear_maps) {
          maps.push_back(Json{{"from", from}, {"to", to}, {"table", matrix_to_json(m)}});
        }
        sym["maps"] = std::move(maps);
      }
      j["symmetry"] = std::move(sym);
    }
  } else {
    const auto& st = std::get<StateDoc>(doc.payload);
    j["category"] = st.category_path;
    if (!st.vectors.empty()) {
      Json vecs = Json::array();
      for (const auto& v : st.vectors) {
        vecs.push_back(Json{{"object", v.object}, {"value", vector_to_json(v.value)}});
      }
      j["vectors"] = std::move(vecs);
    } else {
      Json coeffs = Json::array();
      for (const auto& c : st.coefficients) {
        coeffs.push_back(
            Json{{"from", c.from}, {"to", c.to}, {"values", vector_to_json(c.values)}});
      }
      j["coefficients"] = std::move(coeffs);
    }
  }
  return j;
}

Document document_from_json(const Json& j) {
  Document doc;
  doc.version = need_string(j, "version", "$");
  if (doc.version != kDocVersion) parse_fail("$.version", "unsupported document version");
  doc.kind = need_string(j, "kind", "$");
  if (doc.kind == "space") {
    SpaceDoc space;
    space.gram = matrix_from_json(need(j, "gram", "$"), "$.gram");
    doc.payload = std::move(space);
  } else if (doc.kind == "algebra") {
    AlgebraDoc alg;
    alg.ambient_dim = need_count(j, "ambient_dim", "$");
    const Json& gens = need(j, "generators", "$");
    if (!gens.is_array()) parse_fail("$.generators", "expected an array");
    for (size_t i = 0; i < gens.size(); ++i) {
      alg.generators.push_back(
          matrix_from_json(gens.at(i), "$.generators[" + std::to_string(i) + "]"));
    }
    alg.involution = involution_from_json(need(j, "involution", "$"), "$.involution");
    if (j.contains("symmetry")) {
      AlgebraSymmetryDoc sym;
      sym.kind = need_string(j.at("symmetry"), "kind", "$.symmetry");
      if (sym.kind != "ad" && sym.kind != "linear") {
        parse_fail("$.symmetry.kind", "expected \"ad\" or \"linear\"");
      }
      sym.matrix = matrix_from_json(need(j.at("symmetry"), "matrix", "$.symmetry"),
                                    "$.symmetry.matrix");
      alg.symmetry = std::move(sym);
    }
    doc.payload = std::move(alg);
  } else if (doc.kind == "category") {
    CategoryDoc cat;
    const Json& objs = need(j, "objects", "$");
    if (!objs.is_array() || objs.empty()) parse_fail("$.objects", "expected a nonempty array");
    for (size_t i = 0; i < objs.size(); ++i) {
      const std::string path = "$.objects[" + std::to_string(i) + "]";
      CategoryObjectDoc o;
      o.label = need_string(objs.at(i), "label", path);
      o.dim = need_count(objs.at(i), "dim", path);
      if (objs.at(i).contains("gram")) {
        o.gram = matrix_from_json(objs.at(i).at("gram"), path + ".gram");
      }
      cat.objects.push_back(std::move(o));
    }
    if (j.contains("homs")) {
      const Json& homs = j.at("homs");
      if (!homs.is_array()) parse_fail("$.homs", "expected an array");
      for (size_t i = 0; i < homs.size(); ++i) {
        const std::string path = "$.homs[" + std::to_string(i) + "]";
        CategoryHomDoc h;
        h.from = need_string(homs.at(i), "from", path);
        h.to = need_string(homs.at(i), "to", path);
        const Json& gens = need(homs.at(i), "generators", path);
        if (!gens.is_array()) parse_fail(path + ".generators", "expected an array");
        for (size_t k = 0; k < gens.size(); ++k) {
          h.generators.push_back(matrix_from_json(
              gens.at(k), path + ".generators[" + std::to_string(k) + "]"));
        }
        cat.homs.push_back(std::move(h));
      }
    }
    cat.involution = involution_from_json(need(j, "involution", "$"), "$.involution");
    if (j.contains("symmetry")) {
      const Json& js = j.at("symmetry");
      CategorySymmetryDoc sym;
      sym.kind = need_string(js, "kind", "$.symmetry");
      if (sym.kind == "ad") {
        const Json& mats = need(js, "matrices", "$.symmetry");
        if (!mats.is_array()) parse_fail("$.symmetry.matrices", "expected an array");
        for (size_t i = 0; i < mats.size(); ++i) {
          const std::string path = "$.symmetry.matrices[" + std::to_string(i) + "]";
          sym.ad_matrices.emplace_back(
              need_string(mats.at(i), "object", path),
              matrix_from_json(need(mats.at(i), "matrix", path), path + ".matrix"));
        }
      } else if (sym.kind == "linear") {
        const Json& maps = need(js, "maps", "$.symmetry");
        if (!maps.is_array()) parse_fail("$.symmetry.maps", "expected an array");
        for (size_t i = 0; i < maps.size(); ++i) {
          const std::string path = "$.symmetry.maps[" + std::to_string(i) + "]";
          sym.linear_maps.emplace_back(
              need_string(maps.at(i), "from", path), need_string(maps.at(i), "to", path),
              matrix_from_json(need(maps.at(i), "table", path), path + ".table"));
        }
      } else {
        parse_fail("$.symmetry.kind", "expected \"ad\" or \"linear\"");
      }
      cat.symmetry = std::move(sym);
    }
    doc.payload = std::move(cat);
  } else if (doc.kind == "state") {
    StateDoc st;
    st.category_path = need_string(j, "category", "$");
    if (j.contains("vectors")) {
      const Json& vecs = j.at("vectors");
      if (!vecs.is_array()) parse_fail("$.vectors", "expected an array");
      for (size_t i = 0; i < vecs.size(); ++i) {
        const std::string path = "$.vectors[" + std::to_string(i) + "]";
        StateVectorDoc v;
        v.object = need_string(vecs.at(i), "object", path);
        v.value = vector_from_json(need(vecs.at(i), "value", path), path + ".value");
        st.vectors.push_back(std::move(v));
      }
    } else if (j.contains("coefficients")) {
      const Json& coeffs = j.at("coefficients");
      if (!coeffs.is_array()) parse_fail("$.coefficients", "expected an array");
      for (size_t i = 0; i < coeffs.size(); ++i) {
        const std::string path = "$.coefficients[" + std::to_string(i) + "]";
        StateCoeffDoc c;
        c.from = need_string(coeffs.at(i), "from", path);
        c.to = need_string(coeffs.at(i), "to", path);
        c.values = vector_from_json(need(coeffs.at(i), "values", path), path + ".values");
        st.coefficients.push_back(std::move(c));
      }
    } else {
      parse_fail("$", "state needs either \"vectors\" or \"coefficients\"");
    }
    doc.payload = std::move(st);
  } else {
    parse_fail("$.kind", "expected space, algebra, category or state");
  }
  return doc;
}

Document load_document(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open document: " + file);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw InputError("malformed JSON in " + file + ": " + e.what());
  }
  return document_from_json(j);
}

void save_document(const Document& doc, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw InputError("cannot write document: " + file);
  out << document_to_json(doc).dump(2) << "\n";
}

KreinSpaceSpec build_space(const SpaceDoc& doc, double tol) {
  return make_krein_space(doc.gram, tol);
}

std::pair<MatrixStarAlgebra, std::optional<SymmetryAutomorphism>> build_algebra(
    const AlgebraDoc& doc, double tol) {
  if (doc.ambient_dim <= 0) throw InputError("algebra: ambient_dim must be positive");
  AlgebraInvolution inv;
  if (doc.involution.tag == "adjoint") {
    inv = hilbert_adjoint(doc.ambient_dim);
  } else {
    if (!doc.involution.gram) {
      throw InputError("algebra: krein involution needs a gram form");
    }
    inv = krein_involution(make_krein_space(*doc.involution.gram, tol));
  }
  MatrixStarAlgebra algebra = algebra_from_generators(doc.ambient_dim, doc.generators, inv, tol);
  std::optional<SymmetryAutomorphism> sym;
  if (doc.symmetry) {
    if (doc.symmetry->kind == "ad") {
      if (doc.symmetry->matrix.rows() != doc.ambient_dim) {
        throw InputError("algebra: symmetry matrix shape mismatch");
      }
      sym = make_ad_symmetry(doc.symmetry->matrix);
    } else {
      if (doc.symmetry->matrix.rows() != algebra.dim() ||
          doc.symmetry->matrix.cols() != algebra.dim()) {
        throw InputError(
            "algebra: linear symmetry table must match the generated basis dimension " +
            std::to_string(algebra.dim()));
      }
      sym = LinearSymmetry{doc.symmetry->matrix};
    }
  }
  return {std::move(algebra), std::move(sym)};
}

int object_index(const OperatorCategory& cat, const std::string& label) {
  for (int a = 0; a < cat.object_count(); ++a) {
    if (cat.objects[static_cast<size_t>(a)].label == label) return a;
  }
  throw InputError("unknown object label: " + label);
}

std::pair<OperatorCategory, std::optional<CategorySymmetry>> build_category(
    const CategoryDoc& doc, double tol) {
  std::vector<CatObject> objects;
  WeightFamily weights;
  weights.tag = doc.involution.tag == "krein" ? InvolutionTag::krein : InvolutionTag::adjoint;
  for (const auto& o : doc.objects) {
    CatObject obj{o.label, o.dim, std::nullopt};
    if (doc.involution.tag == "krein") {
      if (!o.gram) {
        throw InputError("category: krein involution needs a gram per object, missing for " +
                         o.label);
      }
      const KreinSpaceSpec space = make_krein_space(*o.gram, tol);
      if (space.dim != o.dim) {
        throw InputError("category: gram dimension mismatch for object " + o.label);
      }
      obj.gram = space.gram;
      weights.weight.push_back(space.gram);
      weights.weight_inv.push_back(space.gram.inverse());
    } else {
      weights.weight.push_back(Matrix::Identity(o.dim, o.dim));
      weights.weight_inv.push_back(Matrix::Identity(o.dim, o.dim));
    }
    objects.push_back(std::move(obj));
  }

  OperatorCategory lookup;
  lookup.objects = objects;  // label resolution before construction
  std::map<HomKey, std::vector<Matrix>> generators;
  for (const auto& h : doc.homs) {
    const int a = object_index(lookup, h.from);
    const int b = object_index(lookup, h.to);
    auto& list = generators[{a, b}];
    list.insert(list.end(), h.generators.begin(), h.generators.end());
  }
  OperatorCategory cat =
      category_from_generators(std::move(objects), generators, std::move(weights), tol);

  std::optional<CategorySymmetry> sym;
  if (doc.symmetry) {
    if (doc.symmetry->kind == "ad") {
      AdSymmetryFamily fam;
      fam.s.resize(static_cast<size_t>(cat.object_count()));
      fam.s_inv.resize(static_cast<size_t>(cat.object_count()));
      std::vector<bool> seen(static_cast<size_t>(cat.object_count()), false);
      for (const auto& [label, m] : doc.symmetry->ad_matrices) {
        const int a = object_index(cat, label);
        const AdSymmetry ad = make_ad_symmetry(m);
        if (m.rows() != cat.objects[static_cast<size_t>(a)].dim) {
          throw InputError("category: symmetry matrix shape mismatch for object " + label);
        }
        fam.s[static_cast<size_t>(a)] = ad.s;
        fam.s_inv[static_cast<size_t>(a)] = ad.s_inv;
        seen[static_cast<size_t>(a)] = true;
      }
      for (int a = 0; a < cat.object_count(); ++a) {
        if (!seen[static_cast<size_t>(a)]) {
          throw InputError("category: symmetry missing a matrix for object " +
                           cat.objects[static_cast<size_t>(a)].label);
        }
      }
      sym = std::move(fam);
    } else {
      LinearSymmetryFamily fam;
      for (const auto& [from, to, m] : doc.symmetry->linear_maps) {
        const int a = object_index(cat, from);
        const int b = object_index(cat, to);
        if (m.rows() != cat.hom(a, b).dim() || m.cols() != cat.hom(a, b).dim()) {
          throw InputError("category: linear symmetry table shape mismatch for hom " + from +
                           " -> " + to + " (expected " + std::to_string(cat.hom(a, b).dim()) +
                           ")");
        }
        fam.coeffs[{a, b}] = m;
      }
      for (const auto& [key, basis] : cat.homs) {
        if (!fam.coeffs.count(key)) {
          fam.coeffs[key] = Matrix::Identity(basis.dim(), basis.dim());
        }
      }
      sym = std::move(fam);
    }
  }
  return {std::move(cat), std::move(sym)};
}

CategoryState build_state(const StateDoc& doc, const OperatorCategory& cat, double tol) {
  if (!doc.vectors.empty()) {
    std::vector<Vector> family(static_cast<size_t>(cat.object_count()));
    std::vector<bool> seen(static_cast<size_t>(cat.object_count()), false);
    for (const auto& v : doc.vectors) {
      const int a = object_index(cat, v.object);
      if (v.value.size() != cat.objects[static_cast<size_t>(a)].dim) {
        throw InputError("state: vector dimension mismatch for object " + v.object);
      }
      family[static_cast<size_t>(a)] = v.value;
      seen[static_cast<size_t>(a)] = true;
    }
    for (int a = 0; a < cat.object_count(); ++a) {
      if (!seen[static_cast<size_t>(a)]) {
        throw InputError("state: missing vector for object " +
                         cat.objects[static_cast<size_t>(a)].label);
      }
    }
    return vector_state(cat, family, tol);
  }
  CategoryState omega;
  for (const auto& [key, basis] : cat.homs) {
    omega.values[key] = Vector::Zero(basis.dim());
  }
  for (const auto& c : doc.coefficients) {
    const int a = object_index(cat, c.from);
    const int b = object_index(cat, c.to);
    if (c.values.size() != cat.hom(a, b).dim()) {
      throw InputError("state: coefficient count mismatch for hom " + c.from + " -> " + c.to +
                       " (expected " + std::to_string(cat.hom(a, b).dim()) + ")");
    }
    omega.values[{a, b}] = c.values;
  }
  return omega;
}

Json report_to_json(const Report& report) {
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json jc{{"name", c.name}, {"pass", c.pass}, {"residual", c.residual}};
    if (!c.detail.empty()) jc["detail"] = c.detail;
    if (c.witness) jc["witness"] = matrix_to_json(*c.witness);
    checks.push_back(std::move(jc));
  }
  return Json{{"command", report.command},
              {"inputs_digest", report.inputs_digest},
              {"checks", std::move(checks)},
              {"verdict", report.pass() ? "pass" : "fail"}};
}

std::string digest_inputs(const std::vector<std::pair<std::string, std::string>>& parts) {
  std::uint64_t hash = 1469598103934665603ULL;  // FNV-1a
  auto mix = [&hash](const std::string& s) {
    for (const unsigned char c : s) {
      hash ^= c;
      hash *= 1099511628211ULL;
    }
    hash ^= 0xff;
    hash *= 1099511628211ULL;
  };
  for (const auto& [name, payload] : parts) {
    mix(name);
    mix(payload);
  }
  std::ostringstream out;
  out << std::hex << hash;
  return out.str();
}

void emit_report(const Report& report, const std::string& path) {
  const std::string text = report_to_json(report).dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write report: " + path);
  out << text;
}

}  // namespace kcat
