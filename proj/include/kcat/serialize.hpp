#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kcat/gns_repr.hpp"

namespace kcat {

using Json = nlohmann::json;

/// Wire format: complex scalars are [re, im], matrices are row-major nested
/// arrays with explicit shape.
Json complex_to_json(const Complex& z);
Complex complex_from_json(const Json& j, const std::string& path);
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& path);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& path);

struct SpaceDoc {
  Matrix gram;
};

struct InvolutionDoc {
  std::string tag;  // "adjoint" | "krein"
  std::optional<Matrix> gram;
};

struct AlgebraSymmetryDoc {
  std::string kind;  // "ad" | "linear"
  Matrix matrix;
};

struct AlgebraDoc {
  Index ambient_dim = 0;
  std::vector<Matrix> generators;
  InvolutionDoc involution;
  std::optional<AlgebraSymmetryDoc> symmetry;
};

struct CategoryObjectDoc {
  std::string label;
  Index dim = 0;
  std::optional<Matrix> gram;
};

struct CategoryHomDoc {
  std::string from;
  std::string to;
  std::vector<Matrix> generators;
};

struct CategorySymmetryDoc {
  std::string kind;  // "ad" | "linear"
  std::vector<std::pair<std::string, Matrix>> ad_matrices;             // per object
  std::vector<std::tuple<std::string, std::string, Matrix>> linear_maps;  // per hom
};

struct CategoryDoc {
  std::vector<CategoryObjectDoc> objects;
  std::vector<CategoryHomDoc> homs;
  InvolutionDoc involution;
  std::optional<CategorySymmetryDoc> symmetry;
};

struct StateCoeffDoc {
  std::string from;
  std::string to;
  Vector values;
};

struct StateVectorDoc {
  std::string object;
  Vector value;
};

struct StateDoc {
  std::string category_path;                // relative to the state document
  std::vector<StateCoeffDoc> coefficients;  // either this ...
  std::vector<StateVectorDoc> vectors;      // ... or this
};

inline constexpr const char* kDocVersion = "kcat/1";

struct Document {
  std::string version = kDocVersion;
  std::string kind;  // "space" | "algebra" | "category" | "state"
  std::variant<SpaceDoc, AlgebraDoc, CategoryDoc, StateDoc> payload;
};

Json document_to_json(const Document& doc);
Document document_from_json(const Json& j);
Document load_document(const std::string& file);
void save_document(const Document& doc, const std::string& file);

/// Runtime objects from documents; all throw InputError with a field path
/// on malformed input.
KreinSpaceSpec build_space(const SpaceDoc& doc, double tol = kDefaultTol);
std::pair<MatrixStarAlgebra, std::optional<SymmetryAutomorphism>> build_algebra(
    const AlgebraDoc& doc, double tol = kDefaultTol);
std::pair<OperatorCategory, std::optional<CategorySymmetry>> build_category(
    const CategoryDoc& doc, double tol = kDefaultTol);
CategoryState build_state(const StateDoc& doc, const OperatorCategory& cat,
                          double tol = kDefaultTol);
int object_index(const OperatorCategory& cat, const std::string& label);

Json report_to_json(const Report& report);

/// FNV-1a digest over the named input payloads and flags; stable across
/// runs so equal inputs give byte-identical reports.
std::string digest_inputs(const std::vector<std::pair<std::string, std::string>>& parts);

/// Key-sorted, two-space indented document with trailing newline; writes to
/// stdout when path is empty.
void emit_report(const Report& report, const std::string& path);

}  // namespace kcat
