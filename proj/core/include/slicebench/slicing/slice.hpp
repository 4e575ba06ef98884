#pragma once

#include <string>
#include <vector>

#include "slicebench/error.hpp"
#include "slicebench/frontend/ast.hpp"

namespace slicebench::slicing {

enum class Mode { Static, Dynamic };

const char* to_string(Mode mode);
Mode mode_from_string(const std::string& text);

struct SlicingCriterion {
  Mode mode = Mode::Static;
  std::string variable;  // empty for dynamic criteria
  int line = 0;

  friend bool operator==(const SlicingCriterion&, const SlicingCriterion&) = default;
};

/// "free@5" for static criteria, "12" for dynamic ones.
std::string to_string(const SlicingCriterion& c);

enum class Provenance { Oracle, Llm, HumanVerified };

const char* to_string(Provenance p);

struct Slice {
  std::vector<int> lines;  // sorted, unique
  SlicingCriterion criterion;
  Provenance provenance = Provenance::Oracle;
};

/// Whether enclosing class and method header lines join a slice.
enum class StructuralLines { Include, Exclude };

StructuralLines structural_lines_from_string(const std::string& text);

class CriterionError : public Error {
 public:
  explicit CriterionError(const std::string& message) : Error("CriterionError", message) {}
};

/// Projects statements to their output lines, adding enclosing class and
/// method headers when requested. Result is sorted and unique.
std::vector<int> project_lines(const frontend::Ast& ast, const std::vector<frontend::StmtId>& stmts,
                               StructuralLines structural);

}  // namespace slicebench::slicing
