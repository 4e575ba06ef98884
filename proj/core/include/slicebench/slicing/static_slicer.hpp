#pragma once

#include "slicebench/flow/pdg.hpp"
#include "slicebench/slicing/slice.hpp"

namespace slicebench::slicing {

struct StaticSliceOptions {
  StructuralLines structural = StructuralLines::Include;
  /// Adds import lines whose imported name (or wildcard) is referenced by a
  /// statement in the slice.
  bool include_imports = false;
};

/// Seed statement for a static criterion: the textually last statement at
/// `line` that defines or uses `variable`. Throws NotFound or CriterionError.
frontend::StmtId static_seed(const frontend::Ast& ast, const SlicingCriterion& criterion);

/// Statements in the backward slice, sorted by id.
std::vector<frontend::StmtId> static_slice_statements(const frontend::Ast& ast, const flow::Pdg& pdg,
                                                      const SlicingCriterion& criterion);

Slice static_backward_slice(const frontend::Ast& ast, const flow::Pdg& pdg, const SlicingCriterion& criterion,
                            const StaticSliceOptions& options = {});

}  // namespace slicebench::slicing
