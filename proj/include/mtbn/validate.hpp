#pragma once

#include "mtbn/diagnostics.hpp"
#include "mtbn/model.hpp"

namespace mtbn {

/// Name uniqueness, reference resolution and per-field sanity. Parsing raises
/// the first error reported here; validate_model reports all of them.
ValidationReport check_references(const CondensedModel& model);

/// Full check: references, CPD completeness and normalization, then
/// well-definedness certification. Valid iff no error-severity entry.
ValidationReport validate_model(const CondensedModel& model);

}  // namespace mtbn
