#pragma once

#include <string>

#include "nim/ndf/ast.hpp"

namespace nim::ndf {

/// Canonical text form: package line, then types (fields before nested
/// types, two-space indent), then mappings. Reparses to an equal model.
std::string pretty_print(const NdfModel& model);

} // namespace nim::ndf
