#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "nim/ndf/ast.hpp"

namespace nim::ndf {

struct ParseResult {
    std::optional<NdfModel> model;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return model.has_value(); }
};

/// Parses one NDF file. Never throws on bad input: failures come back as
/// positioned diagnostics (codes `UTF8`, `LEX`, `SYNTAX`).
///
///   file     := [ "package" qname ";" ] { typedef | mapping }
///   typedef  := IDENT "{" { fielddef | typedef } "}"
///   fielddef := ("String"|"Number"|"Boolean"|"Timestamp") IDENT ";"
///   mapping  := qfield ":=" qfield { "|" qfield } ";"
///   qfield   := qname "." IDENT
///   qname    := IDENT { "." IDENT }
ParseResult parse(std::string_view source);

} // namespace nim::ndf
