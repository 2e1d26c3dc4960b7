#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nim/ndf/ast.hpp"

namespace nim::ndf {

enum class TokenKind { Ident, LBrace, RBrace, Semi, Dot, Assign, Pipe, End };

std::string_view token_kind_name(TokenKind kind);

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    SourcePos pos;
};

struct LexResult {
    std::vector<Token> tokens; // always terminated by an End token
    std::vector<Diagnostic> diagnostics;
};

/// Splits NDF source into tokens. `//` comments and whitespace are dropped.
/// Invalid UTF-8 yields a `UTF8` diagnostic and no tokens beyond End;
/// stray characters yield `LEX` diagnostics and are skipped.
LexResult lex(std::string_view source);

/// Returns the byte offset of the first invalid UTF-8 sequence, or npos.
std::size_t find_invalid_utf8(std::string_view text);

bool is_identifier(std::string_view text);
bool is_keyword(std::string_view text);

} // namespace nim::ndf
