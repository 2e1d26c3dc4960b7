#include "nim/ndf/lexer.hpp"

#include <array>
#include <cstdint>

namespace nim::ndf {

namespace {

constexpr std::array<std::string_view, 5> kKeywords = {"package", "String", "Number", "Boolean", "Timestamp"};

bool ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

bool continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

} // namespace

std::string_view token_kind_name(TokenKind kind) {
    switch (kind) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::Semi: return "';'";
    case TokenKind::Dot: return "'.'";
    case TokenKind::Assign: return "':='";
    case TokenKind::Pipe: return "'|'";
    case TokenKind::End: return "end of input";
    }
    return "?";
}

std::size_t find_invalid_utf8(std::string_view text) {
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const auto c = static_cast<unsigned char>(text[i]);
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return i;
        }
        if (i + len > n) return i;
        for (std::size_t k = 1; k < len; ++k) {
            const auto cc = static_cast<unsigned char>(text[i + k]);
            if (!continuation(cc)) return i;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // overlong forms, surrogates, out of range
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
            (cp >= 0xD800 && cp <= 0xDFFF))
            return i;
        i += len;
    }
    return std::string_view::npos;
}

bool is_identifier(std::string_view text) {
    if (text.empty() || !ident_start(text.front())) return false;
    for (char c : text)
        if (!ident_char(c)) return false;
    return true;
}

bool is_keyword(std::string_view text) {
    for (auto k : kKeywords)
        if (k == text) return true;
    return false;
}

LexResult lex(std::string_view src) {
    LexResult out;
    SourcePos pos;

    if (const auto bad = find_invalid_utf8(src); bad != std::string_view::npos) {
        for (std::size_t i = 0; i < bad; ++i) {
            if (src[i] == '\n') {
                ++pos.line;
                pos.column = 1;
            } else if (!continuation(static_cast<unsigned char>(src[i]))) {
                ++pos.column;
            }
        }
        out.diagnostics.push_back({Severity::Error, "UTF8", "input is not valid UTF-8", pos.line, pos.column});
        out.tokens.push_back({TokenKind::End, {}, pos});
        return out;
    }

    std::size_t i = 0;
    auto advance = [&](std::size_t count) {
        for (std::size_t k = 0; k < count && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++pos.line;
                pos.column = 1;
            } else if (!continuation(static_cast<unsigned char>(src[i]))) {
                ++pos.column;
            }
        }
    };

    while (i < src.size()) {
        const char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        const SourcePos start = pos;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && ident_char(src[j])) ++j;
            out.tokens.push_back({TokenKind::Ident, std::string(src.substr(i, j - i)), start});
            advance(j - i);
            continue;
        }
        TokenKind kind{};
        std::size_t width = 1;
        switch (c) {
        case '{': kind = TokenKind::LBrace; break;
        case '}': kind = TokenKind::RBrace; break;
        case ';': kind = TokenKind::Semi; break;
        case '.': kind = TokenKind::Dot; break;
        case '|': kind = TokenKind::Pipe; break;
        case ':':
            if (i + 1 < src.size() && src[i + 1] == '=') {
                kind = TokenKind::Assign;
                width = 2;
                break;
            }
            [[fallthrough]];
        default: {
            std::size_t len = 1;
            while (i + len < src.size() && continuation(static_cast<unsigned char>(src[i + len]))) ++len;
            out.diagnostics.push_back({Severity::Error, "LEX",
                                       "unexpected character '" + std::string(src.substr(i, len)) + "'", start.line,
                                       start.column});
            advance(len);
            continue;
        }
        }
        out.tokens.push_back({kind, std::string(src.substr(i, width)), start});
        advance(width);
    }
    out.tokens.push_back({TokenKind::End, {}, pos});
    return out;
}

} // namespace nim::ndf
