#include "nim/ndf/parser.hpp"

#include "nim/ndf/lexer.hpp"

namespace nim::ndf {

namespace {

struct SyntaxError {
    Diagnostic diag;
};

std::optional<ValueKind> field_keyword(std::string_view text) {
    if (text == "String") return ValueKind::Text;
    if (text == "Number") return ValueKind::Number;
    if (text == "Boolean") return ValueKind::Boolean;
    if (text == "Timestamp") return ValueKind::Timestamp;
    return std::nullopt;
}

std::string describe(const Token& t) {
    if (t.kind == TokenKind::Ident) return "'" + t.text + "'";
    return std::string(token_kind_name(t.kind));
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    NdfModel file() {
        NdfModel m;
        if (at_ident("package")) {
            next();
            m.packageName = qname_path("package name");
            expect(TokenKind::Semi, "after package declaration");
        }
        while (peek().kind != TokenKind::End) {
            const Token& t = peek();
            if (t.kind != TokenKind::Ident) fail(t, "expected a type definition or mapping, found " + describe(t));
            if (t.text == "package") fail(t, "package declaration must be the first statement");
            if (peek(1).kind == TokenKind::LBrace) {
                m.types.push_back(typedef_(m.packageName, {}));
            } else {
                m.mappings.push_back(mapping());
            }
        }
        return m;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        const auto idx = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[idx];
    }

    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }

    bool at_ident(std::string_view text) const { return peek().kind == TokenKind::Ident && peek().text == text; }

    [[noreturn]] void fail(const Token& at, std::string message) {
        throw SyntaxError{{Severity::Error, "SYNTAX", std::move(message), at.pos.line, at.pos.column}};
    }

    const Token& expect(TokenKind kind, std::string_view context) {
        if (peek().kind != kind)
            fail(peek(), "expected " + std::string(token_kind_name(kind)) + " " + std::string(context) + ", found " +
                             describe(peek()));
        return next();
    }

    const Token& name(std::string_view what) {
        const Token& t = expect(TokenKind::Ident, std::string("for ") + std::string(what));
        if (is_keyword(t.text)) fail(t, "reserved word '" + t.text + "' cannot be used as " + std::string(what));
        return t;
    }

    std::string qname_path(std::string_view what) {
        std::string out = name(what).text;
        while (peek().kind == TokenKind::Dot) {
            next();
            out += "." + name(what).text;
        }
        return out;
    }

    TypeDef typedef_(const std::string& pkg, const std::string& enclosing) {
        TypeDef t;
        const Token& n = name("type name");
        t.name = n.text;
        t.pos = n.pos;
        const std::string path = enclosing.empty() ? t.name : enclosing + "." + t.name;
        t.qualifiedName = qualify(pkg, path);
        expect(TokenKind::LBrace, "to open type '" + t.name + "'");
        while (peek().kind != TokenKind::RBrace) {
            const Token& m = peek();
            if (m.kind == TokenKind::End) fail(m, "unterminated type '" + t.name + "', expected '}'");
            if (m.kind != TokenKind::Ident) fail(m, "expected a field or nested type, found " + describe(m));
            if (auto kind = field_keyword(m.text)) {
                next();
                const Token& fname = name("field name");
                t.fields.push_back({fname.text, *kind, fname.pos});
                expect(TokenKind::Semi, "after field '" + fname.text + "'");
            } else if (peek(1).kind == TokenKind::LBrace) {
                t.nestedTypes.push_back(typedef_(pkg, path));
            } else {
                fail(m, "unknown field type " + describe(m) + " (expected String, Number, Boolean or Timestamp)");
            }
        }
        next();
        return t;
    }

    // qname "." IDENT: the last segment is the field.
    FieldRef qfield() {
        FieldRef ref;
        ref.pos = peek().pos;
        std::vector<std::string> parts{name("type name").text};
        while (peek().kind == TokenKind::Dot) {
            next();
            parts.push_back(name("name").text);
        }
        if (parts.size() < 2) fail(peek(), "expected '.' and a field name after '" + parts.front() + "'");
        ref.field = parts.back();
        parts.pop_back();
        for (std::size_t i = 0; i < parts.size(); ++i) ref.typeName += (i ? "." : "") + parts[i];
        return ref;
    }

    MappingRule mapping() {
        MappingRule r;
        const FieldRef target = qfield();
        r.targetType = target.typeName;
        r.targetField = target.field;
        r.pos = target.pos;
        expect(TokenKind::Assign, "in mapping for '" + target.str() + "'");
        r.sources.push_back(qfield());
        while (peek().kind == TokenKind::Pipe) {
            next();
            r.sources.push_back(qfield());
        }
        expect(TokenKind::Semi, "to end mapping for '" + target.str() + "'");
        return r;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace

ParseResult parse(std::string_view source) {
    ParseResult result;
    LexResult lexed = lex(source);
    if (!lexed.diagnostics.empty()) {
        result.diagnostics = std::move(lexed.diagnostics);
        return result;
    }
    try {
        Parser p(std::move(lexed.tokens));
        NdfModel m = p.file();
        m.sourceText = std::string(source);
        result.model = std::move(m);
    } catch (const SyntaxError& e) {
        result.diagnostics.push_back(e.diag);
    }
    return result;
}

} // namespace nim::ndf
