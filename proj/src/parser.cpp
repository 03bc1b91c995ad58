#include "llmbda/parser.hpp"

#include <cctype>
#include <functional>
#include <set>
#include <cstdlib>

namespace llmbda {

namespace {

enum class Tok {
    Ident, Int, Str, RawStr,
    Backslash, Dot, LParen, RParen, LBracket, RBracket, LBrace, RBrace,
    Comma, Colon, ColonEq, Question, At, Assign,  // Assign is '='
    Plus, Minus, Star, Slash, EqEq, NotEq, Lt, Le, Gt, Ge, AndAnd, OrOr,
    End,
};

struct StrPart {
    std::string text;
    std::string expr_source;  // empty for the trailing part
    SourceLoc expr_loc;
    bool has_expr = false;
};

struct Token {
    Tok kind;
    std::string text;        // identifier name or raw message
    std::int64_t int_value = 0;
    std::vector<StrPart> parts;  // for Str tokens
    SourceLoc loc;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct Lexer {
    const std::string& src;
    const std::string& origin;
    std::size_t pos = 0;
    int line = 1, col = 1;

    [[noreturn]] void fail(const std::string& msg, SourceLoc at, bool eof = false) const {
        throw ParseError(origin + ":" + std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + msg, at,
                         eof);
    }

    SourceLoc here() const { return SourceLoc{line, col}; }
    bool done() const { return pos >= src.size(); }
    char peek() const { return src[pos]; }
    char next() {
        char c = src[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_ws_and_comments();
            SourceLoc at = here();
            if (done()) {
                out.push_back({Tok::End, "", 0, {}, at});
                return out;
            }
            char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string digits;
                while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) digits += next();
                errno = 0;
                char* end = nullptr;
                long long v = std::strtoll(digits.c_str(), &end, 10);
                if (errno == ERANGE) fail("integer literal out of range", at);
                out.push_back({Tok::Int, digits, v, {}, at});
            } else if (is_ident_start(c)) {
                std::string name;
                while (!done() && is_ident_char(peek())) name += next();
                out.push_back({Tok::Ident, name, 0, {}, at});
            } else if (c == '"') {
                out.push_back(lex_string(at));
            } else if (c == '\'') {
                out.push_back(lex_raw_string(at));
            } else {
                out.push_back(lex_punct(at));
            }
        }
    }

    void skip_ws_and_comments() {
        while (!done()) {
            char c = peek();
            if (c == '#') {
                while (!done() && peek() != '\n') next();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                next();
            } else {
                break;
            }
        }
    }

    Token lex_raw_string(SourceLoc at) {
        next();  // opening quote
        std::string text;
        while (true) {
            if (done()) fail("unterminated raw string (opened here)", at, true);
            char c = next();
            if (c == '\'') break;
            text += c;
        }
        Token t{Tok::RawStr, std::move(text), 0, {}, at};
        return t;
    }

    Token lex_string(SourceLoc at) {
        next();  // opening quote
        std::vector<StrPart> parts;
        std::string text;
        while (true) {
            if (done()) fail("unterminated string (opened here)", at, true);
            SourceLoc char_at = here();
            char c = next();
            if (c == '"') break;
            if (c == '\n') fail("newline in double-quoted string; use \\n or a raw '...' string", char_at);
            if (c == '\\') {
                if (done()) fail("unterminated string (opened here)", at, true);
                char e = next();
                switch (e) {
                    case 'n': text += '\n'; break;
                    case '"': text += '"'; break;
                    case '\\': text += '\\'; break;
                    case '{': text += '{'; break;
                    default: fail(std::string("unknown escape '\\") + e + "' (known: \\n \\\" \\\\ \\{)", char_at);
                }
            } else if (c == '{') {
                // Embedded expression: scan to the matching brace, skipping
                // nested braces and string literals.
                SourceLoc expr_at = here();
                std::string source;
                int depth = 1;
                while (true) {
                    if (done()) fail("unterminated interpolation (opened here)", expr_at, true);
                    char d = next();
                    if (d == '\'') {
                        source += d;
                        while (true) {
                            if (done()) fail("unterminated raw string in interpolation", expr_at, true);
                            char r = next();
                            source += r;
                            if (r == '\'') break;
                        }
                        continue;
                    }
                    if (d == '"') {
                        source += d;
                        while (true) {
                            if (done()) fail("unterminated string in interpolation", expr_at, true);
                            char r = next();
                            source += r;
                            if (r == '\\') {
                                if (done()) fail("unterminated string in interpolation", expr_at, true);
                                source += next();
                            } else if (r == '"') {
                                break;
                            }
                        }
                        continue;
                    }
                    if (d == '{') ++depth;
                    if (d == '}') {
                        if (--depth == 0) break;
                    }
                    source += d;
                }
                StrPart part;
                part.text = std::move(text);
                text.clear();
                part.expr_source = std::move(source);
                part.expr_loc = expr_at;
                part.has_expr = true;
                parts.push_back(std::move(part));
            } else {
                text += c;
            }
        }
        StrPart tail;
        tail.text = std::move(text);
        parts.push_back(std::move(tail));
        Token t{Tok::Str, "", 0, std::move(parts), at};
        return t;
    }

    Token lex_punct(SourceLoc at) {
        char c = next();
        auto two = [&](char second) {
            if (!done() && peek() == second) {
                next();
                return true;
            }
            return false;
        };
        switch (c) {
            case '\\': return {Tok::Backslash, "\\", 0, {}, at};
            case '.': return {Tok::Dot, ".", 0, {}, at};
            case '(': return {Tok::LParen, "(", 0, {}, at};
            case ')': return {Tok::RParen, ")", 0, {}, at};
            case '[': return {Tok::LBracket, "[", 0, {}, at};
            case ']': return {Tok::RBracket, "]", 0, {}, at};
            case '{': return {Tok::LBrace, "{", 0, {}, at};
            case '}': return {Tok::RBrace, "}", 0, {}, at};
            case ',': return {Tok::Comma, ",", 0, {}, at};
            case ':': return two('=') ? Token{Tok::ColonEq, ":=", 0, {}, at} : Token{Tok::Colon, ":", 0, {}, at};
            case '?': return {Tok::Question, "?", 0, {}, at};
            case '@': return {Tok::At, "@", 0, {}, at};
            case '=': return two('=') ? Token{Tok::EqEq, "==", 0, {}, at} : Token{Tok::Assign, "=", 0, {}, at};
            case '!':
                if (two('=')) return {Tok::NotEq, "!=", 0, {}, at};
                fail("unexpected '!' (use 'not' for negation)", at);
            case '<': return two('=') ? Token{Tok::Le, "<=", 0, {}, at} : Token{Tok::Lt, "<", 0, {}, at};
            case '>': return two('=') ? Token{Tok::Ge, ">=", 0, {}, at} : Token{Tok::Gt, ">", 0, {}, at};
            case '+': return {Tok::Plus, "+", 0, {}, at};
            case '-': return {Tok::Minus, "-", 0, {}, at};
            case '*': return {Tok::Star, "*", 0, {}, at};
            case '/': return {Tok::Slash, "/", 0, {}, at};
            case '&':
                if (two('&')) return {Tok::AndAnd, "&&", 0, {}, at};
                fail("unexpected '&' (did you mean '&&'?)", at);
            case '|':
                if (two('|')) return {Tok::OrOr, "||", 0, {}, at};
                fail("unexpected '|' (did you mean '||'?)", at);
            default: fail(std::string("unexpected character '") + c + "'", at);
        }
    }
};

bool is_keyword(const std::string& s) {
    static const std::set<std::string> kw = {"let", "in", "if", "then", "else", "true", "false", "not",
                                             "is_fn", "fork", "clear", "assert", "strong_test", "test_conversation"};
    return kw.count(s) > 0;
}

struct Parser {
    std::vector<Token> toks;
    std::size_t pos = 0;
    const LatticeSpec& lattice;
    const std::string& origin;
    bool response_mode = false;  // response values may use a leading '-' on integers
    // Offside rule: inside a top-level item, an application argument may start
    // on a later line only when indented past the item's first column. Zero
    // disables the rule (delimited contexts).
    int item_col = 0;

    bool continues_item() const {
        if (item_col == 0 || pos == 0) return true;
        const Token& prev = toks[pos - 1];
        const Token& next = peek();
        return next.loc.line == prev.loc.line || next.loc.column > item_col;
    }

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos + ahead;
        return i < toks.size() ? toks[i] : toks.back();
    }
    const Token& advance() { return toks[pos < toks.size() - 1 ? pos++ : pos]; }
    bool at(Tok k) const { return peek().kind == k; }
    bool at_ident(const char* name) const { return peek().kind == Tok::Ident && peek().text == name; }

    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        bool eof = t.kind == Tok::End;
        std::string got = eof ? "end of input" : "'" + (t.kind == Tok::Str ? std::string("\"...\"") : t.text) + "'";
        throw ParseError(origin + ":" + std::to_string(t.loc.line) + ":" + std::to_string(t.loc.column) + ": " + msg +
                             ", got " + got,
                         t.loc, eof);
    }

    Token expect(Tok k, const char* what) {
        if (!at(k)) fail(std::string("expected ") + what);
        return toks[pos++];
    }

    // --- label literals ---------------------------------------------------

    // True when the upcoming tokens form `{tag, ...}` followed by ':' or '?'.
    bool looks_like_label() const {
        if (!at(Tok::LBrace)) return false;
        std::size_t i = pos + 1;
        if (toks[i].kind == Tok::RBrace) {
            Tok after = toks[i + 1].kind;
            return after == Tok::Colon || after == Tok::Question;
        }
        while (true) {
            if (toks[i].kind != Tok::Ident) return false;
            ++i;
            if (toks[i].kind == Tok::Comma) {
                ++i;
                continue;
            }
            break;
        }
        if (toks[i].kind != Tok::RBrace) return false;
        Tok after = toks[i + 1].kind;
        return after == Tok::Colon || after == Tok::Question;
    }

    Label parse_label_literal() {
        SourceLoc loc = peek().loc;
        expect(Tok::LBrace, "a label literal '{...}'");
        std::vector<std::string> tags;
        if (!at(Tok::RBrace)) {
            while (true) {
                tags.push_back(expect(Tok::Ident, "a label tag").text);
                if (at(Tok::Comma)) {
                    advance();
                    continue;
                }
                break;
            }
        }
        expect(Tok::RBrace, "'}' to close the label");
        auto label = lattice.resolve_tags(tags);
        if (!label) {
            std::string joined;
            for (std::size_t i = 0; i < tags.size(); ++i) joined += (i ? "," : "") + tags[i];
            throw ParseError(origin + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.column) +
                                 ": unknown label '{" + joined + "}' in lattice '" + lattice.name() + "'",
                             loc, false);
        }
        return *label;
    }

    // --- expression grammar -------------------------------------------------

    ExprPtr parse_expr() {
        SourceLoc loc = peek().loc;
        ExprPtr e = parse_or();
        if (at(Tok::ColonEq)) {
            const auto* field = as<FieldNode>(e);
            if (!field) fail("':=' needs a field path like r.name on its left");
            advance();
            ExprPtr value = parse_expr();
            return make_expr(FieldUpdateNode{field->record, field->name, value}, loc);
        }
        return e;
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at(Tok::OrOr)) {
            SourceLoc loc = advance().loc;
            lhs = make_expr(BinOpNode{BinOpKind::Or, lhs, parse_and()}, loc);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_cmp();
        while (at(Tok::AndAnd)) {
            SourceLoc loc = advance().loc;
            lhs = make_expr(BinOpNode{BinOpKind::And, lhs, parse_cmp()}, loc);
        }
        return lhs;
    }

    ExprPtr parse_cmp() {
        ExprPtr lhs = parse_add();
        while (true) {
            BinOpKind op;
            switch (peek().kind) {
                case Tok::EqEq: op = BinOpKind::Eq; break;
                case Tok::NotEq: op = BinOpKind::Ne; break;
                case Tok::Lt: op = BinOpKind::Lt; break;
                case Tok::Le: op = BinOpKind::Le; break;
                case Tok::Gt: op = BinOpKind::Gt; break;
                case Tok::Ge: op = BinOpKind::Ge; break;
                default: return lhs;
            }
            SourceLoc loc = advance().loc;
            lhs = make_expr(BinOpNode{op, lhs, parse_add()}, loc);
        }
    }

    ExprPtr parse_add() {
        ExprPtr lhs = parse_mul();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            BinOpKind op = at(Tok::Plus) ? BinOpKind::Add : BinOpKind::Sub;
            SourceLoc loc = advance().loc;
            lhs = make_expr(BinOpNode{op, lhs, parse_mul()}, loc);
        }
        return lhs;
    }

    ExprPtr parse_mul() {
        ExprPtr lhs = parse_unary();
        while (at(Tok::Star) || at(Tok::Slash)) {
            BinOpKind op = at(Tok::Star) ? BinOpKind::Mul : BinOpKind::Div;
            SourceLoc loc = advance().loc;
            lhs = make_expr(BinOpNode{op, lhs, parse_unary()}, loc);
        }
        return lhs;
    }

    // Operand of a prefix form: open forms are allowed directly so that
    // e.g. `fork \x.x` and `{U}:\x.x` parse without parentheses.
    ExprPtr parse_prefix_operand() {
        if (at(Tok::Backslash) || at_ident("let") || at_ident("if")) return parse_open_form();
        return parse_unary();
    }

    ExprPtr parse_unary() {
        SourceLoc loc = peek().loc;
        if (at(Tok::Backslash) || at_ident("let") || at_ident("if")) return parse_open_form();
        if (at(Tok::At)) {
            advance();
            ExprPtr arg = parse_atom();
            return parse_postfix_suffixes(make_expr(PromptNode{arg}, loc));
        }
        if (at_ident("not")) {
            advance();
            return make_expr(NotNode{parse_prefix_operand()}, loc);
        }
        if (at_ident("is_fn")) {
            advance();
            return make_expr(IsFnNode{parse_prefix_operand()}, loc);
        }
        if (at_ident("fork")) {
            advance();
            return make_expr(ForkNode{parse_prefix_operand()}, loc);
        }
        if (at_ident("assert")) {
            advance();
            Label l = parse_label_literal();
            return make_expr(AssertNode{l, parse_prefix_operand()}, loc);
        }
        if (at_ident("strong_test")) {
            advance();
            Label l = parse_label_literal();
            return make_expr(StrongTestNode{parse_prefix_operand(), l}, loc);
        }
        if (at_ident("test_conversation")) {
            // Derived form: (fork @())?m restores the history after probing it.
            advance();
            Label l = parse_label_literal();
            ExprPtr probe = make_expr(ForkNode{make_expr(PromptNode{unit_lit()}, loc)}, loc);
            return make_expr(TestNode{probe, l}, loc);
        }
        if (looks_like_label()) {
            Label l = parse_label_literal();
            if (at(Tok::Colon)) {
                advance();
                return make_expr(LabeledNode{l, parse_prefix_operand()}, loc);
            }
            expect(Tok::Question, "':' or '?' after a label literal");
            return make_expr(TestNode{parse_prefix_operand(), l}, loc);
        }
        return parse_app();
    }

    ExprPtr parse_open_form() {
        SourceLoc loc = peek().loc;
        if (at(Tok::Backslash)) {
            advance();
            std::string param = expect(Tok::Ident, "a parameter name after '\\'").text;
            if (is_keyword(param) && param != "_") fail("'" + param + "' is a keyword");
            expect(Tok::Dot, "'.' after the lambda parameter");
            return make_expr(LambdaNode{param, parse_expr()}, loc);
        }
        if (at_ident("let")) {
            advance();
            std::string name = expect(Tok::Ident, "a name after 'let'").text;
            expect(Tok::Assign, "'=' in let");
            ExprPtr bound = parse_expr();
            if (!at_ident("in")) fail("expected 'in' (top-level 'let' has no body)");
            advance();
            return make_expr(LetNode{name, bound, parse_expr()}, loc);
        }
        if (at_ident("if")) {
            advance();
            ExprPtr cond = parse_expr();
            if (!at_ident("then")) fail("expected 'then'");
            advance();
            ExprPtr then_branch = parse_expr();
            if (!at_ident("else")) fail("expected 'else'");
            advance();
            ExprPtr else_branch = parse_expr();
            return make_expr(IfNode{cond, then_branch, else_branch}, loc);
        }
        fail("expected an expression");
    }

    bool starts_atom() const {
        switch (peek().kind) {
            case Tok::Int:
            case Tok::Str:
            case Tok::RawStr:
            case Tok::LParen:
            case Tok::LBracket:
                return true;
            case Tok::LBrace:
                return !looks_like_label();
            case Tok::Ident:
                return !is_keyword(peek().text) || peek().text == "true" || peek().text == "false" ||
                       peek().text == "clear";
            default:
                return false;
        }
    }

    ExprPtr parse_app() {
        ExprPtr fn = parse_postfix();
        while (starts_atom() && continues_item()) {
            SourceLoc loc = peek().loc;
            fn = make_expr(AppNode{fn, parse_postfix()}, loc);
        }
        return fn;
    }

    ExprPtr parse_postfix() { return parse_postfix_suffixes(parse_atom()); }

    ExprPtr parse_postfix_suffixes(ExprPtr e) {
        while (at(Tok::Dot)) {
            SourceLoc loc = advance().loc;
            if (at(Tok::LBracket)) {
                advance();
                ExprPtr index = parse_expr();
                expect(Tok::RBracket, "']' to close the index");
                e = make_expr(IndexNode{e, index}, loc);
            } else {
                std::string name = expect(Tok::Ident, "a field name or '[index]' after '.'").text;
                e = make_expr(FieldNode{e, name}, loc);
            }
        }
        return e;
    }

    ExprPtr parse_atom() {
        SourceLoc loc = peek().loc;
        switch (peek().kind) {
            case Tok::Int: {
                std::int64_t v = advance().int_value;
                return make_expr(LitNode{v}, loc);
            }
            case Tok::Minus: {
                // Negative integer literals appear only in model responses
                // (programs write `0 - n`).
                if (!response_mode || peek(1).kind != Tok::Int) fail("expected an expression");
                advance();
                std::int64_t v = advance().int_value;
                return make_expr(LitNode{-v}, loc);
            }
            case Tok::RawStr:
                return make_expr(LitNode{advance().text}, loc);
            case Tok::Str:
                return parse_string_token(advance(), loc);
            case Tok::LParen: {
                advance();
                if (at(Tok::RParen)) {
                    advance();
                    return make_expr(LitNode{UnitLit{}}, loc);
                }
                ExprPtr inner = parse_expr();
                expect(Tok::RParen, "')'");
                return inner;
            }
            case Tok::LBracket: {
                advance();
                std::vector<ExprPtr> elements;
                if (!at(Tok::RBracket)) {
                    while (true) {
                        elements.push_back(parse_expr());
                        if (at(Tok::Comma)) {
                            advance();
                            continue;
                        }
                        break;
                    }
                }
                expect(Tok::RBracket, "']' to close the array");
                return make_expr(ArrayNode{std::move(elements)}, loc);
            }
            case Tok::LBrace:
                return parse_record(loc);
            case Tok::Ident: {
                const std::string& name = peek().text;
                if (name == "true" || name == "false") {
                    bool b = name == "true";
                    advance();
                    return make_expr(LitNode{b}, loc);
                }
                if (name == "clear") {
                    advance();
                    return make_expr(ClearNode{}, loc);
                }
                if (is_keyword(name)) fail("expected an expression");
                advance();
                return make_expr(VarNode{name}, loc);
            }
            default:
                fail("expected an expression");
        }
    }

    ExprPtr parse_record(SourceLoc loc) {
        expect(Tok::LBrace, "'{'");
        if (at(Tok::RBrace))
            fail("empty braces: '{}' is the bottom label and needs ':' or '?'; there is no empty record");
        std::vector<std::pair<std::string, ExprPtr>> fields;
        while (true) {
            std::string name;
            if (at(Tok::Str)) {
                Token t = advance();
                if (t.parts.size() != 1 || t.parts[0].has_expr) fail("record field names cannot interpolate");
                name = t.parts[0].text;
            } else {
                name = expect(Tok::Ident, "a field name").text;
            }
            for (const auto& [existing, _] : fields)
                if (existing == name) fail("duplicate record field '" + name + "'");
            expect(Tok::Colon, "':' after the field name");
            fields.emplace_back(std::move(name), parse_expr());
            if (at(Tok::Comma)) {
                advance();
                continue;
            }
            break;
        }
        expect(Tok::RBrace, "'}' to close the record");
        return make_expr(RecordNode{std::move(fields)}, loc);
    }

    ExprPtr parse_string_token(const Token& t, SourceLoc loc) {
        bool any_expr = false;
        for (const auto& p : t.parts) any_expr |= p.has_expr;
        if (!any_expr) return make_expr(LitNode{t.parts.empty() ? std::string() : t.parts[0].text}, loc);
        InterpNode node;
        for (const auto& p : t.parts) {
            InterpNode::Part out{p.text, nullptr};
            if (p.has_expr) {
                Lexer sub{p.expr_source, origin};
                Parser sp{sub.run(), 0, lattice, origin, response_mode};
                // Report positions relative to the interpolation site.
                try {
                    out.expr = sp.parse_expr();
                    if (!sp.at(Tok::End)) sp.fail("expected '}' to end the interpolation");
                } catch (const ParseError& e) {
                    throw ParseError(std::string(e.what()) + " (inside interpolation at " +
                                         std::to_string(p.expr_loc.line) + ":" + std::to_string(p.expr_loc.column) +
                                         ")",
                                     p.expr_loc, false);
                }
            }
            node.parts.push_back(std::move(out));
        }
        return make_expr(std::move(node), loc);
    }

    std::vector<Item> parse_items() {
        std::vector<Item> items;
        while (!at(Tok::End)) {
            SourceLoc loc = peek().loc;
            item_col = loc.column;
            if (at_ident("let")) {
                // A top-level `let x = e` is a binding unless followed by `in`.
                advance();
                std::string name = expect(Tok::Ident, "a name after 'let'").text;
                expect(Tok::Assign, "'=' in let");
                ExprPtr bound = parse_expr();
                if (at_ident("in")) {
                    advance();
                    ExprPtr body = parse_expr();
                    items.push_back(Item{std::nullopt, make_expr(LetNode{name, bound, body}, loc), loc});
                } else {
                    items.push_back(Item{name, bound, loc});
                }
            } else {
                items.push_back(Item{std::nullopt, parse_expr(), loc});
            }
        }
        return items;
    }
};

}  // namespace

std::vector<Item> parse_program(const std::string& text, const LatticeSpec& lattice, const std::string& origin) {
    Lexer lex{text, origin};
    Parser p{lex.run(), 0, lattice, origin, false};
    return p.parse_items();
}

ExprPtr parse_expression(const std::string& text, const LatticeSpec& lattice, const std::string& origin) {
    Lexer lex{text, origin};
    Parser p{lex.run(), 0, lattice, origin, false};
    ExprPtr e = p.parse_expr();
    if (!p.at(Tok::End)) p.fail("expected end of input");
    return e;
}

ExprPtr parse_response(const std::string& text, const LatticeSpec& lattice, const PreludeDefs& prelude) {
    auto failure = [&](const std::string& msg) {
        return make_expr(ArrayNode{{bool_lit(false), string_lit(msg)}});
    };
    ExprPtr value;
    try {
        Lexer lex{text, "<response>"};
        Parser p{lex.run(), 0, lattice, "<response>", true};
        value = p.parse_expr();
        if (!p.at(Tok::End)) p.fail("expected a single value");
    } catch (const ParseError& e) {
        return failure(e.what());
    }
    if (mentions_labels(value)) return failure("<response>: label and test expressions are not allowed in responses");
    // Must be a value form, not an expression needing computation.
    bool ok = std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            return std::is_same_v<T, LitNode> || std::is_same_v<T, LambdaNode> || std::is_same_v<T, ArrayNode> ||
                   std::is_same_v<T, RecordNode> || std::is_same_v<T, VarNode>;
        },
        value->node);
    std::function<bool(const ExprPtr&)> value_form = [&](const ExprPtr& e) -> bool {
        return std::visit(
            [&](const auto& x) -> bool {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, LitNode> || std::is_same_v<T, LambdaNode> ||
                              std::is_same_v<T, VarNode>) {
                    return true;
                } else if constexpr (std::is_same_v<T, ArrayNode>) {
                    for (const auto& el : x.elements)
                        if (!value_form(el)) return false;
                    return true;
                } else if constexpr (std::is_same_v<T, RecordNode>) {
                    for (const auto& [_, v] : x.fields)
                        if (!value_form(v)) return false;
                    return true;
                } else {
                    return false;
                }
            },
            e->node);
    };
    if (!ok || !value_form(value)) return failure("<response>: not a value (a literal, lambda, array, or record)");
    // Expand prelude constants to their definitions, then require closedness.
    for (const auto& name : free_vars(value)) {
        auto it = prelude.find(name);
        if (it != prelude.end()) value = substitute(value, name, it->second);
    }
    auto remaining = free_vars(value);
    if (!remaining.empty())
        return failure("<response>: unknown identifier '" + *remaining.begin() + "' (not a prelude constant)");
    return make_expr(ArrayNode{{bool_lit(true), value}});
}

}  // namespace llmbda
