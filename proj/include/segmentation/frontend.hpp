#pragma once

#include <cctype>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "segmentation/ir.hpp"

namespace seg {

struct FrontendOptions {
    // Drop the loop step statement from the IR (coarser segments).
    bool reduced_loop = false;
    // Emit one input/output statement per variable of an I/O call; grouped
    // statements keep inseparable variables together.
    bool split_io = true;
};

struct FrontendError : std::runtime_error {
    FrontendError(int line_number, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_number) + ": " + msg),
          line(line_number) {}
    int line;
};

// IR index -> source line range of the originating construct.
class SourceMap {
public:
    std::vector<std::pair<int, int>> entries;

    std::pair<int, int> map_range(int lo, int hi) const {
        if (lo > hi) throw std::out_of_range("empty source-map range");
        if (lo < 0 || hi >= static_cast<int>(entries.size()))
            throw std::out_of_range("unmapped IR index");
        int a = entries[static_cast<size_t>(lo)].first;
        int b = entries[static_cast<size_t>(lo)].second;
        for (int i = lo + 1; i <= hi; ++i) {
            a = std::min(a, entries[static_cast<size_t>(i)].first);
            b = std::max(b, entries[static_cast<size_t>(i)].second);
        }
        return {a, b};
    }

    std::string serialize() const {
        std::string out;
        for (size_t i = 0; i < entries.size(); ++i)
            out += std::to_string(i) + " " + std::to_string(entries[i].first) + " " +
                   std::to_string(entries[i].second) + "\n";
        return out;
    }

    static SourceMap parse(const std::string& text) {
        SourceMap m;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            int idx, a, b;
            if (!(ls >> idx >> a >> b)) throw std::runtime_error("malformed source map line");
            if (idx != static_cast<int>(m.entries.size()))
                throw std::runtime_error("source map indices out of order");
            m.entries.push_back({a, b});
        }
        return m;
    }
};

namespace toy {

struct Token {
    enum class Kind { Ident, Number, Str, CharLit, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    int line = 1;
};

inline std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    size_t i = 0;
    int line = 1;
    const size_t n = src.size();
    auto peek = [&](size_t k) { return i + k < n ? src[i + k] : '\0'; };
    while (i < n) {
        char c = src[i];
        if (c == '\n') { ++line; ++i; continue; }
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        if (c == '/' && peek(1) == '/') {
            while (i < n && src[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && peek(1) == '*') {
            i += 2;
            while (i < n && !(src[i] == '*' && peek(1) == '/')) {
                if (src[i] == '\n') ++line;
                ++i;
            }
            if (i >= n) throw FrontendError(line, "unterminated comment");
            i += 2;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < n && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            out.push_back({Token::Kind::Ident, src.substr(i, j - i), line});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < n && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
            out.push_back({Token::Kind::Number, src.substr(i, j - i), line});
            i = j;
            continue;
        }
        if (c == '"' || c == '\'') {
            char quote = c;
            size_t j = i + 1;
            while (j < n && src[j] != quote) {
                if (src[j] == '\\') ++j;
                if (src[j] == '\n') ++line;
                ++j;
            }
            if (j >= n) throw FrontendError(line, "unterminated literal");
            out.push_back({quote == '"' ? Token::Kind::Str : Token::Kind::CharLit,
                           src.substr(i + 1, j - i - 1), line});
            i = j + 1;
            continue;
        }
        static const char* two_char[] = {"++", "--", "+=", "-=", "*=", "/=", "%=",
                                         "==", "!=", "<=", ">=", "&&", "||", "<<", ">>"};
        std::string pair{c, peek(1)};
        bool matched = false;
        for (const char* p : two_char) {
            if (pair == p) {
                out.push_back({Token::Kind::Punct, pair, line});
                i += 2;
                matched = true;
                break;
            }
        }
        if (matched) continue;
        out.push_back({Token::Kind::Punct, std::string(1, c), line});
        ++i;
    }
    out.push_back({Token::Kind::End, "", line});
    return out;
}

inline bool is_type_keyword(const std::string& w) {
    static const char* kws[] = {"void", "int",  "float",    "double", "char",
                                "long", "bool", "unsigned", "signed", "short"};
    for (const char* k : kws)
        if (w == k) return true;
    return false;
}

class Translator {
public:
    Translator(const std::string& src, FrontendOptions options)
        : toks(lex(src)), opts(options) {}

    std::pair<IrProgram, SourceMap> run() {
        skip_function_prologue();
        while (!at_end() && !(cur().kind == Token::Kind::Punct && cur().text == "}"))
            parse_stmt();
        if (in_function) {
            expect_punct("}");
            while (accept_punct(";")) {}
        }
        if (!at_end()) throw err("trailing tokens; only one function per file");
        SourceMap map;
        map.entries = lines;
        return {std::move(program), std::move(map)};
    }

private:
    std::vector<Token> toks;
    FrontendOptions opts;
    size_t pos = 0;
    bool in_function = false;
    IrProgram program;
    std::vector<std::pair<int, int>> lines;

    const Token& cur() const { return toks[pos]; }
    const Token& ahead(size_t k) const {
        size_t j = pos + k;
        return j < toks.size() ? toks[j] : toks.back();
    }
    bool at_end() const { return cur().kind == Token::Kind::End; }
    void advance() { if (!at_end()) ++pos; }

    FrontendError err(const std::string& msg) const { return FrontendError(cur().line, msg); }

    bool peek_punct(const std::string& t) const {
        return cur().kind == Token::Kind::Punct && cur().text == t;
    }
    bool accept_punct(const std::string& t) {
        if (!peek_punct(t)) return false;
        advance();
        return true;
    }
    void expect_punct(const std::string& t) {
        if (!accept_punct(t)) throw err("expected '" + t + "'");
    }
    bool peek_kw(const std::string& w) const {
        return cur().kind == Token::Kind::Ident && cur().text == w;
    }
    bool accept_kw(const std::string& w) {
        if (!peek_kw(w)) return false;
        advance();
        return true;
    }

    int emit(IrKind kind, std::vector<std::string> defined, std::vector<std::string> used,
             std::optional<int> length, int line) {
        IrStatement s;
        s.kind = kind;
        s.defined = std::move(defined);
        s.used = std::move(used);
        s.block_length = length;
        program.statements.push_back(std::move(s));
        lines.push_back({line, line});
        return program.size() - 1;
    }

    void patch_length(int idx, int len) {
        program.statements[static_cast<size_t>(idx)].block_length = len;
    }

    void skip_function_prologue() {
        // type ident ( [void] ) {  -- the body is what gets translated.
        if (!(cur().kind == Token::Kind::Ident && is_type_keyword(cur().text))) return;
        size_t k = 0;
        while (ahead(k).kind == Token::Kind::Ident && is_type_keyword(ahead(k).text)) ++k;
        if (!(ahead(k).kind == Token::Kind::Ident &&
              ahead(k + 1).kind == Token::Kind::Punct && ahead(k + 1).text == "("))
            return; // a declaration, not a function header
        pos += k + 2;
        accept_kw("void");
        if (!accept_punct(")")) throw err("parameters are not supported");
        expect_punct("{");
        in_function = true;
    }

    // Scan an expression without interpreting it, collecting identifiers in
    // order of first occurrence. Stops at ';' ')' ',' at depth zero.
    std::vector<std::string> scan_expr_vars(const std::set<std::string>& stops,
                                            bool allow_empty = false) {
        std::vector<std::string> vars;
        std::set<std::string> seen;
        int depth = 0;
        int consumed = 0;
        auto finish = [&]() {
            if (consumed == 0 && !allow_empty) throw err("expected an expression");
            return vars;
        };
        for (;;) {
            if (at_end()) throw err("unterminated expression");
            if (cur().kind == Token::Kind::Punct) {
                const std::string& t = cur().text;
                if (depth == 0 && stops.count(t)) return finish();
                if (t == "(") ++depth;
                if (t == ")") {
                    if (depth == 0 && stops.count(")")) return finish();
                    --depth;
                    if (depth < 0) throw err("unbalanced parentheses");
                }
                if (t == "[" || t == "{") throw err("unsupported construct in expression");
                advance();
                ++consumed;
                continue;
            }
            if (cur().kind == Token::Kind::Ident) {
                if (ahead(1).kind == Token::Kind::Punct && ahead(1).text == "(")
                    throw err("unsupported construct: function call '" + cur().text + "'");
                if (seen.insert(cur().text).second) vars.push_back(cur().text);
                advance();
                ++consumed;
                continue;
            }
            advance(); // literals
            ++consumed;
        }
    }

    std::vector<std::string> paren_condition_vars() {
        expect_punct("(");
        auto vars = scan_expr_vars({")"});
        expect_punct(")");
        return vars;
    }

    // Statements return how many IR statements they contributed at the
    // current nesting level; block lengths count exactly these.
    int parse_stmt() {
        if (cur().kind == Token::Kind::Ident) {
            const std::string& w = cur().text;
            if (is_type_keyword(w)) return parse_declaration();
            if (w == "if") return parse_if_like(IrKind::If);
            if (w == "while") return parse_while();
            if (w == "for") return parse_for();
            if (w == "switch") return parse_switch();
            if (w == "break") return parse_jump(IrKind::Break);
            if (w == "continue") return parse_jump(IrKind::Continue);
            if (w == "scanf") return parse_scanf();
            if (w == "printf") return parse_printf();
            if (w == "return" || w == "goto" || w == "do")
                throw err("unsupported construct: " + w);
            return parse_assignment();
        }
        if (peek_punct("{")) {
            advance();
            int count = 0;
            while (!peek_punct("}")) {
                if (at_end()) throw err("unterminated block");
                count += parse_stmt();
            }
            advance();
            return count;
        }
        if (accept_punct(";")) return 0;
        if (peek_punct("++") || peek_punct("--")) {
            int line = cur().line;
            advance();
            if (cur().kind != Token::Kind::Ident) throw err("expected identifier");
            std::string name = cur().text;
            advance();
            expect_punct(";");
            emit(IrKind::Assign, {name}, {name}, std::nullopt, line);
            return 1;
        }
        throw err("syntax error near '" + cur().text + "'");
    }

    int parse_declaration() {
        int count = 0;
        while (cur().kind == Token::Kind::Ident && is_type_keyword(cur().text)) advance();
        if (peek_punct("*")) throw err("unsupported construct: pointer declaration");
        for (;;) {
            if (cur().kind != Token::Kind::Ident) throw err("expected identifier");
            std::string name = cur().text;
            int line = cur().line;
            advance();
            if (accept_punct("=")) {
                auto vars = scan_expr_vars({",", ";"});
                emit(IrKind::Assign, {name}, vars, std::nullopt, line);
                ++count;
            }
            if (accept_punct(",")) continue;
            expect_punct(";");
            return count;
        }
    }

    int parse_jump(IrKind kind) {
        int line = cur().line;
        advance();
        expect_punct(";");
        emit(kind, {}, {}, std::nullopt, line);
        return 1;
    }

    int parse_body() {
        if (peek_punct("{")) {
            advance();
            int count = 0;
            while (!peek_punct("}")) {
                if (at_end()) throw err("unterminated block");
                count += parse_stmt();
            }
            advance();
            return count;
        }
        return parse_stmt();
    }

    // if/elseif headers own their branch; an else-if or else is the last
    // direct child of the preceding branch, as in the IR's nesting scheme.
    int parse_if_like(IrKind kind) {
        int line = cur().line;
        advance(); // 'if'
        auto vars = paren_condition_vars();
        int idx = emit(kind, {}, vars, 0, line);
        int children = parse_body();
        if (peek_kw("else")) {
            int else_line = cur().line;
            advance();
            if (peek_kw("if")) {
                children += parse_if_like(IrKind::ElseIf);
            } else {
                int eidx = emit(IrKind::Else, {}, {}, 0, else_line);
                int inner = parse_body();
                patch_length(eidx, inner);
                children += 1;
            }
        }
        patch_length(idx, children);
        return 1;
    }

    int parse_while() {
        int line = cur().line;
        advance();
        auto vars = paren_condition_vars();
        int idx = emit(IrKind::Loop, {}, vars, 0, line);
        int children = parse_body();
        patch_length(idx, children);
        return 1;
    }

    int parse_for() {
        int line = cur().line;
        advance();
        expect_punct("(");
        int emitted = 0;
        if (!peek_punct(";")) {
            if (cur().kind != Token::Kind::Ident) throw err("expected loop variable");
            std::string name = cur().text;
            advance();
            expect_punct("=");
            auto vars = scan_expr_vars({";"});
            emit(IrKind::Assign, {name}, vars, std::nullopt, line);
            ++emitted;
        }
        expect_punct(";");
        auto cond_vars = scan_expr_vars({";"}, /*allow_empty=*/true);
        expect_punct(";");
        std::optional<IrStatement> step;
        if (!peek_punct(")")) step = parse_step_clause();
        expect_punct(")");
        int idx = emit(IrKind::Loop, {}, cond_vars, 0, line);
        ++emitted;
        int children = parse_body();
        if (step && !opts.reduced_loop) {
            program.statements.push_back(*step);
            lines.push_back({line, line});
            ++children;
        }
        patch_length(idx, children);
        return emitted;
    }

    IrStatement parse_step_clause() {
        IrStatement s;
        s.kind = IrKind::Assign;
        if (peek_punct("++") || peek_punct("--")) {
            advance();
            if (cur().kind != Token::Kind::Ident) throw err("expected identifier");
            s.defined = {cur().text};
            s.used = {cur().text};
            advance();
            return s;
        }
        if (cur().kind != Token::Kind::Ident) throw err("expected step clause");
        std::string name = cur().text;
        advance();
        if (accept_punct("++") || accept_punct("--")) {
            s.defined = {name};
            s.used = {name};
            return s;
        }
        static const char* compound[] = {"+=", "-=", "*=", "/=", "%="};
        for (const char* op : compound) {
            if (accept_punct(op)) {
                auto vars = scan_expr_vars({")"});
                s.defined = {name};
                s.used.push_back(name);
                for (auto& v : vars)
                    if (v != name) s.used.push_back(v);
                return s;
            }
        }
        expect_punct("=");
        auto vars = scan_expr_vars({")"});
        s.defined = {name};
        s.used = vars;
        return s;
    }

    int parse_switch() {
        int line = cur().line;
        advance();
        auto vars = paren_condition_vars();
        int didx = emit(IrKind::DoCase, {}, vars, 0, line);
        expect_punct("{");
        int prev_case = -1;
        int prev_count = 0;
        int cases = 0;
        while (!peek_punct("}")) {
            if (at_end()) throw err("unterminated switch");
            if (!(peek_kw("case") || peek_kw("default")))
                throw err("expected case or default");
            int cline = cur().line;
            bool is_default = cur().text == "default";
            advance();
            if (!is_default) {
                while (!peek_punct(":")) {
                    if (at_end()) throw err("unterminated case label");
                    advance();
                }
            }
            expect_punct(":");
            int cidx = emit(IrKind::Case, {}, {}, 0, cline);
            if (prev_case < 0)
                patch_length(didx, 1);
            else
                patch_length(prev_case, prev_count + 1);
            int count = 0;
            while (!(peek_kw("case") || peek_kw("default") || peek_punct("}")))
                count += parse_stmt();
            prev_case = cidx;
            prev_count = count;
            ++cases;
        }
        advance(); // '}'
        if (prev_case >= 0) patch_length(prev_case, prev_count);
        if (cases == 0) patch_length(didx, 0);
        return 1;
    }

    int parse_scanf() {
        int line = cur().line;
        advance();
        expect_punct("(");
        if (cur().kind != Token::Kind::Str) throw err("scanf expects a format string");
        advance();
        std::vector<std::string> vars;
        while (accept_punct(",")) {
            accept_punct("&");
            if (cur().kind != Token::Kind::Ident) throw err("scanf expects variables");
            vars.push_back(cur().text);
            advance();
        }
        expect_punct(")");
        expect_punct(";");
        if (vars.empty()) {
            emit(IrKind::Invar, {}, {}, std::nullopt, line);
            return 1;
        }
        if (opts.split_io) {
            for (const auto& v : vars) emit(IrKind::Input, {v}, {}, std::nullopt, line);
            return static_cast<int>(vars.size());
        }
        emit(IrKind::Input, vars, {}, std::nullopt, line);
        return 1;
    }

    int parse_printf() {
        int line = cur().line;
        advance();
        expect_punct("(");
        if (cur().kind != Token::Kind::Str) throw err("printf expects a format string");
        advance();
        std::vector<std::vector<std::string>> args;
        while (accept_punct(",")) args.push_back(scan_expr_vars({",", ")"}));
        expect_punct(")");
        expect_punct(";");
        if (opts.split_io) {
            int count = 0;
            for (const auto& arg : args) {
                if (arg.empty()) continue;
                emit(IrKind::Output, {}, arg, std::nullopt, line);
                ++count;
            }
            if (count == 0) {
                emit(IrKind::Invar, {}, {}, std::nullopt, line);
                count = 1;
            }
            return count;
        }
        std::vector<std::string> all;
        std::set<std::string> seen;
        for (const auto& arg : args)
            for (const auto& v : arg)
                if (seen.insert(v).second) all.push_back(v);
        if (all.empty())
            emit(IrKind::Invar, {}, {}, std::nullopt, line);
        else
            emit(IrKind::Output, {}, all, std::nullopt, line);
        return 1;
    }

    int parse_assignment() {
        int line = cur().line;
        std::string name = cur().text;
        advance();
        if (accept_punct("++") || accept_punct("--")) {
            expect_punct(";");
            emit(IrKind::Assign, {name}, {name}, std::nullopt, line);
            return 1;
        }
        static const char* compound[] = {"+=", "-=", "*=", "/=", "%="};
        for (const char* op : compound) {
            if (accept_punct(op)) {
                auto vars = scan_expr_vars({";"});
                expect_punct(";");
                std::vector<std::string> used{name};
                for (auto& v : vars)
                    if (v != name) used.push_back(v);
                emit(IrKind::Assign, {name}, used, std::nullopt, line);
                return 1;
            }
        }
        if (accept_punct("=")) {
            auto vars = scan_expr_vars({";"});
            expect_punct(";");
            emit(IrKind::Assign, {name}, vars, std::nullopt, line);
            return 1;
        }
        throw err("unsupported construct near '" + name + "'");
    }
};

} // namespace toy

inline std::pair<IrProgram, SourceMap> translate(const std::string& source,
                                                 FrontendOptions opts = {}) {
    toy::Translator t(source, opts);
    return t.run();
}

} // namespace seg
