#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace seg {

// Segment IR: one statement per line, keyword + variables, and for control
// keywords a trailing block length counting the statements directly inside
// the block (nested block contents are not counted; they belong to their own
// block). Operators and literals are deliberately absent.
enum class IrKind {
    Input,
    Output,
    Assign,
    If,
    ElseIf,
    Else,
    DoCase,
    Case,
    Loop,
    Break,
    Continue,
    Invar,
};

inline const char* ir_keyword(IrKind k) {
    switch (k) {
        case IrKind::Input: return "input";
        case IrKind::Output: return "output";
        case IrKind::Assign: return "assign";
        case IrKind::If: return "if";
        case IrKind::ElseIf: return "elseif";
        case IrKind::Else: return "else";
        case IrKind::DoCase: return "docase";
        case IrKind::Case: return "case";
        case IrKind::Loop: return "loop";
        case IrKind::Break: return "break";
        case IrKind::Continue: return "continue";
        case IrKind::Invar: return "invar";
    }
    return "?";
}

inline std::optional<IrKind> ir_kind_from_keyword(const std::string& word) {
    static const std::pair<const char*, IrKind> table[] = {
        {"input", IrKind::Input},       {"output", IrKind::Output},
        {"assign", IrKind::Assign},     {"if", IrKind::If},
        {"elseif", IrKind::ElseIf},     {"else", IrKind::Else},
        {"docase", IrKind::DoCase},     {"case", IrKind::Case},
        {"loop", IrKind::Loop},         {"break", IrKind::Break},
        {"continue", IrKind::Continue}, {"invar", IrKind::Invar},
    };
    for (const auto& [kw, kind] : table)
        if (word == kw) return kind;
    return std::nullopt;
}

// Block-length carriers. Break/continue are plain statements at the IR level;
// they are flagged as secondary control only once the SDG is built.
inline bool is_control_kind(IrKind k) {
    switch (k) {
        case IrKind::If:
        case IrKind::ElseIf:
        case IrKind::Else:
        case IrKind::DoCase:
        case IrKind::Case:
        case IrKind::Loop:
            return true;
        default:
            return false;
    }
}

struct IrStatement {
    IrKind kind = IrKind::Invar;
    // Assign defines exactly one variable; a grouped input may define several
    // (the file-handle case where variables cannot be separated).
    std::vector<std::string> defined;
    std::vector<std::string> used;
    std::optional<int> block_length;
};

struct Diagnostic {
    int index = 0;
    std::string rule;
    std::string message;
};

struct ParseError : std::runtime_error {
    ParseError(int line_number, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_number) + ": " + msg),
          line(line_number) {}
    int line;
};

class IrProgram {
public:
    std::vector<IrStatement> statements;

    int size() const { return static_cast<int>(statements.size()); }

    const IrStatement& at(int id) const {
        if (id < 0 || id >= size())
            throw std::out_of_range("IR index " + std::to_string(id) + " out of range");
        return statements[static_cast<size_t>(id)];
    }

    std::set<std::string> defined_at(int id) const {
        const auto& s = at(id);
        return {s.defined.begin(), s.defined.end()};
    }

    std::set<std::string> used_at(int id) const {
        const auto& s = at(id);
        return {s.used.begin(), s.used.end()};
    }

    // Greatest j < id defining var, or nullopt when the use has no prior
    // definition (an undefined read produces no data edge).
    std::optional<int> last_defined(const std::string& var, int id) const {
        at(id);
        for (int j = id - 1; j >= 0; --j) {
            const auto& d = statements[static_cast<size_t>(j)].defined;
            if (std::find(d.begin(), d.end(), var) != d.end()) return j;
        }
        return std::nullopt;
    }

    bool is_control_block(int id) const { return at(id).block_length.has_value(); }

    std::set<int> get_ctrl_blocks(int start_id, int end_id) const {
        std::set<int> out;
        int lo = std::max(start_id + 1, 0);
        int hi = std::min(end_id - 1, size() - 1);
        for (int i = lo; i <= hi; ++i)
            if (statements[static_cast<size_t>(i)].block_length.has_value()) out.insert(i);
        return out;
    }

    int get_length(int id) const {
        const auto& s = at(id);
        if (!s.block_length)
            throw std::invalid_argument("statement " + std::to_string(id) + " is not a control block");
        return *s.block_length;
    }

    int get_length_sum(int id1, int id2) const {
        int sum = 0;
        for (int b : get_ctrl_blocks(id1, id2)) sum += get_length(b);
        return sum;
    }

    // Last index covered by the block rooted at id (id itself for plain
    // statements). Walks direct children, skipping over nested block spans.
    // Clamped to the end of the program so malformed lengths stay queryable;
    // validate() reports them.
    int block_end(int id) const {
        at(id);
        if (!is_control_block(id)) return id;
        int pos = id;
        int remaining = get_length(id);
        while (remaining-- > 0) {
            int child = pos + 1;
            if (child >= size()) return size() - 1;
            pos = block_end(child);
        }
        return pos;
    }

    std::vector<int> direct_children(int pid) const {
        std::vector<int> kids;
        if (!is_control_block(pid)) return kids;
        int pos = pid;
        int remaining = get_length(pid);
        while (remaining-- > 0) {
            int child = pos + 1;
            if (child >= size()) break;
            kids.push_back(child);
            pos = block_end(child);
        }
        return kids;
    }

    // True iff cid sits directly inside the control block at pid, i.e. cid is
    // one of pid's child slots after skipping nested block spans. Statements
    // buried inside a nested block have that block (or a deeper one) as their
    // parent, never pid.
    bool is_control_parent(int pid, int cid) const {
        at(cid);
        if (pid >= cid) return false;
        if (!is_control_block(pid)) return false;
        const auto kids = direct_children(pid);
        return std::find(kids.begin(), kids.end(), cid) != kids.end();
    }
};

inline std::vector<Diagnostic> validate(const IrProgram& p) {
    std::vector<Diagnostic> out;
    const int n = p.size();
    for (int i = 0; i < n; ++i) {
        const auto& s = p.statements[static_cast<size_t>(i)];
        const bool ctrl = is_control_kind(s.kind);
        if (ctrl && !s.block_length)
            out.push_back({i, "missing-length", "control statement without block length"});
        if (!ctrl && s.block_length)
            out.push_back({i, "unexpected-length", "non-control statement carries a block length"});
        if (s.block_length && *s.block_length < 0)
            out.push_back({i, "negative-length", "negative block length"});
        switch (s.kind) {
            case IrKind::Assign:
                if (s.defined.size() != 1)
                    out.push_back({i, "assign-arity", "assign defines exactly one variable"});
                break;
            case IrKind::Input:
                if (s.defined.empty())
                    out.push_back({i, "input-arity", "input defines at least one variable"});
                if (!s.used.empty())
                    out.push_back({i, "input-uses", "input uses no variables"});
                break;
            case IrKind::Output:
                if (s.used.empty())
                    out.push_back({i, "output-arity", "output with no variables degrades to invar"});
                if (!s.defined.empty())
                    out.push_back({i, "output-defines", "output defines no variable"});
                break;
            case IrKind::If:
            case IrKind::ElseIf:
            case IrKind::Loop:
            case IrKind::DoCase:
                if (!s.defined.empty())
                    out.push_back({i, "control-defines", "control statement defines no variable"});
                break;
            case IrKind::Else:
            case IrKind::Case:
                if (!s.defined.empty() || !s.used.empty())
                    out.push_back({i, "control-vars", "else/case carry no variables"});
                break;
            case IrKind::Break:
            case IrKind::Continue:
            case IrKind::Invar:
                if (!s.defined.empty() || !s.used.empty())
                    out.push_back({i, "plain-vars", "statement carries no variables"});
                break;
        }
    }
    // Structural pass: every block's child walk must stay inside the program.
    // When the walk ran through a nested block before falling off the end, the
    // outer length splits that nested block.
    for (int i = 0; i < n; ++i) {
        const auto& s = p.statements[static_cast<size_t>(i)];
        if (!is_control_kind(s.kind) || !s.block_length || *s.block_length < 0) continue;
        int pos = i;
        int remaining = p.get_length(i);
        bool crossed_nested = false;
        while (remaining-- > 0) {
            int child = pos + 1;
            if (child >= n) {
                if (crossed_nested)
                    out.push_back({i, "partial-overlap",
                                   "block length splits the nested block it crosses"});
                else
                    out.push_back({i, "overrun", "block length overruns end of program"});
                break;
            }
            if (p.is_control_block(child)) crossed_nested = true;
            pos = p.block_end(child);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Diagnostic& a, const Diagnostic& b) { return a.index < b.index; });
    return out;
}

namespace detail {

inline bool is_identifier(const std::string& tok) {
    if (tok.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(tok[0])) || tok[0] == '_')) return false;
    for (char c : tok)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

inline bool is_unsigned_int(const std::string& tok) {
    if (tok.empty()) return false;
    for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

// "3." or "3" as the first token is an explicit line index; position defines
// the real index, so it is skipped.
inline bool is_index_prefix(const std::string& tok) {
    if (tok.empty()) return false;
    std::string body = tok.back() == '.' ? tok.substr(0, tok.size() - 1) : tok;
    return is_unsigned_int(body);
}

} // namespace detail

// Line-level parse only; structural checks live in validate().
inline IrProgram parse_ir_lines(const std::string& text) {
    IrProgram p;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) {
            if (t[0] == '#') break;
            toks.push_back(t);
        }
        if (toks.empty()) continue;
        size_t k = 0;
        if (detail::is_index_prefix(toks[0])) ++k;
        if (k >= toks.size()) throw ParseError(line_no, "missing keyword");
        auto kind = ir_kind_from_keyword(toks[k]);
        if (!kind) throw ParseError(line_no, "malformed keyword '" + toks[k] + "'");
        ++k;

        IrStatement s;
        s.kind = *kind;
        std::vector<std::string> vars(toks.begin() + static_cast<long>(k), toks.end());
        if (is_control_kind(s.kind)) {
            if (vars.empty() || !detail::is_unsigned_int(vars.back()))
                throw ParseError(line_no, "missing block length on control keyword");
            s.block_length = std::stoi(vars.back());
            vars.pop_back();
        }
        for (const auto& v : vars)
            if (!detail::is_identifier(v))
                throw ParseError(line_no, "non-identifier variable token '" + v + "'");
        switch (s.kind) {
            case IrKind::Assign:
                if (vars.empty()) throw ParseError(line_no, "assign needs a defined variable");
                s.defined = {vars[0]};
                s.used = {vars.begin() + 1, vars.end()};
                break;
            case IrKind::Input:
                if (vars.empty()) throw ParseError(line_no, "input needs a variable");
                s.defined = vars;
                break;
            case IrKind::Output:
                if (vars.empty()) throw ParseError(line_no, "output needs a variable");
                s.used = vars;
                break;
            case IrKind::If:
            case IrKind::ElseIf:
            case IrKind::Loop:
            case IrKind::DoCase:
                s.used = vars;
                break;
            case IrKind::Else:
            case IrKind::Case:
                if (!vars.empty()) throw ParseError(line_no, "else/case take no variables");
                break;
            case IrKind::Break:
            case IrKind::Continue:
            case IrKind::Invar:
                if (!vars.empty())
                    throw ParseError(line_no, std::string(ir_keyword(s.kind)) + " takes no variables");
                break;
        }
        p.statements.push_back(std::move(s));
    }
    return p;
}

inline IrProgram parse_ir(const std::string& text) {
    IrProgram p = parse_ir_lines(text);
    auto diags = validate(p);
    if (!diags.empty())
        throw ParseError(diags[0].index + 1,
                         diags[0].rule + " at statement " + std::to_string(diags[0].index) +
                             ": " + diags[0].message);
    return p;
}

// Normalized text: no index prefixes, single spaces. parse . serialize is a
// fixed point on this form.
inline std::string serialize_ir(const IrProgram& p) {
    std::ostringstream out;
    for (const auto& s : p.statements) {
        out << ir_keyword(s.kind);
        for (const auto& v : s.defined) out << ' ' << v;
        for (const auto& v : s.used) out << ' ' << v;
        if (s.block_length) out << ' ' << *s.block_length;
        out << '\n';
    }
    return out.str();
}

} // namespace seg
