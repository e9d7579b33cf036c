#include "triage/parser.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace triage {

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok { Ident, Number, BasedNumber, Symbol, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourceLoc loc;
};

struct LexState {
    const std::string &text;
    std::string file;
    size_t i = 0;
    int line = 1;
    int col = 1;
};

[[noreturn]] void fail(ParseErrorKind kind, SourceLoc loc, std::string msg) {
    throw ParseError{kind, std::move(loc), std::move(msg)};
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> tokenize(const std::string &text, const std::string &file) {
    std::vector<Token> out;
    size_t i = 0;
    int line = 1, col = 1;
    auto loc_here = [&]() { return SourceLoc{file, line, col}; };
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n && i < text.size(); ++k) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };

    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
            SourceLoc start = loc_here();
            advance(2);
            while (i + 1 < text.size() && !(text[i] == '*' && text[i + 1] == '/')) advance(1);
            if (i + 1 >= text.size()) fail(ParseErrorKind::Syntax, start, "unterminated comment");
            advance(2);
            continue;
        }
        if (c == '(' && i + 1 < text.size() && text[i + 1] == '*') {
            // "(*" immediately closed again is the @(*) sensitivity, not an attribute
            size_t k = i + 2;
            while (k < text.size() && (text[k] == ' ' || text[k] == '\t')) ++k;
            if (k >= text.size() || text[k] != ')')
                fail(ParseErrorKind::UnsupportedConstruct, loc_here(), "attribute instance");
        }
        if (c == '`') {
            fail(ParseErrorKind::UnsupportedConstruct, loc_here(), "compiler directive");
        }
        if (c == '$') {
            fail(ParseErrorKind::UnsupportedConstruct, loc_here(), "system task or function");
        }
        if (c == '"') {
            fail(ParseErrorKind::UnsupportedConstruct, loc_here(), "string literal");
        }
        if (ident_start(c)) {
            Token t;
            t.kind = Tok::Ident;
            t.loc = loc_here();
            size_t j = i;
            while (j < text.size() && ident_char(text[j])) ++j;
            t.text = text.substr(i, j - i);
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
            Token t;
            t.loc = loc_here();
            size_t j = i;
            while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) ||
                                       text[j] == '_'))
                ++j;
            if (j < text.size() && text[j] == '\'') {
                ++j;
                if (j < text.size() && (text[j] == 's' || text[j] == 'S'))
                    fail(ParseErrorKind::UnsupportedConstruct, t.loc, "signed literal");
                if (j >= text.size())
                    fail(ParseErrorKind::Syntax, t.loc, "truncated based literal");
                char base = static_cast<char>(std::tolower(text[j]));
                if (base != 'd' && base != 'h' && base != 'b' && base != 'o')
                    fail(ParseErrorKind::Syntax, t.loc, "bad literal base");
                ++j;
                size_t digits_begin = j;
                while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                                           text[j] == '_' || text[j] == '?'))
                    ++j;
                if (j == digits_begin) fail(ParseErrorKind::Syntax, t.loc, "empty literal digits");
                t.kind = Tok::BasedNumber;
            } else {
                if (c == '\'') fail(ParseErrorKind::Syntax, t.loc, "bad literal");
                t.kind = Tok::Number;
            }
            t.text = text.substr(i, j - i);
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        static const char *two_char[] = {"<=", ">=", "==", "!=", "&&", "||", "<<", ">>"};
        bool matched = false;
        for (const char *sym : two_char) {
            if (text.compare(i, 2, sym) == 0) {
                out.push_back({Tok::Symbol, sym, loc_here()});
                advance(2);
                matched = true;
                break;
            }
        }
        if (matched) continue;
        static const std::string singles = "()[]{};:,.#@*~!&|^+-/%<>=?";
        if (singles.find(c) != std::string::npos) {
            out.push_back({Tok::Symbol, std::string(1, c), loc_here()});
            advance(1);
            continue;
        }
        fail(ParseErrorKind::Syntax, loc_here(), std::string("unexpected character '") + c + "'");
    }
    Token end;
    end.kind = Tok::End;
    end.loc = loc_here();
    out.push_back(end);
    return out;
}

const std::unordered_set<std::string> kUnsupportedKeywords = {
    "generate",  "endgenerate", "genvar",   "function", "endfunction", "task",
    "endtask",   "initial",     "integer",  "real",     "realtime",    "time",
    "event",     "fork",        "join",     "specify",  "endspecify",  "defparam",
    "casex",     "casez",       "for",      "while",    "repeat",      "forever",
    "wait",      "deassign",    "force",    "release",  "signed",      "localparam",
    "logic",     "always_ff",   "always_comb", "always_latch", "typedef", "enum",
    "struct",    "interface",   "package",  "bit",      "byte",        "tri",
    "supply0",   "supply1",     "primitive", "table",   "disable",
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    std::vector<Token> toks;
    size_t pos = 0;
    std::string file;
    AstModule mod;
    std::unordered_map<std::string, int64_t> params;

    const Token &peek(size_t off = 0) const {
        size_t idx = std::min(pos + off, toks.size() - 1);
        return toks[idx];
    }
    const Token &next() {
        const Token &t = toks[pos];
        if (pos + 1 < toks.size()) ++pos;
        return t;
    }
    bool at_symbol(const std::string &s) const {
        return peek().kind == Tok::Symbol && peek().text == s;
    }
    bool at_ident(const std::string &s) const {
        return peek().kind == Tok::Ident && peek().text == s;
    }
    bool accept_symbol(const std::string &s) {
        if (at_symbol(s)) {
            next();
            return true;
        }
        return false;
    }
    bool accept_ident(const std::string &s) {
        if (at_ident(s)) {
            next();
            return true;
        }
        return false;
    }
    void expect_symbol(const std::string &s) {
        if (!accept_symbol(s))
            fail(ParseErrorKind::Syntax, peek().loc,
                 "expected '" + s + "', found '" + peek().text + "'");
    }
    void expect_ident(const std::string &s) {
        if (!accept_ident(s))
            fail(ParseErrorKind::Syntax, peek().loc,
                 "expected '" + s + "', found '" + peek().text + "'");
    }
    std::string expect_name() {
        if (peek().kind != Tok::Ident)
            fail(ParseErrorKind::Syntax, peek().loc,
                 "expected identifier, found '" + peek().text + "'");
        check_keyword(peek());
        return next().text;
    }
    void check_keyword(const Token &t) const {
        if (kUnsupportedKeywords.count(t.text))
            fail(ParseErrorKind::UnsupportedConstruct, t.loc, t.text);
    }

    // ---- literals and constant expressions --------------------------------

    Literal parse_literal_token(const Token &t) {
        Literal lit;
        std::string s = t.text;
        s.erase(std::remove(s.begin(), s.end(), '_'), s.end());
        try {
            if (t.kind == Tok::Number) {
                lit.value = std::stoull(s);
                lit.width = 0;
                lit.base = 'd';
                lit.based = false;
                return lit;
            }
            size_t q = s.find('\'');
            lit.width = q == 0 ? 0 : std::stoi(s.substr(0, q));
            lit.base = static_cast<char>(std::tolower(s[q + 1]));
            lit.based = true;
            std::string digits = s.substr(q + 2);
            int radix = lit.base == 'd' ? 10 : lit.base == 'h' ? 16 : lit.base == 'o' ? 8 : 2;
            for (char c : digits) {
                char lc = static_cast<char>(std::tolower(c));
                if (lc == 'x' || lc == 'z' || lc == '?')
                    fail(ParseErrorKind::UnsupportedConstruct, t.loc, "x/z literal");
                int v = lc >= '0' && lc <= '9'   ? lc - '0'
                        : lc >= 'a' && lc <= 'f' ? lc - 'a' + 10
                                                 : 99;
                if (v >= radix)
                    fail(ParseErrorKind::Syntax, t.loc,
                         std::string("digit '") + c + "' not valid in base '" + lit.base +
                             "' literal");
            }
            lit.value = std::stoull(digits, nullptr, radix);
        } catch (const ParseError &) {
            throw;
        } catch (const std::exception &) {
            fail(ParseErrorKind::Syntax, t.loc, "literal out of range");
        }
        return lit;
    }

    int64_t parse_const_expr() { return parse_const_add(); }

    int64_t parse_const_add() {
        int64_t v = parse_const_mul();
        while (at_symbol("+") || at_symbol("-")) {
            bool add = next().text == "+";
            int64_t r = parse_const_mul();
            v = add ? v + r : v - r;
        }
        return v;
    }
    int64_t parse_const_mul() {
        int64_t v = parse_const_prim();
        while (at_symbol("*") || at_symbol("/") || at_symbol("%")) {
            std::string op = next().text;
            int64_t r = parse_const_prim();
            if ((op == "/" || op == "%") && r == 0)
                fail(ParseErrorKind::Syntax, peek().loc, "division by zero in constant expression");
            v = op == "*" ? v * r : op == "/" ? v / r : v % r;
        }
        return v;
    }
    int64_t parse_const_prim() {
        if (accept_symbol("(")) {
            int64_t v = parse_const_expr();
            expect_symbol(")");
            return v;
        }
        if (accept_symbol("-")) return -parse_const_prim();
        if (peek().kind == Tok::Number || peek().kind == Tok::BasedNumber) {
            Token t = next();
            return static_cast<int64_t>(parse_literal_token(t).value);
        }
        if (peek().kind == Tok::Ident) {
            Token t = next();
            auto it = params.find(t.text);
            if (it == params.end())
                fail(ParseErrorKind::Syntax, t.loc,
                     "constant expression expected; '" + t.text + "' is not a parameter");
            return it->second;
        }
        fail(ParseErrorKind::Syntax, peek().loc, "bad constant expression");
    }

    // [msb:lsb]; returns true when a range was present
    bool parse_opt_range(int &msb, int &lsb) {
        if (!accept_symbol("[")) return false;
        msb = static_cast<int>(parse_const_expr());
        expect_symbol(":");
        lsb = static_cast<int>(parse_const_expr());
        expect_symbol("]");
        if (msb < 0 || lsb < 0)
            fail(ParseErrorKind::Syntax, peek().loc, "negative range bound");
        return true;
    }

    // ---- expressions -------------------------------------------------------
    // Precedence (low to high): ?: || && | ^ & ==/!= relational shift +- */% unary

    ExprPtr parse_expr() { return parse_ternary(); }

    ExprPtr parse_ternary() {
        ExprPtr c = parse_logical_or();
        if (accept_symbol("?")) {
            SourceLoc loc = c->loc;
            ExprPtr a = parse_ternary();
            expect_symbol(":");
            ExprPtr b = parse_ternary();
            return make_ternary(std::move(c), std::move(a), std::move(b), loc);
        }
        return c;
    }

    ExprPtr parse_binary_level(int level) {
        static const std::vector<std::vector<std::string>> ops = {
            {"||"}, {"&&"}, {"|"}, {"^"}, {"&"},
            {"==", "!="}, {"<", "<=", ">", ">="}, {"<<", ">>"}, {"+", "-"}, {"*", "/", "%"},
        };
        if (level >= static_cast<int>(ops.size())) return parse_unary();
        ExprPtr lhs = parse_binary_level(level + 1);
        for (;;) {
            bool found = false;
            for (const auto &op : ops[level]) {
                if (at_symbol(op)) {
                    SourceLoc loc = peek().loc;
                    next();
                    ExprPtr rhs = parse_binary_level(level + 1);
                    lhs = make_binary(op, std::move(lhs), std::move(rhs), loc);
                    found = true;
                    break;
                }
            }
            if (!found) break;
        }
        return lhs;
    }

    ExprPtr parse_logical_or() { return parse_binary_level(0); }

    ExprPtr parse_unary() {
        if (at_symbol("~") || at_symbol("!") || at_symbol("-") || at_symbol("&") ||
            at_symbol("|") || at_symbol("^")) {
            Token t = next();
            ExprPtr operand = parse_unary();
            return make_unary(t.text, std::move(operand), t.loc);
        }
        if (at_symbol("+")) {  // unary plus is identity
            next();
            return parse_unary();
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        const Token &t = peek();
        if (t.kind == Tok::Number || t.kind == Tok::BasedNumber) {
            Token tok = next();
            Literal lit = parse_literal_token(tok);
            return make_literal(lit.value, lit.width, lit.base, lit.based, tok.loc);
        }
        if (accept_symbol("(")) {
            ExprPtr e = parse_expr();
            expect_symbol(")");
            return e;
        }
        if (at_symbol("{")) {
            SourceLoc loc = peek().loc;
            next();
            // replication {n{...}} is out of subset
            if ((peek().kind == Tok::Number || peek().kind == Tok::BasedNumber) &&
                peek(1).kind == Tok::Symbol && peek(1).text == "{")
                fail(ParseErrorKind::UnsupportedConstruct, loc, "replication");
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Concat;
            e->loc = loc;
            e->args.push_back(parse_expr());
            while (accept_symbol(",")) e->args.push_back(parse_expr());
            expect_symbol("}");
            return e;
        }
        if (t.kind == Tok::Ident) {
            check_keyword(t);
            Token name = next();
            // parameters fold to constants
            auto it = params.find(name.text);
            if (it != params.end()) {
                if (at_symbol("["))
                    fail(ParseErrorKind::Syntax, name.loc, "select on parameter");
                return make_literal(static_cast<uint64_t>(it->second), 0, 'd', false, name.loc);
            }
            if (accept_symbol("[")) {
                int64_t first = parse_const_expr();
                if (accept_symbol(":")) {
                    int64_t lsb = parse_const_expr();
                    expect_symbol("]");
                    auto e = std::make_shared<Expr>();
                    e->kind = ExprKind::PartSelect;
                    e->ident = name.text;
                    e->msb = static_cast<int>(first);
                    e->lsb = static_cast<int>(lsb);
                    e->loc = name.loc;
                    return e;
                }
                expect_symbol("]");
                auto e = std::make_shared<Expr>();
                e->kind = ExprKind::BitSelect;
                e->ident = name.text;
                e->msb = static_cast<int>(first);
                e->loc = name.loc;
                return e;
            }
            return make_ref(name.text, name.loc);
        }
        fail(ParseErrorKind::Syntax, t.loc, "expected expression, found '" + t.text + "'");
    }

    // ---- statements --------------------------------------------------------

    LValue parse_lvalue() {
        LValue lv;
        lv.loc = peek().loc;
        lv.name = expect_name();
        if (accept_symbol("[")) {
            int64_t first = parse_const_expr();
            if (accept_symbol(":")) {
                int64_t lsb = parse_const_expr();
                lv.sel = LValueSel::Part;
                lv.msb = static_cast<int>(first);
                lv.lsb = static_cast<int>(lsb);
            } else {
                lv.sel = LValueSel::Bit;
                lv.msb = static_cast<int>(first);
            }
            expect_symbol("]");
        }
        return lv;
    }

    StmtPtr parse_statement() {
        const Token &t = peek();
        if (t.kind == Tok::Ident) {
            if (t.text == "if") return parse_if();
            if (t.text == "case") return parse_case();
            if (t.text == "begin")
                fail(ParseErrorKind::Syntax, t.loc, "unexpected nested bare begin");
            check_keyword(t);
            auto s = std::make_shared<Stmt>();
            s->loc = t.loc;
            s->lhs = parse_lvalue();
            if (accept_symbol("=")) {
                s->kind = StmtKind::BlockingAssign;
            } else if (accept_symbol("<=")) {
                s->kind = StmtKind::NonblockingAssign;
            } else {
                fail(ParseErrorKind::Syntax, peek().loc,
                     "expected '=' or '<=', found '" + peek().text + "'");
            }
            s->rhs = parse_expr();
            expect_symbol(";");
            return s;
        }
        if (at_symbol("#"))
            fail(ParseErrorKind::UnsupportedConstruct, t.loc, "delay control");
        if (at_symbol("@"))
            fail(ParseErrorKind::UnsupportedConstruct, t.loc, "event control in statement");
        fail(ParseErrorKind::Syntax, t.loc, "expected statement, found '" + t.text + "'");
    }

    std::vector<StmtPtr> parse_stmt_or_block() {
        std::vector<StmtPtr> body;
        if (accept_ident("begin")) {
            if (at_symbol(":"))
                fail(ParseErrorKind::UnsupportedConstruct, peek().loc, "named block");
            while (!at_ident("end")) {
                if (peek().kind == Tok::End)
                    fail(ParseErrorKind::Syntax, peek().loc, "unterminated begin block");
                body.push_back(parse_statement());
            }
            expect_ident("end");
        } else {
            body.push_back(parse_statement());
        }
        return body;
    }

    StmtPtr parse_if() {
        auto s = std::make_shared<Stmt>();
        s->kind = StmtKind::If;
        s->loc = peek().loc;
        expect_ident("if");
        expect_symbol("(");
        s->cond = parse_expr();
        expect_symbol(")");
        s->then_body = parse_stmt_or_block();
        if (accept_ident("else")) s->else_body = parse_stmt_or_block();
        return s;
    }

    StmtPtr parse_case() {
        auto s = std::make_shared<Stmt>();
        s->kind = StmtKind::Case;
        s->loc = peek().loc;
        expect_ident("case");
        expect_symbol("(");
        s->case_expr = parse_expr();
        expect_symbol(")");
        while (!at_ident("endcase")) {
            if (peek().kind == Tok::End)
                fail(ParseErrorKind::Syntax, peek().loc, "unterminated case");
            CaseItem item;
            item.loc = peek().loc;
            if (accept_ident("default")) {
                item.is_default = true;
                accept_symbol(":");
            } else {
                item.labels.push_back(parse_expr());
                while (accept_symbol(",")) item.labels.push_back(parse_expr());
                expect_symbol(":");
            }
            item.body = parse_stmt_or_block();
            s->items.push_back(std::move(item));
        }
        expect_ident("endcase");
        return s;
    }

    // ---- module items ------------------------------------------------------

    void parse_port_decl_group(PortDir dir, bool ansi) {
        bool is_reg = false;
        if (accept_ident("reg"))
            is_reg = true;
        else
            accept_ident("wire");
        int msb = 0, lsb = 0;
        parse_opt_range(msb, lsb);
        for (;;) {
            SourceLoc nloc = peek().loc;
            std::string name = expect_name();
            if (ansi) {
                if (mod.find_port(name))
                    fail(ParseErrorKind::DuplicateDeclaration, nloc,
                         "duplicate port '" + name + "'");
                mod.ports.push_back({name, dir, msb, lsb, is_reg, nloc});
            } else {
                Port *p = nullptr;
                for (auto &q : mod.ports)
                    if (q.name == name) p = &q;
                if (!p)
                    fail(ParseErrorKind::Syntax, nloc,
                         "'" + name + "' is not listed in the module header");
                p->dir = dir;
                p->msb = msb;
                p->lsb = lsb;
                p->is_reg = p->is_reg || is_reg;
                p->loc = nloc;
            }
            if (ansi) {
                // in an ANSI header the group ends at ')' or at the next direction keyword
                if (at_symbol(",") && peek(1).kind == Tok::Ident &&
                    (peek(1).text == "input" || peek(1).text == "output" ||
                     peek(1).text == "inout")) {
                    next();
                    return;
                }
                if (!accept_symbol(",")) return;
            } else {
                if (accept_symbol(",")) continue;
                expect_symbol(";");
                return;
            }
        }
    }

    void parse_net_decl(NetKind kind) {
        int msb = 0, lsb = 0;
        parse_opt_range(msb, lsb);
        for (;;) {
            SourceLoc nloc = peek().loc;
            std::string name = expect_name();
            if (at_symbol("["))
                fail(ParseErrorKind::UnsupportedConstruct, peek().loc, "memory array");
            if (at_symbol("="))
                fail(ParseErrorKind::UnsupportedConstruct, peek().loc,
                     "declaration with initializer");
            Port *p = nullptr;
            for (auto &q : mod.ports)
                if (q.name == name) p = &q;
            if (p) {
                // non-ANSI style: 'reg q;' upgrades the port declaration
                if (kind == NetKind::Reg)
                    p->is_reg = true;
                if ((msb != 0 || lsb != 0) && (p->msb != msb || p->lsb != lsb) &&
                    (p->msb != 0 || p->lsb != 0))
                    fail(ParseErrorKind::DuplicateDeclaration, nloc,
                         "range mismatch for port '" + name + "'");
                if (msb != 0 || lsb != 0) {
                    p->msb = msb;
                    p->lsb = lsb;
                }
            } else {
                if (mod.find_net(name))
                    fail(ParseErrorKind::DuplicateDeclaration, nloc,
                         "duplicate declaration of '" + name + "'");
                mod.nets.push_back({name, kind, msb, lsb, nloc});
            }
            if (accept_symbol(",")) continue;
            expect_symbol(";");
            return;
        }
    }

    void parse_parameter() {
        for (;;) {
            SourceLoc nloc = peek().loc;
            std::string name = expect_name();
            expect_symbol("=");
            int64_t value = parse_const_expr();
            if (params.count(name))
                fail(ParseErrorKind::DuplicateDeclaration, nloc,
                     "duplicate parameter '" + name + "'");
            params[name] = value;
            mod.parameters.push_back({name, value, nloc});
            if (accept_symbol(",")) continue;
            expect_symbol(";");
            return;
        }
    }

    void parse_assign() {
        ContinuousAssign ca;
        ca.loc = toks[pos - 1].loc;
        ca.lhs = parse_lvalue();
        expect_symbol("=");
        ca.rhs = parse_expr();
        expect_symbol(";");
        mod.assigns.push_back(std::move(ca));
    }

    EdgeEvent parse_edge_event() {
        EdgeEvent ev;
        if (accept_ident("posedge")) {
            ev.edge = EdgeKindAst::Posedge;
        } else if (accept_ident("negedge")) {
            ev.edge = EdgeKindAst::Negedge;
        } else {
            fail(ParseErrorKind::UnsupportedConstruct, peek().loc,
                 "explicit sensitivity list (use @(*) or edge events)");
        }
        ev.signal = expect_name();
        return ev;
    }

    void parse_always() {
        AlwaysBlock blk;
        blk.loc = toks[pos - 1].loc;
        expect_symbol("@");
        if (accept_symbol("*")) {
            blk.combinational = true;
        } else {
            expect_symbol("(");
            if (accept_symbol("*")) {
                blk.combinational = true;
            } else {
                blk.clock = parse_edge_event();
                if (accept_ident("or")) {
                    blk.has_async_reset = true;
                    blk.async_reset = parse_edge_event();
                    if (at_ident("or"))
                        fail(ParseErrorKind::UnsupportedConstruct, peek().loc,
                             "sensitivity list with more than two edge events");
                }
            }
            expect_symbol(")");
        }
        blk.body = parse_stmt_or_block();
        mod.always_blocks.push_back(std::move(blk));
    }

    void parse_instance(const Token &module_tok) {
        ModuleInstance inst;
        inst.module_name = module_tok.text;
        inst.loc = module_tok.loc;
        if (at_symbol("#"))
            fail(ParseErrorKind::UnsupportedConstruct, peek().loc,
                 "parameter override on instance");
        inst.instance_name = expect_name();
        expect_symbol("(");
        if (!at_symbol(")")) {
            for (;;) {
                if (!at_symbol("."))
                    fail(ParseErrorKind::UnsupportedConstruct, peek().loc,
                         "positional port connection");
                PortConn pc;
                pc.loc = peek().loc;
                next();
                pc.port = expect_name();
                expect_symbol("(");
                if (!at_symbol(")")) pc.expr = parse_expr();
                expect_symbol(")");
                inst.connections.push_back(std::move(pc));
                if (!accept_symbol(",")) break;
            }
        }
        expect_symbol(")");
        expect_symbol(";");
        mod.instances.push_back(std::move(inst));
    }

    void parse_module() {
        while (peek().kind != Tok::End && !at_ident("module")) {
            fail(ParseErrorKind::Syntax, peek().loc,
                 "expected 'module', found '" + peek().text + "'");
        }
        if (peek().kind == Tok::End)
            fail(ParseErrorKind::Syntax, peek().loc, "empty input");
        mod.loc = peek().loc;
        expect_ident("module");
        mod.name = expect_name();
        if (at_symbol("#"))
            fail(ParseErrorKind::UnsupportedConstruct, peek().loc, "module parameter port list");
        if (accept_symbol("(")) {
            if (!at_symbol(")")) {
                if (at_ident("input") || at_ident("output") || at_ident("inout")) {
                    // ANSI header
                    for (;;) {
                        PortDir dir;
                        if (accept_ident("input"))
                            dir = PortDir::Input;
                        else if (accept_ident("output"))
                            dir = PortDir::Output;
                        else if (accept_ident("inout"))
                            dir = PortDir::Inout;
                        else
                            fail(ParseErrorKind::Syntax, peek().loc,
                                 "expected port direction, found '" + peek().text + "'");
                        parse_port_decl_group(dir, /*ansi=*/true);
                        if (at_symbol(")")) break;
                    }
                } else {
                    // non-ANSI header: bare names, directions declared in the body
                    for (;;) {
                        SourceLoc nloc = peek().loc;
                        std::string name = expect_name();
                        if (mod.find_port(name))
                            fail(ParseErrorKind::DuplicateDeclaration, nloc,
                                 "duplicate port '" + name + "'");
                        mod.ports.push_back({name, PortDir::Input, 0, 0, false, nloc});
                        if (!accept_symbol(",")) break;
                    }
                }
            }
            expect_symbol(")");
        }
        expect_symbol(";");

        while (!at_ident("endmodule")) {
            const Token &t = peek();
            if (t.kind == Tok::End)
                fail(ParseErrorKind::Syntax, t.loc, "missing 'endmodule'");
            if (t.kind != Tok::Ident)
                fail(ParseErrorKind::Syntax, t.loc, "unexpected '" + t.text + "'");
            check_keyword(t);
            if (accept_ident("parameter")) {
                parse_parameter();
            } else if (accept_ident("wire")) {
                parse_net_decl(NetKind::Wire);
            } else if (accept_ident("reg")) {
                parse_net_decl(NetKind::Reg);
            } else if (accept_ident("input")) {
                parse_port_decl_group(PortDir::Input, /*ansi=*/false);
            } else if (accept_ident("output")) {
                parse_port_decl_group(PortDir::Output, /*ansi=*/false);
            } else if (accept_ident("inout")) {
                parse_port_decl_group(PortDir::Inout, /*ansi=*/false);
            } else if (accept_ident("assign")) {
                parse_assign();
            } else if (accept_ident("always")) {
                parse_always();
            } else if (peek(1).kind == Tok::Ident ||
                       (peek(1).kind == Tok::Symbol && peek(1).text == "#")) {
                Token module_tok = next();
                parse_instance(module_tok);
            } else {
                fail(ParseErrorKind::Syntax, t.loc, "unexpected '" + t.text + "'");
            }
        }
        expect_ident("endmodule");
        if (peek().kind != Tok::End)
            fail(ParseErrorKind::UnsupportedConstruct, peek().loc,
                 "multiple modules per file");
    }
};

// ---------------------------------------------------------------------------
// Post-parse checks: resolution and coding discipline
// ---------------------------------------------------------------------------

struct Checker {
    const AstModule &m;
    std::unordered_set<std::string> names;

    explicit Checker(const AstModule &mod) : m(mod) {
        for (const auto &p : m.ports) names.insert(p.name);
        for (const auto &n : m.nets) names.insert(n.name);
    }

    void resolve_expr(const Expr &e) {
        switch (e.kind) {
            case ExprKind::Ref:
            case ExprKind::BitSelect:
            case ExprKind::PartSelect:
                if (!e.ident.empty() && !names.count(e.ident))
                    fail(ParseErrorKind::UnresolvedIdentifier, e.loc, e.ident);
                break;
            default:
                break;
        }
        for (const auto &a : e.args)
            if (a) resolve_expr(*a);
    }

    bool is_reg_kind(const std::string &name) const {
        if (const Port *p = m.find_port(name)) return p->is_reg;
        if (const NetDecl *d = m.find_net(name)) return d->kind == NetKind::Reg;
        return false;
    }

    void check_lvalue(const LValue &lv, bool procedural) {
        if (!names.count(lv.name))
            fail(ParseErrorKind::UnresolvedIdentifier, lv.loc, lv.name);
        bool reg_kind = is_reg_kind(lv.name);
        if (procedural && !reg_kind)
            fail(ParseErrorKind::ProceduralAssignToWire, lv.loc,
                 "procedural assignment to wire '" + lv.name + "'");
        if (!procedural && reg_kind)
            fail(ParseErrorKind::ContinuousAssignToReg, lv.loc,
                 "continuous assignment to reg '" + lv.name + "'");
    }

    void check_stmt(const Stmt &s, bool sequential) {
        switch (s.kind) {
            case StmtKind::BlockingAssign:
                if (sequential)
                    fail(ParseErrorKind::BlockingInSequential, s.loc,
                         "blocking assignment in edge-triggered block");
                check_lvalue(s.lhs, true);
                resolve_expr(*s.rhs);
                break;
            case StmtKind::NonblockingAssign:
                if (!sequential)
                    fail(ParseErrorKind::NonblockingInCombinational, s.loc,
                         "nonblocking assignment in combinational block");
                check_lvalue(s.lhs, true);
                resolve_expr(*s.rhs);
                break;
            case StmtKind::If:
                resolve_expr(*s.cond);
                for (const auto &t : s.then_body) check_stmt(*t, sequential);
                for (const auto &t : s.else_body) check_stmt(*t, sequential);
                break;
            case StmtKind::Case:
                resolve_expr(*s.case_expr);
                for (const auto &item : s.items) {
                    for (const auto &l : item.labels) resolve_expr(*l);
                    for (const auto &t : item.body) check_stmt(*t, sequential);
                }
                break;
        }
    }

    void run() {
        std::unordered_set<std::string> port_names;
        for (const auto &p : m.ports) {
            if (!port_names.insert(p.name).second)
                fail(ParseErrorKind::DuplicateDeclaration, p.loc,
                     "duplicate port '" + p.name + "'");
            if (m.find_net(p.name))
                fail(ParseErrorKind::DuplicateDeclaration, p.loc,
                     "'" + p.name + "' declared as both port and net");
        }
        for (const auto &a : m.assigns) {
            check_lvalue(a.lhs, false);
            resolve_expr(*a.rhs);
        }
        for (const auto &blk : m.always_blocks) {
            if (!blk.combinational && !names.count(blk.clock.signal))
                fail(ParseErrorKind::UnresolvedIdentifier, blk.loc, blk.clock.signal);
            if (blk.has_async_reset && !names.count(blk.async_reset.signal))
                fail(ParseErrorKind::UnresolvedIdentifier, blk.loc, blk.async_reset.signal);
            for (const auto &s : blk.body) check_stmt(*s, !blk.combinational);
        }
        for (const auto &inst : m.instances) {
            std::unordered_set<std::string> pins;
            for (const auto &pc : inst.connections) {
                if (!pins.insert(pc.port).second)
                    fail(ParseErrorKind::DuplicateDeclaration, pc.loc,
                         "duplicate connection to pin '" + pc.port + "'");
                if (pc.expr) resolve_expr(*pc.expr);
            }
        }
    }
};

}  // namespace

std::string to_string(const ParseError &e) {
    const char *kind = nullptr;
    switch (e.kind) {
        case ParseErrorKind::Syntax: kind = "syntax error"; break;
        case ParseErrorKind::UnresolvedIdentifier: kind = "unresolved identifier"; break;
        case ParseErrorKind::UnsupportedConstruct: kind = "unsupported construct"; break;
        case ParseErrorKind::BlockingInSequential: kind = "blocking assignment in sequential block"; break;
        case ParseErrorKind::NonblockingInCombinational: kind = "nonblocking assignment in combinational block"; break;
        case ParseErrorKind::ProceduralAssignToWire: kind = "procedural assignment to wire"; break;
        case ParseErrorKind::ContinuousAssignToReg: kind = "continuous assignment to reg"; break;
        case ParseErrorKind::DuplicateDeclaration: kind = "duplicate declaration"; break;
    }
    return to_string(e.loc) + ": " + kind + ": " + e.message;
}

Result<AstModule, ParseError> parse(const std::string &text, const std::string &file) {
    try {
        Parser p;
        p.file = file;
        p.toks = tokenize(text, file);
        p.parse_module();
        Checker checker(p.mod);
        checker.run();
        return Result<AstModule, ParseError>::ok(std::move(p.mod));
    } catch (ParseError &e) {
        return Result<AstModule, ParseError>::err(std::move(e));
    }
}

int expr_width(const AstModule &m, const Expr &e) {
    switch (e.kind) {
        case ExprKind::Ref:
            return m.width_of(e.ident);
        case ExprKind::Literal:
            return e.lit.width > 0 ? e.lit.width : 32;
        case ExprKind::BitSelect:
            return 1;
        case ExprKind::PartSelect:
            return range_width(e.msb, e.lsb);
        case ExprKind::Concat: {
            int w = 0;
            for (const auto &a : e.args) w += expr_width(m, *a);
            return w;
        }
        case ExprKind::Unary:
            if (e.op == "!" || e.op == "&" || e.op == "|" || e.op == "^") return 1;
            return expr_width(m, *e.args[0]);
        case ExprKind::Binary: {
            const std::string &op = e.op;
            if (op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=" ||
                op == "&&" || op == "||")
                return 1;
            if (op == "<<" || op == ">>") return expr_width(m, *e.args[0]);
            return std::max(expr_width(m, *e.args[0]), expr_width(m, *e.args[1]));
        }
        case ExprKind::Ternary:
            return std::max(expr_width(m, *e.args[1]), expr_width(m, *e.args[2]));
    }
    return 1;
}

}  // namespace triage
