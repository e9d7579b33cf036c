#ifndef TRIAGE_AST_HPP
#define TRIAGE_AST_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "triage/source_loc.hpp"

namespace triage {

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class ExprKind {
    Ref,         // identifier
    Literal,     // numeric constant
    Unary,       // ~ ! - and reduction & | ^
    Binary,      // arithmetic / bitwise / logical / relational / shift
    Ternary,     // cond ? a : b
    BitSelect,   // name[i]
    PartSelect,  // name[msb:lsb]
    Concat,      // {a, b, ...}
};

struct Literal {
    uint64_t value = 0;
    int width = 0;     // 0 = unsized
    char base = 'd';   // d, h, b, o; plain decimals use 'd' with width 0
    bool based = false;  // written with 'base marker ('d8, 4'b1010, ...)
};

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct Expr {
    ExprKind kind = ExprKind::Ref;
    SourceLoc loc;
    std::string ident;            // Ref, BitSelect/PartSelect base
    Literal lit;                  // Literal
    std::string op;               // Unary/Binary operator token ("+", "&&", "~", ...)
    std::vector<ExprPtr> args;    // Unary: 1; Binary: 2; Ternary: cond,a,b; BitSelect: idx; Concat: parts
    int msb = 0, lsb = 0;         // PartSelect bounds (constant-resolved)
};

ExprPtr make_ref(std::string name, SourceLoc loc = {});
ExprPtr make_literal(uint64_t value, int width = 0, char base = 'd', bool based = false,
                     SourceLoc loc = {});
ExprPtr make_unary(std::string op, ExprPtr operand, SourceLoc loc = {});
ExprPtr make_binary(std::string op, ExprPtr lhs, ExprPtr rhs, SourceLoc loc = {});
ExprPtr make_ternary(ExprPtr cond, ExprPtr then_e, ExprPtr else_e, SourceLoc loc = {});
ExprPtr clone_expr(const ExprPtr &e);

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

enum class LValueSel { Whole, Bit, Part };

struct LValue {
    std::string name;
    LValueSel sel = LValueSel::Whole;
    int msb = 0, lsb = 0;  // Bit uses msb only
    SourceLoc loc;
};

enum class StmtKind { BlockingAssign, NonblockingAssign, If, Case };

struct Stmt;
using StmtPtr = std::shared_ptr<Stmt>;

struct CaseItem {
    std::vector<ExprPtr> labels;  // empty for default
    std::vector<StmtPtr> body;
    bool is_default = false;
    SourceLoc loc;
};

struct Stmt {
    StmtKind kind = StmtKind::BlockingAssign;
    SourceLoc loc;
    // assigns
    LValue lhs;
    ExprPtr rhs;
    // if
    ExprPtr cond;
    std::vector<StmtPtr> then_body;
    std::vector<StmtPtr> else_body;
    // case
    ExprPtr case_expr;
    std::vector<CaseItem> items;
};

StmtPtr clone_stmt(const StmtPtr &s);

// ---------------------------------------------------------------------------
// Module items
// ---------------------------------------------------------------------------

enum class PortDir { Input, Output, Inout };
enum class NetKind { Wire, Reg };

struct Port {
    std::string name;
    PortDir dir = PortDir::Input;
    int msb = 0, lsb = 0;  // (0,0) = scalar
    bool is_reg = false;
    SourceLoc loc;
};

struct NetDecl {
    std::string name;
    NetKind kind = NetKind::Wire;
    int msb = 0, lsb = 0;
    SourceLoc loc;
};

struct ParamDecl {
    std::string name;
    int64_t value = 0;
    SourceLoc loc;
};

struct ContinuousAssign {
    LValue lhs;
    ExprPtr rhs;
    SourceLoc loc;
};

enum class EdgeKindAst { Posedge, Negedge };

struct EdgeEvent {
    std::string signal;
    EdgeKindAst edge = EdgeKindAst::Posedge;
};

struct AlwaysBlock {
    bool combinational = false;  // always @(*)
    EdgeEvent clock;             // valid when !combinational
    bool has_async_reset = false;
    EdgeEvent async_reset;
    std::vector<StmtPtr> body;
    SourceLoc loc;
};

struct PortConn {
    std::string port;
    ExprPtr expr;
    SourceLoc loc;
};

struct ModuleInstance {
    std::string module_name;
    std::string instance_name;
    std::vector<PortConn> connections;
    SourceLoc loc;
};

struct AstModule {
    std::string name;
    std::vector<Port> ports;
    std::vector<ParamDecl> parameters;
    std::vector<NetDecl> nets;
    std::vector<ContinuousAssign> assigns;
    std::vector<AlwaysBlock> always_blocks;
    std::vector<ModuleInstance> instances;
    SourceLoc loc;

    const Port *find_port(const std::string &n) const;
    const NetDecl *find_net(const std::string &n) const;
    // Declared width of a port or net; 1 when unknown.
    int width_of(const std::string &n) const;
};

int range_width(int msb, int lsb);

// Structural equality; source locations are ignored.
bool structural_equal(const Expr &a, const Expr &b);
bool structural_equal(const Stmt &a, const Stmt &b);
bool structural_equal(const AstModule &a, const AstModule &b);

AstModule clone_module(const AstModule &m);

}  // namespace triage

#endif
