#include "triage/ast.hpp"

#include <algorithm>

namespace triage {

ExprPtr make_ref(std::string name, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Ref;
    e->ident = std::move(name);
    e->loc = std::move(loc);
    return e;
}

ExprPtr make_literal(uint64_t value, int width, char base, bool based, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Literal;
    e->lit = Literal{value, width, base, based};
    e->loc = std::move(loc);
    return e;
}

ExprPtr make_unary(std::string op, ExprPtr operand, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Unary;
    e->op = std::move(op);
    e->args = {std::move(operand)};
    e->loc = std::move(loc);
    return e;
}

ExprPtr make_binary(std::string op, ExprPtr lhs, ExprPtr rhs, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Binary;
    e->op = std::move(op);
    e->args = {std::move(lhs), std::move(rhs)};
    e->loc = std::move(loc);
    return e;
}

ExprPtr make_ternary(ExprPtr cond, ExprPtr then_e, ExprPtr else_e, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Ternary;
    e->args = {std::move(cond), std::move(then_e), std::move(else_e)};
    e->loc = std::move(loc);
    return e;
}

ExprPtr clone_expr(const ExprPtr &e) {
    if (!e) return nullptr;
    auto c = std::make_shared<Expr>(*e);
    c->args.clear();
    for (const auto &a : e->args) c->args.push_back(clone_expr(a));
    return c;
}

StmtPtr clone_stmt(const StmtPtr &s) {
    if (!s) return nullptr;
    auto c = std::make_shared<Stmt>();
    c->kind = s->kind;
    c->loc = s->loc;
    c->lhs = s->lhs;
    c->rhs = clone_expr(s->rhs);
    c->cond = clone_expr(s->cond);
    for (const auto &t : s->then_body) c->then_body.push_back(clone_stmt(t));
    for (const auto &t : s->else_body) c->else_body.push_back(clone_stmt(t));
    c->case_expr = clone_expr(s->case_expr);
    for (const auto &it : s->items) {
        CaseItem ci;
        ci.is_default = it.is_default;
        ci.loc = it.loc;
        for (const auto &l : it.labels) ci.labels.push_back(clone_expr(l));
        for (const auto &b : it.body) ci.body.push_back(clone_stmt(b));
        c->items.push_back(std::move(ci));
    }
    return c;
}

AstModule clone_module(const AstModule &m) {
    AstModule c;
    c.name = m.name;
    c.ports = m.ports;
    c.parameters = m.parameters;
    c.nets = m.nets;
    c.loc = m.loc;
    for (const auto &a : m.assigns) c.assigns.push_back({a.lhs, clone_expr(a.rhs), a.loc});
    for (const auto &ab : m.always_blocks) {
        AlwaysBlock nb = ab;
        nb.body.clear();
        for (const auto &s : ab.body) nb.body.push_back(clone_stmt(s));
        c.always_blocks.push_back(std::move(nb));
    }
    for (const auto &inst : m.instances) {
        ModuleInstance ni = inst;
        ni.connections.clear();
        for (const auto &pc : inst.connections)
            ni.connections.push_back({pc.port, clone_expr(pc.expr), pc.loc});
        c.instances.push_back(std::move(ni));
    }
    return c;
}

const Port *AstModule::find_port(const std::string &n) const {
    for (const auto &p : ports)
        if (p.name == n) return &p;
    return nullptr;
}

const NetDecl *AstModule::find_net(const std::string &n) const {
    for (const auto &d : nets)
        if (d.name == n) return &d;
    return nullptr;
}

int range_width(int msb, int lsb) { return std::abs(msb - lsb) + 1; }

int AstModule::width_of(const std::string &n) const {
    if (const Port *p = find_port(n)) return range_width(p->msb, p->lsb);
    if (const NetDecl *d = find_net(n)) return range_width(d->msb, d->lsb);
    return 1;
}

// ---------------------------------------------------------------------------
// Structural equality
// ---------------------------------------------------------------------------

static bool eq(const ExprPtr &a, const ExprPtr &b) {
    if (!a || !b) return !a && !b;
    return structural_equal(*a, *b);
}

static bool eq(const StmtPtr &a, const StmtPtr &b) {
    if (!a || !b) return !a && !b;
    return structural_equal(*a, *b);
}

template <typename T, typename Cmp>
static bool eq_vec(const std::vector<T> &a, const std::vector<T> &b, Cmp cmp) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!cmp(a[i], b[i])) return false;
    return true;
}

bool structural_equal(const Expr &a, const Expr &b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ExprKind::Ref:
            return a.ident == b.ident;
        case ExprKind::Literal:
            return a.lit.value == b.lit.value && a.lit.width == b.lit.width &&
                   a.lit.base == b.lit.base && a.lit.based == b.lit.based;
        case ExprKind::Unary:
        case ExprKind::Binary:
            if (a.op != b.op) return false;
            break;
        case ExprKind::BitSelect:
        case ExprKind::PartSelect:
            if (a.ident != b.ident || a.msb != b.msb || a.lsb != b.lsb) return false;
            break;
        case ExprKind::Ternary:
        case ExprKind::Concat:
            break;
    }
    return eq_vec(a.args, b.args, [](const ExprPtr &x, const ExprPtr &y) { return eq(x, y); });
}

static bool lvalue_equal(const LValue &a, const LValue &b) {
    return a.name == b.name && a.sel == b.sel && a.msb == b.msb && a.lsb == b.lsb;
}

bool structural_equal(const Stmt &a, const Stmt &b) {
    if (a.kind != b.kind) return false;
    auto stmts = [](const std::vector<StmtPtr> &x, const std::vector<StmtPtr> &y) {
        return eq_vec(x, y, [](const StmtPtr &p, const StmtPtr &q) { return eq(p, q); });
    };
    switch (a.kind) {
        case StmtKind::BlockingAssign:
        case StmtKind::NonblockingAssign:
            return lvalue_equal(a.lhs, b.lhs) && eq(a.rhs, b.rhs);
        case StmtKind::If:
            return eq(a.cond, b.cond) && stmts(a.then_body, b.then_body) &&
                   stmts(a.else_body, b.else_body);
        case StmtKind::Case: {
            if (!eq(a.case_expr, b.case_expr)) return false;
            return eq_vec(a.items, b.items, [&](const CaseItem &x, const CaseItem &y) {
                if (x.is_default != y.is_default) return false;
                if (!eq_vec(x.labels, y.labels,
                            [](const ExprPtr &p, const ExprPtr &q) { return eq(p, q); }))
                    return false;
                return stmts(x.body, y.body);
            });
        }
    }
    return false;
}

bool structural_equal(const AstModule &a, const AstModule &b) {
    if (a.name != b.name) return false;
    if (!eq_vec(a.ports, b.ports, [](const Port &x, const Port &y) {
            return x.name == y.name && x.dir == y.dir && x.msb == y.msb && x.lsb == y.lsb &&
                   x.is_reg == y.is_reg;
        }))
        return false;
    if (!eq_vec(a.parameters, b.parameters, [](const ParamDecl &x, const ParamDecl &y) {
            return x.name == y.name && x.value == y.value;
        }))
        return false;
    if (!eq_vec(a.nets, b.nets, [](const NetDecl &x, const NetDecl &y) {
            return x.name == y.name && x.kind == y.kind && x.msb == y.msb && x.lsb == y.lsb;
        }))
        return false;
    if (!eq_vec(a.assigns, b.assigns, [](const ContinuousAssign &x, const ContinuousAssign &y) {
            return lvalue_equal(x.lhs, y.lhs) && eq(x.rhs, y.rhs);
        }))
        return false;
    if (!eq_vec(a.always_blocks, b.always_blocks, [](const AlwaysBlock &x, const AlwaysBlock &y) {
            if (x.combinational != y.combinational) return false;
            if (!x.combinational) {
                if (x.clock.signal != y.clock.signal || x.clock.edge != y.clock.edge) return false;
                if (x.has_async_reset != y.has_async_reset) return false;
                if (x.has_async_reset && (x.async_reset.signal != y.async_reset.signal ||
                                          x.async_reset.edge != y.async_reset.edge))
                    return false;
            }
            return eq_vec(x.body, y.body,
                          [](const StmtPtr &p, const StmtPtr &q) { return eq(p, q); });
        }))
        return false;
    return eq_vec(a.instances, b.instances, [](const ModuleInstance &x, const ModuleInstance &y) {
        if (x.module_name != y.module_name || x.instance_name != y.instance_name) return false;
        return eq_vec(x.connections, y.connections, [](const PortConn &p, const PortConn &q) {
            return p.port == q.port && eq(p.expr, q.expr);
        });
    });
}

}  // namespace triage
