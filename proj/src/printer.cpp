#include "triage/printer.hpp"

#include <cstdio>
#include <sstream>

namespace triage {

namespace {

std::string render_literal(const Literal &lit) {
    if (!lit.based) return std::to_string(lit.value);
    std::string out;
    if (lit.width > 0) out += std::to_string(lit.width);
    out += '\'';
    out += lit.base;
    uint64_t v = lit.value;
    switch (lit.base) {
        case 'd':
            out += std::to_string(v);
            break;
        case 'h': {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(v));
            out += buf;
            break;
        }
        case 'o': {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%llo", static_cast<unsigned long long>(v));
            out += buf;
            break;
        }
        case 'b': {
            if (v == 0) {
                out += '0';
                break;
            }
            std::string bits;
            while (v) {
                bits += static_cast<char>('0' + (v & 1));
                v >>= 1;
            }
            out.append(bits.rbegin(), bits.rend());
            break;
        }
    }
    return out;
}

bool is_compound(const Expr &e) {
    return e.kind == ExprKind::Unary || e.kind == ExprKind::Binary ||
           e.kind == ExprKind::Ternary;
}

std::string render_expr(const Expr &e);

std::string render_operand(const Expr &e) {
    if (is_compound(e)) return "(" + render_expr(e) + ")";
    return render_expr(e);
}

std::string render_expr(const Expr &e) {
    switch (e.kind) {
        case ExprKind::Ref:
            return e.ident;
        case ExprKind::Literal:
            return render_literal(e.lit);
        case ExprKind::Unary:
            return e.op + render_operand(*e.args[0]);
        case ExprKind::Binary:
            return render_operand(*e.args[0]) + " " + e.op + " " + render_operand(*e.args[1]);
        case ExprKind::Ternary:
            return render_operand(*e.args[0]) + " ? " + render_operand(*e.args[1]) + " : " +
                   render_operand(*e.args[2]);
        case ExprKind::BitSelect:
            return e.ident + "[" + std::to_string(e.msb) + "]";
        case ExprKind::PartSelect:
            return e.ident + "[" + std::to_string(e.msb) + ":" + std::to_string(e.lsb) + "]";
        case ExprKind::Concat: {
            std::string out = "{";
            for (size_t i = 0; i < e.args.size(); ++i) {
                if (i) out += ", ";
                out += render_expr(*e.args[i]);
            }
            return out + "}";
        }
    }
    return "";
}

std::string render_lvalue(const LValue &lv) {
    switch (lv.sel) {
        case LValueSel::Whole:
            return lv.name;
        case LValueSel::Bit:
            return lv.name + "[" + std::to_string(lv.msb) + "]";
        case LValueSel::Part:
            return lv.name + "[" + std::to_string(lv.msb) + ":" + std::to_string(lv.lsb) + "]";
    }
    return lv.name;
}

std::string range_str(int msb, int lsb) {
    if (msb == 0 && lsb == 0) return "";
    return "[" + std::to_string(msb) + ":" + std::to_string(lsb) + "] ";
}

void render_stmts(std::ostringstream &os, const std::vector<StmtPtr> &body, int indent);

void render_stmt(std::ostringstream &os, const Stmt &s, int indent) {
    std::string pad(static_cast<size_t>(indent) * 2, ' ');
    switch (s.kind) {
        case StmtKind::BlockingAssign:
            os << pad << render_lvalue(s.lhs) << " = " << render_expr(*s.rhs) << ";\n";
            break;
        case StmtKind::NonblockingAssign:
            os << pad << render_lvalue(s.lhs) << " <= " << render_expr(*s.rhs) << ";\n";
            break;
        case StmtKind::If:
            os << pad << "if (" << render_expr(*s.cond) << ") begin\n";
            render_stmts(os, s.then_body, indent + 1);
            if (!s.else_body.empty()) {
                os << pad << "end else begin\n";
                render_stmts(os, s.else_body, indent + 1);
            }
            os << pad << "end\n";
            break;
        case StmtKind::Case:
            os << pad << "case (" << render_expr(*s.case_expr) << ")\n";
            for (const auto &item : s.items) {
                os << pad << "  ";
                if (item.is_default) {
                    os << "default: begin\n";
                } else {
                    for (size_t i = 0; i < item.labels.size(); ++i) {
                        if (i) os << ", ";
                        os << render_expr(*item.labels[i]);
                    }
                    os << ": begin\n";
                }
                render_stmts(os, item.body, indent + 2);
                os << pad << "  end\n";
            }
            os << pad << "endcase\n";
            break;
    }
}

void render_stmts(std::ostringstream &os, const std::vector<StmtPtr> &body, int indent) {
    for (const auto &s : body) render_stmt(os, *s, indent);
}

const char *dir_str(PortDir d) {
    switch (d) {
        case PortDir::Input: return "input";
        case PortDir::Output: return "output";
        case PortDir::Inout: return "inout";
    }
    return "input";
}

}  // namespace

std::string print_expr(const Expr &e) { return render_expr(e); }

std::string print_source(const AstModule &m) {
    std::ostringstream os;
    os << "module " << m.name << " (";
    if (m.ports.empty()) {
        os << ");\n";
    } else {
        os << "\n";
        for (size_t i = 0; i < m.ports.size(); ++i) {
            const Port &p = m.ports[i];
            os << "  " << dir_str(p.dir) << " " << (p.is_reg ? "reg " : "wire ")
               << range_str(p.msb, p.lsb) << p.name;
            os << (i + 1 < m.ports.size() ? ",\n" : "\n");
        }
        os << ");\n";
    }
    for (const auto &prm : m.parameters)
        os << "  parameter " << prm.name << " = " << prm.value << ";\n";
    for (const auto &n : m.nets) {
        os << "  " << (n.kind == NetKind::Reg ? "reg " : "wire ") << range_str(n.msb, n.lsb)
           << n.name << ";\n";
    }
    for (const auto &a : m.assigns)
        os << "  assign " << render_lvalue(a.lhs) << " = " << render_expr(*a.rhs) << ";\n";
    for (const auto &blk : m.always_blocks) {
        if (blk.combinational) {
            os << "  always @(*) begin\n";
        } else {
            os << "  always @(" << (blk.clock.edge == EdgeKindAst::Posedge ? "posedge" : "negedge")
               << " " << blk.clock.signal;
            if (blk.has_async_reset)
                os << " or "
                   << (blk.async_reset.edge == EdgeKindAst::Posedge ? "posedge" : "negedge") << " "
                   << blk.async_reset.signal;
            os << ") begin\n";
        }
        render_stmts(os, blk.body, 2);
        os << "  end\n";
    }
    for (const auto &inst : m.instances) {
        os << "  " << inst.module_name << " " << inst.instance_name << " (\n";
        for (size_t i = 0; i < inst.connections.size(); ++i) {
            const PortConn &pc = inst.connections[i];
            os << "    ." << pc.port << "(" << (pc.expr ? render_expr(*pc.expr) : "") << ")";
            os << (i + 1 < inst.connections.size() ? ",\n" : "\n");
        }
        os << "  );\n";
    }
    os << "endmodule\n";
    return os.str();
}

}  // namespace triage
