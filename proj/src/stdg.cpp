#include "triage/stdg.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "triage/parser.hpp"
#include "triage/timing.hpp"

namespace triage {

const char *to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Register: return "register";
        case NodeKind::Wire: return "wire";
        case NodeKind::Port: return "port";
        case NodeKind::Constant: return "constant";
        case NodeKind::Operator: return "operator";
    }
    return "?";
}

const char *to_string(Vtype v) {
    switch (v) {
        case Vtype::Setup: return "setup";
        case Vtype::Hold: return "hold";
        case Vtype::Cdc: return "cdc";
    }
    return "?";
}

std::optional<Vtype> vtype_from_string(const std::string &s) {
    if (s == "setup") return Vtype::Setup;
    if (s == "hold") return Vtype::Hold;
    if (s == "cdc") return Vtype::Cdc;
    return std::nullopt;
}

const StdgNode *Stdg::find(const std::string &name) const {
    auto it = by_name.find(name);
    return it == by_name.end() ? nullptr : &nodes[static_cast<size_t>(it->second)];
}

int Stdg::require(const std::string &name) const {
    auto it = by_name.find(name);
    return it == by_name.end() ? -1 : it->second;
}

void Stdg::rebuild_adjacency() {
    preds.assign(nodes.size(), {});
    succs.assign(nodes.size(), {});
    for (size_t i = 0; i < edges.size(); ++i) {
        preds[static_cast<size_t>(edges[i].dst)].push_back(static_cast<int>(i));
        succs[static_cast<size_t>(edges[i].src)].push_back(static_cast<int>(i));
    }
}

namespace {

struct Builder {
    const AstModule &m;
    Stdg g;
    std::map<std::string, int> op_counters;
    std::set<std::tuple<int, int, int>> edge_set;
    std::map<std::string, int> driver_count;
    BuildError error;

    explicit Builder(const AstModule &ast) : m(ast) {}

    int add_node(NodeKind kind, const std::string &name, int width, SourceLoc loc,
                 std::optional<std::string> domain = std::nullopt, bool falling = false,
                 const std::string &op_class = "") {
        StdgNode n;
        n.id = static_cast<int>(g.nodes.size());
        n.kind = kind;
        n.name = name;
        n.op_class = op_class;
        n.width = width;
        n.loc = std::move(loc);
        n.clock_domain = std::move(domain);
        n.clock_falling = falling;
        g.nodes.push_back(std::move(n));
        g.by_name[name] = g.nodes.back().id;
        return g.nodes.back().id;
    }

    void add_edge(int src, int dst, EdgeKind kind) {
        auto key = std::make_tuple(src, dst, static_cast<int>(kind));
        if (edge_set.count(key)) return;
        edge_set.insert(key);
        g.edges.push_back({src, dst, kind});
    }

    std::string op_node_name(const std::string &cls) {
        int n = ++op_counters[cls];
        return cls + "#" + std::to_string(n);
    }

    static std::string op_class_for(const Expr &e) {
        if (e.kind == ExprKind::Ternary) return "mux";
        if (e.kind == ExprKind::BitSelect) return "bitsel";
        if (e.kind == ExprKind::PartSelect) return "partsel";
        if (e.kind == ExprKind::Concat) return "concat";
        if (e.kind == ExprKind::Unary) {
            if (e.op == "~") return "not";
            if (e.op == "!") return "lognot";
            if (e.op == "-") return "neg";
            if (e.op == "&") return "redand";
            if (e.op == "|") return "redor";
            if (e.op == "^") return "redxor";
        }
        static const std::map<std::string, std::string> binops = {
            {"+", "add"}, {"-", "sub"}, {"*", "mul"}, {"/", "div"}, {"%", "mod"},
            {"&", "and"}, {"|", "or"},  {"^", "xor"}, {"&&", "logand"}, {"||", "logor"},
            {"==", "eq"}, {"!=", "ne"}, {"<", "lt"},  {"<=", "le"}, {">", "gt"}, {">=", "ge"},
            {"<<", "shl"}, {">>", "shr"},
        };
        auto it = binops.find(e.op);
        return it == binops.end() ? "op" : it->second;
    }

    // Builds nodes for an expression tree; returns the node carrying its value.
    int build_expr(const Expr &e) {
        switch (e.kind) {
            case ExprKind::Ref:
                return g.by_name.at(e.ident);
            case ExprKind::Literal: {
                std::string name = op_node_name("const");
                int w = e.lit.width > 0 ? e.lit.width : 32;
                return add_node(NodeKind::Constant, name, w, e.loc);
            }
            case ExprKind::BitSelect:
            case ExprKind::PartSelect: {
                std::string cls = op_class_for(e);
                int node = add_node(NodeKind::Operator, op_node_name(cls),
                                    expr_width(m, e), e.loc, std::nullopt, false, cls);
                add_edge(g.by_name.at(e.ident), node, EdgeKind::Data);
                return node;
            }
            default: {
                // children first so operator numbering follows dataflow order
                std::vector<int> inputs;
                for (const auto &a : e.args) inputs.push_back(build_expr(*a));
                std::string cls = op_class_for(e);
                int node = add_node(NodeKind::Operator, op_node_name(cls),
                                    expr_width(m, e), e.loc, std::nullopt, false, cls);
                for (int in : inputs) add_edge(in, node, EdgeKind::Data);
                return node;
            }
        }
    }

    void note_driver(const std::string &name) { driver_count[name] += 1; }

    void build_stmts(const std::vector<StmtPtr> &body, std::vector<int> &cond_stack,
                     std::set<std::string> &block_targets) {
        for (const auto &sp : body) {
            const Stmt &s = *sp;
            switch (s.kind) {
                case StmtKind::BlockingAssign:
                case StmtKind::NonblockingAssign: {
                    int target = g.by_name.at(s.lhs.name);
                    add_edge(build_expr(*s.rhs), target, EdgeKind::Data);
                    for (int c : cond_stack) add_edge(c, target, EdgeKind::Control);
                    block_targets.insert(s.lhs.name);
                    break;
                }
                case StmtKind::If: {
                    int cond = build_expr(*s.cond);
                    cond_stack.push_back(cond);
                    build_stmts(s.then_body, cond_stack, block_targets);
                    build_stmts(s.else_body, cond_stack, block_targets);
                    cond_stack.pop_back();
                    break;
                }
                case StmtKind::Case: {
                    int sel = build_expr(*s.case_expr);
                    cond_stack.push_back(sel);
                    for (const auto &item : s.items)
                        build_stmts(item.body, cond_stack, block_targets);
                    cond_stack.pop_back();
                    break;
                }
            }
        }
    }

    static void collect_targets(const std::vector<StmtPtr> &body, std::set<std::string> &out) {
        for (const auto &sp : body) {
            const Stmt &s = *sp;
            if (s.kind == StmtKind::BlockingAssign || s.kind == StmtKind::NonblockingAssign) {
                out.insert(s.lhs.name);
            } else if (s.kind == StmtKind::If) {
                collect_targets(s.then_body, out);
                collect_targets(s.else_body, out);
            } else if (s.kind == StmtKind::Case) {
                for (const auto &item : s.items) collect_targets(item.body, out);
            }
        }
    }

    bool run() {
        // Pass 1: classify declared signals. A signal is a register iff it is
        // the target of a nonblocking assignment in an edge-triggered block.
        std::map<std::string, const AlwaysBlock *> reg_block;
        for (const auto &blk : m.always_blocks) {
            if (blk.combinational) continue;
            std::set<std::string> targets;
            collect_targets(blk.body, targets);
            for (const auto &t : targets) {
                auto it = reg_block.find(t);
                if (it != reg_block.end() && it->second != &blk) {
                    error = {BuildErrorKind::MultipleDrivers,
                             "register '" + t + "' driven by multiple always blocks", {}};
                    return false;
                }
                reg_block[t] = &blk;
            }
        }

        for (const auto &p : m.ports) {
            auto rit = reg_block.find(p.name);
            if (rit != reg_block.end()) {
                add_node(NodeKind::Register, p.name, range_width(p.msb, p.lsb), p.loc,
                         rit->second->clock.signal,
                         rit->second->clock.edge == EdgeKindAst::Negedge);
            } else {
                add_node(NodeKind::Port, p.name, range_width(p.msb, p.lsb), p.loc);
            }
            if (p.dir == PortDir::Input) note_driver(p.name);
        }
        for (const auto &n : m.nets) {
            auto rit = reg_block.find(n.name);
            if (rit != reg_block.end()) {
                add_node(NodeKind::Register, n.name, range_width(n.msb, n.lsb), n.loc,
                         rit->second->clock.signal,
                         rit->second->clock.edge == EdgeKindAst::Negedge);
            } else {
                add_node(NodeKind::Wire, n.name, range_width(n.msb, n.lsb), n.loc);
            }
        }

        for (const auto &[name, blk] : reg_block) {
            const std::string &clk = blk->clock.signal;
            if (std::find(g.clocks.begin(), g.clocks.end(), clk) == g.clocks.end())
                g.clocks.push_back(clk);
        }
        std::sort(g.clocks.begin(), g.clocks.end());

        // Pass 2: dataflow edges.
        for (const auto &a : m.assigns) {
            int target = g.by_name.at(a.lhs.name);
            add_edge(build_expr(*a.rhs), target, EdgeKind::Data);
            note_driver(a.lhs.name);
        }
        for (const auto &blk : m.always_blocks) {
            std::vector<int> cond_stack;
            std::set<std::string> block_targets;
            build_stmts(blk.body, cond_stack, block_targets);
            for (const auto &t : block_targets) note_driver(t);
        }

        // Instance pins: a bare-identifier connection to an otherwise undriven
        // net is treated as driven by the instance; everything else is consumed.
        struct Deferred {
            int pin;
            std::string net;
        };
        std::vector<Deferred> deferred;
        for (const auto &inst : m.instances) {
            for (const auto &pc : inst.connections) {
                if (!pc.expr) continue;
                std::string pin_name = inst.instance_name + "." + pc.port;
                int pin = add_node(NodeKind::Wire, pin_name, expr_width(m, *pc.expr), pc.loc);
                if (pc.expr->kind == ExprKind::Ref) {
                    deferred.push_back({pin, pc.expr->ident});
                } else {
                    add_edge(build_expr(*pc.expr), pin, EdgeKind::Data);
                }
            }
        }
        for (const auto &d : deferred) {
            int sig = g.by_name.at(d.net);
            if (driver_count[d.net] > 0) {
                add_edge(sig, d.pin, EdgeKind::Data);
            } else {
                add_edge(d.pin, sig, EdgeKind::Data);
                note_driver(d.net);
            }
        }

        for (const auto &[name, count] : driver_count) {
            if (count > 1) {
                error = {BuildErrorKind::MultipleDrivers,
                         "signal '" + name + "' has " + std::to_string(count) + " drivers", {}};
                return false;
            }
        }

        g.rebuild_adjacency();
        return check_acyclic();
    }

    // Cycle check over the combinational (non-register) subgraph.
    bool check_acyclic() {
        size_t n = g.nodes.size();
        std::vector<int> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
        std::vector<int> stack;
        std::vector<size_t> next_edge;

        for (size_t start = 0; start < n; ++start) {
            if (g.nodes[start].kind == NodeKind::Register || state[start] != 0) continue;
            stack.push_back(static_cast<int>(start));
            next_edge.assign(1, 0);
            state[start] = 1;
            while (!stack.empty()) {
                int u = stack.back();
                bool advanced = false;
                auto &succ = g.succs[static_cast<size_t>(u)];
                for (size_t &k = next_edge.back(); k < succ.size();) {
                    const StdgEdge &e = g.edges[static_cast<size_t>(succ[k])];
                    ++k;
                    int v = e.dst;
                    if (g.nodes[static_cast<size_t>(v)].kind == NodeKind::Register) continue;
                    if (state[v] == 1) {
                        std::vector<std::string> cycle;
                        auto it = std::find(stack.begin(), stack.end(), v);
                        for (; it != stack.end(); ++it)
                            cycle.push_back(g.nodes[static_cast<size_t>(*it)].name);
                        cycle.push_back(g.nodes[static_cast<size_t>(v)].name);
                        error = {BuildErrorKind::CombinationalLoop,
                                 "combinational loop through '" +
                                     g.nodes[static_cast<size_t>(v)].name + "'",
                                 cycle};
                        return false;
                    }
                    if (state[v] == 0) {
                        state[v] = 1;
                        stack.push_back(v);
                        next_edge.push_back(0);
                        advanced = true;
                        break;
                    }
                }
                if (!advanced) {
                    state[u] = 2;
                    stack.pop_back();
                    next_edge.pop_back();
                }
            }
        }
        return true;
    }
};

}  // namespace

Result<Stdg, BuildError> build(const AstModule &ast) {
    Builder b(ast);
    if (!b.run()) return Result<Stdg, BuildError>::err(std::move(b.error));
    return Result<Stdg, BuildError>::ok(std::move(b.g));
}

Result<Stdg, AnnotateError> annotate(Stdg stdg, const TimingReport &report) {
    auto attach = [&](const std::string &endpoint, ViolationInfo info)
        -> std::optional<AnnotateError> {
        int id = stdg.require(endpoint);
        if (id < 0) return AnnotateError{AnnotateErrorKind::UnknownEndpoint, endpoint};
        StdgNode &node = stdg.nodes[static_cast<size_t>(id)];
        if (node.kind != NodeKind::Register)
            return AnnotateError{AnnotateErrorKind::KindMismatch, endpoint};
        node.violation = std::move(info);
        return std::nullopt;
    };

    for (const auto &p : report.paths) {
        ViolationInfo info;
        info.vtype = p.vtype;
        info.slack = p.slack;
        info.report_startpoint = p.startpoint;
        info.report_path = p.node_sequence;
        if (auto err = attach(p.endpoint, std::move(info)))
            return Result<Stdg, AnnotateError>::err(std::move(*err));
    }
    for (const auto &c : report.cdc) {
        if (!c.violating) continue;
        ViolationInfo info;
        info.vtype = Vtype::Cdc;
        info.report_startpoint = c.source;
        if (auto err = attach(c.destination, std::move(info)))
            return Result<Stdg, AnnotateError>::err(std::move(*err));
    }
    return Result<Stdg, AnnotateError>::ok(std::move(stdg));
}

std::string dump_graph(const Stdg &g) {
    std::ostringstream os;
    for (const auto &n : g.nodes) {
        os << n.id << ": " << n.name << " kind=" << to_string(n.kind) << " width=" << n.width;
        if (n.clock_domain) os << " clock=" << *n.clock_domain;
        if (n.violation) os << " violation=" << to_string(n.violation->vtype);
        os << "\n";
        for (int ei : g.succs[static_cast<size_t>(n.id)]) {
            const StdgEdge &e = g.edges[static_cast<size_t>(ei)];
            os << "  -> " << g.nodes[static_cast<size_t>(e.dst)].name
               << (e.kind == EdgeKind::Control ? " [control]" : " [data]") << "\n";
        }
    }
    return os.str();
}

}  // namespace triage
