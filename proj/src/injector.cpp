#include "triage/injector.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "triage/config.hpp"
#include "triage/parser.hpp"
#include "triage/printer.hpp"
#include "triage/stdg.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace triage {

const char *to_string(Difficulty d) { return d == Difficulty::Simple ? "simple" : "complex"; }

std::optional<Difficulty> difficulty_from_string(const std::string &s) {
    if (s == "simple") return Difficulty::Simple;
    if (s == "complex") return Difficulty::Complex;
    return std::nullopt;
}

namespace {

using Err = Result<InjectedCase, InjectError>;

InjectError shape_err(const std::string &msg) {
    return {InjectErrorKind::SeedShapeMismatch, msg};
}

// ---------------------------------------------------------------------------
// AST editing helpers
// ---------------------------------------------------------------------------

struct SeqAssign {
    std::string target;
    ExprPtr rhs;
    ExprPtr guard;  // innermost if-condition, null when unguarded
    size_t block_index;
};

void collect_seq(const std::vector<StmtPtr> &body, ExprPtr guard, size_t block_index,
                 std::vector<SeqAssign> &out) {
    for (const auto &s : body) {
        if (s->kind == StmtKind::NonblockingAssign) {
            out.push_back({s->lhs.name, s->rhs, guard, block_index});
        } else if (s->kind == StmtKind::If) {
            collect_seq(s->then_body, s->cond, block_index, out);
            collect_seq(s->else_body, s->cond, block_index, out);
        } else if (s->kind == StmtKind::Case) {
            for (const auto &item : s->items) collect_seq(item.body, s->case_expr, block_index, out);
        }
    }
}

std::vector<SeqAssign> seq_assigns(const AstModule &m) {
    std::vector<SeqAssign> out;
    for (size_t i = 0; i < m.always_blocks.size(); ++i) {
        if (m.always_blocks[i].combinational) continue;
        collect_seq(m.always_blocks[i].body, nullptr, i, out);
    }
    return out;
}

void collect_refs(const Expr &e, std::set<std::string> &out) {
    if (e.kind == ExprKind::Ref || e.kind == ExprKind::BitSelect ||
        e.kind == ExprKind::PartSelect)
        out.insert(e.ident);
    for (const auto &a : e.args)
        if (a) collect_refs(*a, out);
}

int count_operators(const Expr &e) {
    int n = 0;
    if (e.kind == ExprKind::Unary || e.kind == ExprKind::Binary || e.kind == ExprKind::Ternary)
        n = 1;
    for (const auto &a : e.args)
        if (a) n += count_operators(*a);
    return n;
}

// Removes nonblocking assignments to the given targets; drops emptied
// if/case shells and always blocks.
void remove_stmts(std::vector<StmtPtr> &body, const std::set<std::string> &targets) {
    std::vector<StmtPtr> kept;
    for (auto &s : body) {
        if (s->kind == StmtKind::NonblockingAssign || s->kind == StmtKind::BlockingAssign) {
            if (targets.count(s->lhs.name)) continue;
            kept.push_back(s);
        } else if (s->kind == StmtKind::If) {
            remove_stmts(s->then_body, targets);
            remove_stmts(s->else_body, targets);
            if (!s->then_body.empty() || !s->else_body.empty()) kept.push_back(s);
        } else if (s->kind == StmtKind::Case) {
            for (auto &item : s->items) remove_stmts(item.body, targets);
            bool any = false;
            for (const auto &item : s->items)
                if (!item.body.empty()) any = true;
            if (any) kept.push_back(s);
        } else {
            kept.push_back(s);
        }
    }
    body = std::move(kept);
}

void remove_regs(AstModule &m, const std::set<std::string> &names) {
    for (auto &blk : m.always_blocks) remove_stmts(blk.body, names);
    m.always_blocks.erase(std::remove_if(m.always_blocks.begin(), m.always_blocks.end(),
                                         [](const AlwaysBlock &b) { return b.body.empty(); }),
                          m.always_blocks.end());
    m.nets.erase(std::remove_if(m.nets.begin(), m.nets.end(),
                                [&](const NetDecl &d) { return names.count(d.name) > 0; }),
                 m.nets.end());
}

bool replace_rhs(std::vector<StmtPtr> &body, const std::string &target, const ExprPtr &rhs) {
    for (auto &s : body) {
        if (s->kind == StmtKind::NonblockingAssign && s->lhs.name == target) {
            s->rhs = rhs;
            return true;
        }
        if (s->kind == StmtKind::If) {
            if (replace_rhs(s->then_body, target, rhs)) return true;
            if (replace_rhs(s->else_body, target, rhs)) return true;
        }
        if (s->kind == StmtKind::Case) {
            for (auto &item : s->items)
                if (replace_rhs(item.body, target, rhs)) return true;
        }
    }
    return false;
}

bool replace_rhs(AstModule &m, const std::string &target, const ExprPtr &rhs) {
    for (auto &blk : m.always_blocks)
        if (replace_rhs(blk.body, target, rhs)) return true;
    return false;
}

// `if (g) target <= src;` becomes `target <= src;`
bool unguard_assign(std::vector<StmtPtr> &body, const std::string &target) {
    for (auto &s : body) {
        if (s->kind == StmtKind::If && s->then_body.size() == 1 && s->else_body.empty()) {
            const StmtPtr &inner = s->then_body[0];
            if (inner->kind == StmtKind::NonblockingAssign && inner->lhs.name == target) {
                s = inner;
                return true;
            }
        }
        if (s->kind == StmtKind::If) {
            if (unguard_assign(s->then_body, target)) return true;
            if (unguard_assign(s->else_body, target)) return true;
        }
    }
    return false;
}

void rename_expr(Expr &e, const std::map<std::string, std::string> &renames) {
    auto it = renames.find(e.ident);
    if (it != renames.end()) e.ident = it->second;
    for (auto &a : e.args)
        if (a) rename_expr(*a, renames);
}

void rename_stmt(Stmt &s, const std::map<std::string, std::string> &renames) {
    auto fix = [&](std::string &name) {
        auto it = renames.find(name);
        if (it != renames.end()) name = it->second;
    };
    fix(s.lhs.name);
    if (s.rhs) rename_expr(*s.rhs, renames);
    if (s.cond) rename_expr(*s.cond, renames);
    if (s.case_expr) rename_expr(*s.case_expr, renames);
    for (auto &t : s.then_body) rename_stmt(*t, renames);
    for (auto &t : s.else_body) rename_stmt(*t, renames);
    for (auto &item : s.items) {
        for (auto &l : item.labels) rename_expr(*l, renames);
        for (auto &t : item.body) rename_stmt(*t, renames);
    }
}

void rename_signals(AstModule &m, const std::map<std::string, std::string> &renames) {
    auto fix = [&](std::string &name) {
        auto it = renames.find(name);
        if (it != renames.end()) name = it->second;
    };
    for (auto &n : m.nets) fix(n.name);
    for (auto &a : m.assigns) {
        fix(a.lhs.name);
        rename_expr(*a.rhs, renames);
    }
    for (auto &blk : m.always_blocks) {
        if (!blk.combinational) {
            fix(blk.clock.signal);
            if (blk.has_async_reset) fix(blk.async_reset.signal);
        }
        for (auto &s : blk.body) rename_stmt(*s, renames);
    }
    for (auto &inst : m.instances)
        for (auto &pc : inst.connections)
            if (pc.expr) rename_expr(*pc.expr, renames);
}

StmtPtr nonblocking(const std::string &target, ExprPtr rhs) {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::NonblockingAssign;
    s->lhs.name = target;
    s->rhs = std::move(rhs);
    return s;
}

// Two self-contained always blocks on existing clocks, interleaved among the
// seed's blocks; used by the complex difficulty.
void add_unrelated_blocks(AstModule &m) {
    std::vector<std::string> clocks;
    for (const auto &blk : m.always_blocks)
        if (!blk.combinational &&
            std::find(clocks.begin(), clocks.end(), blk.clock.signal) == clocks.end())
            clocks.push_back(blk.clock.signal);
    if (clocks.empty()) return;
    const std::string clk_a = clocks.front();
    const std::string clk_b = clocks.back();

    m.nets.push_back({"aux_ctr", NetKind::Reg, 7, 0, {}});
    m.nets.push_back({"aux_tgl", NetKind::Reg, 0, 0, {}});

    AlwaysBlock ctr;
    ctr.clock = {clk_a, EdgeKindAst::Posedge};
    ctr.body.push_back(
        nonblocking("aux_ctr", make_binary("+", make_ref("aux_ctr"), make_literal(1, 8, 'd', true))));
    AlwaysBlock tgl;
    tgl.clock = {clk_b, EdgeKindAst::Posedge};
    tgl.body.push_back(nonblocking("aux_tgl", make_unary("~", make_ref("aux_tgl"))));

    m.always_blocks.insert(m.always_blocks.begin(), ctr);
    size_t mid = m.always_blocks.size() / 2 + 1;
    if (mid > m.always_blocks.size()) mid = m.always_blocks.size();
    m.always_blocks.insert(m.always_blocks.begin() + static_cast<long>(mid), tgl);
}

// Internal (non-port) signals renamed to n1, n2, ... in declaration order.
std::map<std::string, std::string> obfuscation_renames(const AstModule &m) {
    std::map<std::string, std::string> renames;
    int counter = 0;
    for (const auto &n : m.nets) renames[n.name] = "n" + std::to_string(++counter);
    return renames;
}

// ---------------------------------------------------------------------------
// Shape recognizers and transforms
// ---------------------------------------------------------------------------

bool is_reg_name(const AstModule &m, const std::string &name,
                 const std::vector<SeqAssign> &assigns) {
    (void)m;
    for (const auto &a : assigns)
        if (a.target == name) return true;
    return false;
}

// add-chain: target <= chain_reg + leaf, chain_reg <= ... ; returns ordered
// leaf operands and the traversed stage registers.
struct ChainShape {
    std::string target;
    std::vector<std::string> stages;  // innermost-first
    std::vector<ExprPtr> leaves;      // evaluation order
};

std::optional<ChainShape> find_chain(const AstModule &m, const std::vector<SeqAssign> &assigns,
                                     const std::string &want_target) {
    auto rhs_of = [&](const std::string &name) -> ExprPtr {
        for (const auto &a : assigns)
            if (a.target == name) return a.rhs;
        return nullptr;
    };

    auto expand = [&](const std::string &target) -> std::optional<ChainShape> {
        ChainShape shape;
        shape.target = target;
        std::set<std::string> visited{target};
        std::string cur = target;
        // walk left refs while they name chain registers with add rhs
        std::vector<std::pair<std::string, ExprPtr>> rhs_stack;
        ExprPtr rhs = rhs_of(target);
        while (rhs) {
            if (rhs->kind != ExprKind::Binary || rhs->op != "+") return std::nullopt;
            ExprPtr left = rhs->args[0];
            ExprPtr right = rhs->args[1];
            rhs_stack.push_back({cur, right});
            if (left->kind == ExprKind::Ref && is_reg_name(m, left->ident, assigns) &&
                !visited.count(left->ident) && rhs_of(left->ident) &&
                rhs_of(left->ident)->kind == ExprKind::Binary &&
                rhs_of(left->ident)->op == "+") {
                visited.insert(left->ident);
                shape.stages.push_back(left->ident);
                cur = left->ident;
                rhs = rhs_of(cur);
            } else {
                // innermost: left is a plain leaf
                shape.leaves.push_back(left);
                break;
            }
        }
        if (shape.stages.empty()) return std::nullopt;  // need a real pipeline
        for (auto it = rhs_stack.rbegin(); it != rhs_stack.rend(); ++it)
            shape.leaves.push_back(it->second);
        std::reverse(shape.stages.begin(), shape.stages.end());  // innermost-first
        return shape;
    };

    if (!want_target.empty()) return expand(want_target);

    std::optional<ChainShape> best;
    for (const auto &a : assigns) {
        auto shape = expand(a.target);
        if (!shape) continue;
        if (!best || shape->stages.size() > best->stages.size() ||
            (shape->stages.size() == best->stages.size() && shape->target < best->target))
            best = shape;
    }
    return best;
}

Result<AstModule, InjectError> inject_long_comb_chain(const AstModule &seed,
                                                      const InjectionSpec &spec,
                                                      std::string &endpoint) {
    if (spec.params.chain_n < 2 || spec.params.chain_n > 32)
        return Result<AstModule, InjectError>::err(
            {InjectErrorKind::ParamOutOfRange, "chain_n must be in [2, 32]"});
    auto assigns = seq_assigns(seed);
    auto shape = find_chain(seed, assigns, spec.target_signal);
    if (!shape)
        return Result<AstModule, InjectError>::err(
            shape_err("seed has no pipelined add chain"));
    // stage registers must have no uses outside the chain
    std::set<std::string> stages(shape->stages.begin(), shape->stages.end());

    AstModule faulty = clone_module(seed);
    // single-cycle chain of exactly chain_n adders over the cycled leaves
    int n_ops = spec.params.chain_n;
    ExprPtr acc = clone_expr(shape->leaves[0]);
    for (int i = 1; i <= n_ops; ++i) {
        const ExprPtr &leaf = shape->leaves[static_cast<size_t>(i) % shape->leaves.size()];
        acc = make_binary("+", acc, clone_expr(leaf));
    }
    remove_regs(faulty, stages);
    if (!replace_rhs(faulty, shape->target, acc))
        return Result<AstModule, InjectError>::err(shape_err("chain target assignment not found"));
    endpoint = shape->target;
    return Result<AstModule, InjectError>::ok(std::move(faulty));
}

// deep_mux: a combinational block whose single statement is a case over a
// selector with simple-data arms feeding one target.
struct CaseShape {
    size_t block_index = 0;
    std::string target;
    ExprPtr selector;
    std::vector<ExprPtr> labels;
    std::vector<ExprPtr> values;
    ExprPtr default_value;
};

std::optional<CaseShape> find_flat_case(const AstModule &m, const std::string &want_target) {
    for (size_t i = 0; i < m.always_blocks.size(); ++i) {
        const AlwaysBlock &blk = m.always_blocks[i];
        if (!blk.combinational || blk.body.size() != 1) continue;
        const Stmt &s = *blk.body[0];
        if (s.kind != StmtKind::Case) continue;
        CaseShape shape;
        shape.block_index = i;
        shape.selector = s.case_expr;
        bool ok = true;
        for (const auto &item : s.items) {
            if (item.body.size() != 1 || item.body[0]->kind != StmtKind::BlockingAssign) {
                ok = false;
                break;
            }
            const Stmt &asn = *item.body[0];
            if (shape.target.empty()) shape.target = asn.lhs.name;
            if (asn.lhs.name != shape.target) {
                ok = false;
                break;
            }
            if (item.is_default) {
                shape.default_value = asn.rhs;
            } else {
                for (const auto &l : item.labels) {
                    shape.labels.push_back(l);
                    shape.values.push_back(asn.rhs);
                }
            }
        }
        if (!ok || shape.labels.empty() || !shape.default_value) continue;
        if (!want_target.empty() && shape.target != want_target) continue;
        return shape;
    }
    return std::nullopt;
}

Result<AstModule, InjectError> inject_deep_mux(const AstModule &seed, const InjectionSpec &spec,
                                               std::string &endpoint, std::string &comb_target) {
    int k = spec.params.mux_depth;
    if (k < 2 || k > 16)
        return Result<AstModule, InjectError>::err(
            {InjectErrorKind::ParamOutOfRange, "mux_depth must be in [2, 16]"});
    auto shape = find_flat_case(seed, spec.target_signal);
    if (!shape)
        return Result<AstModule, InjectError>::err(
            shape_err("seed has no flat single-target case statement"));
    if (static_cast<size_t>(k) > shape->labels.size())
        return Result<AstModule, InjectError>::err(
            {InjectErrorKind::ParamOutOfRange,
             "mux_depth " + std::to_string(k) + " exceeds the seed's " +
                 std::to_string(shape->labels.size()) + " case arms"});

    AstModule faulty = clone_module(seed);
    // nested ternaries, innermost last: (sel==l0) ? v0 : (sel==l1) ? v1 : ... : default
    ExprPtr expr = clone_expr(shape->default_value);
    for (int i = k - 1; i >= 0; --i) {
        ExprPtr cond = make_binary("==", clone_expr(shape->selector),
                                   clone_expr(shape->labels[static_cast<size_t>(i)]));
        expr = make_ternary(std::move(cond), clone_expr(shape->values[static_cast<size_t>(i)]),
                            std::move(expr));
    }
    auto stmt = std::make_shared<Stmt>();
    stmt->kind = StmtKind::BlockingAssign;
    stmt->lhs.name = shape->target;
    stmt->rhs = std::move(expr);
    faulty.always_blocks[shape->block_index].body = {stmt};

    comb_target = shape->target;
    // the violating endpoint is the register capturing the muxed signal
    endpoint.clear();
    for (const auto &a : seq_assigns(seed)) {
        std::set<std::string> refs;
        collect_refs(*a.rhs, refs);
        if (refs.count(shape->target)) {
            endpoint = a.target;
            break;
        }
    }
    if (endpoint.empty())
        return Result<AstModule, InjectError>::err(
            shape_err("no register captures the case target '" + shape->target + "'"));
    return Result<AstModule, InjectError>::ok(std::move(faulty));
}

Result<AstModule, InjectError> inject_low_pipe_stage(const AstModule &seed,
                                                     const InjectionSpec &spec,
                                                     std::string &endpoint) {
    auto assigns = seq_assigns(seed);
    auto rhs_of = [&](const std::string &name) -> ExprPtr {
        for (const auto &a : assigns)
            if (a.target == name) return a.rhs;
        return nullptr;
    };
    // target <= p * x with p itself a multiply stage register
    for (const auto &a : assigns) {
        if (!spec.target_signal.empty() && a.target != spec.target_signal) continue;
        if (a.rhs->kind != ExprKind::Binary || a.rhs->op != "*") continue;
        const ExprPtr &left = a.rhs->args[0];
        if (left->kind != ExprKind::Ref) continue;
        ExprPtr stage_rhs = rhs_of(left->ident);
        if (!stage_rhs || stage_rhs->kind != ExprKind::Binary || stage_rhs->op != "*") continue;

        AstModule faulty = clone_module(seed);
        ExprPtr collapsed =
            make_binary("*", clone_expr(stage_rhs), clone_expr(a.rhs->args[1]));
        remove_regs(faulty, {left->ident});
        if (!replace_rhs(faulty, a.target, collapsed))
            return Result<AstModule, InjectError>::err(shape_err("pipeline target not found"));
        endpoint = a.target;
        return Result<AstModule, InjectError>::ok(std::move(faulty));
    }
    return Result<AstModule, InjectError>::err(
        shape_err("seed has no two-stage multiply pipeline"));
}

Result<AstModule, InjectError> inject_short_logic_path(const AstModule &seed,
                                                       const InjectionSpec &spec,
                                                       std::string &endpoint) {
    auto assigns = seq_assigns(seed);
    for (const auto &a : assigns) {
        if (!spec.target_signal.empty() && a.target != spec.target_signal) continue;
        if (count_operators(*a.rhs) < 1) continue;
        std::set<std::string> refs;
        collect_refs(*a.rhs, refs);
        std::string other_reg;
        for (const auto &r : refs) {
            if (r != a.target && is_reg_name(seed, r, assigns)) {
                other_reg = r;
                break;
            }
        }
        if (other_reg.empty()) continue;

        AstModule faulty = clone_module(seed);
        if (!replace_rhs(faulty, a.target, make_ref(other_reg)))
            return Result<AstModule, InjectError>::err(shape_err("hold target not found"));
        endpoint = a.target;
        return Result<AstModule, InjectError>::ok(std::move(faulty));
    }
    return Result<AstModule, InjectError>::err(
        shape_err("seed has no register fed from another register through logic"));
}

// 2-flop synchronizer: m1 <= src (cross-domain ref), m2 <= m1, with a unique
// consumer register using m2.
struct SyncShape {
    std::string first, second, source, consumer;
};

std::optional<SyncShape> find_two_flop(const AstModule &m, const std::vector<SeqAssign> &assigns,
                                       const std::string &want_second) {
    auto block_clock = [&](const std::string &target) -> std::string {
        for (const auto &a : assigns)
            if (a.target == target) return m.always_blocks[a.block_index].clock.signal;
        return "";
    };
    for (const auto &second : assigns) {
        if (second.rhs->kind != ExprKind::Ref) continue;
        const std::string &first_name = second.rhs->ident;
        if (!want_second.empty() && second.target != want_second) continue;
        for (const auto &first : assigns) {
            if (first.target != first_name || first.rhs->kind != ExprKind::Ref) continue;
            const std::string &src = first.rhs->ident;
            if (!is_reg_name(m, src, assigns)) continue;
            if (block_clock(src) == block_clock(first.target)) continue;  // not a crossing
            if (block_clock(first.target) != block_clock(second.target)) continue;
            // unique consumer of the second flop
            SyncShape shape{first.target, second.target, src, ""};
            for (const auto &user : assigns) {
                if (user.target == second.target) continue;
                std::set<std::string> refs;
                collect_refs(*user.rhs, refs);
                if (user.guard) collect_refs(*user.guard, refs);
                if (refs.count(second.target)) {
                    if (!shape.consumer.empty()) return std::nullopt;
                    shape.consumer = user.target;
                }
            }
            if (shape.consumer.empty()) return std::nullopt;
            return shape;
        }
    }
    return std::nullopt;
}

Result<AstModule, InjectError> inject_single_bit_trans(const AstModule &seed,
                                                       const InjectionSpec &spec,
                                                       std::string &endpoint) {
    auto assigns = seq_assigns(seed);
    auto shape_opt = find_two_flop(seed, assigns, spec.target_signal);
    if (!shape_opt)
        return Result<AstModule, InjectError>::err(
            shape_err("seed has no two-flop synchronizer with a unique consumer"));
    const SyncShape &sync = *shape_opt;

    AstModule faulty = clone_module(seed);
    remove_regs(faulty, {sync.first, sync.second});
    // the consumer now samples the source-domain register directly
    std::map<std::string, std::string> renames = {{sync.second, sync.source}};
    for (auto &blk : faulty.always_blocks)
        for (auto &s : blk.body) rename_stmt(*s, renames);
    for (auto &a : faulty.assigns) rename_expr(*a.rhs, renames);
    endpoint = sync.consumer;
    return Result<AstModule, InjectError>::ok(std::move(faulty));
}

Result<AstModule, InjectError> inject_multi_bits_trans(const AstModule &seed,
                                                       const InjectionSpec &spec,
                                                       std::string &endpoint) {
    auto assigns = seq_assigns(seed);
    auto block_clock = [&](const std::string &target) -> std::string {
        for (const auto &a : assigns)
            if (a.target == target) return seed.always_blocks[a.block_index].clock.signal;
        return "";
    };
    for (const auto &a : assigns) {
        if (!a.guard) continue;
        if (!spec.target_signal.empty() && a.target != spec.target_signal) continue;
        if (a.rhs->kind != ExprKind::Ref) continue;
        const std::string &src = a.rhs->ident;
        if (!is_reg_name(seed, src, assigns)) continue;
        if (block_clock(src) == block_clock(a.target)) continue;  // needs a crossing
        int width = seed.width_of(a.target);
        if (width <= 1) continue;
        if (spec.params.bus_width != width)
            return Result<AstModule, InjectError>::err(
                {InjectErrorKind::ParamOutOfRange,
                 "bus_width " + std::to_string(spec.params.bus_width) +
                     " does not match the seed's " + std::to_string(width) + "-bit bus"});

        AstModule faulty = clone_module(seed);
        bool done = false;
        for (auto &blk : faulty.always_blocks)
            if (unguard_assign(blk.body, a.target)) {
                done = true;
                break;
            }
        if (!done)
            return Result<AstModule, InjectError>::err(shape_err("guarded capture not found"));
        endpoint = a.target;
        return Result<AstModule, InjectError>::ok(std::move(faulty));
    }
    return Result<AstModule, InjectError>::err(
        shape_err("seed has no guarded multi-bit cross-domain capture"));
}

// ---------------------------------------------------------------------------
// Constraint and override tables
// ---------------------------------------------------------------------------

double period_for(Scenario s, const InjectionParams &p) {
    switch (s) {
        case Scenario::LongCombChain:
            return std::min(5.0, static_cast<double>(p.chain_n));
        case Scenario::DeepMux:
            return std::min(4.0, 1.0 + 0.5 * p.mux_depth);
        default:
            return 5.0;
    }
}

}  // namespace

Result<InjectedCase, InjectError> inject(const AstModule &seed, const std::string &seed_name,
                                         const InjectionSpec &spec, int sequence) {
    if (spec.mode == InjectMode::Manual && spec.target_signal.empty())
        return Err::err({InjectErrorKind::InvalidSpec, "manual mode requires a target signal"});
    if (spec.subscenario == Scenario::Unknown)
        return Err::err({InjectErrorKind::InvalidSpec, "cannot inject the unknown scenario"});

    AstModule base = clone_module(seed);
    if (spec.difficulty == Difficulty::Complex) {
        add_unrelated_blocks(base);
        rename_signals(base, obfuscation_renames(base));
    }

    std::string endpoint;
    std::string comb_target;
    InjectionSpec eff = spec;
    if (spec.mode == InjectMode::Auto) eff.target_signal.clear();
    if (spec.difficulty == Difficulty::Complex && !eff.target_signal.empty()) {
        // manual targets name seed signals; map through the obfuscation
        auto renames = obfuscation_renames([&] {
            AstModule tmp = clone_module(seed);
            add_unrelated_blocks(tmp);
            return tmp;
        }());
        auto it = renames.find(eff.target_signal);
        if (it != renames.end()) eff.target_signal = it->second;
    }

    Result<AstModule, InjectError> faulty =
        Result<AstModule, InjectError>::err({InjectErrorKind::InvalidSpec, ""});
    switch (spec.subscenario) {
        case Scenario::LongCombChain:
            faulty = inject_long_comb_chain(base, eff, endpoint);
            break;
        case Scenario::DeepMux:
            faulty = inject_deep_mux(base, eff, endpoint, comb_target);
            break;
        case Scenario::LowPipeStage:
            faulty = inject_low_pipe_stage(base, eff, endpoint);
            break;
        case Scenario::ShortLogicPath:
            faulty = inject_short_logic_path(base, eff, endpoint);
            break;
        case Scenario::SingleBitTrans:
            faulty = inject_single_bit_trans(base, eff, endpoint);
            break;
        case Scenario::MultiBitsTrans:
            faulty = inject_multi_bits_trans(base, eff, endpoint);
            break;
        case Scenario::Unknown:
            break;
    }
    if (faulty.is_err()) return Err::err(faulty.error());

    InjectedCase out;
    Vtype vtype = *scenario_vtype(spec.subscenario);
    char seq_buf[8];
    std::snprintf(seq_buf, sizeof seq_buf, "%02d", sequence);
    out.id = std::string(to_string(vtype)) + "." + to_string(spec.subscenario) + "." +
             to_string(spec.difficulty) + "." + seq_buf;
    out.subscenario = spec.subscenario;
    out.difficulty = spec.difficulty;
    out.seed_name = seed_name;
    out.faulty_source = print_source(faulty.value());
    out.golden_source = print_source(base);
    out.expected = {vtype, endpoint};
    out.params = spec.params;

    // every clock in the design gets the scenario period
    auto g = build(base);
    if (g.is_err())
        return Err::err({InjectErrorKind::SeedShapeMismatch,
                         "seed does not build: " + g.error().message});
    double period = period_for(spec.subscenario, spec.params);
    for (const auto &clk : g.value().clocks) out.constraints.push_back({clk, period});
    if (spec.subscenario == Scenario::ShortLogicPath) out.delay_overrides["t_h"] = 0.7;

    return Err::ok(std::move(out));
}

Result<bool, ValidationFailure> validate_case(const InjectedCase &c,
                                              const DelayModel &base_model) {
    using R = Result<bool, ValidationFailure>;
    DelayModel model = base_model;
    apply_delay_overrides(model, c.delay_overrides);

    auto analyze = [&](const std::string &source, const char *label)
        -> Result<TimingReport, ValidationFailure> {
        auto ast = parse(source, c.id + "/" + label);
        if (ast.is_err())
            return Result<TimingReport, ValidationFailure>::err(
                {std::string(label) + " does not parse: " + to_string(ast.error())});
        auto g = build(ast.value());
        if (g.is_err())
            return Result<TimingReport, ValidationFailure>::err(
                {std::string(label) + " does not build: " + g.error().message});
        auto report = analyze_design(g.value(), model, c.constraints);
        if (report.is_err())
            return Result<TimingReport, ValidationFailure>::err(
                {std::string(label) + ": " + report.error().message});
        return Result<TimingReport, ValidationFailure>::ok(report.take());
    };

    auto faulty_ast = parse(c.faulty_source, c.id + "/faulty");
    auto golden_ast = parse(c.golden_source, c.id + "/golden");
    if (faulty_ast.is_err()) return R::err({"faulty does not parse"});
    if (golden_ast.is_err()) return R::err({"golden does not parse"});

    const auto &fp = faulty_ast.value().ports;
    const auto &gp = golden_ast.value().ports;
    if (fp.size() != gp.size()) return R::err({"golden changes the port count"});
    for (size_t i = 0; i < fp.size(); ++i) {
        if (fp[i].name != gp[i].name || fp[i].dir != gp[i].dir || fp[i].msb != gp[i].msb ||
            fp[i].lsb != gp[i].lsb)
            return R::err({"golden changes port '" + fp[i].name + "'"});
    }

    auto faulty_report = analyze(c.faulty_source, "faulty");
    if (faulty_report.is_err()) return R::err(faulty_report.error());
    auto golden_report = analyze(c.golden_source, "golden");
    if (golden_report.is_err()) return R::err(golden_report.error());

    const TimingReport &fr = faulty_report.value();
    if (fr.violation_count() != 1)
        return R::err({"faulty has " + std::to_string(fr.violation_count()) +
                       " violations, expected exactly 1"});
    bool matches = false;
    if (c.expected.vtype == Vtype::Cdc) {
        matches = fr.cdc.size() == 1 && fr.cdc[0].destination == c.expected.endpoint;
    } else {
        matches = fr.paths.size() == 1 && fr.paths[0].vtype == c.expected.vtype &&
                  fr.paths[0].endpoint == c.expected.endpoint;
    }
    if (!matches)
        return R::err({"faulty violation does not match expected " +
                       std::string(to_string(c.expected.vtype)) + " at '" + c.expected.endpoint +
                       "'"});

    if (golden_report.value().violation_count() != 0)
        return R::err({"golden still has violations"});
    return R::ok(true);
}

// ---------------------------------------------------------------------------
// Case and manifest I/O
// ---------------------------------------------------------------------------

Result<bool, InjectError> write_case(const std::string &dataset_dir, const InjectedCase &c) {
    using R = Result<bool, InjectError>;
    fs::path dir = fs::path(dataset_dir) / c.id;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) return R::err({InjectErrorKind::Io, ec.message()});

    auto write_file = [&](const fs::path &p, const std::string &content) {
        std::ofstream f(p, std::ios::binary);
        f << content;
        return static_cast<bool>(f);
    };
    if (!write_file(dir / "faulty.v", c.faulty_source))
        return R::err({InjectErrorKind::Io, "cannot write faulty.v"});
    if (!write_file(dir / "golden.v", c.golden_source))
        return R::err({InjectErrorKind::Io, "cannot write golden.v"});

    ordered_json constraints = ordered_json::array();
    for (const auto &cc : c.constraints)
        constraints.push_back(ordered_json{{"clock", cc.clock}, {"period_ns", cc.period_ns}});
    ordered_json overrides = ordered_json::object();
    for (const auto &[k, v] : c.delay_overrides) overrides[k] = v;
    ordered_json j = {
        {"id", c.id},
        {"seed", c.seed_name},
        {"violation_type", to_string(c.expected.vtype)},
        {"subscenario", to_string(c.subscenario)},
        {"difficulty", to_string(c.difficulty)},
        {"expected", ordered_json{{"vtype", to_string(c.expected.vtype)},
                                  {"endpoint", c.expected.endpoint}}},
        {"constraints", constraints},
        {"delay_overrides", overrides},
        {"params", ordered_json{{"chain_n", c.params.chain_n},
                                {"mux_depth", c.params.mux_depth},
                                {"bus_width", c.params.bus_width}}},
    };
    if (!write_file(dir / "case.json", j.dump(2) + "\n"))
        return R::err({InjectErrorKind::Io, "cannot write case.json"});
    return R::ok(true);
}

Result<InjectedCase, InjectError> load_case(const std::string &case_dir) {
    using R = Result<InjectedCase, InjectError>;
    auto read_file = [](const fs::path &p, std::string &out) {
        std::ifstream f(p, std::ios::binary);
        if (!f) return false;
        std::ostringstream ss;
        ss << f.rdbuf();
        out = ss.str();
        return true;
    };

    InjectedCase c;
    std::string meta;
    if (!read_file(fs::path(case_dir) / "case.json", meta))
        return R::err({InjectErrorKind::Io, "cannot read " + case_dir + "/case.json"});
    if (!read_file(fs::path(case_dir) / "faulty.v", c.faulty_source))
        return R::err({InjectErrorKind::Io, "cannot read " + case_dir + "/faulty.v"});
    if (!read_file(fs::path(case_dir) / "golden.v", c.golden_source))
        return R::err({InjectErrorKind::Io, "cannot read " + case_dir + "/golden.v"});

    ordered_json j;
    try {
        j = ordered_json::parse(meta);
    } catch (const ordered_json::exception &e) {
        return R::err({InjectErrorKind::Io, std::string("case.json: ") + e.what()});
    }
    try {
        c.id = j.at("id").get<std::string>();
        c.seed_name = j.value("seed", "");
        auto sub = scenario_from_string(j.at("subscenario").get<std::string>());
        if (!sub) return R::err({InjectErrorKind::Io, "case.json: bad subscenario"});
        c.subscenario = *sub;
        auto diff = difficulty_from_string(j.at("difficulty").get<std::string>());
        if (!diff) return R::err({InjectErrorKind::Io, "case.json: bad difficulty"});
        c.difficulty = *diff;
        auto vtype = vtype_from_string(j.at("expected").at("vtype").get<std::string>());
        if (!vtype) return R::err({InjectErrorKind::Io, "case.json: bad expected vtype"});
        c.expected.vtype = *vtype;
        c.expected.endpoint = j.at("expected").at("endpoint").get<std::string>();
        for (const auto &cc : j.at("constraints"))
            c.constraints.push_back(
                {cc.at("clock").get<std::string>(), cc.at("period_ns").get<double>()});
        if (j.contains("delay_overrides"))
            for (auto it = j["delay_overrides"].begin(); it != j["delay_overrides"].end(); ++it)
                c.delay_overrides[it.key()] = it.value().get<double>();
        if (j.contains("params")) {
            c.params.chain_n = j["params"].value("chain_n", 8);
            c.params.mux_depth = j["params"].value("mux_depth", 6);
            c.params.bus_width = j["params"].value("bus_width", 8);
        }
    } catch (const ordered_json::exception &e) {
        return R::err({InjectErrorKind::Io, std::string("case.json: ") + e.what()});
    }
    return R::ok(std::move(c));
}

Result<std::vector<std::string>, InjectError> load_manifest(const std::string &dataset_dir) {
    using R = Result<std::vector<std::string>, InjectError>;
    std::ifstream f(fs::path(dataset_dir) / "manifest.json");
    if (!f) return R::err({InjectErrorKind::Io, "cannot read " + dataset_dir + "/manifest.json"});
    ordered_json j;
    try {
        f >> j;
        std::vector<std::string> ids;
        for (const auto &id : j.at("cases")) ids.push_back(id.get<std::string>());
        return R::ok(std::move(ids));
    } catch (const ordered_json::exception &e) {
        return R::err({InjectErrorKind::Io, std::string("manifest.json: ") + e.what()});
    }
}

Result<bool, InjectError> write_manifest(const std::string &dataset_dir,
                                         const std::vector<std::string> &case_ids) {
    ordered_json j = {{"cases", case_ids}};
    std::ofstream f(fs::path(dataset_dir) / "manifest.json", std::ios::binary);
    if (!f)
        return Result<bool, InjectError>::err(
            {InjectErrorKind::Io, "cannot write manifest.json"});
    f << j.dump(2) << "\n";
    return Result<bool, InjectError>::ok(true);
}

Result<std::vector<InjectedCase>, InjectError> build_standard_dataset(
    const std::string &seeds_dir) {
    using R = Result<std::vector<InjectedCase>, InjectError>;
    struct Entry {
        Scenario scenario;
        const char *seed_file;
    };
    const Entry table[] = {
        {Scenario::LongCombChain, "pipelined_acc.v"},
        {Scenario::DeepMux, "mux_path.v"},
        {Scenario::LowPipeStage, "mult_pipe.v"},
        {Scenario::ShortLogicPath, "edge_filter.v"},
        {Scenario::SingleBitTrans, "bit_sync.v"},
        {Scenario::MultiBitsTrans, "bus_handshake.v"},
    };

    std::vector<InjectedCase> cases;
    for (const auto &entry : table) {
        fs::path path = fs::path(seeds_dir) / entry.seed_file;
        std::ifstream f(path, std::ios::binary);
        if (!f)
            return R::err({InjectErrorKind::Io, "cannot read seed " + path.string()});
        std::ostringstream ss;
        ss << f.rdbuf();
        auto ast = parse(ss.str(), path.string());
        if (ast.is_err())
            return R::err({InjectErrorKind::Io,
                           "seed " + path.string() + ": " + to_string(ast.error())});
        std::string seed_name = fs::path(entry.seed_file).stem().string();
        for (Difficulty d : {Difficulty::Simple, Difficulty::Complex}) {
            InjectionSpec spec;
            spec.subscenario = entry.scenario;
            spec.difficulty = d;
            auto c = inject(ast.value(), seed_name, spec, 1);
            if (c.is_err()) return R::err(c.error());
            cases.push_back(c.take());
        }
    }
    return R::ok(std::move(cases));
}

Result<InjectionSpec, InjectError> parse_injection_spec(const std::string &json_text) {
    using R = Result<InjectionSpec, InjectError>;
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const ordered_json::exception &e) {
        return R::err({InjectErrorKind::InvalidSpec, e.what()});
    }
    InjectionSpec spec;
    if (!j.contains("subscenario") || !j["subscenario"].is_string())
        return R::err({InjectErrorKind::InvalidSpec, "missing subscenario"});
    auto sub = scenario_from_string(j["subscenario"].get<std::string>());
    if (!sub || *sub == Scenario::Unknown)
        return R::err({InjectErrorKind::InvalidSpec, "bad subscenario"});
    spec.subscenario = *sub;
    spec.target_module = j.value("target_module", "");
    spec.target_signal = j.value("target_signal", "");
    if (j.contains("difficulty")) {
        auto d = difficulty_from_string(j["difficulty"].get<std::string>());
        if (!d) return R::err({InjectErrorKind::InvalidSpec, "bad difficulty"});
        spec.difficulty = *d;
    }
    if (j.contains("mode")) {
        std::string mode = j["mode"].get<std::string>();
        if (mode == "auto") spec.mode = InjectMode::Auto;
        else if (mode == "manual") spec.mode = InjectMode::Manual;
        else return R::err({InjectErrorKind::InvalidSpec, "bad mode"});
    }
    if (j.contains("params")) {
        spec.params.chain_n = j["params"].value("chain_n", 8);
        spec.params.mux_depth = j["params"].value("mux_depth", 6);
        spec.params.bus_width = j["params"].value("bus_width", 8);
    }
    if (spec.mode == InjectMode::Manual && spec.target_signal.empty())
        return R::err({InjectErrorKind::InvalidSpec, "manual mode requires target_signal"});
    return R::ok(std::move(spec));
}

}  // namespace triage
