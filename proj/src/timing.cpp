#include "triage/timing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace triage {

double DelayModel::op_delay(const std::string &op_class) const {
    static const std::map<std::string, int> classes = {
        {"and", 0},    {"or", 0},     {"xor", 0},    {"not", 0},    {"logand", 0},
        {"logor", 0},  {"lognot", 0}, {"redand", 0}, {"redor", 0},  {"redxor", 0},
        {"add", 1},    {"sub", 1},    {"neg", 1},
        {"mux", 2},
        {"eq", 3},     {"ne", 3},     {"lt", 3},     {"le", 3},     {"gt", 3},  {"ge", 3},
        {"shl", 4},    {"shr", 4},
        {"mul", 5},
        {"div", 6},    {"mod", 6},
        {"bitsel", 7}, {"partsel", 7}, {"concat", 7},
    };
    auto it = classes.find(op_class);
    int cls = it == classes.end() ? 0 : it->second;
    switch (cls) {
        case 0: return bitwise;
        case 1: return add_sub;
        case 2: return mux;
        case 3: return compare;
        case 4: return shift;
        case 5: return multiply;
        case 6: return divide_mod;
        default: return select_concat;
    }
}

double DelayModel::node_delay(const StdgNode &n) const {
    return n.kind == NodeKind::Operator ? op_delay(n.op_class) : 0.0;
}

const char *to_string(Synchronizer s) {
    switch (s) {
        case Synchronizer::None: return "none";
        case Synchronizer::TwoFlop: return "two_flop";
        case Synchronizer::Handshake: return "handshake";
    }
    return "?";
}

std::optional<Synchronizer> synchronizer_from_string(const std::string &s) {
    if (s == "none") return Synchronizer::None;
    if (s == "two_flop") return Synchronizer::TwoFlop;
    if (s == "handshake") return Synchronizer::Handshake;
    return std::nullopt;
}

void TimingReport::sort_canonical() {
    auto vkey = [](Vtype v) { return v == Vtype::Setup ? 0 : v == Vtype::Hold ? 1 : 2; };
    std::sort(paths.begin(), paths.end(), [&](const TimingPath &a, const TimingPath &b) {
        if (vkey(a.vtype) != vkey(b.vtype)) return vkey(a.vtype) < vkey(b.vtype);
        if (a.slack != b.slack) return a.slack < b.slack;
        return a.endpoint < b.endpoint;
    });
    std::sort(cdc.begin(), cdc.end(), [](const CdcFinding &a, const CdcFinding &b) {
        if (a.destination != b.destination) return a.destination < b.destination;
        return a.source < b.source;
    });
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Topological order of the combinational (non-register) subgraph. Registers
// participate as sources/sinks only.
std::vector<int> comb_topo_order(const Stdg &g) {
    size_t n = g.nodes.size();
    std::vector<int> indeg(n, 0);
    for (const auto &e : g.edges) {
        if (g.nodes[static_cast<size_t>(e.src)].kind == NodeKind::Register) continue;
        if (g.nodes[static_cast<size_t>(e.dst)].kind == NodeKind::Register) continue;
        indeg[static_cast<size_t>(e.dst)]++;
    }
    std::vector<int> order;
    std::vector<int> ready;
    for (size_t i = 0; i < n; ++i)
        if (g.nodes[i].kind != NodeKind::Register && indeg[i] == 0)
            ready.push_back(static_cast<int>(i));
    // deterministic: smallest id first
    std::sort(ready.begin(), ready.end());
    while (!ready.empty()) {
        int u = ready.front();
        ready.erase(ready.begin());
        order.push_back(u);
        for (int ei : g.succs[static_cast<size_t>(u)]) {
            int v = g.edges[static_cast<size_t>(ei)].dst;
            if (g.nodes[static_cast<size_t>(v)].kind == NodeKind::Register) continue;
            if (--indeg[static_cast<size_t>(v)] == 0) {
                auto it = std::lower_bound(ready.begin(), ready.end(), v);
                ready.insert(it, v);
            }
        }
    }
    return order;
}

struct Arrival {
    double value = kNegInf;
    int pred = -1;       // predecessor node id on the recorded path
    int startpoint = -1; // node id of the launching register/port
};

// Returns the recorded path startpoint..node for a DP table.
std::vector<std::string> reconstruct(const Stdg &g, const std::vector<Arrival> &arr, int node) {
    std::vector<std::string> seq;
    int cur = node;
    while (cur >= 0) {
        seq.push_back(g.nodes[static_cast<size_t>(cur)].name);
        cur = arr[static_cast<size_t>(cur)].pred;
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
}

bool better_max(const Stdg &g, const Arrival &incumbent, double cand, int pred) {
    if (cand > incumbent.value) return true;
    if (cand < incumbent.value) return false;
    if (incumbent.pred < 0) return false;
    if (pred < 0) return false;
    return g.nodes[static_cast<size_t>(pred)].name <
           g.nodes[static_cast<size_t>(incumbent.pred)].name;
}

bool better_min(const Stdg &g, const Arrival &incumbent, double cand, int pred) {
    if (cand < incumbent.value) return true;
    if (cand > incumbent.value) return false;
    if (incumbent.pred < 0) return false;
    if (pred < 0) return false;
    return g.nodes[static_cast<size_t>(pred)].name <
           g.nodes[static_cast<size_t>(incumbent.pred)].name;
}

}  // namespace

Result<TimingReport, TimingError> analyze_timing(const Stdg &stdg, const DelayModel &model,
                                                 const std::vector<ClockConstraint> &constraints) {
    std::map<std::string, double> periods;
    for (const auto &c : constraints) periods[c.clock] = c.period_ns;
    for (const auto &clk : stdg.clocks) {
        if (!periods.count(clk))
            return Result<TimingReport, TimingError>::err(
                {clk, "missing clock constraint for '" + clk + "'"});
    }

    TimingReport report;
    std::vector<int> topo = comb_topo_order(stdg);

    for (const auto &clk : stdg.clocks) {
        // Launch from same-domain registers and all input ports; t_cq models
        // the launch edge for both.
        std::vector<Arrival> max_arr(stdg.nodes.size());
        std::vector<Arrival> min_arr(stdg.nodes.size());
        for (auto &a : min_arr) a.value = kPosInf;

        for (const auto &n : stdg.nodes) {
            bool launches = false;
            if (n.kind == NodeKind::Register && n.clock_domain && *n.clock_domain == clk)
                launches = true;
            if (n.kind == NodeKind::Port) launches = true;
            if (launches) {
                max_arr[static_cast<size_t>(n.id)] = {model.t_cq, -1, n.id};
                min_arr[static_cast<size_t>(n.id)] = {model.t_cq, -1, n.id};
            }
        }

        for (int u : topo) {
            const StdgNode &nu = stdg.nodes[static_cast<size_t>(u)];
            if (nu.kind == NodeKind::Register) continue;
            double d = model.node_delay(nu);
            for (int ei : stdg.preds[static_cast<size_t>(u)]) {
                int p = stdg.edges[static_cast<size_t>(ei)].src;
                const Arrival &pa = max_arr[static_cast<size_t>(p)];
                if (pa.value != kNegInf) {
                    double cand = pa.value + d;
                    if (better_max(stdg, max_arr[static_cast<size_t>(u)], cand, p))
                        max_arr[static_cast<size_t>(u)] = {cand, p, pa.startpoint};
                }
                const Arrival &pi = min_arr[static_cast<size_t>(p)];
                if (pi.value != kPosInf) {
                    double cand = pi.value + d;
                    if (better_min(stdg, min_arr[static_cast<size_t>(u)], cand, p))
                        min_arr[static_cast<size_t>(u)] = {cand, p, pi.startpoint};
                }
            }
        }

        double period = periods.at(clk);
        for (const auto &n : stdg.nodes) {
            if (n.kind != NodeKind::Register || !n.clock_domain || *n.clock_domain != clk)
                continue;
            Arrival best_max, best_min;
            best_min.value = kPosInf;
            for (int ei : stdg.preds[static_cast<size_t>(n.id)]) {
                int p = stdg.edges[static_cast<size_t>(ei)].src;
                // launch registers feed endpoints directly as well
                const StdgNode &np = stdg.nodes[static_cast<size_t>(p)];
                Arrival pa, pi;
                if (np.kind == NodeKind::Register) {
                    if (np.clock_domain && *np.clock_domain == clk) {
                        pa = {model.t_cq, -1, p};
                        pi = {model.t_cq, -1, p};
                    } else {
                        continue;  // cross-domain: handled by detect_cdc
                    }
                } else {
                    pa = max_arr[static_cast<size_t>(p)];
                    pi = min_arr[static_cast<size_t>(p)];
                }
                if (pa.value != kNegInf && better_max(stdg, best_max, pa.value, p)) {
                    best_max = pa;
                    best_max.pred = p;
                    // keep startpoint from the feeding table entry
                    best_max.startpoint = np.kind == NodeKind::Register ? p : pa.startpoint;
                }
                if (pi.value != kPosInf && better_min(stdg, best_min, pi.value, p)) {
                    best_min = pi;
                    best_min.pred = p;
                    best_min.startpoint = np.kind == NodeKind::Register ? p : pi.startpoint;
                }
            }
            if (best_max.value == kNegInf) continue;  // no timed fan-in

            auto path_for = [&](const Arrival &leaf, const std::vector<Arrival> &table) {
                std::vector<std::string> seq;
                const StdgNode &pred_node = stdg.nodes[static_cast<size_t>(leaf.pred)];
                if (pred_node.kind == NodeKind::Register) {
                    seq = {pred_node.name};
                } else {
                    seq = reconstruct(stdg, table, leaf.pred);
                }
                seq.push_back(n.name);
                return seq;
            };

            const StdgNode &sp_max = stdg.nodes[static_cast<size_t>(best_max.startpoint)];
            double required_setup = period - model.t_su;
            double slack_setup = required_setup - best_max.value;
            if (slack_setup < 0.0) {
                TimingPath tp;
                tp.vtype = Vtype::Setup;
                tp.startpoint = sp_max.name;
                tp.endpoint = n.name;
                tp.node_sequence = path_for(best_max, max_arr);
                tp.arrival = best_max.value;
                tp.required = required_setup;
                tp.slack = slack_setup;
                tp.startpoint_clock =
                    sp_max.clock_domain ? *sp_max.clock_domain : clk;
                tp.startpoint_falling = sp_max.clock_falling;
                tp.endpoint_clock = clk;
                tp.endpoint_falling = n.clock_falling;
                report.paths.push_back(std::move(tp));
            }

            const StdgNode &sp_min = stdg.nodes[static_cast<size_t>(best_min.startpoint)];
            double slack_hold = best_min.value - model.t_h;
            if (slack_hold < 0.0) {
                TimingPath tp;
                tp.vtype = Vtype::Hold;
                tp.startpoint = sp_min.name;
                tp.endpoint = n.name;
                tp.node_sequence = path_for(best_min, min_arr);
                tp.arrival = best_min.value;
                tp.required = model.t_h;
                tp.slack = slack_hold;
                tp.startpoint_clock =
                    sp_min.clock_domain ? *sp_min.clock_domain : clk;
                tp.startpoint_falling = sp_min.clock_falling;
                tp.endpoint_clock = clk;
                tp.endpoint_falling = n.clock_falling;
                report.paths.push_back(std::move(tp));
            }
        }
    }

    report.sort_canonical();
    return Result<TimingReport, TimingError>::ok(std::move(report));
}

namespace {

// Backward reachability from a register through combinational-only nodes over
// data edges, recording one representative path per reached source register.
struct CrossingScan {
    const Stdg &g;
    std::map<int, std::vector<std::string>> sources;  // source reg id -> path src..dst

    explicit CrossingScan(const Stdg &g_, int dst) : g(g_) {
        std::vector<std::string> tail = {g.nodes[static_cast<size_t>(dst)].name};
        std::set<int> visited;
        walk(dst, tail, visited);
    }

    void walk(int node, std::vector<std::string> &tail, std::set<int> &visited) {
        for (int ei : g.preds[static_cast<size_t>(node)]) {
            const StdgEdge &e = g.edges[static_cast<size_t>(ei)];
            if (e.kind != EdgeKind::Data) continue;
            int p = e.src;
            const StdgNode &np = g.nodes[static_cast<size_t>(p)];
            if (np.kind == NodeKind::Register) {
                if (!sources.count(p)) {
                    std::vector<std::string> path = tail;
                    path.push_back(np.name);
                    std::reverse(path.begin(), path.end());
                    sources[p] = std::move(path);
                }
                continue;
            }
            if (np.kind == NodeKind::Constant) continue;
            if (visited.count(p)) continue;
            visited.insert(p);
            tail.push_back(np.name);
            walk(p, tail, visited);
            tail.pop_back();
        }
    }
};

// src register feeds dst register through data edges with no operator nodes.
bool direct_reg_to_reg(const Stdg &g, int src, int dst) {
    std::set<int> visited;
    std::vector<int> stack = {dst};
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int ei : g.preds[static_cast<size_t>(u)]) {
            const StdgEdge &e = g.edges[static_cast<size_t>(ei)];
            if (e.kind != EdgeKind::Data) continue;
            int p = e.src;
            if (p == src) return true;
            const StdgNode &np = g.nodes[static_cast<size_t>(p)];
            if (np.kind == NodeKind::Wire && !visited.count(p)) {
                visited.insert(p);
                stack.push_back(p);
            }
        }
    }
    return false;
}

// dst register has a direct (wire-only) fanout to another register in the
// same clock domain.
bool has_direct_same_domain_follower(const Stdg &g, int dst) {
    const StdgNode &nd = g.nodes[static_cast<size_t>(dst)];
    std::set<int> visited;
    std::vector<int> stack = {dst};
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int ei : g.succs[static_cast<size_t>(u)]) {
            const StdgEdge &e = g.edges[static_cast<size_t>(ei)];
            if (e.kind != EdgeKind::Data) continue;
            int s = e.dst;
            const StdgNode &ns = g.nodes[static_cast<size_t>(s)];
            if (ns.kind == NodeKind::Register) {
                if (ns.clock_domain == nd.clock_domain) return true;
                continue;
            }
            if (ns.kind == NodeKind::Wire && !visited.count(s)) {
                visited.insert(s);
                stack.push_back(s);
            }
        }
    }
    return false;
}

// A register completing a two-flop chain launched in a different domain:
// other_domain_reg -> first_flop -> reg, both hops wire-only, both flops in
// reg's domain.
bool completes_two_flop_chain(const Stdg &g, int reg) {
    const StdgNode &nr = g.nodes[static_cast<size_t>(reg)];
    for (const auto &mid : g.nodes) {
        if (mid.kind != NodeKind::Register || mid.id == reg) continue;
        if (mid.clock_domain != nr.clock_domain) continue;
        if (!direct_reg_to_reg(g, mid.id, reg)) continue;
        for (const auto &src : g.nodes) {
            if (src.kind != NodeKind::Register) continue;
            if (!src.clock_domain || src.clock_domain == nr.clock_domain) continue;
            if (direct_reg_to_reg(g, src.id, mid.id)) return true;
        }
    }
    return false;
}

// The destination register's control-edge sources trace back (through data
// edges, possibly through same-domain registers) to a register that completes
// a two-flop synchronizer chain from another domain.
bool control_is_synchronized(const Stdg &g, int dst) {
    std::vector<int> stack;
    for (int ei : g.preds[static_cast<size_t>(dst)]) {
        const StdgEdge &e = g.edges[static_cast<size_t>(ei)];
        if (e.kind == EdgeKind::Control) stack.push_back(e.src);
    }
    if (stack.empty()) return false;
    const StdgNode &nd = g.nodes[static_cast<size_t>(dst)];
    std::set<int> visited;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        if (visited.count(u)) continue;
        visited.insert(u);
        const StdgNode &nu = g.nodes[static_cast<size_t>(u)];
        if (nu.kind == NodeKind::Register) {
            if (nu.clock_domain != nd.clock_domain) continue;
            if (completes_two_flop_chain(g, u)) return true;
            // keep tracing through same-domain registers
        }
        if (nu.kind == NodeKind::Constant) continue;
        for (int ei : g.preds[static_cast<size_t>(u)]) {
            const StdgEdge &e = g.edges[static_cast<size_t>(ei)];
            if (e.kind == EdgeKind::Data) stack.push_back(e.src);
        }
    }
    return false;
}

}  // namespace

std::vector<CdcFinding> detect_cdc(const Stdg &stdg) {
    std::vector<CdcFinding> findings;
    for (const auto &dst : stdg.nodes) {
        if (dst.kind != NodeKind::Register || !dst.clock_domain) continue;
        CrossingScan scan(stdg, dst.id);
        for (const auto &[src_id, path] : scan.sources) {
            const StdgNode &src = stdg.nodes[static_cast<size_t>(src_id)];
            if (!src.clock_domain || *src.clock_domain == *dst.clock_domain) continue;

            CdcFinding f;
            f.source = src.name;
            f.source_domain = *src.clock_domain;
            f.source_falling = src.clock_falling;
            f.destination = dst.name;
            f.destination_domain = *dst.clock_domain;
            f.destination_falling = dst.clock_falling;
            f.width = src.width;
            f.node_sequence = path;

            bool direct = direct_reg_to_reg(stdg, src_id, dst.id);
            if (direct && has_direct_same_domain_follower(stdg, dst.id)) {
                f.synchronizer = Synchronizer::TwoFlop;
            } else if (f.width > 1 && control_is_synchronized(stdg, dst.id)) {
                f.synchronizer = Synchronizer::Handshake;
            } else {
                f.synchronizer = Synchronizer::None;
            }
            f.violating = (f.width == 1 && f.synchronizer == Synchronizer::None) ||
                          (f.width > 1 && f.synchronizer != Synchronizer::Handshake);
            findings.push_back(std::move(f));
        }
    }
    std::sort(findings.begin(), findings.end(), [](const CdcFinding &a, const CdcFinding &b) {
        if (a.destination != b.destination) return a.destination < b.destination;
        return a.source < b.source;
    });
    return findings;
}

Result<TimingReport, TimingError> analyze_design(const Stdg &stdg, const DelayModel &model,
                                                 const std::vector<ClockConstraint> &constraints) {
    auto r = analyze_timing(stdg, model, constraints);
    if (r.is_err()) return r;
    TimingReport report = r.take();
    for (auto &f : detect_cdc(stdg)) {
        if (f.violating) report.cdc.push_back(std::move(f));
    }
    report.sort_canonical();
    return Result<TimingReport, TimingError>::ok(std::move(report));
}

}  // namespace triage
