#include "triage/violation_path.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "triage/report_io.hpp"

namespace triage {

std::vector<std::string> PhysicalPath::names(const Stdg &g) const {
    std::vector<std::string> out;
    out.reserve(path.nodes.size());
    for (int id : path.nodes) out.push_back(g.nodes[static_cast<size_t>(id)].name);
    return out;
}

namespace {

bool is_stop(const StdgNode &n) {
    return n.kind == NodeKind::Register || n.kind == NodeKind::Port;
}

struct Enumerator {
    const Stdg &g;
    std::vector<std::vector<int>> found;
    std::vector<int> suffix;  // v_viol..current, reversed at emit
    bool exploded = false;

    explicit Enumerator(const Stdg &g_) : g(g_) {}

    void emit_with_start(int start) {
        std::vector<int> path;
        path.reserve(suffix.size() + 1);
        path.push_back(start);
        for (auto it = suffix.rbegin(); it != suffix.rend(); ++it) path.push_back(*it);
        found.push_back(std::move(path));
        if (found.size() > kMaxLogicalPaths) exploded = true;
    }

    void walk(int node) {
        if (exploded) return;
        for (int ei : g.preds[static_cast<size_t>(node)]) {
            const StdgEdge &e = g.edges[static_cast<size_t>(ei)];
            int p = e.src;
            const StdgNode &np = g.nodes[static_cast<size_t>(p)];
            if (np.kind == NodeKind::Constant) continue;
            if (is_stop(np)) {
                emit_with_start(p);
            } else {
                if (std::find(suffix.begin(), suffix.end(), p) != suffix.end())
                    continue;  // simple paths only
                suffix.push_back(p);
                walk(p);
                suffix.pop_back();
            }
            if (exploded) return;
        }
    }
};

}  // namespace

Result<std::vector<LogicalPath>, PathError> enumerate_logical_paths(const Stdg &stdg, int v_viol) {
    if (v_viol < 0 || static_cast<size_t>(v_viol) >= stdg.nodes.size() ||
        stdg.nodes[static_cast<size_t>(v_viol)].kind != NodeKind::Register)
        return Result<std::vector<LogicalPath>, PathError>::err(
            {PathErrorKind::NotARegister, "violation node is not a register"});

    Enumerator en(stdg);
    en.suffix.push_back(v_viol);
    en.walk(v_viol);
    if (en.exploded)
        return Result<std::vector<LogicalPath>, PathError>::err(
            {PathErrorKind::PathExplosion,
             "more than " + std::to_string(kMaxLogicalPaths) + " logical paths"});

    std::vector<LogicalPath> out;
    if (en.found.empty()) {
        out.push_back(LogicalPath{{v_viol}});  // degenerate: no timed fan-in
    } else {
        for (auto &p : en.found) out.push_back(LogicalPath{std::move(p)});
    }
    return Result<std::vector<LogicalPath>, PathError>::ok(std::move(out));
}

namespace {

double delay_of(const Stdg &g, const DelayModel &model, const std::vector<int> &nodes) {
    double d = 0;
    for (int id : nodes) d += model.node_delay(g.nodes[static_cast<size_t>(id)]);
    return d;
}

std::vector<std::string> name_seq(const Stdg &g, const std::vector<int> &nodes) {
    std::vector<std::string> out;
    for (int id : nodes) out.push_back(g.nodes[static_cast<size_t>(id)].name);
    return out;
}

}  // namespace

Result<PhysicalPath, PathError> merge_to_physical(const Stdg &stdg,
                                                  const std::vector<LogicalPath> &paths,
                                                  const DelayModel &model,
                                                  const std::string &report_startpoint) {
    if (paths.empty())
        return Result<PhysicalPath, PathError>::err(
            {PathErrorKind::EmptyPathSet, "no logical paths to merge"});

    std::vector<const LogicalPath *> candidates;
    if (!report_startpoint.empty()) {
        for (const auto &p : paths) {
            const StdgNode &first = stdg.nodes[static_cast<size_t>(p.nodes.front())];
            if (first.name == report_startpoint) candidates.push_back(&p);
        }
    }
    if (candidates.empty())
        for (const auto &p : paths) candidates.push_back(&p);

    const LogicalPath *best = nullptr;
    double best_delay = -std::numeric_limits<double>::infinity();
    std::vector<std::string> best_names;
    for (const LogicalPath *p : candidates) {
        double d = delay_of(stdg, model, p->nodes);
        if (d > best_delay) {
            best = p;
            best_delay = d;
            best_names = name_seq(stdg, p->nodes);
        } else if (d == best_delay && best) {
            std::vector<std::string> names = name_seq(stdg, p->nodes);
            if (names < best_names) {
                best = p;
                best_names = std::move(names);
            }
        }
    }
    return Result<PhysicalPath, PathError>::ok(PhysicalPath{*best, best_delay});
}

Result<PhysicalPath, PathError> longest_physical_path(const Stdg &stdg, int v_viol,
                                                      const DelayModel &model,
                                                      const std::string &report_startpoint) {
    if (v_viol < 0 || static_cast<size_t>(v_viol) >= stdg.nodes.size() ||
        stdg.nodes[static_cast<size_t>(v_viol)].kind != NodeKind::Register)
        return Result<PhysicalPath, PathError>::err(
            {PathErrorKind::NotARegister, "violation node is not a register"});

    // Longest distance to v_viol over the reversed combinational subgraph,
    // computed by memoized DFS (acyclic by construction).
    constexpr double kUnset = -1e300;
    std::vector<double> dist(stdg.nodes.size(), kUnset);
    std::vector<int> next(stdg.nodes.size(), -1);

    // dist[u] = operator delays from u (exclusive) down to v_viol (exclusive of u itself)
    auto visit = [&](auto &&self, int u) -> double {
        if (dist[static_cast<size_t>(u)] != kUnset) return dist[static_cast<size_t>(u)];
        double best = -std::numeric_limits<double>::infinity();
        int choice = -1;
        for (int ei : stdg.succs[static_cast<size_t>(u)]) {
            const StdgEdge &e = stdg.edges[static_cast<size_t>(ei)];
            int s = e.dst;
            const StdgNode &ns = stdg.nodes[static_cast<size_t>(s)];
            double cand;
            if (s == v_viol) {
                cand = 0.0;
            } else if (is_stop(ns) || ns.kind == NodeKind::Constant) {
                continue;
            } else {
                double tail = self(self, s);
                if (tail == -std::numeric_limits<double>::infinity()) continue;
                cand = model.node_delay(ns) + tail;
            }
            if (cand > best ||
                (cand == best && choice >= 0 &&
                 stdg.nodes[static_cast<size_t>(s)].name <
                     stdg.nodes[static_cast<size_t>(choice)].name)) {
                best = cand;
                choice = s;
            }
        }
        dist[static_cast<size_t>(u)] = best;
        next[static_cast<size_t>(u)] = choice;
        return best;
    };

    const StdgNode *best_start = nullptr;
    double best_delay = -std::numeric_limits<double>::infinity();
    for (const auto &n : stdg.nodes) {
        if (!is_stop(n)) continue;
        if (!report_startpoint.empty() && n.name != report_startpoint) continue;
        double d = visit(visit, n.id);
        if (d == -std::numeric_limits<double>::infinity()) continue;
        if (d > best_delay || (d == best_delay && best_start && n.name < best_start->name)) {
            best_delay = d;
            best_start = &n;
        }
    }
    if (!best_start) {
        // degenerate: no timed fan-in
        return Result<PhysicalPath, PathError>::ok(PhysicalPath{LogicalPath{{v_viol}}, 0.0});
    }

    PhysicalPath out;
    out.delay = best_delay;
    int cur = best_start->id;
    while (cur != -1 && cur != v_viol) {
        out.path.nodes.push_back(cur);
        cur = next[static_cast<size_t>(cur)];
    }
    out.path.nodes.push_back(v_viol);
    return Result<PhysicalPath, PathError>::ok(std::move(out));
}

namespace {

std::vector<std::string> source_lines(const std::string &source) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : source) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

Result<ViolationContext, PathError> context_for(const Stdg &stdg, const std::string &endpoint,
                                                ViolationInfo info, std::string block,
                                                const std::string &source,
                                                const std::vector<std::string> &lines,
                                                const DelayModel &model) {
    int node = stdg.require(endpoint);
    if (node < 0 || stdg.nodes[static_cast<size_t>(node)].kind != NodeKind::Register)
        return Result<ViolationContext, PathError>::err(
            {PathErrorKind::NotARegister, "endpoint '" + endpoint + "' is not a register"});

    PhysicalPath phys;
    auto enumerated = enumerate_logical_paths(stdg, node);
    if (enumerated.is_ok()) {
        auto merged =
            merge_to_physical(stdg, enumerated.value(), model, info.report_startpoint);
        if (merged.is_err()) return Result<ViolationContext, PathError>::err(merged.error());
        phys = merged.take();
    } else if (enumerated.error().kind == PathErrorKind::PathExplosion) {
        auto fallback = longest_physical_path(stdg, node, model, info.report_startpoint);
        if (fallback.is_err()) return Result<ViolationContext, PathError>::err(fallback.error());
        phys = fallback.take();
    } else {
        return Result<ViolationContext, PathError>::err(enumerated.error());
    }

    ViolationContext ctx;
    ctx.violation = std::move(info);
    ctx.endpoint = endpoint;
    ctx.rendered_path = render_path(phys.names(stdg));
    ctx.violation_block = std::move(block);
    ctx.full_source = source;
    for (int id : phys.path.nodes) {
        const StdgNode &n = stdg.nodes[static_cast<size_t>(id)];
        if (n.loc.line >= 1 && static_cast<size_t>(n.loc.line) <= lines.size() &&
            !n.loc.file.empty()) {
            ctx.path_source_excerpts.emplace_back(n.loc,
                                                  lines[static_cast<size_t>(n.loc.line - 1)]);
        }
    }
    ctx.physical_path = std::move(phys);
    return Result<ViolationContext, PathError>::ok(std::move(ctx));
}

}  // namespace

Result<std::vector<ViolationContext>, PathError> build_violation_context(
    const Stdg &stdg, const TimingReport &report, const std::string &source,
    const DelayModel &model) {
    std::vector<ViolationContext> out;
    std::vector<std::string> lines = source_lines(source);

    for (const auto &p : report.paths) {
        ViolationInfo info;
        info.vtype = p.vtype;
        info.slack = p.slack;
        info.report_startpoint = p.startpoint;
        info.report_path = p.node_sequence;
        auto ctx = context_for(stdg, p.endpoint, std::move(info), emit_violation_block(p),
                               source, lines, model);
        if (ctx.is_err())
            return Result<std::vector<ViolationContext>, PathError>::err(ctx.error());
        out.push_back(ctx.take());
    }
    for (const auto &f : report.cdc) {
        ViolationInfo info;
        info.vtype = Vtype::Cdc;
        info.report_startpoint = f.source;
        info.report_path = f.node_sequence;
        auto ctx = context_for(stdg, f.destination, std::move(info), emit_violation_block(f),
                               source, lines, model);
        if (ctx.is_err())
            return Result<std::vector<ViolationContext>, PathError>::err(ctx.error());
        out.push_back(ctx.take());
    }
    return Result<std::vector<ViolationContext>, PathError>::ok(std::move(out));
}

}  // namespace triage
