#ifndef TRIAGE_TESTS_SUPPORT_HPP
#define TRIAGE_TESTS_SUPPORT_HPP

#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "triage/parser.hpp"
#include "triage/stdg.hpp"
#include "triage/timing.hpp"

namespace triage::testing {

inline std::string repo_root() { return TRIAGE_REPO_ROOT; }

inline std::string read_file(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Direct graph construction for property tests
// ---------------------------------------------------------------------------

struct GraphBuilder {
    Stdg g;

    int add(NodeKind kind, const std::string &name, int width = 1,
            const std::string &domain = "", const std::string &op_class = "") {
        StdgNode n;
        n.id = static_cast<int>(g.nodes.size());
        n.kind = kind;
        n.name = name;
        n.op_class = op_class;
        n.width = width;
        if (!domain.empty()) n.clock_domain = domain;
        g.nodes.push_back(n);
        g.by_name[name] = n.id;
        if (kind == NodeKind::Register &&
            std::find(g.clocks.begin(), g.clocks.end(), domain) == g.clocks.end())
            g.clocks.push_back(domain);
        return n.id;
    }

    void edge(int src, int dst, EdgeKind kind = EdgeKind::Data) {
        g.edges.push_back({src, dst, kind});
    }

    Stdg finish() {
        std::sort(g.clocks.begin(), g.clocks.end());
        g.rebuild_adjacency();
        return g;
    }
};

// Random DAG: registers/ports feeding a layer of operators feeding a sink
// register. Independent of the implementation under test.
struct RandomDag {
    Stdg graph;
    int sink = -1;
    std::vector<int> starts;
};

inline RandomDag random_dag(std::mt19937 &rng, int max_comb_nodes = 12) {
    GraphBuilder b;
    std::uniform_int_distribution<int> reg_count(1, 3);
    std::uniform_int_distribution<int> port_count(0, 2);
    std::uniform_int_distribution<int> comb_count(1, max_comb_nodes);

    static const char *op_classes[] = {"and", "add", "mux", "eq", "shl", "mul", "concat"};
    std::uniform_int_distribution<int> op_pick(0, 6);

    RandomDag out;
    int nregs = reg_count(rng);
    int nports = port_count(rng);
    for (int i = 0; i < nregs; ++i)
        out.starts.push_back(b.add(NodeKind::Register, "r" + std::to_string(i), 1, "clk"));
    for (int i = 0; i < nports; ++i)
        out.starts.push_back(b.add(NodeKind::Port, "p" + std::to_string(i)));

    int ncomb = comb_count(rng);
    std::vector<int> combs;
    for (int i = 0; i < ncomb; ++i) {
        const char *cls = op_classes[op_pick(rng)];
        int node = b.add(NodeKind::Operator, std::string(cls) + "#" + std::to_string(i + 1), 1,
                         "", cls);
        // 1..3 inputs from earlier nodes (operators stay acyclic by construction)
        std::vector<int> pool = out.starts;
        pool.insert(pool.end(), combs.begin(), combs.end());
        std::uniform_int_distribution<int> fanin(1, 3);
        std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
        std::set<int> chosen;
        int k = fanin(rng);
        for (int j = 0; j < k; ++j) chosen.insert(pool[pick(rng)]);
        for (int src : chosen) b.edge(src, node);
        combs.push_back(node);
    }

    out.sink = b.add(NodeKind::Register, "sink", 1, "clk");
    // sink gets fan-in from a random nonempty subset of comb nodes (or a start)
    std::uniform_int_distribution<int> fanin(1, 3);
    std::vector<int> pool = combs.empty() ? out.starts : combs;
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    std::set<int> chosen;
    int k = fanin(rng);
    for (int j = 0; j < k; ++j) chosen.insert(pool[pick(rng)]);
    for (int src : chosen) b.edge(src, out.sink);

    out.graph = b.finish();
    return out;
}

// Brute-force enumeration of all simple startpoint->sink paths by backward
// DFS, stopping at registers/ports; constants are not path sources.
inline void brute_force_paths_rec(const Stdg &g, int node, std::vector<int> &suffix,
                                  std::vector<std::vector<int>> &out) {
    bool any_pred = false;
    for (int ei : g.preds[static_cast<size_t>(node)]) {
        const StdgEdge &e = g.edges[static_cast<size_t>(ei)];
        int p = e.src;
        const StdgNode &np = g.nodes[static_cast<size_t>(p)];
        if (np.kind == NodeKind::Constant) continue;
        any_pred = true;
        if (np.kind == NodeKind::Register || np.kind == NodeKind::Port) {
            std::vector<int> path;
            path.push_back(p);
            for (auto it = suffix.rbegin(); it != suffix.rend(); ++it) path.push_back(*it);
            out.push_back(std::move(path));
        } else {
            suffix.push_back(p);
            brute_force_paths_rec(g, p, suffix, out);
            suffix.pop_back();
        }
    }
    (void)any_pred;
}

inline std::vector<std::vector<int>> brute_force_paths(const Stdg &g, int sink) {
    std::vector<std::vector<int>> out;
    std::vector<int> suffix = {sink};
    brute_force_paths_rec(g, sink, suffix, out);
    if (out.empty()) out.push_back({sink});
    return out;
}

inline double path_delay(const Stdg &g, const DelayModel &model, const std::vector<int> &path) {
    double d = 0;
    for (int id : path) d += model.node_delay(g.nodes[static_cast<size_t>(id)]);
    return d;
}

}  // namespace triage::testing

#endif
