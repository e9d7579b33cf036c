#ifndef TRIAGE_STDG_HPP
#define TRIAGE_STDG_HPP

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "triage/ast.hpp"
#include "triage/result.hpp"

namespace triage {

enum class NodeKind { Register, Wire, Port, Constant, Operator };
enum class EdgeKind { Data, Control };
enum class Vtype { Setup, Hold, Cdc };

const char *to_string(NodeKind k);
const char *to_string(Vtype v);
std::optional<Vtype> vtype_from_string(const std::string &s);

struct ViolationInfo {
    Vtype vtype = Vtype::Setup;
    std::optional<double> slack;  // absent for cdc
    std::string report_startpoint;
    std::vector<std::string> report_path;  // may be empty
};

struct StdgNode {
    int id = 0;
    NodeKind kind = NodeKind::Wire;
    std::string name;      // operator nodes get synthesized names like "add#3"
    std::string op_class;  // operator nodes only: add, mux, cmp, ...
    int width = 1;
    SourceLoc loc;
    std::optional<std::string> clock_domain;  // registers always, others never
    bool clock_falling = false;               // register clocked on negedge
    std::optional<ViolationInfo> violation;
};

struct StdgEdge {
    int src = 0;
    int dst = 0;
    EdgeKind kind = EdgeKind::Data;
};

struct Stdg {
    std::vector<StdgNode> nodes;
    std::vector<StdgEdge> edges;
    std::unordered_map<std::string, int> by_name;
    std::vector<std::string> clocks;  // distinct register clock domains, sorted

    std::vector<std::vector<int>> preds;  // edge indices into `edges`
    std::vector<std::vector<int>> succs;

    const StdgNode *find(const std::string &name) const;
    int require(const std::string &name) const;  // -1 when absent
    void rebuild_adjacency();
};

enum class BuildErrorKind { CombinationalLoop, MultipleDrivers };

struct BuildError {
    BuildErrorKind kind = BuildErrorKind::CombinationalLoop;
    std::string message;
    std::vector<std::string> cycle;  // CombinationalLoop only
};

Result<Stdg, BuildError> build(const AstModule &ast);

struct TimingReport;  // timing.hpp

enum class AnnotateErrorKind { UnknownEndpoint, KindMismatch };

struct AnnotateError {
    AnnotateErrorKind kind = AnnotateErrorKind::UnknownEndpoint;
    std::string endpoint;
};

Result<Stdg, AnnotateError> annotate(Stdg stdg, const TimingReport &report);

// Adjacency listing used by the CLI debug dump.
std::string dump_graph(const Stdg &g);

}  // namespace triage

#endif
