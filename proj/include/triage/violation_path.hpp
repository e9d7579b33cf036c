#ifndef TRIAGE_VIOLATION_PATH_HPP
#define TRIAGE_VIOLATION_PATH_HPP

#include <string>
#include <vector>

#include "triage/result.hpp"
#include "triage/stdg.hpp"
#include "triage/timing.hpp"

namespace triage {

// Startpoint (register/port) through combinational nodes to the violating
// register. A register with no timed fan-in yields the degenerate one-node path.
struct LogicalPath {
    std::vector<int> nodes;  // ids, startpoint..v_viol
};

struct PhysicalPath {
    LogicalPath path;
    double delay = 0.0;  // sum of operator delays along the path

    std::vector<std::string> names(const Stdg &g) const;
};

enum class PathErrorKind { NotARegister, EmptyPathSet, PathExplosion };

struct PathError {
    PathErrorKind kind = PathErrorKind::NotARegister;
    std::string message;
};

inline constexpr size_t kMaxLogicalPaths = 10000;

// All distinct startpoint-to-v_viol paths by backward traversal over data and
// control edges, stopping at register/port nodes. Aborts with PathExplosion
// beyond kMaxLogicalPaths.
Result<std::vector<LogicalPath>, PathError> enumerate_logical_paths(const Stdg &stdg, int v_viol);

// Maximum-delay path; when report_startpoint is nonempty, candidates are first
// filtered to that startpoint. Ties break on the lexicographically smaller
// node-name sequence.
Result<PhysicalPath, PathError> merge_to_physical(const Stdg &stdg,
                                                  const std::vector<LogicalPath> &paths,
                                                  const DelayModel &model,
                                                  const std::string &report_startpoint = "");

// Longest-path-only reconstruction used when enumeration explodes.
Result<PhysicalPath, PathError> longest_physical_path(const Stdg &stdg, int v_viol,
                                                      const DelayModel &model,
                                                      const std::string &report_startpoint = "");

struct ViolationContext {
    ViolationInfo violation;
    std::string endpoint;
    PhysicalPath physical_path;
    std::string rendered_path;    // "a -> add#1 -> r_dst"
    std::string violation_block;  // canonical report block
    std::vector<std::pair<SourceLoc, std::string>> path_source_excerpts;
    std::string full_source;
};

// One context per violation in the report, in report order.
Result<std::vector<ViolationContext>, PathError> build_violation_context(
    const Stdg &stdg, const TimingReport &report, const std::string &source,
    const DelayModel &model);

}  // namespace triage

#endif
