#ifndef TRIAGE_TIMING_HPP
#define TRIAGE_TIMING_HPP

#include <optional>
#include <string>
#include <vector>

#include "triage/result.hpp"
#include "triage/stdg.hpp"

namespace triage {

// Per-operator-class propagation delays plus register characteristics, in ns.
struct DelayModel {
    double bitwise = 0.3;       // and or xor not logand logor lognot red*
    double add_sub = 1.0;       // add sub neg
    double mux = 0.5;           // ternary / case-arm muxing
    double compare = 0.8;       // eq ne lt le gt ge
    double shift = 0.6;         // shl shr
    double multiply = 3.0;      // mul
    double divide_mod = 6.0;    // div mod
    double select_concat = 0.0; // bitsel partsel concat
    double t_cq = 0.5;
    double t_su = 0.5;
    double t_h = 0.3;

    double op_delay(const std::string &op_class) const;
    double node_delay(const StdgNode &n) const;
};

struct ClockConstraint {
    std::string clock;
    double period_ns = 0.0;
};

struct TimingPath {
    Vtype vtype = Vtype::Setup;
    std::string startpoint;
    std::string endpoint;
    std::vector<std::string> node_sequence;  // startpoint ... endpoint
    double arrival = 0.0;
    double required = 0.0;
    double slack = 0.0;
    std::string startpoint_clock;
    bool startpoint_falling = false;
    std::string endpoint_clock;
    bool endpoint_falling = false;
};

enum class Synchronizer { None, TwoFlop, Handshake };

const char *to_string(Synchronizer s);
std::optional<Synchronizer> synchronizer_from_string(const std::string &s);

struct CdcFinding {
    std::string source;
    std::string source_domain;
    bool source_falling = false;
    std::string destination;
    std::string destination_domain;
    bool destination_falling = false;
    int width = 1;
    Synchronizer synchronizer = Synchronizer::None;
    bool violating = false;
    std::vector<std::string> node_sequence;  // source ... destination
};

// Violations only: setup/hold paths with slack < 0 plus violating CDC findings,
// sorted by (vtype, slack ascending, endpoint name).
struct TimingReport {
    std::vector<TimingPath> paths;
    std::vector<CdcFinding> cdc;

    bool empty() const { return paths.empty() && cdc.empty(); }
    size_t violation_count() const { return paths.size() + cdc.size(); }
    void sort_canonical();
};

struct TimingError {
    std::string clock;  // MissingClockConstraint
    std::string message;
};

// Setup/hold analysis by exact DAG longest/shortest path propagation.
// Paths are analyzed per clock domain; register-to-register paths that cross
// domains are left to detect_cdc.
Result<TimingReport, TimingError> analyze_timing(const Stdg &stdg, const DelayModel &model,
                                                 const std::vector<ClockConstraint> &constraints);

// All cross-domain register pairs connected through combinational-only nodes,
// with synchronizer classification; includes non-violating findings.
std::vector<CdcFinding> detect_cdc(const Stdg &stdg);

// Full report = setup/hold violations + violating CDC findings.
Result<TimingReport, TimingError> analyze_design(const Stdg &stdg, const DelayModel &model,
                                                 const std::vector<ClockConstraint> &constraints);

}  // namespace triage

#endif
