#ifndef TRIAGE_REPORT_IO_HPP
#define TRIAGE_REPORT_IO_HPP

#include <string>
#include <vector>

#include "triage/result.hpp"
#include "triage/timing.hpp"

namespace triage {

struct ReportParseError {
    int line = 0;
    std::string reason;
};

// Canonical timing-report text. emit_report(parse_report(t)) == t byte-for-byte.
std::string emit_report(const TimingReport &report);
Result<TimingReport, ReportParseError> parse_report(const std::string &text);

// Renders one violation as its canonical report block.
std::string emit_violation_block(const TimingPath &path);
std::string emit_violation_block(const CdcFinding &finding);

// Path rendering shared with the report's Path line: "a -> b -> c".
std::string render_path(const std::vector<std::string> &nodes);

// Constraints file: lines "clock <name> <period_ns>".
Result<std::vector<ClockConstraint>, ReportParseError> parse_constraints(const std::string &text);
std::string emit_constraints(const std::vector<ClockConstraint> &constraints);

}  // namespace triage

#endif
