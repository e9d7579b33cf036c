#include "triage/report_io.hpp"

#include <cstdio>
#include <sstream>

namespace triage {

namespace {

std::string fmt3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

const char *edge_phrase(bool falling) { return falling ? "falling edge" : "rising edge"; }

std::vector<std::string> split_lines(const std::string &text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
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

}  // namespace

std::string render_path(const std::vector<std::string> &nodes) {
    std::string out;
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (i) out += " -> ";
        out += nodes[i];
    }
    return out;
}

std::string emit_violation_block(const TimingPath &p) {
    std::ostringstream os;
    os << "VIOLATION " << to_string(p.vtype) << "\n";
    os << "  Startpoint: " << p.startpoint << " (" << edge_phrase(p.startpoint_falling) << " "
       << p.startpoint_clock << ")\n";
    os << "  Endpoint:   " << p.endpoint << " (" << edge_phrase(p.endpoint_falling) << " "
       << p.endpoint_clock << ")\n";
    os << "  Requirement: " << fmt3(p.required) << " ns\n";
    os << "  Arrival:     " << fmt3(p.arrival) << " ns\n";
    os << "  Slack:      " << fmt3(p.slack) << " ns\n";
    os << "  Path: " << render_path(p.node_sequence) << "\n";
    os << "END\n";
    return os.str();
}

std::string emit_violation_block(const CdcFinding &f) {
    std::ostringstream os;
    os << "VIOLATION cdc\n";
    os << "  Startpoint: " << f.source << " (" << edge_phrase(f.source_falling) << " "
       << f.source_domain << ")\n";
    os << "  Endpoint:   " << f.destination << " (" << edge_phrase(f.destination_falling) << " "
       << f.destination_domain << ")\n";
    os << "  Source: " << f.source << " (" << f.source_domain << ")\n";
    os << "  Destination: " << f.destination << " (" << f.destination_domain << ")\n";
    os << "  Width: " << f.width << "\n";
    os << "  Synchronizer: " << to_string(f.synchronizer) << "\n";
    os << "  Path: " << render_path(f.node_sequence) << "\n";
    os << "END\n";
    return os.str();
}

std::string emit_report(const TimingReport &report) {
    std::ostringstream os;
    bool first = true;
    for (const auto &p : report.paths) {
        if (!first) os << "\n";
        os << emit_violation_block(p);
        first = false;
    }
    for (const auto &f : report.cdc) {
        if (!first) os << "\n";
        os << emit_violation_block(f);
        first = false;
    }
    return os.str();
}

namespace {

struct LineReader {
    std::vector<std::string> lines;
    size_t i = 0;

    bool done() const { return i >= lines.size(); }
    int lineno() const { return static_cast<int>(i) + 1; }
    const std::string &peek() const { return lines[i]; }
    std::string next() { return lines[i++]; }
    void skip_blank() {
        while (!done() && lines[i].empty()) ++i;
    }
};

[[noreturn]] void fail_at(int line, const std::string &reason) {
    throw ReportParseError{line, reason};
}

// "  Key: value" with an exact prefix, returns the remainder.
std::string expect_field(LineReader &r, const std::string &prefix) {
    if (r.done()) fail_at(r.lineno(), "missing '" + prefix + "' line");
    const std::string &line = r.peek();
    if (line.rfind(prefix, 0) != 0)
        fail_at(r.lineno(), "expected '" + prefix + "', found '" + line + "'");
    std::string rest = line.substr(prefix.size());
    r.next();
    return rest;
}

// "name (rising edge clk)" -> name, falling, clock
void parse_endpoint_phrase(int line, const std::string &text, std::string &name, bool &falling,
                           std::string &clock) {
    size_t paren = text.find(" (");
    if (paren == std::string::npos || text.back() != ')')
        fail_at(line, "malformed endpoint '" + text + "'");
    name = text.substr(0, paren);
    std::string inner = text.substr(paren + 2, text.size() - paren - 3);
    const std::string rising = "rising edge ";
    const std::string fall = "falling edge ";
    if (inner.rfind(rising, 0) == 0) {
        falling = false;
        clock = inner.substr(rising.size());
    } else if (inner.rfind(fall, 0) == 0) {
        falling = true;
        clock = inner.substr(fall.size());
    } else {
        fail_at(line, "malformed clock edge phrase '" + inner + "'");
    }
}

double parse_ns(int line, const std::string &text) {
    size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(text, &pos);
    } catch (...) {
        fail_at(line, "bad number '" + text + "'");
    }
    if (text.substr(pos) != " ns") fail_at(line, "expected 'ns' suffix in '" + text + "'");
    return v;
}

std::vector<std::string> parse_path_line(const std::string &text) {
    std::vector<std::string> nodes;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t arrow = text.find(" -> ", pos);
        if (arrow == std::string::npos) {
            nodes.push_back(text.substr(pos));
            break;
        }
        nodes.push_back(text.substr(pos, arrow - pos));
        pos = arrow + 4;
    }
    return nodes;
}

}  // namespace

Result<TimingReport, ReportParseError> parse_report(const std::string &text) {
    try {
        TimingReport report;
        LineReader r{split_lines(text)};
        r.skip_blank();
        while (!r.done()) {
            int header_line = r.lineno();
            std::string header = r.next();
            if (header.rfind("VIOLATION ", 0) != 0)
                fail_at(header_line, "expected 'VIOLATION', found '" + header + "'");
            std::string vtype_str = header.substr(10);
            auto vtype = vtype_from_string(vtype_str);
            if (!vtype) fail_at(header_line, "unknown violation type '" + vtype_str + "'");

            std::string sp = expect_field(r, "  Startpoint: ");
            std::string ep = expect_field(r, "  Endpoint:   ");

            if (*vtype == Vtype::Cdc) {
                CdcFinding f;
                f.violating = true;
                parse_endpoint_phrase(r.lineno() - 2, sp, f.source, f.source_falling,
                                      f.source_domain);
                parse_endpoint_phrase(r.lineno() - 1, ep, f.destination, f.destination_falling,
                                      f.destination_domain);
                std::string src = expect_field(r, "  Source: ");
                std::string dst = expect_field(r, "  Destination: ");
                (void)src;
                (void)dst;
                std::string width = expect_field(r, "  Width: ");
                try {
                    f.width = std::stoi(width);
                } catch (...) {
                    fail_at(r.lineno() - 1, "bad width '" + width + "'");
                }
                std::string sync = expect_field(r, "  Synchronizer: ");
                auto s = synchronizer_from_string(sync);
                if (!s) fail_at(r.lineno() - 1, "unknown synchronizer '" + sync + "'");
                f.synchronizer = *s;
                f.node_sequence = parse_path_line(expect_field(r, "  Path: "));
                expect_field(r, "END");
                report.cdc.push_back(std::move(f));
            } else {
                TimingPath p;
                p.vtype = *vtype;
                parse_endpoint_phrase(r.lineno() - 2, sp, p.startpoint, p.startpoint_falling,
                                      p.startpoint_clock);
                parse_endpoint_phrase(r.lineno() - 1, ep, p.endpoint, p.endpoint_falling,
                                      p.endpoint_clock);
                p.required = parse_ns(r.lineno(), expect_field(r, "  Requirement: "));
                p.arrival = parse_ns(r.lineno(), expect_field(r, "  Arrival:     "));
                p.slack = parse_ns(r.lineno(), expect_field(r, "  Slack:      "));
                p.node_sequence = parse_path_line(expect_field(r, "  Path: "));
                expect_field(r, "END");
                report.paths.push_back(std::move(p));
            }
            r.skip_blank();
        }
        return Result<TimingReport, ReportParseError>::ok(std::move(report));
    } catch (ReportParseError &e) {
        return Result<TimingReport, ReportParseError>::err(std::move(e));
    }
}

Result<std::vector<ClockConstraint>, ReportParseError> parse_constraints(const std::string &text) {
    std::vector<ClockConstraint> out;
    LineReader r{split_lines(text)};
    while (!r.done()) {
        int lineno = r.lineno();
        std::string line = r.next();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream is(line);
        std::string kw, name;
        double period = 0;
        if (!(is >> kw >> name >> period) || kw != "clock")
            return Result<std::vector<ClockConstraint>, ReportParseError>::err(
                {lineno, "expected 'clock <name> <period_ns>', found '" + line + "'"});
        out.push_back({name, period});
    }
    return Result<std::vector<ClockConstraint>, ReportParseError>::ok(std::move(out));
}

std::string emit_constraints(const std::vector<ClockConstraint> &constraints) {
    std::ostringstream os;
    for (const auto &c : constraints) os << "clock " << c.clock << " " << fmt3(c.period_ns) << "\n";
    return os.str();
}

}  // namespace triage
