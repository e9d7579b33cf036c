#ifndef TRIAGE_KB_HPP
#define TRIAGE_KB_HPP

#include <string>
#include <vector>

#include "triage/result.hpp"
#include "triage/taxonomy.hpp"
#include "triage/timing.hpp"

namespace triage {

struct KbEntry {
    std::string id;  // "type.subscenario.NNN"
    Vtype violation_type = Vtype::Setup;
    Scenario subscenario = Scenario::Unknown;
    std::string description;
    std::string repair_strategy;
    std::string demo_before;
    std::string demo_after;
    std::vector<std::string> tags;
};

struct Kb {
    std::vector<KbEntry> entries;  // sorted by id

    // Scenarios from the taxonomy with no entry.
    std::vector<Scenario> missing_scenarios() const;
};

enum class KbErrorKind { Io, SchemaError, TaxonomyError, DemoInvalid, DuplicateId, Incomplete };

struct KbError {
    KbErrorKind kind = KbErrorKind::Io;
    std::string file;
    std::string field;   // SchemaError
    std::string id;      // TaxonomyError / DemoInvalid / DuplicateId
    std::string reason;
};

std::string to_string(const KbError &e);

// Demo validation runs the parser and the timing engine on both demos under
// the default delay model with kKbDemoPeriodNs on every clock; hold-type
// entries use kKbHoldValidationTh since the default t_h can never be violated
// (t_cq alone already exceeds it).
inline constexpr double kKbDemoPeriodNs = 5.0;
inline constexpr double kKbHoldValidationTh = 0.7;

Result<Kb, KbError> load_and_validate(const std::string &dir, bool require_complete = false);

// Exact (type, subscenario) matches ordered by id; Unknown returns every
// entry of the violation type.
std::vector<KbEntry> retrieve(const Kb &kb, Vtype violation_type, Scenario subscenario);

// Shared with the fault injector's case validation: analyze one module's text
// and report violations of the given type.
struct DemoCheck {
    bool parses = false;
    size_t violations_of_type = 0;
    size_t violations_total = 0;
    std::string detail;
};
DemoCheck check_demo(const std::string &source, Vtype vtype, const DelayModel &model,
                     double period_ns);

}  // namespace triage

#endif
