#ifndef TRIAGE_INJECTOR_HPP
#define TRIAGE_INJECTOR_HPP

#include <map>
#include <string>
#include <vector>

#include "triage/ast.hpp"
#include "triage/result.hpp"
#include "triage/taxonomy.hpp"
#include "triage/timing.hpp"

namespace triage {

enum class Difficulty { Simple, Complex };
enum class InjectMode { Auto, Manual };

const char *to_string(Difficulty d);
std::optional<Difficulty> difficulty_from_string(const std::string &s);

struct InjectionParams {
    int chain_n = 8;    // adders in the injected single-cycle chain
    int mux_depth = 6;  // nested ternaries
    int bus_width = 8;  // must match the seed's data bus
};

struct InjectionSpec {
    Scenario subscenario = Scenario::LongCombChain;
    std::string target_module;  // informational
    std::string target_signal;  // required in manual mode
    InjectionParams params;
    Difficulty difficulty = Difficulty::Simple;
    InjectMode mode = InjectMode::Auto;
};

struct ExpectedViolation {
    Vtype vtype = Vtype::Setup;
    std::string endpoint;
};

struct InjectedCase {
    std::string id;  // "type.subscenario.difficulty.NN"
    Scenario subscenario = Scenario::LongCombChain;
    Difficulty difficulty = Difficulty::Simple;
    std::string seed_name;
    std::string faulty_source;
    std::string golden_source;
    ExpectedViolation expected;
    std::vector<ClockConstraint> constraints;
    std::map<std::string, double> delay_overrides;
    InjectionParams params;
};

enum class InjectErrorKind { SeedShapeMismatch, ParamOutOfRange, InvalidSpec, Io };

struct InjectError {
    InjectErrorKind kind = InjectErrorKind::SeedShapeMismatch;
    std::string message;
};

// Deterministic per-subscenario transformation of a seed design; the golden
// repair is the untransformed (but, for complex cases, still obfuscated) seed.
Result<InjectedCase, InjectError> inject(const AstModule &seed, const std::string &seed_name,
                                         const InjectionSpec &spec, int sequence = 1);

struct ValidationFailure {
    std::string detail;
};

// Re-parses and re-analyzes both sources and asserts the case invariants:
// faulty shows exactly the expected violation and nothing else, golden is
// clean, and the port lists agree.
Result<bool, ValidationFailure> validate_case(const InjectedCase &c, const DelayModel &base_model);

// dataset/<case_id>/{faulty.v, golden.v, case.json}
Result<bool, InjectError> write_case(const std::string &dataset_dir, const InjectedCase &c);
Result<InjectedCase, InjectError> load_case(const std::string &case_dir);

Result<std::vector<std::string>, InjectError> load_manifest(const std::string &dataset_dir);
Result<bool, InjectError> write_manifest(const std::string &dataset_dir,
                                         const std::vector<std::string> &case_ids);

// The bundled 12-case dataset: every subscenario at both difficulties, built
// from the seed corpus.
Result<std::vector<InjectedCase>, InjectError> build_standard_dataset(
    const std::string &seeds_dir);

// JSON spec files for the CLI inject subcommand.
Result<InjectionSpec, InjectError> parse_injection_spec(const std::string &json_text);

}  // namespace triage

#endif
