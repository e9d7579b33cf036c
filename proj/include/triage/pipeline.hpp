#ifndef TRIAGE_PIPELINE_HPP
#define TRIAGE_PIPELINE_HPP

#include <string>
#include <vector>

#include "triage/config.hpp"
#include "triage/injector.hpp"
#include "triage/kb.hpp"
#include "triage/llm.hpp"
#include "triage/prompts.hpp"

namespace triage {

struct AttemptRecord {
    Scenario scenario = Scenario::Unknown;
    bool cleared = false;
    bool new_violations = false;
    std::string failure_reason;  // empty on success
};

struct CaseResult {
    std::string case_id;
    bool success = false;
    int attempts = 0;
    std::vector<AttemptRecord> attempt_details;
    std::string repaired_source;  // final attempt's module when success
    std::string last_failure_reason() const {
        return attempt_details.empty() ? "" : attempt_details.back().failure_reason;
    }
};

struct GroupStats {
    Scenario subscenario = Scenario::Unknown;
    Difficulty difficulty = Difficulty::Simple;
    long successes = 0;
    long trials = 0;
};

struct EvalSummary {
    std::vector<GroupStats> groups;  // taxonomy order x difficulty
    long successes = 0;
    long trials = 0;
    std::vector<CaseResult> case_results;  // (case x repetition), manifest order
};

// Eq. 2 arithmetic and the report cell format ("82.35%").
double fix_rate(long successes, long trials);
std::string format_percent(long successes, long trials);

struct PipelineEnv {
    AppConfig config;
    const Kb *kb = nullptr;
    TemplateStore templates = TemplateStore::builtin();
    LlmGateway *gateway = nullptr;
};

// One full debug loop: analyze, cause analysis, scenario identification,
// retrieval, repair prompt, completion, extraction, verification, bounded
// retries. Every failure mode lands in the attempt record.
CaseResult run_debug_case(const InjectedCase &c, PipelineEnv &env);

struct EvalError {
    std::string message;
};

Result<EvalSummary, EvalError> evaluate(const std::string &dataset_dir, PipelineEnv &env);

std::string eval_summary_json(const EvalSummary &summary);
std::string eval_summary_table(const EvalSummary &summary);

}  // namespace triage

#endif
