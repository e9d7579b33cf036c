#ifndef TRIAGE_CLASSIFIER_HPP
#define TRIAGE_CLASSIFIER_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "triage/taxonomy.hpp"

namespace triage {

// Parameters extracted from a violation-cause description. Numeric fields come
// from explicit numerals only.
struct ExtractedParams {
    std::vector<std::string> signal_names;
    std::vector<double> slack_values;  // ns, signed
    std::optional<int> path_depth;     // logic levels / stages
    std::optional<int> mux_depth;
    std::optional<int> bit_width;
    std::vector<std::string> clock_names;
    std::set<std::string> keyword_hits;  // normalized lowercase stems
};

// One rule per scenario: every clause must be satisfied by at least one of its
// atoms. Atom forms: "kw:<stem>" or "<field><op><int>" with field one of
// bit_width, path_depth, mux_depth, clocks, slack.
struct RuleClause {
    std::vector<std::string> any;
};

struct RuleSet {
    Scenario scenario = Scenario::Unknown;
    int priority = 0;  // lower evaluates first
    std::vector<RuleClause> clauses;
};

struct ClassifierConfig {
    std::vector<RuleSet> rules;
};

// Default rules, CDC scenarios first so cause texts that mention both a
// crossing and negative slack resolve to the CDC scenario.
ClassifierConfig default_classifier_config();

ExtractedParams extract_params(const std::string &cause_text);

bool rule_matches(const RuleSet &rule, const ExtractedParams &params);

Scenario identify_scenario(const std::string &cause_text, const ClassifierConfig &config);
Scenario identify_scenario(const std::string &cause_text);

}  // namespace triage

#endif
