#include "triage/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>

namespace triage {

namespace {

std::string lowercase(const std::string &s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Stems for the keyword vocabulary the rules reference.
const std::map<std::string, std::string> kStems = {
    {"crosses", "cross"},        {"crossing", "cross"},    {"crossings", "cross"},
    {"crossed", "cross"},        {"cross", "cross"},
    {"chains", "chain"},         {"chain", "chain"},       {"chained", "chain"},
    {"stages", "stage"},         {"stage", "stage"},
    {"multiplexer", "mux"},      {"multiplexers", "mux"},  {"mux", "mux"},
    {"muxes", "mux"},
    {"pipelined", "pipeline"},   {"pipelining", "pipeline"}, {"pipelines", "pipeline"},
    {"pipeline", "pipeline"},
    {"multiply", "multiply"},    {"multiplies", "multiply"}, {"multiplier", "multiply"},
    {"multiplication", "multiply"},
    {"divide", "divide"},        {"divides", "divide"},    {"divider", "divide"},
    {"division", "divide"},
    {"synchronizer", "synchronizer"}, {"synchronizers", "synchronizer"},
    {"synchronized", "synchronizer"}, {"synchronization", "synchronizer"},
    {"nested", "nested"},        {"nesting", "nested"},
    {"combinational", "combinational"}, {"combinatorial", "combinational"},
    {"setup", "setup"},          {"hold", "hold"},         {"cdc", "cdc"},
    {"slack", "slack"},          {"negative", "negative"}, {"bus", "bus"},
    {"case", "case"},            {"short", "short"},       {"small", "small"},
    {"without", "without"},      {"metastability", "metastability"},
    {"metastable", "metastability"},
    {"handshake", "handshake"},  {"domain", "domain"},     {"domains", "domain"},
    {"level", "level"},          {"levels", "level"},      {"deep", "deep"},
    {"unsynchronized", "no-sync"},
};

// Words after "clock" that are not clock names.
const std::set<std::string> kClockStoplist = {
    "period", "periods", "cycle", "cycles", "edge",   "edges",  "constraint", "constraints",
    "domain", "domains", "skew",  "jitter", "signal", "signals", "frequency", "tree",
};

void add_unique(std::vector<std::string> &v, const std::string &s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

}  // namespace

ExtractedParams extract_params(const std::string &cause_text) {
    ExtractedParams out;
    const std::string lower = lowercase(cause_text);

    // keywords
    std::regex word_re(R"([a-z][a-z0-9_-]*)");
    for (auto it = std::sregex_iterator(lower.begin(), lower.end(), word_re);
         it != std::sregex_iterator(); ++it) {
        auto stem = kStems.find(it->str());
        if (stem != kStems.end()) out.keyword_hits.insert(stem->second);
    }

    // phrase markers
    if (lower.find("clock domain") != std::string::npos) out.keyword_hits.insert("cdc");
    if (lower.find("single-bit") != std::string::npos ||
        lower.find("single bit") != std::string::npos)
        out.keyword_hits.insert("single-bit");
    if (lower.find("multi-bit") != std::string::npos ||
        lower.find("multi bit") != std::string::npos ||
        lower.find("multibit") != std::string::npos ||
        lower.find("multiple bits") != std::string::npos)
        out.keyword_hits.insert("multi-bit");
    if (lower.find("multi-cycle") != std::string::npos ||
        lower.find("multi cycle") != std::string::npos ||
        lower.find("multicycle") != std::string::npos)
        out.keyword_hits.insert("multi-cycle");
    if (lower.find("too small") != std::string::npos ||
        lower.find("too short") != std::string::npos ||
        lower.find("too quickly") != std::string::npos ||
        lower.find("too soon") != std::string::npos)
        out.keyword_hits.insert("short");
    if (out.keyword_hits.count("synchronizer") &&
        (out.keyword_hits.count("without") || std::regex_search(lower, std::regex(R"(\bno\b)")) ||
         lower.find("missing") != std::string::npos || lower.find("lacks") != std::string::npos))
        out.keyword_hits.insert("no-sync");

    // numerals: slack/delay values
    std::regex ns_re(R"((-?\d+\.\d+)\s*ns)");
    for (auto it = std::sregex_iterator(lower.begin(), lower.end(), ns_re);
         it != std::sregex_iterator(); ++it)
        out.slack_values.push_back(std::stod((*it)[1].str()));

    // depth: "N levels" / "N stages" (with optional "logic")
    std::regex depth_re(R"((\d+)(?:\s+logic)?\s+(?:levels?|stages?)\b)");
    std::smatch m;
    if (std::regex_search(lower, m, depth_re)) out.path_depth = std::stoi(m[1].str());

    // mux depth: "N-level [nested] mux" or "mux depth [of] N"
    std::regex muxd1(R"((\d+)[-\s]levels?\s+(?:of\s+)?(?:nested\s+)?(?:mux|multiplexer))");
    std::regex muxd2(R"((?:mux|multiplexer)\s+(?:nesting\s+)?depth\s+(?:of\s+)?(\d+))");
    if (std::regex_search(lower, m, muxd1))
        out.mux_depth = std::stoi(m[1].str());
    else if (std::regex_search(lower, m, muxd2))
        out.mux_depth = std::stoi(m[1].str());

    // width: "N-bit"
    std::regex width_re(R"((\d+)-bit)");
    if (std::regex_search(lower, m, width_re)) out.bit_width = std::stoi(m[1].str());

    // identifiers inside backticks
    std::regex tick_re(R"(`([A-Za-z_]\w*)`)");
    for (auto it = std::sregex_iterator(cause_text.begin(), cause_text.end(), tick_re);
         it != std::sregex_iterator(); ++it)
        add_unique(out.signal_names, (*it)[1].str());

    // identifiers after signal/register/clock
    std::regex named_re(R"(\b(signal|register|clock)s?\s+([A-Za-z_]\w*))");
    for (auto it = std::sregex_iterator(cause_text.begin(), cause_text.end(), named_re);
         it != std::sregex_iterator(); ++it) {
        std::string kind = lowercase((*it)[1].str());
        std::string name = (*it)[2].str();
        if (kind == "clock") {
            if (!kClockStoplist.count(lowercase(name))) add_unique(out.clock_names, name);
        } else {
            add_unique(out.signal_names, name);
        }
    }

    // clk-prefixed tokens are clock names
    std::regex clk_re(R"(\b(clk\w*)\b)");
    for (auto it = std::sregex_iterator(cause_text.begin(), cause_text.end(), clk_re);
         it != std::sregex_iterator(); ++it)
        add_unique(out.clock_names, (*it)[1].str());

    return out;
}

namespace {

bool eval_atom(const std::string &atom, const ExtractedParams &p) {
    if (atom.rfind("kw:", 0) == 0) return p.keyword_hits.count(atom.substr(3)) > 0;

    static const std::regex num_re(R"(^(bit_width|path_depth|mux_depth|clocks|slack)(==|>=|<=|>|<)(-?\d+)$)");
    std::smatch m;
    if (!std::regex_match(atom, m, num_re)) return false;
    const std::string field = m[1].str();
    const std::string op = m[2].str();
    const int rhs = std::stoi(m[3].str());

    std::optional<double> lhs;
    if (field == "bit_width" && p.bit_width) lhs = *p.bit_width;
    if (field == "path_depth" && p.path_depth) lhs = *p.path_depth;
    if (field == "mux_depth" && p.mux_depth) lhs = *p.mux_depth;
    if (field == "clocks") lhs = static_cast<double>(p.clock_names.size());
    if (field == "slack" && !p.slack_values.empty())
        lhs = *std::min_element(p.slack_values.begin(), p.slack_values.end());
    if (!lhs) return false;

    if (op == "==") return *lhs == rhs;
    if (op == ">=") return *lhs >= rhs;
    if (op == "<=") return *lhs <= rhs;
    if (op == ">") return *lhs > rhs;
    return *lhs < rhs;
}

}  // namespace

bool rule_matches(const RuleSet &rule, const ExtractedParams &params) {
    for (const auto &clause : rule.clauses) {
        bool satisfied = false;
        for (const auto &atom : clause.any) {
            if (eval_atom(atom, params)) {
                satisfied = true;
                break;
            }
        }
        if (!satisfied) return false;
    }
    return !rule.clauses.empty();
}

ClassifierConfig default_classifier_config() {
    ClassifierConfig cfg;
    auto add = [&](Scenario s, int prio, std::vector<RuleClause> clauses) {
        cfg.rules.push_back({s, prio, std::move(clauses)});
    };
    add(Scenario::SingleBitTrans, 1,
        {{{"kw:cdc", "kw:cross", "clocks>=2"}},
         {{"bit_width==1", "kw:single-bit"}},
         {{"kw:no-sync"}}});
    add(Scenario::MultiBitsTrans, 2,
        {{{"kw:cdc", "kw:cross", "clocks>=2"}},
         {{"bit_width>1", "kw:multi-bit", "kw:bus"}}});
    add(Scenario::ShortLogicPath, 3,
        {{{"kw:hold"}},
         {{"path_depth<=2", "kw:short"}}});
    add(Scenario::LowPipeStage, 4,
        {{{"kw:setup", "slack<0"}},
         {{"kw:pipeline", "kw:stage", "kw:multiply", "kw:divide", "kw:multi-cycle"}}});
    add(Scenario::DeepMux, 5,
        {{{"kw:setup", "slack<0"}},
         {{"kw:mux", "kw:nested", "kw:case"}},
         {{"mux_depth>=3", "kw:nested"}}});
    add(Scenario::LongCombChain, 6,
        {{{"kw:setup", "slack<0"}},
         {{"kw:chain", "kw:combinational", "path_depth>=6"}}});
    return cfg;
}

Scenario identify_scenario(const std::string &cause_text, const ClassifierConfig &config) {
    ExtractedParams params = extract_params(cause_text);
    std::vector<const RuleSet *> ordered;
    for (const auto &r : config.rules) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const RuleSet *a, const RuleSet *b) { return a->priority < b->priority; });
    for (const RuleSet *r : ordered) {
        if (rule_matches(*r, params)) return r->scenario;
    }
    return Scenario::Unknown;
}

Scenario identify_scenario(const std::string &cause_text) {
    static const ClassifierConfig cfg = default_classifier_config();
    return identify_scenario(cause_text, cfg);
}

}  // namespace triage
