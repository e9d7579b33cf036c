#include "triage/config.hpp"

#include <fstream>

#include <json.hpp>

using nlohmann::ordered_json;

namespace triage {

namespace {

void read_double(const ordered_json &j, const char *key, double &out) {
    if (j.contains(key) && j[key].is_number()) out = j[key].get<double>();
}

void read_int(const ordered_json &j, const char *key, int &out) {
    if (j.contains(key) && j[key].is_number_integer()) out = j[key].get<int>();
}

void read_string(const ordered_json &j, const char *key, std::string &out) {
    if (j.contains(key) && j[key].is_string()) out = j[key].get<std::string>();
}

void load_delay_model(const ordered_json &j, DelayModel &m) {
    read_double(j, "bitwise", m.bitwise);
    read_double(j, "add_sub", m.add_sub);
    read_double(j, "mux", m.mux);
    read_double(j, "compare", m.compare);
    read_double(j, "shift", m.shift);
    read_double(j, "multiply", m.multiply);
    read_double(j, "divide_mod", m.divide_mod);
    read_double(j, "select_concat", m.select_concat);
    read_double(j, "t_cq", m.t_cq);
    read_double(j, "t_su", m.t_su);
    read_double(j, "t_h", m.t_h);
}

ordered_json delay_model_json(const DelayModel &m) {
    return ordered_json{
        {"bitwise", m.bitwise},        {"add_sub", m.add_sub},
        {"mux", m.mux},                {"compare", m.compare},
        {"shift", m.shift},            {"multiply", m.multiply},
        {"divide_mod", m.divide_mod},  {"select_concat", m.select_concat},
        {"t_cq", m.t_cq},              {"t_su", m.t_su},
        {"t_h", m.t_h},
    };
}

}  // namespace

void apply_delay_overrides(DelayModel &model, const std::map<std::string, double> &overrides) {
    for (const auto &[key, value] : overrides) {
        if (key == "bitwise") model.bitwise = value;
        else if (key == "add_sub") model.add_sub = value;
        else if (key == "mux") model.mux = value;
        else if (key == "compare") model.compare = value;
        else if (key == "shift") model.shift = value;
        else if (key == "multiply") model.multiply = value;
        else if (key == "divide_mod") model.divide_mod = value;
        else if (key == "select_concat") model.select_concat = value;
        else if (key == "t_cq") model.t_cq = value;
        else if (key == "t_su") model.t_su = value;
        else if (key == "t_h") model.t_h = value;
    }
}

Result<AppConfig, ConfigError> parse_config(const std::string &json_text,
                                            const std::string &file) {
    AppConfig cfg;
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const ordered_json::exception &e) {
        return Result<AppConfig, ConfigError>::err({file, e.what()});
    }
    if (!j.is_object()) return Result<AppConfig, ConfigError>::err({file, "not a JSON object"});

    if (j.contains("delay_model")) load_delay_model(j["delay_model"], cfg.delay_model);

    if (j.contains("classifier") && j["classifier"].contains("rules")) {
        ClassifierConfig cc;
        for (const auto &rj : j["classifier"]["rules"]) {
            RuleSet rule;
            std::string scenario;
            read_string(rj, "scenario", scenario);
            auto s = scenario_from_string(scenario);
            if (!s)
                return Result<AppConfig, ConfigError>::err(
                    {file, "unknown scenario '" + scenario + "' in classifier rules"});
            rule.scenario = *s;
            read_int(rj, "priority", rule.priority);
            if (rj.contains("clauses")) {
                for (const auto &cj : rj["clauses"]) {
                    RuleClause clause;
                    for (const auto &atom : cj) clause.any.push_back(atom.get<std::string>());
                    rule.clauses.push_back(std::move(clause));
                }
            }
            cc.rules.push_back(std::move(rule));
        }
        cfg.classifier = std::move(cc);
    }

    if (j.contains("llm")) {
        const auto &lj = j["llm"];
        std::string mode, policy;
        read_string(lj, "mode", mode);
        if (mode == "http") cfg.llm.mode = LlmMode::Http;
        else if (mode == "mock" || mode.empty()) cfg.llm.mode = LlmMode::Mock;
        else return Result<AppConfig, ConfigError>::err({file, "unknown llm mode '" + mode + "'"});
        read_string(lj, "mock_policy", policy);
        if (policy == "kb_golden" || policy.empty()) cfg.llm.mock_policy = MockPolicy::KbGolden;
        else if (policy == "scripted") cfg.llm.mock_policy = MockPolicy::Scripted;
        else if (policy == "echo") cfg.llm.mock_policy = MockPolicy::Echo;
        else
            return Result<AppConfig, ConfigError>::err(
                {file, "unknown mock policy '" + policy + "'"});
        read_string(lj, "endpoint", cfg.llm.endpoint);
        read_string(lj, "model", cfg.llm.model);
        read_double(lj, "temperature", cfg.llm.temperature);
        read_int(lj, "max_output_tokens", cfg.llm.max_output_tokens);
        read_double(lj, "request_timeout_s", cfg.llm.request_timeout_s);
        read_int(lj, "retries", cfg.llm.retries);
        read_double(lj, "backoff_base_ms", cfg.llm.backoff_base_ms);
        read_string(lj, "scripted_path", cfg.llm.scripted_path);
        if (cfg.llm.temperature < 0.0 || cfg.llm.temperature > 2.0)
            return Result<AppConfig, ConfigError>::err({file, "temperature must be in [0, 2]"});
        if (cfg.llm.retries < 0)
            return Result<AppConfig, ConfigError>::err({file, "retries must be >= 0"});
    }

    if (j.contains("pipeline")) {
        const auto &pj = j["pipeline"];
        read_int(pj, "max_attempts", cfg.pipeline.max_attempts);
        read_int(pj, "repetitions", cfg.pipeline.repetitions);
        read_int(pj, "workers", cfg.pipeline.workers);
        if (cfg.pipeline.max_attempts < 1)
            return Result<AppConfig, ConfigError>::err({file, "max_attempts must be >= 1"});
        if (cfg.pipeline.repetitions < 1)
            return Result<AppConfig, ConfigError>::err({file, "repetitions must be >= 1"});
        if (cfg.pipeline.workers < 1)
            return Result<AppConfig, ConfigError>::err({file, "workers must be >= 1"});
    }
    return Result<AppConfig, ConfigError>::ok(std::move(cfg));
}

Result<AppConfig, ConfigError> load_config(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return Result<AppConfig, ConfigError>::err({path, "cannot open config file"});
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_config(text, path);
}

std::string config_to_json(const AppConfig &cfg) {
    ordered_json rules = ordered_json::array();
    for (const auto &r : cfg.classifier.rules) {
        ordered_json clauses = ordered_json::array();
        for (const auto &c : r.clauses) clauses.push_back(c.any);
        rules.push_back(ordered_json{
            {"scenario", to_string(r.scenario)}, {"priority", r.priority}, {"clauses", clauses}});
    }
    const char *mode = cfg.llm.mode == LlmMode::Http ? "http" : "mock";
    const char *policy = cfg.llm.mock_policy == MockPolicy::KbGolden   ? "kb_golden"
                         : cfg.llm.mock_policy == MockPolicy::Scripted ? "scripted"
                                                                       : "echo";
    ordered_json j = {
        {"delay_model", delay_model_json(cfg.delay_model)},
        {"classifier", ordered_json{{"rules", rules}}},
        {"llm",
         ordered_json{{"mode", mode},
                      {"mock_policy", policy},
                      {"endpoint", cfg.llm.endpoint},
                      {"model", cfg.llm.model},
                      {"temperature", cfg.llm.temperature},
                      {"max_output_tokens", cfg.llm.max_output_tokens},
                      {"request_timeout_s", cfg.llm.request_timeout_s},
                      {"retries", cfg.llm.retries},
                      {"backoff_base_ms", cfg.llm.backoff_base_ms},
                      {"scripted_path", cfg.llm.scripted_path}}},
        {"pipeline",
         ordered_json{{"max_attempts", cfg.pipeline.max_attempts},
                      {"repetitions", cfg.pipeline.repetitions},
                      {"workers", cfg.pipeline.workers}}},
    };
    return j.dump(2) + "\n";
}

}  // namespace triage
