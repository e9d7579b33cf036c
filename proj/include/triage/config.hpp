#ifndef TRIAGE_CONFIG_HPP
#define TRIAGE_CONFIG_HPP

#include <map>
#include <string>

#include "triage/classifier.hpp"
#include "triage/llm.hpp"
#include "triage/result.hpp"
#include "triage/timing.hpp"

namespace triage {

struct PipelineConfig {
    int max_attempts = 3;
    int repetitions = 1;
    int workers = 1;
};

struct AppConfig {
    DelayModel delay_model;
    ClassifierConfig classifier = default_classifier_config();
    LlmConfig llm;
    PipelineConfig pipeline;
};

struct ConfigError {
    std::string file;
    std::string message;
};

// Partial JSON configs overlay the defaults.
Result<AppConfig, ConfigError> load_config(const std::string &path);
Result<AppConfig, ConfigError> parse_config(const std::string &json_text,
                                            const std::string &file = "<config>");
std::string config_to_json(const AppConfig &cfg);

// Named per-class overrides ("multiply": 2.5, "t_h": 0.7, ...).
void apply_delay_overrides(DelayModel &model, const std::map<std::string, double> &overrides);

}  // namespace triage

#endif
