#ifndef TRIAGE_LLM_HPP
#define TRIAGE_LLM_HPP

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "triage/parser.hpp"
#include "triage/prompts.hpp"
#include "triage/result.hpp"

namespace triage {

inline constexpr const char *kSystemPrompt = "You are an RTL timing repair assistant.";
inline constexpr const char *kApiKeyEnvVar = "TIMING_TRIAGE_API_KEY";

enum class LlmMode { Http, Mock };
enum class MockPolicy { KbGolden, Scripted, Echo };

struct LlmConfig {
    LlmMode mode = LlmMode::Mock;
    std::string endpoint;  // http://host:port/path
    std::string model = "gpt-4o";
    double temperature = 0.7;
    int max_output_tokens = 4096;
    double request_timeout_s = 60.0;
    int retries = 3;
    double backoff_base_ms = 250.0;
    MockPolicy mock_policy = MockPolicy::KbGolden;
    std::string scripted_path;  // JSON map: case id -> response text or list
};

enum class LlmErrorKind { Transport, HttpStatus, Timeout, NoScriptedResponse, BadResponse };

struct LlmError {
    LlmErrorKind kind = LlmErrorKind::Transport;
    int status = 0;
    std::string message;
};

std::string to_string(const LlmError &e);

// Verbatim audit record, one per complete() call.
struct ChatExchange {
    std::string case_id;
    std::string system;
    std::string request;
    std::string response;
    double latency_ms = 0.0;
    int attempt = 1;  // attempts used (1 = no retries)
    bool success = true;
};

class LlmGateway {
  public:
    explicit LlmGateway(LlmConfig cfg);

    Result<std::string, LlmError> complete(const RepairPrompt &prompt);

    // kb_golden registry: case id -> golden repaired module text.
    void register_golden(const std::string &case_id, const std::string &source);

    std::vector<ChatExchange> exchanges() const;
    size_t exchange_count() const;
    // Appends each exchange as a JSON line to this file as calls complete.
    void set_log_path(const std::string &path);

    const LlmConfig &config() const { return cfg_; }

  private:
    Result<std::string, LlmError> complete_http(const RepairPrompt &prompt, int &attempts_used);
    Result<std::string, LlmError> complete_mock(const RepairPrompt &prompt);
    void log_exchange(const RepairPrompt &prompt, const std::string &response, bool success,
                      double latency_ms, int attempts);

    LlmConfig cfg_;
    mutable std::mutex mu_;
    std::map<std::string, std::string> golden_;
    std::map<std::string, std::vector<std::string>> scripted_;
    std::map<std::string, size_t> scripted_cursor_;
    bool scripted_loaded_ = false;
    std::vector<ChatExchange> log_;
    std::string log_path_;
};

enum class ExtractErrorKind { NoCodeBlock, NotParseable };

struct ExtractError {
    ExtractErrorKind kind = ExtractErrorKind::NoCodeBlock;
    std::string detail;
};

// First fenced code block, or the whole response when it parses as a module;
// the result must parse under the Verilog frontend.
Result<std::string, ExtractError> extract_code(const std::string &response);

}  // namespace triage

#endif
