#include "triage/llm.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

using nlohmann::json;

namespace triage {

std::string to_string(const LlmError &e) {
    switch (e.kind) {
        case LlmErrorKind::Transport: return "transport error: " + e.message;
        case LlmErrorKind::HttpStatus:
            return "http status " + std::to_string(e.status) + ": " + e.message;
        case LlmErrorKind::Timeout: return "timeout: " + e.message;
        case LlmErrorKind::NoScriptedResponse: return "no scripted response: " + e.message;
        case LlmErrorKind::BadResponse: return "bad response: " + e.message;
    }
    return e.message;
}

LlmGateway::LlmGateway(LlmConfig cfg) : cfg_(std::move(cfg)) {}

void LlmGateway::register_golden(const std::string &case_id, const std::string &source) {
    std::lock_guard<std::mutex> lock(mu_);
    golden_[case_id] = source;
}

std::vector<ChatExchange> LlmGateway::exchanges() const {
    std::lock_guard<std::mutex> lock(mu_);
    return log_;
}

size_t LlmGateway::exchange_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return log_.size();
}

void LlmGateway::set_log_path(const std::string &path) {
    std::lock_guard<std::mutex> lock(mu_);
    log_path_ = path;
}

void LlmGateway::log_exchange(const RepairPrompt &prompt, const std::string &response,
                              bool success, double latency_ms, int attempts) {
    ChatExchange ex;
    ex.case_id = prompt.case_id;
    ex.system = kSystemPrompt;
    ex.request = prompt.text;
    ex.response = response;
    ex.latency_ms = latency_ms;
    ex.attempt = attempts;
    ex.success = success;

    std::lock_guard<std::mutex> lock(mu_);
    log_.push_back(ex);
    if (!log_path_.empty()) {
        json j = {{"case_id", ex.case_id},   {"system", ex.system},
                  {"request", ex.request},   {"response", ex.response},
                  {"latency_ms", ex.latency_ms}, {"attempt", ex.attempt},
                  {"success", ex.success}};
        std::ofstream f(log_path_, std::ios::app);
        f << j.dump() << "\n";
    }
}

namespace {

struct ParsedUrl {
    std::string host;
    int port = 80;
    std::string path = "/";
    bool ok = false;
};

ParsedUrl parse_url(const std::string &url) {
    ParsedUrl out;
    std::string rest = url;
    if (rest.rfind("http://", 0) == 0) {
        rest = rest.substr(7);
    } else {
        return out;  // https needs a TLS build; keep the wire client plain http
    }
    size_t slash = rest.find('/');
    std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
    out.path = slash == std::string::npos ? "/" : rest.substr(slash);
    size_t colon = hostport.find(':');
    if (colon == std::string::npos) {
        out.host = hostport;
    } else {
        out.host = hostport.substr(0, colon);
        try {
            out.port = std::stoi(hostport.substr(colon + 1));
        } catch (...) {
            return out;
        }
    }
    out.ok = !out.host.empty();
    return out;
}

}  // namespace

Result<std::string, LlmError> LlmGateway::complete_http(const RepairPrompt &prompt,
                                                        int &attempts_used) {
    ParsedUrl url = parse_url(cfg_.endpoint);
    if (!url.ok)
        return Result<std::string, LlmError>::err(
            {LlmErrorKind::Transport, 0, "bad endpoint url '" + cfg_.endpoint + "'"});

    json body = {
        {"model", cfg_.model},
        {"temperature", cfg_.temperature},
        {"max_tokens", cfg_.max_output_tokens},
        {"messages",
         json::array({json{{"role", "system"}, {"content", kSystemPrompt}},
                      json{{"role", "user"}, {"content", prompt.text}}})},
    };
    std::string payload = body.dump();

    httplib::Headers headers;
    if (const char *key = std::getenv(kApiKeyEnvVar))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    LlmError last{LlmErrorKind::Transport, 0, "no attempt made"};
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
        attempts_used = attempt + 1;
        if (attempt > 0) {
            double ms = cfg_.backoff_base_ms * static_cast<double>(1 << (attempt - 1));
            std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
        }
        httplib::Client client(url.host, url.port);
        client.set_connection_timeout(std::chrono::duration<double>(cfg_.request_timeout_s));
        client.set_read_timeout(std::chrono::duration<double>(cfg_.request_timeout_s));

        auto res = client.Post(url.path, headers, payload, "application/json");
        if (!res) {
            auto err = res.error();
            bool timeout = err == httplib::Error::ConnectionTimeout ||
                           err == httplib::Error::Read || err == httplib::Error::Write;
            last = {timeout ? LlmErrorKind::Timeout : LlmErrorKind::Transport, 0,
                    httplib::to_string(err)};
            continue;  // transport problems are retryable
        }
        if (res->status >= 500) {
            last = {LlmErrorKind::HttpStatus, res->status, res->body};
            continue;  // 5xx is retryable
        }
        if (res->status != 200)
            return Result<std::string, LlmError>::err(
                {LlmErrorKind::HttpStatus, res->status, res->body});

        try {
            json reply = json::parse(res->body);
            return Result<std::string, LlmError>::ok(
                reply.at("choices").at(0).at("message").at("content").get<std::string>());
        } catch (const json::exception &e) {
            return Result<std::string, LlmError>::err(
                {LlmErrorKind::BadResponse, res->status, e.what()});
        }
    }
    return Result<std::string, LlmError>::err(last);
}

Result<std::string, LlmError> LlmGateway::complete_mock(const RepairPrompt &prompt) {
    switch (cfg_.mock_policy) {
        case MockPolicy::KbGolden: {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = golden_.find(prompt.case_id);
            if (it == golden_.end())
                return Result<std::string, LlmError>::err(
                    {LlmErrorKind::NoScriptedResponse, 0,
                     "no golden registered for case '" + prompt.case_id + "'"});
            return Result<std::string, LlmError>::ok("```verilog\n" + it->second + "```\n");
        }
        case MockPolicy::Scripted: {
            std::lock_guard<std::mutex> lock(mu_);
            if (!scripted_loaded_) {
                std::ifstream f(cfg_.scripted_path);
                if (!f)
                    return Result<std::string, LlmError>::err(
                        {LlmErrorKind::Transport, 0,
                         "cannot read scripted responses '" + cfg_.scripted_path + "'"});
                json j;
                try {
                    f >> j;
                } catch (const json::exception &e) {
                    return Result<std::string, LlmError>::err(
                        {LlmErrorKind::Transport, 0, e.what()});
                }
                for (auto it = j.begin(); it != j.end(); ++it) {
                    if (it.value().is_string()) {
                        scripted_[it.key()] = {it.value().get<std::string>()};
                    } else if (it.value().is_array()) {
                        for (const auto &v : it.value())
                            scripted_[it.key()].push_back(v.get<std::string>());
                    }
                }
                scripted_loaded_ = true;
            }
            auto it = scripted_.find(prompt.case_id);
            if (it == scripted_.end())
                return Result<std::string, LlmError>::err(
                    {LlmErrorKind::NoScriptedResponse, 0, prompt.case_id});
            size_t &cursor = scripted_cursor_[prompt.case_id];
            if (cursor >= it->second.size())
                return Result<std::string, LlmError>::err(
                    {LlmErrorKind::NoScriptedResponse, 0,
                     "responses for '" + prompt.case_id + "' exhausted"});
            return Result<std::string, LlmError>::ok(it->second[cursor++]);
        }
        case MockPolicy::Echo: {
            // Negative-control identity: hand back the design unchanged; only
            // prompts with no design fall through to the demonstration.
            std::string design = prompt.slot_or_empty("design_code");
            if (!design.empty()) return Result<std::string, LlmError>::ok(design);
            std::string demo = prompt.slot_or_empty("demo_after");
            if (!demo.empty() && demo != kNoDemoPlaceholder)
                return Result<std::string, LlmError>::ok(demo);
            return Result<std::string, LlmError>::ok(prompt.text);
        }
    }
    return Result<std::string, LlmError>::err({LlmErrorKind::Transport, 0, "bad mock policy"});
}

Result<std::string, LlmError> LlmGateway::complete(const RepairPrompt &prompt) {
    auto start = std::chrono::steady_clock::now();
    int attempts = 1;
    Result<std::string, LlmError> result =
        cfg_.mode == LlmMode::Http ? complete_http(prompt, attempts) : complete_mock(prompt);
    double latency =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    if (cfg_.mode == LlmMode::Mock) latency = 0.0;  // keep mock runs bit-deterministic
    log_exchange(prompt, result.is_ok() ? result.value() : to_string(result.error()),
                 result.is_ok(), latency, attempts);
    return result;
}

Result<std::string, ExtractError> extract_code(const std::string &response) {
    auto try_parse = [](std::string code) -> Result<std::string, ExtractError> {
        auto ast = parse(code, "<llm>");
        if (ast.is_err())
            return Result<std::string, ExtractError>::err(
                {ExtractErrorKind::NotParseable, to_string(ast.error())});
        return Result<std::string, ExtractError>::ok(std::move(code));
    };

    size_t open = response.find("```");
    if (open != std::string::npos) {
        size_t content = response.find('\n', open);
        if (content == std::string::npos)
            return Result<std::string, ExtractError>::err(
                {ExtractErrorKind::NoCodeBlock, "unterminated code fence"});
        ++content;
        size_t close = response.find("```", content);
        if (close == std::string::npos)
            return Result<std::string, ExtractError>::err(
                {ExtractErrorKind::NoCodeBlock, "unterminated code fence"});
        return try_parse(response.substr(content, close - content));
    }

    auto whole = parse(response, "<llm>");
    if (whole.is_ok()) return Result<std::string, ExtractError>::ok(response);
    return Result<std::string, ExtractError>::err(
        {ExtractErrorKind::NoCodeBlock, "no fenced code block in response"});
}

}  // namespace triage
