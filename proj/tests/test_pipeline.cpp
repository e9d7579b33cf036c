#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "support.hpp"
#include "triage/pipeline.hpp"

using namespace triage;
using namespace triage::testing;
namespace fs = std::filesystem;

namespace {

struct Fixture {
    AppConfig config;
    Kb kb;
    Fixture() {
        auto loaded = load_and_validate(repo_root() + "/kb");
        REQUIRE(loaded.is_ok());
        kb = loaded.take();
    }
    PipelineEnv env(LlmGateway &gateway) {
        return PipelineEnv{config, &kb, TemplateStore::builtin(), &gateway};
    }
};

InjectedCase bundled_case(const std::string &id) {
    auto c = load_case(repo_root() + "/dataset/" + id);
    REQUIRE(c.is_ok());
    return c.take();
}

}  // namespace

TEST_CASE("Eq. 2 arithmetic and percent formatting") {
    CHECK(fix_rate(3, 4) == 0.75);  // exact
    CHECK(format_percent(14, 17) == "82.35%");
    CHECK(format_percent(2719, 5000) == "54.38%");
    CHECK(format_percent(12, 12) == "100.00%");
    CHECK(format_percent(0, 12) == "0.00%");
    CHECK(fix_rate(0, 0) == 0.0);
}

TEST_CASE("kb_golden repairs any bundled case on the first attempt") {
    Fixture fx;
    LlmConfig cfg;
    cfg.mock_policy = MockPolicy::KbGolden;
    LlmGateway gateway(cfg);
    auto env = fx.env(gateway);

    for (const char *id : {"setup.long_comb_chain.simple.01", "cdc.multi_bits_trans.complex.01",
                           "hold.short_logic_path.complex.01"}) {
        InjectedCase c = bundled_case(id);
        gateway.register_golden(c.id, c.golden_source);
        CaseResult r = run_debug_case(c, env);
        CHECK(r.success);
        CHECK(r.attempts == 1);
        CHECK(r.last_failure_reason().empty());
        CHECK(!r.repaired_source.empty());
    }
}

TEST_CASE("echo fails every attempt with a persisting violation") {
    Fixture fx;
    LlmConfig cfg;
    cfg.mock_policy = MockPolicy::Echo;
    LlmGateway gateway(cfg);
    auto env = fx.env(gateway);

    InjectedCase c = bundled_case("setup.deep_mux.simple.01");
    CaseResult r = run_debug_case(c, env);
    CHECK_FALSE(r.success);
    CHECK(r.attempts == fx.config.pipeline.max_attempts);
    for (const auto &a : r.attempt_details) {
        CHECK(a.failure_reason == "violation persists");
        CHECK_FALSE(a.cleared);
    }
}

TEST_CASE("scripted broken-then-golden repair succeeds on the second attempt") {
    Fixture fx;
    InjectedCase c = bundled_case("setup.low_pipe_stage.simple.01");

    fs::path script = fs::temp_directory_path() / "triage_script_retry.json";
    {
        nlohmann::json j;
        j[c.id] = nlohmann::json::array({
            "the multiply chain exceeds one cycle",           // cause analysis
            "```verilog\nmodule broken(input a; endmodule\n```",  // attempt 1: syntax error
            "```verilog\n" + c.golden_source + "```",             // attempt 2: golden
        });
        std::ofstream f(script);
        f << j.dump();
    }
    LlmConfig cfg;
    cfg.mock_policy = MockPolicy::Scripted;
    cfg.scripted_path = script.string();
    LlmGateway gateway(cfg);
    auto env = fx.env(gateway);

    CaseResult r = run_debug_case(c, env);
    CHECK(r.success);
    CHECK(r.attempts == 2);
    REQUIRE(r.attempt_details.size() == 2);
    CHECK(r.attempt_details[0].failure_reason.find("does not parse") != std::string::npos);
    CHECK(r.attempt_details[1].failure_reason.empty());
    fs::remove(script);
}

TEST_CASE("a repair that breaks another path is a new violation") {
    Fixture fx;
    InjectedCase c = bundled_case("hold.short_logic_path.simple.01");

    // clears stage_b's hold but shortens stage_a's path below the hold window
    std::string bad_repair =
        "module edge_filter (\n"
        "  input wire clk,\n"
        "  input wire [7:0] din,\n"
        "  input wire [7:0] mask,\n"
        "  output wire [7:0] dout\n"
        ");\n"
        "  reg [7:0] stage_a;\n"
        "  reg [7:0] stage_b;\n"
        "  always @(posedge clk) begin\n"
        "    stage_a <= din;\n"
        "    stage_b <= stage_a ^ mask;\n"
        "  end\n"
        "  assign dout = stage_b;\n"
        "endmodule\n";

    fs::path script = fs::temp_directory_path() / "triage_script_newviol.json";
    {
        nlohmann::json j;
        j[c.id] = nlohmann::json::array({
            "hold violation: the capture path is too short",
            "```verilog\n" + bad_repair + "```",
        });
        std::ofstream f(script);
        f << j.dump();
    }
    LlmConfig cfg;
    cfg.mock_policy = MockPolicy::Scripted;
    cfg.scripted_path = script.string();
    fx.config.pipeline.max_attempts = 1;
    LlmGateway gateway(cfg);
    auto env = fx.env(gateway);

    CaseResult r = run_debug_case(c, env);
    CHECK_FALSE(r.success);
    REQUIRE(r.attempt_details.size() == 1);
    CHECK(r.attempt_details[0].cleared);
    CHECK(r.attempt_details[0].new_violations);
    CHECK(r.attempt_details[0].failure_reason == "new violation introduced: hold at 'stage_a'");
    fs::remove(script);
}

TEST_CASE("a repair that changes the ports is rejected") {
    Fixture fx;
    InjectedCase c = bundled_case("setup.low_pipe_stage.simple.01");
    fs::path script = fs::temp_directory_path() / "triage_script_ports.json";
    {
        nlohmann::json j;
        j[c.id] = nlohmann::json::array({
            "needs another pipeline stage",
            "```verilog\nmodule mult_pipe (\n  input wire clk,\n  input wire [7:0] a\n);\n"
            "  reg [7:0] p2;\n  always @(posedge clk) begin\n    p2 <= a;\n  end\nendmodule\n```",
        });
        std::ofstream f(script);
        f << j.dump();
    }
    LlmConfig cfg;
    cfg.mock_policy = MockPolicy::Scripted;
    cfg.scripted_path = script.string();
    fx.config.pipeline.max_attempts = 1;
    LlmGateway gateway(cfg);
    auto env = fx.env(gateway);
    CaseResult r = run_debug_case(c, env);
    CHECK_FALSE(r.success);
    CHECK(r.last_failure_reason() == "port list changed");
    fs::remove(script);
}

TEST_CASE("retry feedback lands in the follow-up repair prompt") {
    Fixture fx;
    InjectedCase c = bundled_case("setup.deep_mux.simple.01");
    LlmConfig cfg;
    cfg.mock_policy = MockPolicy::Echo;
    fx.config.pipeline.max_attempts = 2;
    LlmGateway gateway(cfg);
    auto env = fx.env(gateway);
    run_debug_case(c, env);

    // exchanges: cause, repair 1, repair 2; the second repair carries feedback
    auto log = gateway.exchanges();
    REQUIRE(log.size() == 3);
    CHECK(log[1].request.find("Previous repair attempt failed") == std::string::npos);
    CHECK(log[2].request.find("Previous repair attempt failed verification: violation persists") !=
          std::string::npos);
}

TEST_CASE("evaluate aggregates per group and overall") {
    Fixture fx;
    LlmConfig cfg;
    cfg.mock_policy = MockPolicy::KbGolden;
    LlmGateway gateway(cfg);
    auto env = fx.env(gateway);

    auto summary = evaluate(repo_root() + "/dataset", env);
    REQUIRE(summary.is_ok());
    const EvalSummary &s = summary.value();
    CHECK(s.trials == 12);
    CHECK(s.successes == 12);
    CHECK(s.groups.size() == 12);  // 6 subscenarios x 2 difficulties
    for (const auto &g : s.groups) {
        CHECK(g.trials == 1);
        CHECK(g.successes == 1);
    }
    CHECK(format_percent(s.successes, s.trials) == "100.00%");

    std::string table = eval_summary_table(s);
    CHECK(table.find("long_comb_chain") != std::string::npos);
    CHECK(table.find("overall") != std::string::npos);
    CHECK(table.find("12/12") != std::string::npos);
}

TEST_CASE("evaluate is bit-deterministic and counts cases times repetitions") {
    Fixture fx;
    fx.config.pipeline.repetitions = 2;

    auto run = [&]() {
        LlmConfig cfg;
        cfg.mock_policy = MockPolicy::KbGolden;
        LlmGateway gateway(cfg);
        auto env = fx.env(gateway);
        auto summary = evaluate(repo_root() + "/dataset", env);
        REQUIRE(summary.is_ok());
        return eval_summary_json(summary.value());
    };
    std::string a = run();
    std::string b = run();
    CHECK(a == b);

    auto parsed = nlohmann::json::parse(a);
    CHECK(parsed["overall"]["trials"] == 24);  // 12 cases x 2 repetitions
    CHECK(parsed["cases"].size() == 24);
}

TEST_CASE("parallel workers produce the same summary as a single worker") {
    Fixture fx;
    auto run = [&](int workers) {
        fx.config.pipeline.workers = workers;
        LlmConfig cfg;
        cfg.mock_policy = MockPolicy::KbGolden;
        LlmGateway gateway(cfg);
        auto env = fx.env(gateway);
        auto summary = evaluate(repo_root() + "/dataset", env);
        REQUIRE(summary.is_ok());
        return eval_summary_json(summary.value());
    };
    CHECK(run(1) == run(4));
}

TEST_CASE("successful repairs are independently re-verifiable") {
    Fixture fx;
    LlmConfig cfg;
    cfg.mock_policy = MockPolicy::KbGolden;
    LlmGateway gateway(cfg);
    auto env = fx.env(gateway);
    auto summary = evaluate(repo_root() + "/dataset", env);
    REQUIRE(summary.is_ok());

    auto manifest = load_manifest(repo_root() + "/dataset");
    REQUIRE(manifest.is_ok());
    for (size_t i = 0; i < summary.value().case_results.size(); ++i) {
        const CaseResult &r = summary.value().case_results[i];
        REQUIRE(r.success);
        InjectedCase c = bundled_case(r.case_id);
        DelayModel model = fx.config.delay_model;
        apply_delay_overrides(model, c.delay_overrides);
        auto ast = parse(r.repaired_source, "repaired.v");
        REQUIRE(ast.is_ok());
        auto g = build(ast.value());
        REQUIRE(g.is_ok());
        auto report = analyze_design(g.value(), model, c.constraints);
        REQUIRE(report.is_ok());
        CHECK(report.value().violation_count() == 0);
    }
}

TEST_CASE("evaluate reports manifest problems") {
    Fixture fx;
    LlmConfig cfg;
    LlmGateway gateway(cfg);
    auto env = fx.env(gateway);
    auto missing = evaluate("/nonexistent-dataset-dir", env);
    REQUIRE(missing.is_err());
}
