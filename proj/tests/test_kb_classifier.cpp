#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "support.hpp"
#include "triage/classifier.hpp"
#include "triage/config.hpp"
#include "triage/kb.hpp"

using namespace triage;
using namespace triage::testing;
namespace fs = std::filesystem;

namespace {

std::string kb_dir() { return repo_root() + "/kb"; }

struct TempKb {
    fs::path dir;
    TempKb() {
        dir = fs::temp_directory_path() / ("triage_kb_test_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~TempKb() { fs::remove_all(dir); }
    void put(const std::string &name, const nlohmann::json &j) {
        std::ofstream f(dir / name);
        f << j.dump(2);
    }
};

nlohmann::json entry_template() {
    auto kb = load_and_validate(kb_dir());
    REQUIRE(kb.is_ok());
    const KbEntry &e = kb.value().entries.front();  // cdc.multi_bits_trans.001
    return nlohmann::json{
        {"id", e.id},
        {"violation_type", to_string(e.violation_type)},
        {"subscenario", to_string(e.subscenario)},
        {"description", e.description},
        {"repair_strategy", e.repair_strategy},
        {"demo_before", e.demo_before},
        {"demo_after", e.demo_after},
        {"tags", e.tags},
    };
}

}  // namespace

TEST_CASE("bundled knowledge base loads complete and valid") {
    auto kb = load_and_validate(kb_dir(), /*require_complete=*/true);
    if (kb.is_err()) FAIL("kb: ", to_string(kb.error()));
    CHECK(kb.value().entries.size() >= 12);
    CHECK(kb.value().missing_scenarios().empty());
    for (Scenario s : all_scenarios()) {
        size_t n = 0;
        for (const auto &e : kb.value().entries)
            if (e.subscenario == s) ++n;
        CHECK(n >= 2);
    }
    // sorted by id
    for (size_t i = 1; i < kb.value().entries.size(); ++i)
        CHECK(kb.value().entries[i - 1].id < kb.value().entries[i].id);
}

TEST_CASE("retrieve is exact with an Unknown fallback") {
    auto kb = load_and_validate(kb_dir());
    REQUIRE(kb.is_ok());

    auto exact = retrieve(kb.value(), Vtype::Cdc, Scenario::SingleBitTrans);
    REQUIRE(exact.size() == 2);
    for (const auto &e : exact) {
        CHECK(e.violation_type == Vtype::Cdc);
        CHECK(e.subscenario == Scenario::SingleBitTrans);
    }

    auto fallback = retrieve(kb.value(), Vtype::Setup, Scenario::Unknown);
    CHECK(fallback.size() == 6);  // every setup entry across its 3 subscenarios

    // invalid pairing is never stored
    CHECK(retrieve(kb.value(), Vtype::Hold, Scenario::DeepMux).empty());

    SUBCASE("retrieval is deterministic") {
        auto again = retrieve(kb.value(), Vtype::Setup, Scenario::Unknown);
        REQUIRE(again.size() == fallback.size());
        for (size_t i = 0; i < again.size(); ++i) CHECK(again[i].id == fallback[i].id);
    }
}

TEST_CASE("kb rejects bad entries") {
    SUBCASE("unknown subscenario") {
        TempKb tmp;
        auto j = entry_template();
        j["subscenario"] = "fast_path";
        tmp.put("bad.json", j);
        auto kb = load_and_validate(tmp.dir.string());
        REQUIRE(kb.is_err());
        CHECK(kb.error().kind == KbErrorKind::TaxonomyError);
    }
    SUBCASE("type and subscenario must agree") {
        TempKb tmp;
        auto j = entry_template();
        j["violation_type"] = "hold";
        j["id"] = "hold.multi_bits_trans.001";
        tmp.put("bad.json", j);
        auto kb = load_and_validate(tmp.dir.string());
        REQUIRE(kb.is_err());
        CHECK(kb.error().kind == KbErrorKind::TaxonomyError);
    }
    SUBCASE("demo_after that still violates is rejected") {
        TempKb tmp;
        auto j = entry_template();
        j["demo_after"] = j["demo_before"];
        tmp.put("bad.json", j);
        auto kb = load_and_validate(tmp.dir.string());
        REQUIRE(kb.is_err());
        CHECK(kb.error().kind == KbErrorKind::DemoInvalid);
    }
    SUBCASE("demo that fails to parse is rejected") {
        TempKb tmp;
        auto j = entry_template();
        j["demo_before"] = "module broken(input a; endmodule";
        tmp.put("bad.json", j);
        auto kb = load_and_validate(tmp.dir.string());
        REQUIRE(kb.is_err());
        CHECK(kb.error().kind == KbErrorKind::DemoInvalid);
    }
    SUBCASE("duplicate ids are rejected") {
        TempKb tmp;
        auto j = entry_template();
        tmp.put("one.json", j);
        tmp.put("two.json", j);
        auto kb = load_and_validate(tmp.dir.string());
        REQUIRE(kb.is_err());
        CHECK(kb.error().kind == KbErrorKind::DuplicateId);
    }
    SUBCASE("missing field is a schema error") {
        TempKb tmp;
        auto j = entry_template();
        j.erase("repair_strategy");
        tmp.put("bad.json", j);
        auto kb = load_and_validate(tmp.dir.string());
        REQUIRE(kb.is_err());
        CHECK(kb.error().kind == KbErrorKind::SchemaError);
        CHECK(kb.error().field == "repair_strategy");
    }
}

TEST_CASE("parameter extraction follows the stated patterns") {
    SUBCASE("slack, depth, and a backticked signal") {
        ExtractedParams p =
            extract_params("setup slack -1.200 ns on a path with 12 logic levels through `acc_r`");
        REQUIRE(p.slack_values.size() == 1);
        CHECK(p.slack_values[0] == doctest::Approx(-1.2));
        REQUIRE(p.path_depth.has_value());
        CHECK(*p.path_depth == 12);
        REQUIRE(p.signal_names.size() == 1);
        CHECK(p.signal_names[0] == "acc_r");
        CHECK(p.keyword_hits.count("setup"));
    }
    SUBCASE("width, clocks, and crossing keywords") {
        ExtractedParams p =
            extract_params("8-bit bus crosses from clk_a to clk_b without synchronizer");
        REQUIRE(p.bit_width.has_value());
        CHECK(*p.bit_width == 8);
        REQUIRE(p.clock_names.size() == 2);
        CHECK(p.clock_names[0] == "clk_a");
        CHECK(p.clock_names[1] == "clk_b");
        CHECK(p.keyword_hits.count("cross"));
        CHECK(p.keyword_hits.count("synchronizer"));
        CHECK(p.keyword_hits.count("without"));
        CHECK(p.keyword_hits.count("no-sync"));
    }
    SUBCASE("no numerals means absent numeric fields") {
        ExtractedParams p = extract_params("no numerals here");
        CHECK(p.slack_values.empty());
        CHECK_FALSE(p.path_depth.has_value());
        CHECK_FALSE(p.mux_depth.has_value());
        CHECK_FALSE(p.bit_width.has_value());
    }
    SUBCASE("mux depth from level phrasing") {
        ExtractedParams p = extract_params("a 6-level nested multiplexer path");
        REQUIRE(p.mux_depth.has_value());
        CHECK(*p.mux_depth == 6);
    }
    SUBCASE("identifiers after signal/register/clock keywords") {
        ExtractedParams p = extract_params("register prod_r captures signal lane0 on clock core");
        CHECK(std::find(p.signal_names.begin(), p.signal_names.end(), "prod_r") !=
              p.signal_names.end());
        CHECK(std::find(p.signal_names.begin(), p.signal_names.end(), "lane0") !=
              p.signal_names.end());
        CHECK(std::find(p.clock_names.begin(), p.clock_names.end(), "core") !=
              p.clock_names.end());
    }
    SUBCASE("extraction is deterministic") {
        const std::string text = "setup slack -0.500 ns through `x` with 7 stages";
        ExtractedParams a = extract_params(text);
        ExtractedParams b = extract_params(text);
        CHECK(a.keyword_hits == b.keyword_hits);
        CHECK(a.slack_values == b.slack_values);
        CHECK(a.path_depth == b.path_depth);
    }
}

TEST_CASE("classifier scores the labeled corpus") {
    std::ifstream f(repo_root() + "/tests/fixtures/cause_corpus.json");
    REQUIRE(f.good());
    nlohmann::json corpus;
    f >> corpus;

    int correct = 0, total = 0;
    for (const auto &item : corpus["labeled"]) {
        ++total;
        Scenario want = *scenario_from_string(item["label"].get<std::string>());
        Scenario got = identify_scenario(item["text"].get<std::string>());
        if (got == want) ++correct;
        CHECK(to_string(got) == to_string(want));
    }
    CHECK(total == 8);
    CHECK(correct == 8);
}

TEST_CASE("cdc rules outrank setup rules on ambiguous text") {
    std::ifstream f(repo_root() + "/tests/fixtures/cause_corpus.json");
    REQUIRE(f.good());
    nlohmann::json corpus;
    f >> corpus;
    for (const auto &item : corpus["priority"]) {
        Scenario want = *scenario_from_string(item["label"].get<std::string>());
        Scenario got = identify_scenario(item["text"].get<std::string>());
        CHECK(to_string(got) == to_string(want));
        CHECK(scenario_vtype(got) == Vtype::Cdc);
    }
}

TEST_CASE("classifier is total and returns Unknown off-corpus") {
    CHECK(identify_scenario("completely unrelated prose") == Scenario::Unknown);
    CHECK(identify_scenario("x") == Scenario::Unknown);
}

TEST_CASE("rule sets are swappable through the config") {
    // a config whose only rule maps any "setup" keyword to deep_mux
    std::string json_text = R"({
      "classifier": {"rules": [
        {"scenario": "deep_mux", "priority": 1, "clauses": [["kw:setup"]]}
      ]}
    })";
    auto cfg = parse_config(json_text);
    REQUIRE(cfg.is_ok());
    REQUIRE(cfg.value().classifier.rules.size() == 1);
    CHECK(identify_scenario("a setup issue", cfg.value().classifier) == Scenario::DeepMux);
    CHECK(identify_scenario("a hold issue", cfg.value().classifier) == Scenario::Unknown);

    // round-trips through serialization
    auto again = parse_config(config_to_json(cfg.value()));
    REQUIRE(again.is_ok());
    CHECK(again.value().classifier.rules.size() == 1);
    CHECK(again.value().classifier.rules[0].scenario == Scenario::DeepMux);
}

TEST_CASE("shipped default config matches the built-in defaults") {
    auto cfg = load_config(repo_root() + "/config/default.json");
    REQUIRE(cfg.is_ok());
    AppConfig defaults;
    CHECK(config_to_json(cfg.value()) == config_to_json(defaults));
}

TEST_CASE("config defaults and validation") {
    auto cfg = parse_config("{}");
    REQUIRE(cfg.is_ok());
    CHECK(cfg.value().delay_model.t_cq == doctest::Approx(0.5));
    CHECK(cfg.value().llm.temperature == doctest::Approx(0.7));
    CHECK(cfg.value().pipeline.max_attempts == 3);

    CHECK(parse_config(R"({"llm": {"temperature": 3.0}})").is_err());
    CHECK(parse_config(R"({"pipeline": {"max_attempts": 0}})").is_err());
    CHECK(parse_config("not json").is_err());

    auto overridden = parse_config(R"({"delay_model": {"multiply": 2.5, "t_h": 0.7}})");
    REQUIRE(overridden.is_ok());
    CHECK(overridden.value().delay_model.multiply == doctest::Approx(2.5));
    CHECK(overridden.value().delay_model.t_h == doctest::Approx(0.7));
    CHECK(overridden.value().delay_model.add_sub == doctest::Approx(1.0));
}
