#include <doctest.h>

#include <random>

#include "support.hpp"
#include "triage/parser.hpp"
#include "triage/report_io.hpp"
#include "triage/stdg.hpp"
#include "triage/timing.hpp"

using namespace triage;
using namespace triage::testing;

namespace {

Stdg build_ok(const std::string &text) {
    auto ast = parse(text, "<test>");
    REQUIRE(ast.is_ok());
    auto g = build(ast.value());
    REQUIRE(g.is_ok());
    return g.take();
}

const std::string kChain3 =
    "module chain3(input clk, input [7:0] a, output reg [7:0] r_dst);\n"
    "  reg [7:0] r_src;\n"
    "  always @(posedge clk) begin\n"
    "    r_src <= a;\n"
    "    r_dst <= ((r_src + 8'd2) + 8'd3) + 8'd1;\n"
    "  end\n"
    "endmodule\n";

}  // namespace

TEST_CASE("three-adder chain violates at period 3.0 and passes at 5.0") {
    Stdg g = build_ok(kChain3);
    DelayModel model;

    auto tight = analyze_timing(g, model, {{"clk", 3.0}});
    REQUIRE(tight.is_ok());
    const TimingReport &rep = tight.value();
    // r_src <= a also times: arrival 0.5, fine. Only r_dst violates.
    REQUIRE(rep.paths.size() == 1);
    const TimingPath &p = rep.paths[0];
    CHECK(p.vtype == Vtype::Setup);
    CHECK(p.endpoint == "r_dst");
    CHECK(p.arrival == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(p.required == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(p.slack == doctest::Approx(-1.0).epsilon(1e-12));

    auto loose = analyze_timing(g, model, {{"clk", 5.0}});
    REQUIRE(loose.is_ok());
    CHECK(loose.value().paths.empty());
}

TEST_CASE("hold slack on a direct register-to-register wire") {
    Stdg g = build_ok(
        "module m(input clk, input d, output reg r_b);\n"
        "  reg r_a;\n"
        "  always @(posedge clk) begin r_a <= d; r_b <= r_a; end\n"
        "endmodule\n");
    DelayModel model;  // t_cq 0.5, t_h 0.3 -> slack 0.2, no violation
    auto ok = analyze_timing(g, model, {{"clk", 5.0}});
    REQUIRE(ok.is_ok());
    CHECK(ok.value().paths.empty());

    model.t_h = 0.7;  // slack -0.2 on both r_a (from port d) and r_b
    auto bad = analyze_timing(g, model, {{"clk", 5.0}});
    REQUIRE(bad.is_ok());
    bool found = false;
    for (const auto &p : bad.value().paths) {
        if (p.endpoint == "r_b") {
            found = true;
            CHECK(p.vtype == Vtype::Hold);
            CHECK(p.arrival == doctest::Approx(0.5).epsilon(1e-12));
            CHECK(p.slack == doctest::Approx(-0.2).epsilon(1e-12));
            CHECK(p.startpoint == "r_a");
        }
    }
    CHECK(found);
}

TEST_CASE("missing clock constraint is an error") {
    Stdg g = build_ok(
        "module m(input clk, input d, output reg q);\n"
        "  always @(posedge clk) q <= d;\n"
        "endmodule\n");
    auto r = analyze_timing(g, DelayModel{}, {});
    REQUIRE(r.is_err());
    CHECK(r.error().clock == "clk");
}

TEST_CASE("direct single-bit crossing is violating") {
    Stdg g = build_ok(
        "module m(input clk_a, input clk_b, input d, output reg r_b);\n"
        "  reg r_a;\n"
        "  always @(posedge clk_a) r_a <= d;\n"
        "  always @(posedge clk_b) r_b <= r_a;\n"
        "endmodule\n");
    auto findings = detect_cdc(g);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].source == "r_a");
    CHECK(findings[0].destination == "r_b");
    CHECK(findings[0].width == 1);
    CHECK(findings[0].synchronizer == Synchronizer::None);
    CHECK(findings[0].violating);
}

TEST_CASE("two-flop synchronizer is recognized and clean") {
    Stdg g = build_ok(
        "module m(input clk_a, input clk_b, input d, output s2);\n"
        "  reg r_a;\n"
        "  reg s1_r;\n"
        "  reg s2_r;\n"
        "  always @(posedge clk_a) r_a <= d;\n"
        "  always @(posedge clk_b) begin s1_r <= r_a; s2_r <= s1_r; end\n"
        "  assign s2 = s2_r;\n"
        "endmodule\n");
    auto findings = detect_cdc(g);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].destination == "s1_r");
    CHECK(findings[0].synchronizer == Synchronizer::TwoFlop);
    CHECK_FALSE(findings[0].violating);
}

TEST_CASE("single-domain design yields no findings") {
    Stdg g = build_ok(kChain3);
    CHECK(detect_cdc(g).empty());
}

TEST_CASE("multi-bit crossing needs a handshake") {
    const std::string handshake =
        "module hs(input clk_a, input clk_b, input [7:0] din, input send, output [7:0] dout);\n"
        "  reg [7:0] data_src;\n"
        "  reg req;\n"
        "  reg req_m;\n"
        "  reg req_s;\n"
        "  reg [7:0] data_dst;\n"
        "  always @(posedge clk_a) begin data_src <= din; req <= send; end\n"
        "  always @(posedge clk_b) begin req_m <= req; req_s <= req_m; end\n"
        "  always @(posedge clk_b) if (req_s) data_dst <= data_src;\n"
        "  assign dout = data_dst;\n"
        "endmodule\n";
    Stdg g = build_ok(handshake);
    auto findings = detect_cdc(g);
    REQUIRE(findings.size() == 2);
    // sorted by destination: data_dst then req_m
    CHECK(findings[0].destination == "data_dst");
    CHECK(findings[0].synchronizer == Synchronizer::Handshake);
    CHECK_FALSE(findings[0].violating);
    CHECK(findings[1].destination == "req_m");
    CHECK(findings[1].synchronizer == Synchronizer::TwoFlop);
    CHECK_FALSE(findings[1].violating);

    // removing the guard turns the data crossing into a violation
    const std::string direct =
        "module hs(input clk_a, input clk_b, input [7:0] din, input send, output [7:0] dout);\n"
        "  reg [7:0] data_src;\n"
        "  reg req;\n"
        "  reg req_m;\n"
        "  reg req_s;\n"
        "  reg [7:0] data_dst;\n"
        "  always @(posedge clk_a) begin data_src <= din; req <= send; end\n"
        "  always @(posedge clk_b) begin req_m <= req; req_s <= req_m; end\n"
        "  always @(posedge clk_b) data_dst <= data_src;\n"
        "  assign dout = data_dst;\n"
        "endmodule\n";
    Stdg g2 = build_ok(direct);
    auto f2 = detect_cdc(g2);
    REQUIRE(f2.size() == 2);
    CHECK(f2[0].destination == "data_dst");
    CHECK(f2[0].width == 8);
    CHECK(f2[0].synchronizer == Synchronizer::None);
    CHECK(f2[0].violating);
    CHECK_FALSE(f2[1].violating);
}

TEST_CASE("cross-domain pairs are excluded from setup analysis") {
    Stdg g = build_ok(
        "module m(input clk_a, input clk_b, input [7:0] d, output reg [7:0] r_b);\n"
        "  reg [7:0] r_a;\n"
        "  always @(posedge clk_a) r_a <= d;\n"
        "  always @(posedge clk_b) r_b <= ((r_a * r_a) * r_a) * r_a;\n"
        "endmodule\n");
    auto r = analyze_timing(g, DelayModel{}, {{"clk_a", 2.0}, {"clk_b", 2.0}});
    REQUIRE(r.is_ok());
    CHECK(r.value().paths.empty());  // the long multiply path crosses domains
    auto full = analyze_design(g, DelayModel{}, {{"clk_a", 2.0}, {"clk_b", 2.0}});
    REQUIRE(full.is_ok());
    CHECK(full.value().cdc.size() == 1);
}

TEST_CASE("report emit/parse canonical fixtures") {
    Stdg g = build_ok(kChain3);
    auto r = analyze_design(g, DelayModel{}, {{"clk", 3.0}});
    REQUIRE(r.is_ok());
    std::string text = emit_report(r.value());
    CHECK(text.find("VIOLATION setup\n") == 0);
    CHECK(text.find("  Slack:      -1.000 ns\n") != std::string::npos);
    CHECK(text.find("  Path: r_src -> add#1 -> add#2 -> add#3 -> r_dst\n") !=
          std::string::npos);

    auto parsed = parse_report(text);
    REQUIRE(parsed.is_ok());
    CHECK(emit_report(parsed.value()) == text);

    SUBCASE("empty report emits empty string") {
        CHECK(emit_report(TimingReport{}) == "");
        auto empty = parse_report("");
        REQUIRE(empty.is_ok());
        CHECK(empty.value().empty());
    }

    SUBCASE("missing Slack line is a parse error") {
        std::string broken;
        for (const auto &line : {std::string("VIOLATION setup"),
                                 std::string("  Startpoint: r_src (rising edge clk)"),
                                 std::string("  Endpoint:   r_dst (rising edge clk)"),
                                 std::string("  Requirement: 2.500 ns"),
                                 std::string("  Arrival:     3.500 ns"),
                                 std::string("  Path: r_src -> r_dst"), std::string("END")})
            broken += line + "\n";
        auto bad = parse_report(broken);
        REQUIRE(bad.is_err());
        CHECK(bad.error().reason.find("Slack") != std::string::npos);
    }
}

TEST_CASE("violations sort by type then slack then endpoint") {
    TimingReport rep;
    TimingPath a;
    a.vtype = Vtype::Setup;
    a.endpoint = "r1";
    a.slack = -0.5;
    a.startpoint = "x";
    a.node_sequence = {"x", "r1"};
    a.startpoint_clock = a.endpoint_clock = "clk";
    TimingPath b = a;
    b.endpoint = "r2";
    b.slack = -1.2;
    b.node_sequence = {"x", "r2"};
    rep.paths = {a, b};
    rep.sort_canonical();
    CHECK(rep.paths[0].endpoint == "r2");  // most negative slack first
    std::string text = emit_report(rep);
    CHECK(text.find("-1.200") < text.find("-0.500"));
}

TEST_CASE("cdc report block round-trips") {
    CdcFinding f;
    f.source = "r_a";
    f.source_domain = "clk_a";
    f.destination = "r_b";
    f.destination_domain = "clk_b";
    f.width = 8;
    f.synchronizer = Synchronizer::None;
    f.violating = true;
    f.node_sequence = {"r_a", "r_b"};
    TimingReport rep;
    rep.cdc.push_back(f);
    std::string text = emit_report(rep);
    CHECK(text.find("  Source: r_a (clk_a)\n") != std::string::npos);
    CHECK(text.find("  Width: 8\n") != std::string::npos);
    auto parsed = parse_report(text);
    REQUIRE(parsed.is_ok());
    REQUIRE(parsed.value().cdc.size() == 1);
    CHECK(parsed.value().cdc[0].width == 8);
    CHECK(emit_report(parsed.value()) == text);
}

TEST_CASE("constraints file round-trips") {
    auto parsed = parse_constraints("clock clk 5.0\nclock clk_b 3.5\n");
    REQUIRE(parsed.is_ok());
    REQUIRE(parsed.value().size() == 2);
    CHECK(parsed.value()[1].period_ns == doctest::Approx(3.5));
    CHECK(parse_constraints("bogus line\n").is_err());
}

TEST_CASE("longest-path arrival matches brute force on random DAGs") {
    std::mt19937 rng(20260810);
    DelayModel model;
    int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        RandomDag dag = random_dag(rng, 12);
        auto result = analyze_timing(dag.graph, model, {{"clk", 0.001}});
        REQUIRE(result.is_ok());

        auto paths = brute_force_paths(dag.graph, dag.sink);
        double want_max = -1, want_min = 1e18;
        for (const auto &p : paths) {
            double d = model.t_cq + path_delay(dag.graph, model, p);
            want_max = std::max(want_max, d);
            want_min = std::min(want_min, d);
        }

        // With period 0.001 every endpoint with fan-in violates setup, so the
        // worst arrival is observable in the report.
        double got_max = -1;
        for (const auto &p : result.value().paths) {
            if (p.endpoint != "sink") continue;
            if (p.vtype == Vtype::Setup) got_max = p.arrival;
        }
        REQUIRE(got_max >= 0);
        CHECK(got_max == doctest::Approx(want_max).epsilon(1e-9));

        // with a huge hold requirement every endpoint reports its min arrival
        DelayModel hold_model = model;
        hold_model.t_h = 1000.0;
        auto hold_result = analyze_timing(dag.graph, hold_model, {{"clk", 1e6}});
        REQUIRE(hold_result.is_ok());
        double got_min = 1e18;
        for (const auto &p : hold_result.value().paths) {
            if (p.endpoint == "sink" && p.vtype == Vtype::Hold) got_min = p.arrival;
        }
        REQUIRE(got_min < 1e17);
        CHECK(got_min == doctest::Approx(want_min).epsilon(1e-9));
    }
}
