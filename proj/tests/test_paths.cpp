#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "support.hpp"
#include "triage/parser.hpp"
#include "triage/violation_path.hpp"

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

std::set<std::vector<int>> as_set(const std::vector<LogicalPath> &paths) {
    std::set<std::vector<int>> out;
    for (const auto &p : paths) out.insert(p.nodes);
    return out;
}

}  // namespace

TEST_CASE("diamond produces two logical paths") {
    GraphBuilder b;
    int a = b.add(NodeKind::Register, "a", 1, "clk");
    int add = b.add(NodeKind::Operator, "add#1", 1, "", "add");
    int inv = b.add(NodeKind::Operator, "not#1", 1, "", "not");
    int d = b.add(NodeKind::Register, "d", 1, "clk");
    b.edge(a, add);
    b.edge(a, inv);
    b.edge(add, d);
    b.edge(inv, d);
    Stdg g = b.finish();

    auto r = enumerate_logical_paths(g, d);
    REQUIRE(r.is_ok());
    auto got = as_set(r.value());
    std::set<std::vector<int>> want = {{a, add, d}, {a, inv, d}};
    CHECK(got == want);

    SUBCASE("merge picks the max-delay branch") {
        auto phys = merge_to_physical(g, r.value(), DelayModel{});
        REQUIRE(phys.is_ok());
        CHECK(phys.value().delay == doctest::Approx(1.0));
        CHECK(phys.value().names(g) == std::vector<std::string>{"a", "add#1", "d"});
    }

    SUBCASE("merge is idempotent on its own result") {
        auto phys = merge_to_physical(g, r.value(), DelayModel{});
        REQUIRE(phys.is_ok());
        auto again = merge_to_physical(g, {phys.value().path}, DelayModel{});
        REQUIRE(again.is_ok());
        CHECK(again.value().path.nodes == phys.value().path.nodes);
        CHECK(again.value().delay == phys.value().delay);
    }
}

TEST_CASE("register with no incoming edges yields the degenerate path") {
    GraphBuilder b;
    int r = b.add(NodeKind::Register, "r", 1, "clk");
    Stdg g = b.finish();
    auto res = enumerate_logical_paths(g, r);
    REQUIRE(res.is_ok());
    REQUIRE(res.value().size() == 1);
    CHECK(res.value()[0].nodes == std::vector<int>{r});
}

TEST_CASE("chain of three operators gives one path of length five") {
    Stdg g = build_ok(
        "module m(input clk, input [7:0] a, output reg [7:0] q);\n"
        "  always @(posedge clk) q <= ((a + 8'd1) + 8'd2) + 8'd3;\n"
        "endmodule\n");
    auto r = enumerate_logical_paths(g, g.require("q"));
    REQUIRE(r.is_ok());
    REQUIRE(r.value().size() == 1);
    CHECK(r.value()[0].nodes.size() == 5);
}

TEST_CASE("non-register node is rejected") {
    Stdg g = build_ok("module m(input x, output y); assign y = x; endmodule");
    auto r = enumerate_logical_paths(g, g.require("y"));
    REQUIRE(r.is_err());
    CHECK(r.error().kind == PathErrorKind::NotARegister);
}

TEST_CASE("equal-delay tie breaks on lexicographic node names") {
    GraphBuilder b;
    int src = b.add(NodeKind::Register, "src", 1, "clk");
    int alpha = b.add(NodeKind::Operator, "alpha#1", 1, "", "add");
    int beta = b.add(NodeKind::Operator, "beta#1", 1, "", "add");
    int dst = b.add(NodeKind::Register, "dst", 1, "clk");
    b.edge(src, alpha);
    b.edge(src, beta);
    b.edge(alpha, dst);
    b.edge(beta, dst);
    Stdg g = b.finish();
    auto r = enumerate_logical_paths(g, dst);
    REQUIRE(r.is_ok());
    auto phys = merge_to_physical(g, r.value(), DelayModel{});
    REQUIRE(phys.is_ok());
    CHECK(phys.value().names(g)[1] == "alpha#1");
}

TEST_CASE("startpoint filter narrows candidates") {
    GraphBuilder b;
    int fast = b.add(NodeKind::Register, "fast", 1, "clk");
    int slow = b.add(NodeKind::Register, "slow", 1, "clk");
    int mul = b.add(NodeKind::Operator, "mul#1", 1, "", "mul");
    int inv = b.add(NodeKind::Operator, "not#1", 1, "", "not");
    int dst = b.add(NodeKind::Register, "dst", 1, "clk");
    b.edge(slow, mul);
    b.edge(mul, dst);
    b.edge(fast, inv);
    b.edge(inv, dst);
    Stdg g = b.finish();
    auto r = enumerate_logical_paths(g, dst);
    REQUIRE(r.is_ok());
    // unfiltered: mul wins (3.0)
    auto all = merge_to_physical(g, r.value(), DelayModel{});
    REQUIRE(all.is_ok());
    CHECK(all.value().names(g)[0] == "slow");
    // filtered to "fast": the not path wins despite lower delay
    auto filtered = merge_to_physical(g, r.value(), DelayModel{}, "fast");
    REQUIRE(filtered.is_ok());
    CHECK(filtered.value().names(g)[0] == "fast");
    CHECK(filtered.value().delay == doctest::Approx(0.3));
}

TEST_CASE("empty path set is an error") {
    GraphBuilder b;
    b.add(NodeKind::Register, "r", 1, "clk");
    Stdg g = b.finish();
    auto r = merge_to_physical(g, {}, DelayModel{});
    REQUIRE(r.is_err());
    CHECK(r.error().kind == PathErrorKind::EmptyPathSet);
}

TEST_CASE("enumeration matches brute force on random DAGs") {
    std::mt19937 rng(777);
    int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        RandomDag dag = random_dag(rng, 12);
        auto r = enumerate_logical_paths(dag.graph, dag.sink);
        REQUIRE(r.is_ok());
        auto got = as_set(r.value());
        auto brute = brute_force_paths(dag.graph, dag.sink);
        std::set<std::vector<int>> want(brute.begin(), brute.end());
        REQUIRE(got == want);
    }
}

TEST_CASE("path explosion falls back to longest-path reconstruction") {
    // ladder of 14 diamonds: 2^14 = 16384 logical paths
    GraphBuilder b;
    int src = b.add(NodeKind::Register, "src", 1, "clk");
    int prev = src;
    for (int i = 0; i < 14; ++i) {
        int hi = b.add(NodeKind::Operator, "hi#" + std::to_string(i + 1), 1, "", "add");
        int lo = b.add(NodeKind::Operator, "lo#" + std::to_string(i + 1), 1, "", "not");
        int join = b.add(NodeKind::Operator, "join#" + std::to_string(i + 1), 1, "", "or");
        b.edge(prev, hi);
        b.edge(prev, lo);
        b.edge(hi, join);
        b.edge(lo, join);
        prev = join;
    }
    int dst = b.add(NodeKind::Register, "dst", 1, "clk");
    b.edge(prev, dst);
    Stdg g = b.finish();

    auto r = enumerate_logical_paths(g, dst);
    REQUIRE(r.is_err());
    CHECK(r.error().kind == PathErrorKind::PathExplosion);

    auto phys = longest_physical_path(g, dst, DelayModel{});
    REQUIRE(phys.is_ok());
    // per stage the worst arm is add (1.0) plus the join or (0.3)
    CHECK(phys.value().delay == doctest::Approx(14 * 1.3));
    CHECK(phys.value().names(g).front() == "src");
    CHECK(phys.value().names(g).back() == "dst");
    CHECK(phys.value().path.nodes.size() == 2 + 14 * 2);
}

TEST_CASE("physical path delay is consistent with reported arrival") {
    std::mt19937 rng(424242);
    DelayModel model;
    for (int t = 0; t < 200; ++t) {
        RandomDag dag = random_dag(rng, 10);
        auto timed = analyze_timing(dag.graph, model, {{"clk", 0.001}});
        REQUIRE(timed.is_ok());
        for (const auto &p : timed.value().paths) {
            if (p.vtype != Vtype::Setup || p.endpoint != "sink") continue;
            auto paths = enumerate_logical_paths(dag.graph, dag.sink);
            REQUIRE(paths.is_ok());
            auto phys = merge_to_physical(dag.graph, paths.value(), model);
            REQUIRE(phys.is_ok());
            CHECK(phys.value().delay == doctest::Approx(p.arrival - model.t_cq).epsilon(1e-9));
        }
    }
}

TEST_CASE("violation context embeds path, block, and excerpts") {
    std::string text =
        "module ctx(input clk, input [7:0] a, output reg [7:0] r_dst);\n"
        "  reg [7:0] r_src;\n"
        "  always @(posedge clk) begin\n"
        "    r_src <= a;\n"
        "    r_dst <= (r_src + 8'd1) + 8'd2;\n"
        "  end\n"
        "endmodule\n";
    auto ast = parse(text, "ctx.v");
    REQUIRE(ast.is_ok());
    auto g = build(ast.value());
    REQUIRE(g.is_ok());
    DelayModel model;
    auto report = analyze_design(g.value(), model, {{"clk", 2.0}});
    REQUIRE(report.is_ok());
    REQUIRE(report.value().paths.size() == 1);

    auto ctxs = build_violation_context(g.value(), report.value(), text, model);
    REQUIRE(ctxs.is_ok());
    REQUIRE(ctxs.value().size() == 1);
    const ViolationContext &ctx = ctxs.value()[0];
    CHECK(ctx.endpoint == "r_dst");
    CHECK(ctx.rendered_path == "r_src -> add#1 -> add#2 -> r_dst");
    CHECK(ctx.violation_block.find("VIOLATION setup") == 0);
    CHECK(ctx.full_source == text);
    // every path node with a source location contributes exactly one excerpt
    CHECK(ctx.path_source_excerpts.size() == ctx.physical_path.path.nodes.size());
    for (const auto &[loc, line] : ctx.path_source_excerpts) {
        CHECK(loc.line >= 1);
        CHECK(!line.empty());
    }
}

TEST_CASE("cdc context runs from source register to destination") {
    std::string text =
        "module cdcm(input clk_a, input clk_b, input d, output reg r_b);\n"
        "  reg r_a;\n"
        "  always @(posedge clk_a) r_a <= d;\n"
        "  always @(posedge clk_b) r_b <= r_a;\n"
        "endmodule\n";
    auto ast = parse(text, "cdcm.v");
    REQUIRE(ast.is_ok());
    auto g = build(ast.value());
    REQUIRE(g.is_ok());
    DelayModel model;
    auto report = analyze_design(g.value(), model, {{"clk_a", 5.0}, {"clk_b", 5.0}});
    REQUIRE(report.is_ok());
    REQUIRE(report.value().cdc.size() == 1);

    auto ctxs = build_violation_context(g.value(), report.value(), text, model);
    REQUIRE(ctxs.is_ok());
    REQUIRE(ctxs.value().size() == 1);
    CHECK(ctxs.value()[0].rendered_path == "r_a -> r_b");
    CHECK(ctxs.value()[0].violation.vtype == Vtype::Cdc);
    CHECK(ctxs.value()[0].violation_block.find("Synchronizer: none") != std::string::npos);
}

TEST_CASE("context order matches report order") {
    std::string text =
        "module two(input clk, input [7:0] a, output reg [7:0] r1, output reg [7:0] r2);\n"
        "  always @(posedge clk) begin\n"
        "    r1 <= (a * a) * a;\n"
        "    r2 <= ((a + 8'd1) + 8'd2) + 8'd3;\n"
        "  end\n"
        "endmodule\n";
    auto ast = parse(text, "two.v");
    REQUIRE(ast.is_ok());
    auto g = build(ast.value());
    REQUIRE(g.is_ok());
    DelayModel model;
    auto report = analyze_design(g.value(), model, {{"clk", 3.0}});
    REQUIRE(report.is_ok());
    REQUIRE(report.value().paths.size() == 2);
    auto ctxs = build_violation_context(g.value(), report.value(), text, model);
    REQUIRE(ctxs.is_ok());
    REQUIRE(ctxs.value().size() == 2);
    CHECK(ctxs.value()[0].endpoint == report.value().paths[0].endpoint);
    CHECK(ctxs.value()[1].endpoint == report.value().paths[1].endpoint);
}
