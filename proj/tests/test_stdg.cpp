#include <doctest.h>

#include "support.hpp"
#include "triage/parser.hpp"
#include "triage/report_io.hpp"
#include "triage/stdg.hpp"
#include "triage/timing.hpp"

using namespace triage;

namespace {

Stdg build_ok(const std::string &text) {
    auto ast = parse(text, "<test>");
    if (ast.is_err()) FAIL("parse failed: ", to_string(ast.error()));
    auto g = build(ast.value());
    if (g.is_err()) FAIL("build failed: ", g.error().message);
    return g.take();
}

bool has_edge(const Stdg &g, const std::string &src, const std::string &dst, EdgeKind kind) {
    int s = g.require(src), d = g.require(dst);
    if (s < 0 || d < 0) return false;
    for (const auto &e : g.edges)
        if (e.src == s && e.dst == d && e.kind == kind) return true;
    return false;
}

}  // namespace

TEST_CASE("register chain builds data edges and clock domains") {
    Stdg g = build_ok(
        "module m(input clk, input a, output reg r2);\n"
        "  reg r1;\n"
        "  always @(posedge clk) begin r1 <= a; r2 <= r1; end\n"
        "endmodule\n");
    const StdgNode *r1 = g.find("r1");
    const StdgNode *r2 = g.find("r2");
    REQUIRE(r1 != nullptr);
    REQUIRE(r2 != nullptr);
    CHECK(r1->kind == NodeKind::Register);
    CHECK(r2->kind == NodeKind::Register);
    CHECK(*r1->clock_domain == "clk");
    CHECK(*r2->clock_domain == "clk");
    CHECK(has_edge(g, "a", "r1", EdgeKind::Data));
    CHECK(has_edge(g, "r1", "r2", EdgeKind::Data));
}

TEST_CASE("guarded assignment adds a control edge") {
    Stdg g = build_ok(
        "module m(input clk, input en, input d, output reg r);\n"
        "  always @(posedge clk) if (en) r <= d;\n"
        "endmodule\n");
    CHECK(has_edge(g, "en", "r", EdgeKind::Control));
    CHECK(has_edge(g, "d", "r", EdgeKind::Data));
    CHECK_FALSE(has_edge(g, "en", "r", EdgeKind::Data));
}

TEST_CASE("pure wiring has no registers or control edges") {
    Stdg g = build_ok("module m(input x, output y); assign y = x; endmodule");
    int regs = 0, controls = 0;
    for (const auto &n : g.nodes)
        if (n.kind == NodeKind::Register) ++regs;
    for (const auto &e : g.edges)
        if (e.kind == EdgeKind::Control) ++controls;
    CHECK(regs == 0);
    CHECK(controls == 0);
    CHECK(has_edge(g, "x", "y", EdgeKind::Data));
}

TEST_CASE("node count equals signals plus operators plus constants") {
    // 4 ports + 1 net + add + const = 7 nodes
    Stdg g = build_ok(
        "module m(input clk, input [3:0] a, input [3:0] b, output reg [3:0] q);\n"
        "  wire [3:0] s;\n"
        "  assign s = a + b;\n"
        "  always @(posedge clk) if (s == 4'd3) q <= s;\n"
        "endmodule\n");
    // signals: clk a b q s = 5; operators: add, eq; constants: 4'd3
    CHECK(g.nodes.size() == 8);
    const StdgNode *add = g.find("add#1");
    REQUIRE(add != nullptr);
    CHECK(add->kind == NodeKind::Operator);
    CHECK(g.find("eq#1") != nullptr);
    CHECK(g.find("const#1") != nullptr);
    // operator in-degree >= 1
    for (const auto &n : g.nodes) {
        if (n.kind != NodeKind::Operator) continue;
        CHECK(g.preds[static_cast<size_t>(n.id)].size() >= 1);
    }
}

TEST_CASE("case selector guards every armed target") {
    Stdg g = build_ok(
        "module m(input clk, input [1:0] sel, input a, input b, output reg q);\n"
        "  always @(posedge clk) begin\n"
        "    case (sel)\n"
        "      2'd0: q <= a;\n"
        "      default: q <= b;\n"
        "    endcase\n"
        "  end\n"
        "endmodule\n");
    CHECK(has_edge(g, "sel", "q", EdgeKind::Control));
    CHECK(has_edge(g, "a", "q", EdgeKind::Data));
    CHECK(has_edge(g, "b", "q", EdgeKind::Data));
}

TEST_CASE("compound condition guards through its root operator") {
    Stdg g = build_ok(
        "module m(input clk, input en, input ok, input d, output reg q);\n"
        "  always @(posedge clk) if (en && ok) q <= d;\n"
        "endmodule\n");
    CHECK(has_edge(g, "logand#1", "q", EdgeKind::Control));
    CHECK(has_edge(g, "en", "logand#1", EdgeKind::Data));
}

TEST_CASE("multiple drivers across blocks is an error") {
    auto ast = parse(
        "module m(input clk, input a, input b, output reg q);\n"
        "  always @(posedge clk) q <= a;\n"
        "  always @(posedge clk) q <= b;\n"
        "endmodule\n",
        "<test>");
    REQUIRE(ast.is_ok());
    auto g = build(ast.value());
    REQUIRE(g.is_err());
    CHECK(g.error().kind == BuildErrorKind::MultipleDrivers);
}

TEST_CASE("assign plus always on the same signal is an error") {
    auto ast = parse(
        "module m(input clk, input a, output reg q);\n"
        "  always @(posedge clk) q <= a;\n"
        "endmodule\n",
        "<test>");
    REQUIRE(ast.is_ok());
    // port q is a register driven by the block; add a conflicting assign via a
    // second parse (assign to reg is caught by the parser, so use a wire)
    auto ast2 = parse(
        "module m(input a, input b, output y);\n"
        "  assign y = a;\n"
        "  assign y = b;\n"
        "endmodule\n",
        "<test>");
    REQUIRE(ast2.is_ok());
    auto g2 = build(ast2.value());
    REQUIRE(g2.is_err());
    CHECK(g2.error().kind == BuildErrorKind::MultipleDrivers);
}

TEST_CASE("combinational loop is rejected") {
    auto ast = parse(
        "module m(input a, output x);\n"
        "  wire u;\n"
        "  wire v;\n"
        "  assign u = v & a;\n"
        "  assign v = u | a;\n"
        "  assign x = v;\n"
        "endmodule\n",
        "<test>");
    REQUIRE(ast.is_ok());
    auto g = build(ast.value());
    REQUIRE(g.is_err());
    CHECK(g.error().kind == BuildErrorKind::CombinationalLoop);
    CHECK(g.error().cycle.size() >= 2);
}

TEST_CASE("register self-feedback through logic is fine") {
    Stdg g = build_ok(
        "module m(input clk, output reg [3:0] cnt);\n"
        "  always @(posedge clk) cnt <= cnt + 4'd1;\n"
        "endmodule\n");
    CHECK(has_edge(g, "cnt", "add#1", EdgeKind::Data));
    CHECK(has_edge(g, "add#1", "cnt", EdgeKind::Data));
}

TEST_CASE("instance pins get dotted nodes with inferred direction") {
    Stdg g = build_ok(
        "module top(input clk, input d, output q);\n"
        "  wire mid;\n"
        "  stage u1 (.clk(clk), .din(d), .dout(mid));\n"
        "  stage u2 (.clk(clk), .din(mid), .dout(q));\n"
        "endmodule\n");
    REQUIRE(g.find("u1.dout") != nullptr);
    // mid is undriven elsewhere: u1.dout drives it, u2.din consumes it
    CHECK(has_edge(g, "u1.dout", "mid", EdgeKind::Data));
    CHECK(has_edge(g, "mid", "u2.din", EdgeKind::Data));
    CHECK(has_edge(g, "d", "u1.din", EdgeKind::Data));
}

TEST_CASE("annotate attaches violations to register endpoints") {
    Stdg g = build_ok(
        "module m(input clk, input a, output reg r_dst);\n"
        "  always @(posedge clk) r_dst <= a;\n"
        "endmodule\n");

    TimingReport report;
    TimingPath p;
    p.vtype = Vtype::Setup;
    p.startpoint = "a";
    p.endpoint = "r_dst";
    p.slack = -1.2;
    p.node_sequence = {"a", "r_dst"};
    report.paths.push_back(p);

    auto annotated = annotate(g, report);
    REQUIRE(annotated.is_ok());
    const StdgNode *r = annotated.value().find("r_dst");
    REQUIRE(r->violation.has_value());
    CHECK(r->violation->vtype == Vtype::Setup);
    CHECK(*r->violation->slack == doctest::Approx(-1.2));
    CHECK(r->violation->report_startpoint == "a");

    SUBCASE("idempotent for the same report") {
        auto again = annotate(annotated.value(), report);
        REQUIRE(again.is_ok());
        CHECK(again.value().find("r_dst")->violation->vtype == Vtype::Setup);
    }
}

TEST_CASE("annotate rejects unknown and non-register endpoints") {
    Stdg g = build_ok(
        "module m(input clk, input a, output reg r);\n"
        "  wire w;\n"
        "  assign w = a;\n"
        "  always @(posedge clk) r <= w;\n"
        "endmodule\n");

    TimingReport report;
    TimingPath p;
    p.vtype = Vtype::Setup;
    p.endpoint = "ghost";
    p.slack = -0.5;
    report.paths.push_back(p);
    auto r1 = annotate(g, report);
    REQUIRE(r1.is_err());
    CHECK(r1.error().kind == AnnotateErrorKind::UnknownEndpoint);
    CHECK(r1.error().endpoint == "ghost");

    report.paths[0].endpoint = "w";
    auto r2 = annotate(g, report);
    REQUIRE(r2.is_err());
    CHECK(r2.error().kind == AnnotateErrorKind::KindMismatch);
}

TEST_CASE("annotate commutes across disjoint endpoints") {
    Stdg g = build_ok(
        "module m(input clk, input a, input b, output reg r1, output reg r2);\n"
        "  always @(posedge clk) begin r1 <= a; r2 <= b; end\n"
        "endmodule\n");
    TimingReport one, two;
    TimingPath p1;
    p1.vtype = Vtype::Setup;
    p1.endpoint = "r1";
    p1.startpoint = "a";
    p1.slack = -0.5;
    one.paths.push_back(p1);
    TimingPath p2;
    p2.vtype = Vtype::Hold;
    p2.endpoint = "r2";
    p2.startpoint = "b";
    p2.slack = -0.1;
    two.paths.push_back(p2);

    auto ab = annotate(annotate(g, one).take(), two).take();
    auto ba = annotate(annotate(g, two).take(), one).take();
    for (const auto &name : {"r1", "r2"}) {
        const StdgNode *x = ab.find(name);
        const StdgNode *y = ba.find(name);
        REQUIRE(x->violation.has_value());
        REQUIRE(y->violation.has_value());
        CHECK(x->violation->vtype == y->violation->vtype);
        CHECK(x->violation->report_startpoint == y->violation->report_startpoint);
    }
}

TEST_CASE("empty report leaves the graph unchanged") {
    Stdg g = build_ok(
        "module m(input clk, input a, output reg r);\n"
        "  always @(posedge clk) r <= a;\n"
        "endmodule\n");
    size_t nodes_before = g.nodes.size();
    size_t edges_before = g.edges.size();
    auto annotated = annotate(g, TimingReport{});
    REQUIRE(annotated.is_ok());
    CHECK(annotated.value().nodes.size() == nodes_before);
    CHECK(annotated.value().edges.size() == edges_before);
    for (const auto &n : annotated.value().nodes) CHECK_FALSE(n.violation.has_value());
}

TEST_CASE("graph dump lists nodes and adjacency") {
    Stdg g = build_ok(
        "module m(input clk, input a, output reg r);\n"
        "  always @(posedge clk) r <= a;\n"
        "endmodule\n");
    std::string dump = dump_graph(g);
    CHECK(dump.find("r kind=register") != std::string::npos);
    CHECK(dump.find("-> r [data]") != std::string::npos);
}
