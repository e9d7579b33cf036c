#include "triage/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "triage/classifier.hpp"
#include "triage/parser.hpp"
#include "triage/report_io.hpp"
#include "triage/stdg.hpp"
#include "triage/violation_path.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace triage {

double fix_rate(long successes, long trials) {
    return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
}

std::string format_percent(long successes, long trials) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * fix_rate(successes, trials));
    return buf;
}

namespace {

// (vtype, endpoint) pairs present in a report.
std::set<std::pair<int, std::string>> violation_keys(const TimingReport &report) {
    std::set<std::pair<int, std::string>> keys;
    for (const auto &p : report.paths)
        keys.insert({static_cast<int>(p.vtype), p.endpoint});
    for (const auto &c : report.cdc)
        keys.insert({static_cast<int>(Vtype::Cdc), c.destination});
    return keys;
}

std::string describe_key(const std::pair<int, std::string> &key) {
    return std::string(to_string(static_cast<Vtype>(key.first))) + " at '" + key.second + "'";
}

struct VerifyOutcome {
    bool ok = false;
    bool cleared = false;
    bool new_violations = false;
    std::string reason;
};

VerifyOutcome verify_repair(const std::string &repaired, const AstModule &faulty_ast,
                            const InjectedCase &c, const DelayModel &model,
                            const std::set<std::pair<int, std::string>> &original_keys) {
    VerifyOutcome out;
    auto ast = parse(repaired, c.id + "/repaired");
    if (ast.is_err()) {
        out.reason = "repaired code does not parse: " + to_string(ast.error());
        return out;
    }

    const auto &fp = faulty_ast.ports;
    const auto &rp = ast.value().ports;
    bool ports_ok = fp.size() == rp.size();
    for (size_t i = 0; ports_ok && i < fp.size(); ++i) {
        ports_ok = fp[i].name == rp[i].name && fp[i].dir == rp[i].dir &&
                   fp[i].msb == rp[i].msb && fp[i].lsb == rp[i].lsb;
    }
    if (!ports_ok) {
        out.reason = "port list changed";
        return out;
    }

    auto g = build(ast.value());
    if (g.is_err()) {
        out.reason = "repaired design does not build: " + g.error().message;
        return out;
    }
    auto report = analyze_design(g.value(), model, c.constraints);
    if (report.is_err()) {
        out.reason = "repaired design not analyzable: " + report.error().message;
        return out;
    }

    auto keys = violation_keys(report.value());
    std::pair<int, std::string> target = {static_cast<int>(c.expected.vtype),
                                          c.expected.endpoint};
    if (keys.count(target)) {
        out.reason = "violation persists";
        return out;
    }
    out.cleared = true;
    for (const auto &key : keys) {
        if (!original_keys.count(key)) {
            out.new_violations = true;
            out.reason = "new violation introduced: " + describe_key(key);
            return out;
        }
    }
    out.ok = true;
    return out;
}

CaseResult fail_case(const std::string &id, const std::string &reason) {
    CaseResult r;
    r.case_id = id;
    r.success = false;
    r.attempts = 0;
    r.attempt_details.push_back({Scenario::Unknown, false, false, reason});
    return r;
}

}  // namespace

CaseResult run_debug_case(const InjectedCase &c, PipelineEnv &env) {
    CaseResult result;
    result.case_id = c.id;

    DelayModel model = env.config.delay_model;
    apply_delay_overrides(model, c.delay_overrides);

    auto ast = parse(c.faulty_source, c.id + "/faulty.v");
    if (ast.is_err()) return fail_case(c.id, "faulty does not parse: " + to_string(ast.error()));
    auto graph = build(ast.value());
    if (graph.is_err()) return fail_case(c.id, "faulty does not build: " + graph.error().message);
    auto report = analyze_design(graph.value(), model, c.constraints);
    if (report.is_err()) return fail_case(c.id, "analysis failed: " + report.error().message);
    if (report.value().empty())
        return fail_case(c.id, "no violation detected in faulty design");
    auto original_keys = violation_keys(report.value());

    auto annotated = annotate(graph.take(), report.value());
    if (annotated.is_err())
        return fail_case(c.id, "annotate failed for endpoint '" + annotated.error().endpoint + "'");

    auto contexts = build_violation_context(annotated.value(), report.value(), c.faulty_source,
                                            model);
    if (contexts.is_err())
        return fail_case(c.id, "path extraction failed: " + contexts.error().message);

    // debug the context matching the case's expected violation when present
    const ViolationContext *target_ctx = nullptr;
    for (const auto &ctx : contexts.value()) {
        if (ctx.endpoint == c.expected.endpoint && ctx.violation.vtype == c.expected.vtype)
            target_ctx = &ctx;
    }
    if (!target_ctx) target_ctx = &contexts.value().front();
    Vtype vtype = target_ctx->violation.vtype;

    auto cause_prompt = build_cause_prompt(env.templates, *target_ctx, c.id);
    if (cause_prompt.is_err())
        return fail_case(c.id, "cause prompt: missing slot '" + cause_prompt.error().name + "'");
    auto cause = env.gateway->complete(cause_prompt.value());
    if (cause.is_err()) return fail_case(c.id, "llm error: " + to_string(cause.error()));

    Scenario scenario = identify_scenario(cause.value(), env.config.classifier);
    std::vector<KbEntry> entries = retrieve(*env.kb, vtype, scenario);
    if (entries.empty() && scenario != Scenario::Unknown)
        entries = retrieve(*env.kb, vtype, Scenario::Unknown);  // breadth fallback

    std::string feedback;
    for (int attempt = 1; attempt <= env.config.pipeline.max_attempts; ++attempt) {
        result.attempts = attempt;
        AttemptRecord record;
        record.scenario = scenario;

        std::string cause_text = cause.value();
        if (!feedback.empty())
            cause_text += "\n\nPrevious repair attempt failed verification: " + feedback;

        auto prompt = build_repair_prompt(env.templates, scenario, entries, *target_ctx,
                                          cause_text, c.id, vtype);
        if (prompt.is_err()) {
            record.failure_reason = "repair prompt: missing slot '" + prompt.error().name + "'";
            result.attempt_details.push_back(record);
            feedback = record.failure_reason;
            continue;
        }
        auto response = env.gateway->complete(prompt.value());
        if (response.is_err()) {
            record.failure_reason = "llm error: " + to_string(response.error());
            result.attempt_details.push_back(record);
            feedback = record.failure_reason;
            continue;
        }
        auto code = extract_code(response.value());
        if (code.is_err()) {
            record.failure_reason = code.error().kind == ExtractErrorKind::NoCodeBlock
                                        ? "no code block in response"
                                        : "repaired code does not parse: " + code.error().detail;
            result.attempt_details.push_back(record);
            feedback = record.failure_reason;
            continue;
        }

        VerifyOutcome verdict =
            verify_repair(code.value(), ast.value(), c, model, original_keys);
        record.cleared = verdict.cleared;
        record.new_violations = verdict.new_violations;
        record.failure_reason = verdict.ok ? "" : verdict.reason;
        result.attempt_details.push_back(record);
        if (verdict.ok) {
            result.success = true;
            result.repaired_source = code.value();
            break;
        }
        feedback = verdict.reason;
    }
    return result;
}

Result<EvalSummary, EvalError> evaluate(const std::string &dataset_dir, PipelineEnv &env) {
    using R = Result<EvalSummary, EvalError>;
    auto manifest = load_manifest(dataset_dir);
    if (manifest.is_err()) return R::err({manifest.error().message});

    std::vector<InjectedCase> cases;
    for (const auto &id : manifest.value()) {
        auto c = load_case((fs::path(dataset_dir) / id).string());
        if (c.is_err()) return R::err({c.error().message});
        if (c.value().id != id)
            return R::err({"manifest id '" + id + "' does not match case id '" + c.value().id +
                           "'"});
        cases.push_back(c.take());
    }

    int reps = env.config.pipeline.repetitions;
    struct Task {
        const InjectedCase *c;
        size_t slot;
    };
    std::vector<Task> tasks;
    std::vector<CaseResult> results(cases.size() * static_cast<size_t>(reps));
    for (size_t i = 0; i < cases.size(); ++i) {
        env.gateway->register_golden(cases[i].id, cases[i].golden_source);
        for (int r = 0; r < reps; ++r)
            tasks.push_back({&cases[i], i * static_cast<size_t>(reps) + static_cast<size_t>(r)});
    }

    int workers = std::max(1, env.config.pipeline.workers);
    if (workers == 1) {
        for (const auto &t : tasks) results[t.slot] = run_debug_case(*t.c, env);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                results[tasks[i].slot] = run_debug_case(*tasks[i].c, env);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto &t : pool) t.join();
    }

    EvalSummary summary;
    summary.case_results = results;
    for (Scenario s : all_scenarios()) {
        for (Difficulty d : {Difficulty::Simple, Difficulty::Complex}) {
            GroupStats group;
            group.subscenario = s;
            group.difficulty = d;
            for (size_t i = 0; i < cases.size(); ++i) {
                if (cases[i].subscenario != s || cases[i].difficulty != d) continue;
                for (int r = 0; r < reps; ++r) {
                    const CaseResult &res =
                        results[i * static_cast<size_t>(reps) + static_cast<size_t>(r)];
                    ++group.trials;
                    if (res.success) ++group.successes;
                }
            }
            if (group.trials > 0) summary.groups.push_back(group);
        }
    }
    for (const auto &g : summary.groups) {
        summary.successes += g.successes;
        summary.trials += g.trials;
    }
    if (summary.trials != static_cast<long>(tasks.size()))
        return R::err({"accounting mismatch: trials != cases x repetitions"});
    return R::ok(std::move(summary));
}

std::string eval_summary_json(const EvalSummary &summary) {
    ordered_json groups = ordered_json::array();
    for (const auto &g : summary.groups) {
        groups.push_back(ordered_json{{"subscenario", to_string(g.subscenario)},
                                      {"difficulty", to_string(g.difficulty)},
                                      {"successes", g.successes},
                                      {"trials", g.trials},
                                      {"fix_rate", format_percent(g.successes, g.trials)}});
    }
    ordered_json cases = ordered_json::array();
    for (const auto &r : summary.case_results) {
        cases.push_back(ordered_json{{"id", r.case_id},
                                     {"success", r.success},
                                     {"attempts", r.attempts},
                                     {"failure_reason", r.last_failure_reason()}});
    }
    ordered_json j = {
        {"groups", groups},
        {"overall", ordered_json{{"successes", summary.successes},
                                 {"trials", summary.trials},
                                 {"fix_rate", format_percent(summary.successes, summary.trials)}}},
        {"cases", cases},
    };
    return j.dump(2) + "\n";
}

std::string eval_summary_table(const EvalSummary &summary) {
    std::ostringstream os;
    char line[128];
    std::snprintf(line, sizeof line, "%-18s %-9s %15s %10s\n", "subscenario", "difficulty",
                  "success/trials", "fix rate");
    os << line;
    for (const auto &g : summary.groups) {
        std::string frac = std::to_string(g.successes) + "/" + std::to_string(g.trials);
        std::snprintf(line, sizeof line, "%-18s %-9s %15s %10s\n", to_string(g.subscenario),
                      to_string(g.difficulty), frac.c_str(),
                      format_percent(g.successes, g.trials).c_str());
        os << line;
    }
    std::string frac = std::to_string(summary.successes) + "/" + std::to_string(summary.trials);
    std::snprintf(line, sizeof line, "%-18s %-9s %15s %10s\n", "overall", "-", frac.c_str(),
                  format_percent(summary.successes, summary.trials).c_str());
    os << line;
    return os.str();
}

}  // namespace triage
