#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "triage/config.hpp"
#include "triage/injector.hpp"
#include "triage/kb.hpp"
#include "triage/parser.hpp"
#include "triage/pipeline.hpp"
#include "triage/printer.hpp"
#include "triage/report_io.hpp"
#include "triage/stdg.hpp"
#include "triage/violation_path.hpp"

namespace fs = std::filesystem;
using namespace triage;

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string &path, bool &ok) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        ok = false;
        return "";
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    ok = true;
    return ss.str();
}

bool write_file(const std::string &path, const std::string &content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
    return static_cast<bool>(f);
}

struct CommonOpts {
    std::string config_path;
    std::string kb_dir = "kb";
    std::string templates_dir = "templates";
    std::string llm_spec;        // http | mock:kb_golden | mock:echo | mock:scripted
    std::string endpoint;
    std::string scripted_path;
    std::string log_path;
};

bool load_app_config(const CommonOpts &opts, AppConfig &cfg) {
    if (!opts.config_path.empty()) {
        auto loaded = load_config(opts.config_path);
        if (loaded.is_err()) {
            std::cerr << "error: config " << loaded.error().file << ": "
                      << loaded.error().message << "\n";
            return false;
        }
        cfg = loaded.take();
    }
    if (!opts.llm_spec.empty()) {
        if (opts.llm_spec == "http") {
            cfg.llm.mode = LlmMode::Http;
        } else if (opts.llm_spec == "mock:kb_golden") {
            cfg.llm.mode = LlmMode::Mock;
            cfg.llm.mock_policy = MockPolicy::KbGolden;
        } else if (opts.llm_spec == "mock:echo") {
            cfg.llm.mode = LlmMode::Mock;
            cfg.llm.mock_policy = MockPolicy::Echo;
        } else if (opts.llm_spec == "mock:scripted") {
            cfg.llm.mode = LlmMode::Mock;
            cfg.llm.mock_policy = MockPolicy::Scripted;
        } else {
            std::cerr << "error: bad --llm value '" << opts.llm_spec << "'\n";
            return false;
        }
    }
    if (!opts.endpoint.empty()) cfg.llm.endpoint = opts.endpoint;
    if (!opts.scripted_path.empty()) cfg.llm.scripted_path = opts.scripted_path;
    return true;
}

TemplateStore load_templates(const std::string &dir) {
    auto loaded = TemplateStore::load(dir);
    if (loaded.is_ok()) return loaded.take();
    return TemplateStore::builtin();
}

int cmd_analyze(const std::string &design, const std::string &constraints_path,
                const CommonOpts &opts, bool dump, const std::string &out_path) {
    AppConfig cfg;
    if (!load_app_config(opts, cfg)) return kExitUsage;

    bool ok = false;
    std::string source = read_file(design, ok);
    if (!ok) {
        std::cerr << "error: cannot read " << design << "\n";
        return kExitUsage;
    }
    std::string ctext = read_file(constraints_path, ok);
    if (!ok) {
        std::cerr << "error: cannot read " << constraints_path << "\n";
        return kExitUsage;
    }
    auto constraints = parse_constraints(ctext);
    if (constraints.is_err()) {
        std::cerr << "error: " << constraints_path << ":" << constraints.error().line << ": "
                  << constraints.error().reason << "\n";
        return kExitUsage;
    }
    auto ast = parse(source, design);
    if (ast.is_err()) {
        std::cerr << "error: " << to_string(ast.error()) << "\n";
        return kExitFailure;
    }
    auto g = build(ast.value());
    if (g.is_err()) {
        std::cerr << "error: " << g.error().message << "\n";
        return kExitFailure;
    }
    if (dump) std::cout << dump_graph(g.value());
    auto report = analyze_design(g.value(), cfg.delay_model, constraints.value());
    if (report.is_err()) {
        std::cerr << "error: " << report.error().message << "\n";
        return kExitFailure;
    }
    std::string text = emit_report(report.value());
    if (!out_path.empty()) {
        if (!write_file(out_path, text)) {
            std::cerr << "error: cannot write " << out_path << "\n";
            return kExitUsage;
        }
    } else {
        std::cout << text;
    }
    return report.value().empty() ? kExitSuccess : kExitFailure;
}

int cmd_inject(const std::string &seed_path, const std::string &spec_path, bool all,
               const std::string &seeds_dir, const std::string &out_dir,
               const CommonOpts &opts) {
    AppConfig cfg;
    if (!load_app_config(opts, cfg)) return kExitUsage;

    std::vector<InjectedCase> cases;
    if (all) {
        auto built = build_standard_dataset(seeds_dir);
        if (built.is_err()) {
            std::cerr << "error: " << built.error().message << "\n";
            return kExitFailure;
        }
        cases = built.take();
    } else {
        bool ok = false;
        std::string seed_text = read_file(seed_path, ok);
        if (!ok) {
            std::cerr << "error: cannot read " << seed_path << "\n";
            return kExitUsage;
        }
        std::string spec_text = read_file(spec_path, ok);
        if (!ok) {
            std::cerr << "error: cannot read " << spec_path << "\n";
            return kExitUsage;
        }
        auto spec = parse_injection_spec(spec_text);
        if (spec.is_err()) {
            std::cerr << "error: spec: " << spec.error().message << "\n";
            return kExitUsage;
        }
        auto ast = parse(seed_text, seed_path);
        if (ast.is_err()) {
            std::cerr << "error: " << to_string(ast.error()) << "\n";
            return kExitFailure;
        }
        auto c = inject(ast.value(), fs::path(seed_path).stem().string(), spec.value());
        if (c.is_err()) {
            std::cerr << "error: inject: " << c.error().message << "\n";
            return kExitFailure;
        }
        cases.push_back(c.take());
    }

    std::vector<std::string> ids;
    for (const auto &c : cases) {
        auto valid = validate_case(c, cfg.delay_model);
        if (valid.is_err()) {
            std::cerr << "error: case " << c.id << " failed validation: "
                      << valid.error().detail << "\n";
            return kExitFailure;
        }
        auto written = write_case(out_dir, c);
        if (written.is_err()) {
            std::cerr << "error: " << written.error().message << "\n";
            return kExitFailure;
        }
        ids.push_back(c.id);
        std::cout << "wrote " << out_dir << "/" << c.id << "\n";
    }
    if (all) {
        auto m = write_manifest(out_dir, ids);
        if (m.is_err()) {
            std::cerr << "error: " << m.error().message << "\n";
            return kExitFailure;
        }
        std::cout << "wrote " << out_dir << "/manifest.json (" << ids.size() << " cases)\n";
    }
    return kExitSuccess;
}

int cmd_debug(const std::string &case_dir, const CommonOpts &opts,
              const std::string &write_repaired) {
    AppConfig cfg;
    if (!load_app_config(opts, cfg)) return kExitUsage;

    auto kb = load_and_validate(opts.kb_dir);
    if (kb.is_err()) {
        std::cerr << "error: kb: " << to_string(kb.error()) << "\n";
        return kExitUsage;
    }
    auto c = load_case(case_dir);
    if (c.is_err()) {
        std::cerr << "error: " << c.error().message << "\n";
        return kExitUsage;
    }

    LlmGateway gateway(cfg.llm);
    if (!opts.log_path.empty()) gateway.set_log_path(opts.log_path);
    gateway.register_golden(c.value().id, c.value().golden_source);

    PipelineEnv env{cfg, &kb.value(), load_templates(opts.templates_dir), &gateway};
    CaseResult result = run_debug_case(c.value(), env);

    std::cout << "case " << result.case_id << ": "
              << (result.success ? "repaired" : "failed") << " after " << result.attempts
              << " attempt(s)\n";
    for (size_t i = 0; i < result.attempt_details.size(); ++i) {
        const AttemptRecord &a = result.attempt_details[i];
        std::cout << "  attempt " << (i + 1) << ": scenario=" << to_string(a.scenario)
                  << " cleared=" << (a.cleared ? "yes" : "no")
                  << " new_violations=" << (a.new_violations ? "yes" : "no");
        if (!a.failure_reason.empty()) std::cout << " reason=\"" << a.failure_reason << "\"";
        std::cout << "\n";
    }
    if (result.success && !write_repaired.empty()) {
        if (!write_file(write_repaired, result.repaired_source)) {
            std::cerr << "error: cannot write " << write_repaired << "\n";
            return kExitUsage;
        }
        std::cout << "wrote " << write_repaired << "\n";
    }
    return result.success ? kExitSuccess : kExitFailure;
}

int cmd_eval(const std::string &dataset_dir, const CommonOpts &opts,
             const std::string &out_dir) {
    AppConfig cfg;
    if (!load_app_config(opts, cfg)) return kExitUsage;

    auto kb = load_and_validate(opts.kb_dir, /*require_complete=*/true);
    if (kb.is_err()) {
        std::cerr << "error: kb: " << to_string(kb.error()) << "\n";
        return kExitUsage;
    }
    LlmGateway gateway(cfg.llm);
    if (!opts.log_path.empty()) gateway.set_log_path(opts.log_path);

    PipelineEnv env{cfg, &kb.value(), load_templates(opts.templates_dir), &gateway};
    auto summary = evaluate(dataset_dir, env);
    if (summary.is_err()) {
        std::cerr << "error: " << summary.error().message << "\n";
        return kExitUsage;
    }
    std::cout << eval_summary_table(summary.value());
    if (!out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (!write_file((fs::path(out_dir) / "summary.json").string(),
                        eval_summary_json(summary.value()))) {
            std::cerr << "error: cannot write summary.json\n";
            return kExitUsage;
        }
        for (const auto &r : summary.value().case_results) {
            if (!r.success) continue;
            fs::create_directories(fs::path(out_dir) / r.case_id, ec);
            write_file((fs::path(out_dir) / r.case_id / "repaired.v").string(),
                       r.repaired_source);
        }
        std::cout << "wrote " << out_dir << "/summary.json\n";
    }
    return summary.value().successes == summary.value().trials ? kExitSuccess : kExitFailure;
}

int cmd_kb_validate(const std::string &dir) {
    auto kb = load_and_validate(dir, /*require_complete=*/true);
    if (kb.is_err()) {
        std::cerr << "invalid: " << to_string(kb.error()) << "\n";
        return kExitFailure;
    }
    std::cout << "ok: " << kb.value().entries.size() << " entries";
    for (Scenario s : all_scenarios()) {
        size_t n = 0;
        for (const auto &e : kb.value().entries)
            if (e.subscenario == s) ++n;
        std::cout << " " << to_string(s) << "=" << n;
    }
    std::cout << "\n";
    return kExitSuccess;
}

int cmd_classify(const std::string &cause_file, const CommonOpts &opts) {
    AppConfig cfg;
    if (!load_app_config(opts, cfg)) return kExitUsage;
    bool ok = false;
    std::string text = read_file(cause_file, ok);
    if (!ok) {
        std::cerr << "error: cannot read " << cause_file << "\n";
        return kExitUsage;
    }
    if (text.empty()) {
        std::cerr << "error: cause text is empty\n";
        return kExitUsage;
    }
    std::cout << to_string(identify_scenario(text, cfg.classifier)) << "\n";
    return kExitSuccess;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"RTL timing violation triage and repair pipeline"};
    app.require_subcommand(1);

    CommonOpts opts;
    app.add_option("--config", opts.config_path, "JSON config file");

    // analyze
    std::string design, constraints_path, out_path;
    bool dump_graph_flag = false;
    auto *analyze_cmd = app.add_subcommand("analyze", "Run timing analysis on a design");
    analyze_cmd->add_option("design", design, "Verilog source")->required();
    analyze_cmd->add_option("--constraints", constraints_path, "clock constraints file")
        ->required();
    analyze_cmd->add_flag("--dump-graph", dump_graph_flag, "print the dependency graph");
    analyze_cmd->add_option("-o,--out", out_path, "write the report here instead of stdout");

    // inject
    std::string seed_path, spec_path, seeds_dir = "seeds", inject_out = "dataset";
    bool inject_all = false;
    auto *inject_cmd = app.add_subcommand("inject", "Inject a timing fault into a seed design");
    inject_cmd->add_option("--seed", seed_path, "seed Verilog file");
    inject_cmd->add_option("--spec", spec_path, "injection spec JSON");
    inject_cmd->add_flag("--all", inject_all, "build the standard dataset from the seed corpus");
    inject_cmd->add_option("--seeds", seeds_dir, "seed corpus directory (with --all)");
    inject_cmd->add_option("-o,--out", inject_out, "dataset output directory");

    // debug
    std::string case_dir, write_repaired;
    auto *debug_cmd = app.add_subcommand("debug", "Debug one injected case");
    debug_cmd->add_option("case_dir", case_dir, "case directory")->required();
    debug_cmd->add_option("--write-repaired", write_repaired, "write the repaired module here");

    // eval
    std::string dataset_dir, eval_out;
    auto *eval_cmd = app.add_subcommand("eval", "Evaluate the fix rate over a dataset");
    eval_cmd->add_option("dataset_dir", dataset_dir, "dataset directory")->required();
    eval_cmd->add_option("--out", eval_out, "write summary.json and repaired sources here");

    // kb validate
    auto *kb_cmd = app.add_subcommand("kb", "Knowledge base utilities");
    std::string kb_validate_dir;
    auto *kb_validate_cmd = kb_cmd->add_subcommand("validate", "Validate a knowledge base");
    kb_validate_cmd->add_option("dir", kb_validate_dir, "kb directory")->required();

    // classify
    std::string cause_file;
    auto *classify_cmd = app.add_subcommand("classify", "Classify a violation cause text");
    classify_cmd->add_option("--cause", cause_file, "cause description text file")->required();

    for (CLI::App *cmd : {debug_cmd, eval_cmd}) {
        cmd->add_option("--kb", opts.kb_dir, "knowledge base directory");
        cmd->add_option("--templates", opts.templates_dir, "prompt template directory");
        cmd->add_option("--llm", opts.llm_spec,
                        "http | mock:kb_golden | mock:echo | mock:scripted");
        cmd->add_option("--endpoint", opts.endpoint, "chat-completions endpoint URL");
        cmd->add_option("--scripted", opts.scripted_path, "scripted mock response file");
        cmd->add_option("--log", opts.log_path, "append chat exchanges to this JSONL file");
    }

    CLI11_PARSE(app, argc, argv);

    if (analyze_cmd->parsed())
        return cmd_analyze(design, constraints_path, opts, dump_graph_flag, out_path);
    if (inject_cmd->parsed()) {
        if (!inject_all && (seed_path.empty() || spec_path.empty())) {
            std::cerr << "error: inject needs --seed and --spec (or --all)\n";
            return kExitUsage;
        }
        return cmd_inject(seed_path, spec_path, inject_all, seeds_dir, inject_out, opts);
    }
    if (debug_cmd->parsed()) return cmd_debug(case_dir, opts, write_repaired);
    if (eval_cmd->parsed()) return cmd_eval(dataset_dir, opts, eval_out);
    if (kb_validate_cmd->parsed()) return cmd_kb_validate(kb_validate_dir);
    if (classify_cmd->parsed()) return cmd_classify(cause_file, opts);
    std::cerr << app.help();
    return kExitUsage;
}
