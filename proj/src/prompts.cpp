#include "triage/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace triage {

namespace {

constexpr const char *kCauseSkeleton =
    "You are analyzing a static timing analysis violation in a Verilog design.\n"
    "\n"
    "== Design ==\n"
    "{design_code}\n"
    "\n"
    "== Violation ==\n"
    "{violation_block}\n"
    "\n"
    "== Critical path ==\n"
    "{physical_path}\n"
    "\n"
    "Explain the root cause of this violation in plain prose. Name the signals and\n"
    "clocks involved, give the path depth in logic levels, and state slack or delay\n"
    "values with explicit numbers (for example -1.200 ns). State whether this is a\n"
    "setup violation, a hold violation, or a clock-domain-crossing problem, and if\n"
    "data crosses clock domains, say whether a synchronizer is present. Do not\n"
    "propose a fix yet.\n";

constexpr const char *kRepairSetupSkeleton =
    "You are repairing a setup timing violation in a Verilog design: data arrives\n"
    "at the endpoint register later than the clock period allows.\n"
    "\n"
    "== Design ==\n"
    "{design_code}\n"
    "\n"
    "== Violation ==\n"
    "{violation_block}\n"
    "\n"
    "== Critical path ==\n"
    "{physical_path}\n"
    "\n"
    "== Root cause analysis ==\n"
    "{cause_text}\n"
    "\n"
    "== Scenario ==\n"
    "{scenario}\n"
    "\n"
    "== Repair strategy ==\n"
    "{repair_strategy}\n"
    "\n"
    "== Demonstration: faulty ==\n"
    "{demo_before}\n"
    "\n"
    "== Demonstration: repaired ==\n"
    "{demo_after}\n"
    "\n"
    "Shorten the failing combinational path, keeping the design's behavior over\n"
    "its ports equivalent up to added pipeline latency.\n"
    "{output_contract}\n";

constexpr const char *kRepairHoldSkeleton =
    "You are repairing a hold timing violation in a Verilog design: data changes\n"
    "before the endpoint register's hold window has elapsed.\n"
    "\n"
    "== Design ==\n"
    "{design_code}\n"
    "\n"
    "== Violation ==\n"
    "{violation_block}\n"
    "\n"
    "== Critical path ==\n"
    "{physical_path}\n"
    "\n"
    "== Root cause analysis ==\n"
    "{cause_text}\n"
    "\n"
    "== Scenario ==\n"
    "{scenario}\n"
    "\n"
    "== Repair strategy ==\n"
    "{repair_strategy}\n"
    "\n"
    "== Demonstration: faulty ==\n"
    "{demo_before}\n"
    "\n"
    "== Demonstration: repaired ==\n"
    "{demo_after}\n"
    "\n"
    "Add combinational delay on the failing path without changing its logic\n"
    "function.\n"
    "{output_contract}\n";

constexpr const char *kRepairCdcSkeleton =
    "You are repairing a clock-domain-crossing problem in a Verilog design: a\n"
    "signal is captured in a clock domain other than the one that launches it.\n"
    "\n"
    "== Design ==\n"
    "{design_code}\n"
    "\n"
    "== Violation ==\n"
    "{violation_block}\n"
    "\n"
    "== Crossing path ==\n"
    "{physical_path}\n"
    "\n"
    "== Root cause analysis ==\n"
    "{cause_text}\n"
    "\n"
    "== Scenario ==\n"
    "{scenario}\n"
    "\n"
    "== Repair strategy ==\n"
    "{repair_strategy}\n"
    "\n"
    "== Demonstration: faulty ==\n"
    "{demo_before}\n"
    "\n"
    "== Demonstration: repaired ==\n"
    "{demo_after}\n"
    "\n"
    "Synchronize the crossing: single-bit signals need two chained destination-\n"
    "domain flops; multi-bit data needs a handshake where the destination loads\n"
    "only under a synchronized control signal.\n"
    "{output_contract}\n";

const char *type_skeleton_id(Vtype v) {
    switch (v) {
        case Vtype::Setup: return "repair_setup";
        case Vtype::Hold: return "repair_hold";
        case Vtype::Cdc: return "repair_cdc";
    }
    return "repair_setup";
}

std::string type_level_strategy(Vtype v) {
    switch (v) {
        case Vtype::Setup:
            return "Reduce combinational delay into the endpoint register: split long "
                   "operations across pipeline stages or simplify the failing logic.";
        case Vtype::Hold:
            return "Add combinational delay on the failing short path without changing "
                   "its logic function.";
        case Vtype::Cdc:
            return "Insert a proper cross-domain transfer: a two-flop synchronizer for "
                   "single-bit signals, a synchronized handshake for multi-bit data.";
    }
    return "";
}

Result<std::string, PromptError> render(const std::string &skeleton,
                                        const std::map<std::string, std::string> &slots) {
    std::string out = skeleton;
    for (const auto &name : known_slots()) {
        std::string marker = "{" + name + "}";
        if (out.find(marker) == std::string::npos) continue;
        auto it = slots.find(name);
        if (it == slots.end() || it->second.empty())
            return Result<std::string, PromptError>::err({PromptErrorKind::MissingSlot, name});
        size_t pos = 0;
        while ((pos = out.find(marker, pos)) != std::string::npos) {
            out.replace(pos, marker.size(), it->second);
            pos += it->second.size();
        }
    }
    return Result<std::string, PromptError>::ok(std::move(out));
}

}  // namespace

const std::vector<std::string> &known_slots() {
    static const std::vector<std::string> slots = {
        "design_code", "violation_block", "physical_path",  "cause_text", "scenario",
        "repair_strategy", "demo_before", "demo_after", "output_contract",
    };
    return slots;
}

bool fully_rendered(const std::string &text) {
    for (const auto &name : known_slots()) {
        if (text.find("{" + name + "}") != std::string::npos) return false;
    }
    return true;
}

TemplateStore TemplateStore::builtin() {
    TemplateStore store;
    store.skeletons_["cause_analysis"] = kCauseSkeleton;
    store.skeletons_["repair_setup"] = kRepairSetupSkeleton;
    store.skeletons_["repair_hold"] = kRepairHoldSkeleton;
    store.skeletons_["repair_cdc"] = kRepairCdcSkeleton;
    return store;
}

Result<TemplateStore, PromptError> TemplateStore::load(const std::string &dir) {
    TemplateStore store;
    for (const char *id : {"cause_analysis", "repair_setup", "repair_hold", "repair_cdc"}) {
        fs::path path = fs::path(dir) / (std::string(id) + ".txt");
        std::ifstream f(path, std::ios::binary);
        if (!f)
            return Result<TemplateStore, PromptError>::err(
                {PromptErrorKind::MissingTemplate, path.string()});
        std::ostringstream ss;
        ss << f.rdbuf();
        store.skeletons_[id] = ss.str();
    }
    return Result<TemplateStore, PromptError>::ok(std::move(store));
}

const std::string *TemplateStore::skeleton(const std::string &id) const {
    auto it = skeletons_.find(id);
    return it == skeletons_.end() ? nullptr : &it->second;
}

Result<RepairPrompt, PromptError> build_cause_prompt(const TemplateStore &store,
                                                     const ViolationContext &ctx,
                                                     const std::string &case_id) {
    const std::string *skeleton = store.skeleton("cause_analysis");
    if (!skeleton)
        return Result<RepairPrompt, PromptError>::err(
            {PromptErrorKind::MissingTemplate, "cause_analysis"});

    RepairPrompt prompt;
    prompt.case_id = case_id;
    prompt.template_id = "cause_analysis";
    prompt.slots["design_code"] = ctx.full_source;
    prompt.slots["violation_block"] = ctx.violation_block;
    prompt.slots["physical_path"] = ctx.rendered_path;
    auto text = render(*skeleton, prompt.slots);
    if (text.is_err()) return Result<RepairPrompt, PromptError>::err(text.error());
    prompt.text = text.take();
    return Result<RepairPrompt, PromptError>::ok(std::move(prompt));
}

Result<RepairPrompt, PromptError> build_repair_prompt(const TemplateStore &store,
                                                      Scenario scenario,
                                                      const std::vector<KbEntry> &entries,
                                                      const ViolationContext &ctx,
                                                      const std::string &cause_text,
                                                      const std::string &case_id,
                                                      std::optional<Vtype> violation_type) {
    std::optional<Vtype> vtype = scenario_vtype(scenario);
    if (!vtype && !entries.empty()) vtype = entries.front().violation_type;
    if (!vtype) vtype = violation_type;
    if (!vtype)
        return Result<RepairPrompt, PromptError>::err({PromptErrorKind::NoKnowledge, ""});

    const std::string id = type_skeleton_id(*vtype);
    const std::string *skeleton = store.skeleton(id);
    if (!skeleton)
        return Result<RepairPrompt, PromptError>::err({PromptErrorKind::MissingTemplate, id});

    RepairPrompt prompt;
    prompt.case_id = case_id;
    prompt.scenario = scenario;
    prompt.template_id = id;
    prompt.slots["design_code"] = ctx.full_source;
    prompt.slots["violation_block"] = ctx.violation_block;
    prompt.slots["physical_path"] = ctx.rendered_path;
    prompt.slots["cause_text"] = cause_text;
    prompt.slots["scenario"] = to_string(scenario);
    if (!entries.empty()) {
        prompt.slots["repair_strategy"] = entries.front().repair_strategy;
        prompt.slots["demo_before"] = entries.front().demo_before;
        prompt.slots["demo_after"] = entries.front().demo_after;
    } else {
        prompt.slots["repair_strategy"] = scenario != Scenario::Unknown
                                              ? scenario_description(scenario)
                                              : type_level_strategy(*vtype);
        prompt.slots["demo_before"] = kNoDemoPlaceholder;
        prompt.slots["demo_after"] = kNoDemoPlaceholder;
    }
    prompt.slots["output_contract"] = kOutputContract;

    auto text = render(*skeleton, prompt.slots);
    if (text.is_err()) return Result<RepairPrompt, PromptError>::err(text.error());
    prompt.text = text.take();
    return Result<RepairPrompt, PromptError>::ok(std::move(prompt));
}

}  // namespace triage
