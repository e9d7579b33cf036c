#ifndef TRIAGE_PROMPTS_HPP
#define TRIAGE_PROMPTS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "triage/kb.hpp"
#include "triage/result.hpp"
#include "triage/taxonomy.hpp"
#include "triage/violation_path.hpp"

namespace triage {

// Verbatim in every repair prompt; extract_code enforces it.
inline constexpr const char *kOutputContract =
    "Respond with exactly one fenced Verilog code block containing the complete corrected "
    "module. Keep the module name and port list unchanged.";

inline constexpr const char *kNoDemoPlaceholder = "(no demonstration available)";

enum class PromptErrorKind { MissingSlot, NoKnowledge, MissingTemplate };

struct PromptError {
    PromptErrorKind kind = PromptErrorKind::MissingSlot;
    std::string name;  // slot or template id
};

struct RepairPrompt {
    std::string text;
    std::string case_id;
    Scenario scenario = Scenario::Unknown;
    std::string template_id;
    std::map<std::string, std::string> slots;  // values used at render time

    std::string slot_or_empty(const std::string &name) const {
        auto it = slots.find(name);
        return it == slots.end() ? "" : it->second;
    }
};

// Skeletons with {slot} placeholders: cause_analysis, repair_setup,
// repair_hold, repair_cdc. Shipped under templates/, with identical built-in
// copies so the tool runs from any directory.
class TemplateStore {
  public:
    static TemplateStore builtin();
    static Result<TemplateStore, PromptError> load(const std::string &dir);

    const std::string *skeleton(const std::string &id) const;

  private:
    std::map<std::string, std::string> skeletons_;
};

const std::vector<std::string> &known_slots();

// True when no "{slot}" marker for a known slot survives in rendered text.
bool fully_rendered(const std::string &text);

Result<RepairPrompt, PromptError> build_cause_prompt(const TemplateStore &store,
                                                     const ViolationContext &ctx,
                                                     const std::string &case_id);

// Skeleton chosen by violation type; an Unknown scenario with a known type
// still selects the type skeleton. The first entry fills the knowledge slots;
// with no entries the strategy slot falls back to the scenario catalog text.
Result<RepairPrompt, PromptError> build_repair_prompt(const TemplateStore &store,
                                                      Scenario scenario,
                                                      const std::vector<KbEntry> &entries,
                                                      const ViolationContext &ctx,
                                                      const std::string &cause_text,
                                                      const std::string &case_id,
                                                      std::optional<Vtype> violation_type);

}  // namespace triage

#endif
