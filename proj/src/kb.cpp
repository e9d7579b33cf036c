#include "triage/kb.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "triage/parser.hpp"
#include "triage/stdg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace triage {

std::string to_string(const KbError &e) {
    std::string kind;
    switch (e.kind) {
        case KbErrorKind::Io: kind = "io error"; break;
        case KbErrorKind::SchemaError: kind = "schema error"; break;
        case KbErrorKind::TaxonomyError: kind = "taxonomy error"; break;
        case KbErrorKind::DemoInvalid: kind = "invalid demo"; break;
        case KbErrorKind::DuplicateId: kind = "duplicate id"; break;
        case KbErrorKind::Incomplete: kind = "incomplete"; break;
    }
    std::string out = kind;
    if (!e.file.empty()) out += " [" + e.file + "]";
    if (!e.id.empty()) out += " (" + e.id + ")";
    if (!e.field.empty()) out += " field '" + e.field + "'";
    if (!e.reason.empty()) out += ": " + e.reason;
    return out;
}

std::vector<Scenario> Kb::missing_scenarios() const {
    std::vector<Scenario> missing;
    for (Scenario s : all_scenarios()) {
        bool found = false;
        for (const auto &e : entries)
            if (e.subscenario == s) found = true;
        if (!found) missing.push_back(s);
    }
    return missing;
}

DemoCheck check_demo(const std::string &source, Vtype vtype, const DelayModel &model,
                     double period_ns) {
    DemoCheck out;
    auto ast = parse(source, "<demo>");
    if (ast.is_err()) {
        out.detail = to_string(ast.error());
        return out;
    }
    auto g = build(ast.value());
    if (g.is_err()) {
        out.detail = g.error().message;
        return out;
    }
    std::vector<ClockConstraint> constraints;
    for (const auto &clk : g.value().clocks) constraints.push_back({clk, period_ns});
    auto report = analyze_design(g.value(), model, constraints);
    if (report.is_err()) {
        out.detail = report.error().message;
        return out;
    }
    out.parses = true;
    for (const auto &p : report.value().paths) {
        ++out.violations_total;
        if (p.vtype == vtype) ++out.violations_of_type;
    }
    for (const auto &c : report.value().cdc) {
        (void)c;
        ++out.violations_total;
        if (vtype == Vtype::Cdc) ++out.violations_of_type;
    }
    return out;
}

namespace {

Result<KbEntry, KbError> load_entry(const fs::path &path) {
    auto err = [&](KbErrorKind kind, const std::string &field, const std::string &id,
                   const std::string &reason) {
        return Result<KbEntry, KbError>::err({kind, path.string(), field, id, reason});
    };

    std::ifstream f(path);
    if (!f) return err(KbErrorKind::Io, "", "", "cannot open file");
    json j;
    try {
        f >> j;
    } catch (const json::exception &e) {
        return err(KbErrorKind::SchemaError, "", "", e.what());
    }
    if (!j.is_object()) return err(KbErrorKind::SchemaError, "", "", "entry is not an object");

    KbEntry entry;
    const char *string_fields[] = {"id",           "violation_type", "subscenario",
                                   "description",  "repair_strategy", "demo_before",
                                   "demo_after"};
    for (const char *field : string_fields) {
        if (!j.contains(field) || !j[field].is_string())
            return err(KbErrorKind::SchemaError, field, "", "missing or non-string field");
    }
    if (!j.contains("tags") || !j["tags"].is_array())
        return err(KbErrorKind::SchemaError, "tags", "", "missing or non-array field");
    for (const auto &t : j["tags"]) {
        if (!t.is_string())
            return err(KbErrorKind::SchemaError, "tags", "", "tag is not a string");
        entry.tags.push_back(t.get<std::string>());
    }

    entry.id = j["id"].get<std::string>();
    entry.description = j["description"].get<std::string>();
    entry.repair_strategy = j["repair_strategy"].get<std::string>();
    entry.demo_before = j["demo_before"].get<std::string>();
    entry.demo_after = j["demo_after"].get<std::string>();

    std::string vtype_str = j["violation_type"].get<std::string>();
    auto vtype = vtype_from_string(vtype_str);
    if (!vtype)
        return err(KbErrorKind::SchemaError, "violation_type", entry.id,
                   "unknown type '" + vtype_str + "'");
    entry.violation_type = *vtype;

    std::string sub_str = j["subscenario"].get<std::string>();
    auto sub = scenario_from_string(sub_str);
    if (!sub || *sub == Scenario::Unknown)
        return err(KbErrorKind::TaxonomyError, "", entry.id,
                   "unknown subscenario '" + sub_str + "'");
    entry.subscenario = *sub;

    if (scenario_vtype(entry.subscenario) != entry.violation_type)
        return err(KbErrorKind::TaxonomyError, "", entry.id,
                   "subscenario '" + sub_str + "' does not belong to type '" + vtype_str + "'");

    std::string prefix = vtype_str + "." + sub_str + ".";
    if (entry.id.rfind(prefix, 0) != 0)
        return err(KbErrorKind::SchemaError, "id", entry.id,
                   "id must start with '" + prefix + "'");
    return Result<KbEntry, KbError>::ok(std::move(entry));
}

std::optional<KbError> validate_demos(const KbEntry &entry, const std::string &file) {
    DelayModel model;
    if (entry.violation_type == Vtype::Hold) model.t_h = kKbHoldValidationTh;

    DemoCheck before = check_demo(entry.demo_before, entry.violation_type, model, kKbDemoPeriodNs);
    if (!before.parses)
        return KbError{KbErrorKind::DemoInvalid, file, "", entry.id,
                       "demo_before: " + before.detail};
    if (before.violations_of_type == 0)
        return KbError{KbErrorKind::DemoInvalid, file, "", entry.id,
                       "demo_before does not exhibit a " +
                           std::string(to_string(entry.violation_type)) + " violation"};

    DemoCheck after = check_demo(entry.demo_after, entry.violation_type, model, kKbDemoPeriodNs);
    if (!after.parses)
        return KbError{KbErrorKind::DemoInvalid, file, "", entry.id,
                       "demo_after: " + after.detail};
    if (after.violations_of_type > 0)
        return KbError{KbErrorKind::DemoInvalid, file, "", entry.id,
                       "demo_after still exhibits a " +
                           std::string(to_string(entry.violation_type)) + " violation"};
    return std::nullopt;
}

}  // namespace

Result<Kb, KbError> load_and_validate(const std::string &dir, bool require_complete) {
    if (!fs::exists(dir))
        return Result<Kb, KbError>::err(
            {KbErrorKind::Io, dir, "", "", "knowledge base directory does not exist"});

    std::vector<fs::path> files;
    for (const auto &e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());

    Kb kb;
    std::set<std::string> seen;
    for (const auto &path : files) {
        auto entry = load_entry(path);
        if (entry.is_err()) return Result<Kb, KbError>::err(entry.error());
        if (!seen.insert(entry.value().id).second)
            return Result<Kb, KbError>::err(
                {KbErrorKind::DuplicateId, path.string(), "", entry.value().id, ""});
        if (auto demo_err = validate_demos(entry.value(), path.string()))
            return Result<Kb, KbError>::err(std::move(*demo_err));
        kb.entries.push_back(entry.take());
    }
    std::sort(kb.entries.begin(), kb.entries.end(),
              [](const KbEntry &a, const KbEntry &b) { return a.id < b.id; });

    if (require_complete) {
        auto missing = kb.missing_scenarios();
        if (!missing.empty()) {
            std::string names;
            for (Scenario s : missing) {
                if (!names.empty()) names += ", ";
                names += to_string(s);
            }
            return Result<Kb, KbError>::err(
                {KbErrorKind::Incomplete, dir, "", "", "no entries for: " + names});
        }
    }
    return Result<Kb, KbError>::ok(std::move(kb));
}

std::vector<KbEntry> retrieve(const Kb &kb, Vtype violation_type, Scenario subscenario) {
    std::vector<KbEntry> out;
    for (const auto &e : kb.entries) {
        if (e.violation_type != violation_type) continue;
        if (subscenario == Scenario::Unknown || e.subscenario == subscenario) out.push_back(e);
    }
    return out;
}

}  // namespace triage
