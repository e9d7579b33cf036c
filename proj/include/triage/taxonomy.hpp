#ifndef TRIAGE_TAXONOMY_HPP
#define TRIAGE_TAXONOMY_HPP

#include <optional>
#include <string>
#include <vector>

#include "triage/stdg.hpp"

namespace triage {

// The six violation subscenarios, keyed Violation Type -> Subscenario.
enum class Scenario {
    LongCombChain,
    DeepMux,
    LowPipeStage,
    ShortLogicPath,
    SingleBitTrans,
    MultiBitsTrans,
    Unknown,
};

inline const char *to_string(Scenario s) {
    switch (s) {
        case Scenario::LongCombChain: return "long_comb_chain";
        case Scenario::DeepMux: return "deep_mux";
        case Scenario::LowPipeStage: return "low_pipe_stage";
        case Scenario::ShortLogicPath: return "short_logic_path";
        case Scenario::SingleBitTrans: return "single_bit_trans";
        case Scenario::MultiBitsTrans: return "multi_bits_trans";
        case Scenario::Unknown: return "unknown";
    }
    return "unknown";
}

inline std::optional<Scenario> scenario_from_string(const std::string &s) {
    if (s == "long_comb_chain") return Scenario::LongCombChain;
    if (s == "deep_mux") return Scenario::DeepMux;
    if (s == "low_pipe_stage") return Scenario::LowPipeStage;
    if (s == "short_logic_path") return Scenario::ShortLogicPath;
    if (s == "single_bit_trans") return Scenario::SingleBitTrans;
    if (s == "multi_bits_trans") return Scenario::MultiBitsTrans;
    if (s == "unknown") return Scenario::Unknown;
    return std::nullopt;
}

inline std::optional<Vtype> scenario_vtype(Scenario s) {
    switch (s) {
        case Scenario::LongCombChain:
        case Scenario::DeepMux:
        case Scenario::LowPipeStage:
            return Vtype::Setup;
        case Scenario::ShortLogicPath:
            return Vtype::Hold;
        case Scenario::SingleBitTrans:
        case Scenario::MultiBitsTrans:
            return Vtype::Cdc;
        case Scenario::Unknown:
            return std::nullopt;
    }
    return std::nullopt;
}

inline std::vector<Scenario> scenarios_of(Vtype v) {
    switch (v) {
        case Vtype::Setup:
            return {Scenario::LongCombChain, Scenario::DeepMux, Scenario::LowPipeStage};
        case Vtype::Hold:
            return {Scenario::ShortLogicPath};
        case Vtype::Cdc:
            return {Scenario::SingleBitTrans, Scenario::MultiBitsTrans};
    }
    return {};
}

inline std::vector<Scenario> all_scenarios() {
    return {Scenario::LongCombChain,  Scenario::DeepMux,        Scenario::LowPipeStage,
            Scenario::ShortLogicPath, Scenario::SingleBitTrans, Scenario::MultiBitsTrans};
}

// Catalog description of each subscenario's mechanism; used as the fallback
// repair-strategy text when the knowledge base has no matching entry.
inline const char *scenario_description(Scenario s) {
    switch (s) {
        case Scenario::LongCombChain:
            return "Too many combinational logic stages or excessive delay causes data to "
                   "arrive at the destination register later than the clock cycle allows.";
        case Scenario::DeepMux:
            return "Multi-level nested multiplexers create long selection delay paths, "
                   "causing data propagation times to exceed clock cycle constraints.";
        case Scenario::LowPipeStage:
            return "Complex operations cannot be completed within a single clock cycle but "
                   "the current design lacks sufficient pipeline stages.";
        case Scenario::ShortLogicPath:
            return "The combinational logic delay is too small, causing data to change "
                   "before sampling is completed in the target register.";
        case Scenario::SingleBitTrans:
            return "Single-bit signals are transmitted directly between clock domains "
                   "without proper synchronizers.";
        case Scenario::MultiBitsTrans:
            return "Multi-bit data is transferred directly between clock domains without "
                   "appropriate cross-domain transfer mechanisms.";
        case Scenario::Unknown:
            return "The violation mechanism could not be classified.";
    }
    return "";
}

}  // namespace triage

#endif
