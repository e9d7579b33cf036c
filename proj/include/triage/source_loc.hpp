#ifndef TRIAGE_SOURCE_LOC_HPP
#define TRIAGE_SOURCE_LOC_HPP

#include <string>

namespace triage {

// 1-based position of a construct's first token.
struct SourceLoc {
    std::string file;
    int line = 1;
    int column = 1;
};

inline std::string to_string(const SourceLoc &loc) {
    return loc.file + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

}  // namespace triage

#endif
