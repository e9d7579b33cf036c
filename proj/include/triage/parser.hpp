#ifndef TRIAGE_PARSER_HPP
#define TRIAGE_PARSER_HPP

#include <string>

#include "triage/ast.hpp"
#include "triage/result.hpp"
#include "triage/source_loc.hpp"

namespace triage {

enum class ParseErrorKind {
    Syntax,
    UnresolvedIdentifier,
    UnsupportedConstruct,
    BlockingInSequential,
    NonblockingInCombinational,
    ProceduralAssignToWire,
    ContinuousAssignToReg,
    DuplicateDeclaration,
};

struct ParseError {
    ParseErrorKind kind = ParseErrorKind::Syntax;
    SourceLoc loc;
    std::string message;  // for UnsupportedConstruct, names the construct
};

std::string to_string(const ParseError &e);

// Parses one module in the synthesizable Verilog-2001 subset.
// Parameter references and constant range expressions are folded to integers.
Result<AstModule, ParseError> parse(const std::string &text, const std::string &file);

// Width of an expression under the context-free width rules (declared widths,
// zero-extension, 1-bit comparison/logical/reduction results).
int expr_width(const AstModule &m, const Expr &e);

}  // namespace triage

#endif
