#ifndef TRIAGE_PRINTER_HPP
#define TRIAGE_PRINTER_HPP

#include <string>

#include "triage/ast.hpp"

namespace triage {

// One canonical layout; parse(print_source(ast)) is structurally equal to ast.
std::string print_source(const AstModule &m);

std::string print_expr(const Expr &e);

}  // namespace triage

#endif
