// ============================================================================
// parse.hpp — concrete syntax for systems
// ============================================================================
//
// Grammar (whitespace-insensitive, `#` starts a line comment):
//
//   System    ::= "void" | Item ("o" Item)*
//   Item      ::= [INT "*"] Membrane "[" System "]"
//   Membrane  ::= "0" | Guard ("|" Guard)*
//   Guard     ::= Prefix ["." GuardBody]
//   GuardBody ::= "0" | Guard | "(" Membrane ")"
//   Prefix    ::= ("phago"|"exo"|"coexo") "<" NAME ">"
//               | ("cophago"|"pino") "<" NAME ">" "(" Membrane ")"
//   NAME      ::= [A-Za-z_][A-Za-z0-9_]*
//   INT       ::= [0-9]+
//
// Arity is enforced: cophago/pino require the parenthesized membrane
// argument, the other prefixes must not have one.
//
// ============================================================================

#pragma once

#include "branesim/ast.hpp"

#include <stdexcept>
#include <string>

namespace brane {

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(int line_, int column_, const std::string& message)
        : std::runtime_error(message), line(line_), column(column_) {}
};

// Parses a full system; throws ParseError on malformed input.
SystemPtr parse_system(const std::string& text);

// Parses a bare membrane (used by tests); same error reporting.
MembranePtr parse_membrane(const std::string& text);

}  // namespace brane
