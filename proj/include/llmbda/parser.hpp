#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "llmbda/ast.hpp"
#include "llmbda/lattice.hpp"

namespace llmbda {

struct ParseError : std::runtime_error {
    ParseError(std::string msg, SourceLoc where, bool eof)
        : std::runtime_error(std::move(msg)), loc(where), at_eof(eof) {}
    SourceLoc loc;
    bool at_eof;  // true when more input could fix the parse (REPL continuation)
};

/// One top-level program item: either a binding (`let x = e` with no `in`)
/// or a bare expression.
struct Item {
    std::optional<std::string> let_name;
    ExprPtr expr;
    SourceLoc loc;
};

/// Parses a program: a sequence of items. `#` starts a line comment.
/// Label literals are resolved against the session lattice.
std::vector<Item> parse_program(const std::string& text, const LatticeSpec& lattice,
                                const std::string& origin = "<input>");

/// Parses a single expression (whole input must be consumed).
ExprPtr parse_expression(const std::string& text, const LatticeSpec& lattice,
                         const std::string& origin = "<input>");

/// Closed definitions the response parser may expand by name.
using PreludeDefs = std::map<std::string, ExprPtr>;

/// Parses a model response as a single value form. Returns an expression of
/// shape [true, v] on success or [false, "diagnostic"] on failure; never
/// throws on bad input. Prelude constants are expanded to their definitions;
/// label and test syntax is rejected (responses must be label-free).
ExprPtr parse_response(const std::string& text, const LatticeSpec& lattice, const PreludeDefs& prelude);

}  // namespace llmbda
