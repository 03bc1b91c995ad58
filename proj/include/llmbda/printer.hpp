#pragma once

#include <string>

#include "llmbda/ast.hpp"
#include "llmbda/conversation.hpp"
#include "llmbda/value.hpp"

namespace llmbda {

/// Canonical surface-syntax rendering of an expression. Deterministic:
/// one canonical form per tree, so the model-determinism assumption is
/// meaningful. Records print fields in source order, strings double-quoted
/// with \n \" \\ \{ escapes.
std::string print_expr(const ExprPtr& e, const LatticeSpec& lattice);

/// Serializes a closed, label-free value form for use as a prompt.
/// Throws std::runtime_error on non-value input.
std::string serialize(const ExprPtr& v, const LatticeSpec& lattice);

/// Human-readable rendering: labels as "{tags}:" prefixes, bottom labels
/// omitted, lambdas printed in full.
std::string pretty(const LabelledValue& v, const LatticeSpec& lattice);
std::string pretty(const ExprPtr& e, const LatticeSpec& lattice);

/// Like pretty but renders a top-level lambda as "fn" (binding echoes).
std::string pretty_binding(const LabelledValue& v, const LatticeSpec& lattice);

/// Conversation rendering, e.g. bot:[("q", "a")].
std::string pretty_conversation(const Conversation& c, const LatticeSpec& lattice);

std::string escape_string(const std::string& s);

}  // namespace llmbda
