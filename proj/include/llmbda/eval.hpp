#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "llmbda/ast.hpp"
#include "llmbda/conversation.hpp"
#include "llmbda/model.hpp"
#include "llmbda/parser.hpp"
#include "llmbda/value.hpp"

namespace llmbda {

enum class ErrorKind {
    NoHighUpgrade,
    ApplyNonFunction,
    UnboundVariable,
    TypeMismatch,
    IndexOutOfBounds,
    MissingField,
    DivideByZero,
    AssertionFailed,
    ModelError,
    StuckTerm,  // small-step engine only
};

const char* error_kind_name(ErrorKind k);

struct EvalSuccess {
    Conversation conv;
    LabelledValue value;
};
struct EvalFailure {
    ErrorKind kind;
    std::string message;
    std::optional<SourceLoc> loc;
};
struct FuelExhausted {};

using EvalOutcome = std::variant<EvalSuccess, EvalFailure, FuelExhausted>;

const EvalSuccess* success_of(const EvalOutcome& o);
const EvalFailure* failure_of(const EvalOutcome& o);
bool fuel_exhausted(const EvalOutcome& o);

/// Called after every successful big-step judgement with
/// (pc, C, C', V); the confinement checker hangs off this.
using JudgementHook =
    std::function<void(Label pc, const Conversation& before, const Conversation& after, const LabelledValue& value)>;

struct EvalConfig {
    const LatticeSpec* lattice = nullptr;
    ModelPtr model;
    std::int64_t fuel = 100000;  // rule applications, derived forms included
    const PreludeDefs* prelude = nullptr;  // expansions for parse_response
    JudgementHook hook;
    bool trace = false;
    /// Test-only: lets the evaluator interpret forked terms so differential
    /// tests can start mid-fork. Never exposed to users.
    bool allow_forked_terms = false;
};

/// The big-step judgement pc |- C, e => C', V with fuel bounding.
/// e must be closed. Runs on a large-stack thread.
EvalOutcome eval(Label pc, const Conversation& conv, const ExprPtr& e, const EvalConfig& cfg);

/// Top level: bottom pc, empty bottom-labelled conversation.
EvalOutcome eval_top(const ExprPtr& e, const EvalConfig& cfg);

/// One generation step: extends the history with (p, r) where r is the
/// model's completion of the flattened history plus p, and parses r.
/// Returns the extended entries and the parse result ([ok, v] shaped).
std::pair<std::vector<Message>, ExprPtr> generate(const std::vector<Message>& entries, const std::string& prompt,
                                                  const EvalConfig& cfg);

}  // namespace llmbda
