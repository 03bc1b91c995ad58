#pragma once

#include <optional>

#include "llmbda/ast.hpp"
#include "llmbda/conversation.hpp"
#include "llmbda/eval.hpp"

namespace llmbda {

/// A small-step machine state: the conversation plus an extended expression
/// (expressions may contain forked nodes while stepping).
struct StepState {
    Conversation conv;
    ExprPtr expr;
};

/// True for value terms: literals, lambdas, arrays/records of value terms,
/// possibly under label chains.
bool is_value_term(const ExprPtr& e);

/// Collapses the outer label chain of a term: returns (joined label, payload).
std::pair<Label, ExprPtr> collapse_labels(const ExprPtr& e, const LatticeSpec& lattice);

/// Label equivalence: equal after joining every maximal label chain and
/// dropping bottom labels, recursively.
bool label_equiv(const ExprPtr& a, const ExprPtr& b, const LatticeSpec& lattice);
/// The normal form used by label_equiv.
ExprPtr normalize_labels(const ExprPtr& e, const LatticeSpec& lattice);

/// Observational equality of labelled values: equal payloads under equal
/// effective labels, where an element's effective label joins its ancestors
/// (extraction joins the chain either way, so representations that differ
/// only in where the labels sit are the same value).
bool values_observationally_equal(const LabelledValue& a, const LabelledValue& b, const LatticeSpec& lattice);

/// Performs one redex contraction at the leftmost evaluation context, with
/// the pc raised under label nodes. Returns nullopt when the expression is a
/// (labelled) value. Stuck terms and side-condition violations throw the
/// corresponding failure out of run_small.
std::optional<StepState> step(const StepState& state, Label pc, const EvalConfig& cfg);

/// Iterates step from (bottom-labelled empty conversation, bot:e) until a
/// labelled value, a stuck state, or fuel exhaustion.
EvalOutcome run_small(const ExprPtr& e, const EvalConfig& cfg);
/// Same, but starting from an existing conversation (script sessions).
EvalOutcome run_small_from(const Conversation& conv, const ExprPtr& e, const EvalConfig& cfg);

enum class DiffVerdict { Agree, Disagree, BothCutOff };

struct DiffResult {
    DiffVerdict verdict;
    std::string details;  // set when the engines disagree
};

/// Differential check of the big-step/small-step correspondence: both
/// engines must succeed with label-equivalent values and identical
/// conversations, or fail in the same class. Fuel exhaustion on either side
/// is BothCutOff (excluded from pass/fail).
DiffResult differential_check(const ExprPtr& e, const EvalConfig& cfg_big, const EvalConfig& cfg_small);

}  // namespace llmbda
