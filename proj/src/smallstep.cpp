#include "llmbda/smallstep.hpp"

#include "llmbda/printer.hpp"
#include "llmbda/util.hpp"

namespace llmbda {

namespace {

// Thrown out of the stepper for stuck terms, side-condition violations, and
// model errors; run_small converts it into an EvalOutcome.
struct StepFailure {
    EvalFailure failure;
};

[[noreturn]] void stuck(const std::string& msg, const ExprPtr& e) {
    std::optional<SourceLoc> loc;
    if (e && e->loc.valid()) loc = e->loc;
    throw StepFailure{EvalFailure{ErrorKind::StuckTerm, msg, loc}};
}

}  // namespace

bool is_value_term(const ExprPtr& e) {
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, LitNode> || std::is_same_v<T, LambdaNode>) {
                return true;
            } else if constexpr (std::is_same_v<T, LabeledNode>) {
                return is_value_term(x.body);
            } else if constexpr (std::is_same_v<T, ArrayNode>) {
                for (const auto& el : x.elements)
                    if (!is_value_term(el)) return false;
                return true;
            } else if constexpr (std::is_same_v<T, RecordNode>) {
                for (const auto& [_, v] : x.fields)
                    if (!is_value_term(v)) return false;
                return true;
            } else {
                return false;
            }
        },
        e->node);
}

std::pair<Label, ExprPtr> collapse_labels(const ExprPtr& e, const LatticeSpec& lattice) {
    Label label = lattice.bot();
    ExprPtr cur = e;
    while (const auto* l = as<LabeledNode>(cur)) {
        label = lattice.join(label, l->label);
        cur = l->body;
    }
    return {label, cur};
}

ExprPtr normalize_labels(const ExprPtr& e, const LatticeSpec& lattice) {
    if (!e) return e;
    if (as<LabeledNode>(e)) {
        auto [label, payload] = collapse_labels(e, lattice);
        ExprPtr inner = normalize_labels(payload, lattice);
        // The payload cannot itself normalize to a label chain: collapse ate
        // the whole chain and normalization below never creates a top-level
        // Labeled node.
        if (label == lattice.bot()) return inner;
        return make_expr(LabeledNode{label, inner}, e->loc);
    }
    return std::visit(
        [&](const auto& x) -> ExprPtr {
            using T = std::decay_t<decltype(x)>;
            auto rec = [&](const ExprPtr& sub) { return normalize_labels(sub, lattice); };
            if constexpr (std::is_same_v<T, VarNode> || std::is_same_v<T, ClearNode> || std::is_same_v<T, LitNode> ||
                          std::is_same_v<T, LabeledNode>) {
                return e;  // label chains were handled above
            } else if constexpr (std::is_same_v<T, LambdaNode>) {
                return make_expr(LambdaNode{x.param, rec(x.body)}, e->loc);
            } else if constexpr (std::is_same_v<T, AppNode>) {
                return make_expr(AppNode{rec(x.fn), rec(x.arg)}, e->loc);
            } else if constexpr (std::is_same_v<T, PromptNode>) {
                return make_expr(PromptNode{rec(x.arg)}, e->loc);
            } else if constexpr (std::is_same_v<T, ForkNode>) {
                return make_expr(ForkNode{rec(x.body)}, e->loc);
            } else if constexpr (std::is_same_v<T, TestNode>) {
                return make_expr(TestNode{rec(x.body), x.label}, e->loc);
            } else if constexpr (std::is_same_v<T, LetNode>) {
                return make_expr(LetNode{x.name, rec(x.bound), rec(x.body)}, e->loc);
            } else if constexpr (std::is_same_v<T, IfNode>) {
                return make_expr(IfNode{rec(x.cond), rec(x.then_branch), rec(x.else_branch)}, e->loc);
            } else if constexpr (std::is_same_v<T, ArrayNode>) {
                std::vector<ExprPtr> els;
                els.reserve(x.elements.size());
                for (const auto& el : x.elements) els.push_back(rec(el));
                return make_expr(ArrayNode{std::move(els)}, e->loc);
            } else if constexpr (std::is_same_v<T, IndexNode>) {
                return make_expr(IndexNode{rec(x.array), rec(x.index)}, e->loc);
            } else if constexpr (std::is_same_v<T, RecordNode>) {
                std::vector<std::pair<std::string, ExprPtr>> fields;
                fields.reserve(x.fields.size());
                for (const auto& [k, v] : x.fields) fields.emplace_back(k, rec(v));
                return make_expr(RecordNode{std::move(fields)}, e->loc);
            } else if constexpr (std::is_same_v<T, FieldNode>) {
                return make_expr(FieldNode{rec(x.record), x.name}, e->loc);
            } else if constexpr (std::is_same_v<T, FieldUpdateNode>) {
                return make_expr(FieldUpdateNode{rec(x.record), x.name, rec(x.value)}, e->loc);
            } else if constexpr (std::is_same_v<T, BinOpNode>) {
                return make_expr(BinOpNode{x.op, rec(x.lhs), rec(x.rhs)}, e->loc);
            } else if constexpr (std::is_same_v<T, NotNode>) {
                return make_expr(NotNode{rec(x.arg)}, e->loc);
            } else if constexpr (std::is_same_v<T, IsFnNode>) {
                return make_expr(IsFnNode{rec(x.arg)}, e->loc);
            } else if constexpr (std::is_same_v<T, InterpNode>) {
                InterpNode out;
                out.parts.reserve(x.parts.size());
                for (const auto& p : x.parts) out.parts.push_back({p.text, p.expr ? rec(p.expr) : nullptr});
                return make_expr(std::move(out), e->loc);
            } else if constexpr (std::is_same_v<T, AssertNode>) {
                return make_expr(AssertNode{x.label, rec(x.arg)}, e->loc);
            } else if constexpr (std::is_same_v<T, StrongTestNode>) {
                return make_expr(StrongTestNode{rec(x.arg), x.label}, e->loc);
            } else if constexpr (std::is_same_v<T, ForkedNode>) {
                return make_expr(ForkedNode{x.saved, rec(x.body)}, e->loc);
            }
        },
        e->node);
}

bool label_equiv(const ExprPtr& a, const ExprPtr& b, const LatticeSpec& lattice) {
    return equal(normalize_labels(a, lattice), normalize_labels(b, lattice));
}

namespace {

bool values_equal_under(const LabelledValue& a, const LabelledValue& b, Label acc_a, Label acc_b,
                        const LatticeSpec& lattice) {
    Label la = lattice.join(acc_a, a.label);
    Label lb = lattice.join(acc_b, b.label);
    if (!(la == lb)) return false;
    if (a.value->node.index() != b.value->node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(b.value->node);
            if constexpr (std::is_same_v<T, ArrayValue>) {
                if (x.elements.size() != y.elements.size()) return false;
                for (std::size_t i = 0; i < x.elements.size(); ++i)
                    if (!values_equal_under(x.elements[i], y.elements[i], la, lb, lattice)) return false;
                return true;
            } else if constexpr (std::is_same_v<T, RecordValue>) {
                if (x.fields.size() != y.fields.size()) return false;
                for (std::size_t i = 0; i < x.fields.size(); ++i) {
                    if (x.fields[i].first != y.fields[i].first) return false;
                    if (!values_equal_under(x.fields[i].second, y.fields[i].second, la, lb, lattice)) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<T, LambdaValue>) {
                return x.param == y.param && label_equiv(x.body, y.body, lattice);
            } else if constexpr (std::is_same_v<T, UnitLit>) {
                return true;
            } else {
                return x == y;
            }
        },
        a.value->node);
}

}  // namespace

bool values_observationally_equal(const LabelledValue& a, const LabelledValue& b, const LatticeSpec& lattice) {
    return values_equal_under(a, b, lattice.bot(), lattice.bot(), lattice);
}

namespace {

struct Stepper {
    const EvalConfig& cfg;
    const LatticeSpec& lattice;

    // One contraction at the leftmost redex. Returns nullopt when e is a
    // value term (nothing to do at this position).
    std::optional<StepState> try_step(const Conversation& conv, const ExprPtr& e, Label pc) {
        return std::visit(
            [&](const auto& x) -> std::optional<StepState> {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, LitNode> || std::is_same_v<T, LambdaNode>) {
                    return std::nullopt;
                } else if constexpr (std::is_same_v<T, LabeledNode>) {
                    // Under: steps inside a label raise the pc index.
                    auto inner = try_step(conv, x.body, lattice.join(pc, x.label));
                    if (!inner) return std::nullopt;
                    inner->expr = make_expr(LabeledNode{x.label, inner->expr}, e->loc);
                    return inner;
                } else if constexpr (std::is_same_v<T, AppNode>) {
                    if (!is_value_term(x.fn)) {
                        auto inner = try_step(conv, x.fn, pc);
                        if (!inner) stuck("operator position cannot step", e);
                        inner->expr = make_expr(AppNode{inner->expr, x.arg}, e->loc);
                        return inner;
                    }
                    if (!is_value_term(x.arg)) {
                        auto inner = try_step(conv, x.arg, pc);
                        if (!inner) stuck("argument position cannot step", e);
                        inner->expr = make_expr(AppNode{x.fn, inner->expr}, e->loc);
                        return inner;
                    }
                    // Beta: normalize the operator's label chain so (lambda)
                    // and (l:l':lambda) forms reduce; the argument chain is
                    // collapsed and stamped with the pc, the label the
                    // big-step Lambda/literal rules give a value evaluated at
                    // this index. After normalization the pc-flows-to-argument
                    // side condition holds by construction.
                    auto [fn_label, fn] = collapse_labels(x.fn, lattice);
                    const auto* lam = as<LambdaNode>(fn);
                    if (!lam) stuck("applying a non-function", e);
                    auto [arg_label, arg] = collapse_labels(x.arg, lattice);
                    Label stamped = lattice.join(pc, arg_label);
                    ExprPtr value = stamped == lattice.bot() ? arg : make_expr(LabeledNode{stamped, arg});
                    ExprPtr contracted = substitute(lam->body, lam->param, value);
                    if (fn_label != lattice.bot()) contracted = make_expr(LabeledNode{fn_label, contracted});
                    return StepState{conv, contracted};
                } else if constexpr (std::is_same_v<T, PromptNode>) {
                    if (!is_value_term(x.arg)) {
                        auto inner = try_step(conv, x.arg, pc);
                        if (!inner) stuck("prompt argument cannot step", e);
                        inner->expr = make_expr(PromptNode{inner->expr}, e->loc);
                        return inner;
                    }
                    auto [arg_label, payload] = collapse_labels(x.arg, lattice);
                    Label n = lattice.join(conv.label, arg_label);
                    std::string prompt = serialize(erase(lattice, n, payload), lattice);
                    if (!lattice.leq(pc, conv.label))
                        throw StepFailure{EvalFailure{
                            ErrorKind::NoHighUpgrade,
                            "cannot prompt the model with " + prompt + ": pc label " + lattice.show_or_bot(pc) +
                                " does not flow to conversation label " + lattice.show_or_bot(conv.label) +
                                " (the 'no high upgrade' check)",
                            std::nullopt}};
                    std::string response;
                    try {
                        response = cfg.model->complete(conv.flattened(), prompt);
                    } catch (const ModelError& err) {
                        throw StepFailure{EvalFailure{ErrorKind::ModelError, err.what(), std::nullopt}};
                    }
                    static const PreludeDefs kEmpty;
                    ExprPtr parsed = parse_response(response, lattice, cfg.prelude ? *cfg.prelude : kEmpty);
                    Conversation next{n, conv.entries};
                    next.entries.push_back(Message{prompt, response});
                    ExprPtr result = n == lattice.bot() ? parsed : make_expr(LabeledNode{n, parsed});
                    return StepState{std::move(next), result};
                } else if constexpr (std::is_same_v<T, ForkNode>) {
                    return StepState{conv, make_expr(ForkedNode{conv, x.body}, e->loc)};
                } else if constexpr (std::is_same_v<T, ForkedNode>) {
                    if (!is_value_term(x.body)) {
                        auto inner = try_step(conv, x.body, pc);
                        if (!inner) stuck("forked body cannot step", e);
                        inner->expr = make_expr(ForkedNode{x.saved, inner->expr}, e->loc);
                        return inner;
                    }
                    return StepState{x.saved, x.body};  // S-Unfork restores the conversation
                } else if constexpr (std::is_same_v<T, ClearNode>) {
                    if (!lattice.leq(pc, conv.label))
                        throw StepFailure{EvalFailure{
                            ErrorKind::NoHighUpgrade,
                            "cannot clear the conversation: pc label " + lattice.show_or_bot(pc) +
                                " does not flow to conversation label " + lattice.show_or_bot(conv.label) +
                                " (the 'no high upgrade' check)",
                            std::nullopt}};
                    return StepState{Conversation{pc, {}}, unit_lit()};
                } else if constexpr (std::is_same_v<T, TestNode>) {
                    if (!is_value_term(x.body)) {
                        auto inner = try_step(conv, x.body, pc);
                        if (!inner) stuck("test subject cannot step", e);
                        inner->expr = make_expr(TestNode{inner->expr, x.label}, e->loc);
                        return inner;
                    }
                    auto [subject_label, _] = collapse_labels(x.body, lattice);
                    bool verdict = lattice.leq(lattice.join(pc, subject_label), x.label);
                    return StepState{conv, bool_lit(verdict)};
                } else if constexpr (std::is_same_v<T, VarNode>) {
                    stuck("unbound variable '" + x.name + "'", e);
                } else if constexpr (std::is_same_v<T, ArrayNode> || std::is_same_v<T, RecordNode>) {
                    // Value-shaped arrays/records (parse results) are inert;
                    // anything else would need element stepping, which the
                    // core-plus-literals stepper does not do.
                    if (is_value_term(e)) return std::nullopt;
                    stuck("derived form not supported by the small-step engine", e);
                } else {
                    stuck("derived form not supported by the small-step engine", e);
                }
            },
            e->node);
    }

    // Converts a value term into a labelled value.
    LabelledValue to_value(const ExprPtr& e) {
        auto [label, payload] = collapse_labels(e, lattice);
        ValuePtr v = std::visit(
            [&](const auto& x) -> ValuePtr {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, LitNode>) {
                    return std::visit([&](const auto& lit) { return make_value(lit); }, x.value);
                } else if constexpr (std::is_same_v<T, LambdaNode>) {
                    return make_value(LambdaValue{x.param, x.body});
                } else if constexpr (std::is_same_v<T, ArrayNode>) {
                    ArrayValue arr;
                    arr.elements.reserve(x.elements.size());
                    for (const auto& el : x.elements) arr.elements.push_back(to_value(el));
                    return make_value(std::move(arr));
                } else if constexpr (std::is_same_v<T, RecordNode>) {
                    RecordValue rec;
                    rec.fields.reserve(x.fields.size());
                    for (const auto& [k, sub] : x.fields) rec.fields.emplace_back(k, to_value(sub));
                    return make_value(std::move(rec));
                } else {
                    throw std::runtime_error("internal: not a value term");
                }
            },
            payload->node);
        return LabelledValue{label, std::move(v)};
    }
};

}  // namespace

std::optional<StepState> step(const StepState& state, Label pc, const EvalConfig& cfg) {
    Stepper s{cfg, *cfg.lattice};
    try {
        return s.try_step(state.conv, state.expr, pc);
    } catch (const StepFailure& f) {
        throw f.failure;  // callers observe the EvalFailure directly
    }
}

EvalOutcome run_small(const ExprPtr& e, const EvalConfig& cfg) {
    return run_small_from(Conversation::empty(cfg.lattice->bot()), e, cfg);
}

EvalOutcome run_small_from(const Conversation& conv, const ExprPtr& e, const EvalConfig& cfg) {
    EvalOutcome out = FuelExhausted{};
    util::run_with_large_stack([&] {
        Stepper s{cfg, *cfg.lattice};
        const Label bot = cfg.lattice->bot();
        StepState state{conv, make_expr(LabeledNode{bot, e})};
        std::int64_t fuel = cfg.fuel;
        std::int64_t steps = 0;
        try {
            while (true) {
                // Collapse the top label chain (the Cong rule's deterministic
                // normalization); beta under a label grows one link per step.
                if (const auto* l = as<LabeledNode>(state.expr); l && as<LabeledNode>(l->body)) {
                    auto [chain, payload] = collapse_labels(state.expr, *cfg.lattice);
                    state.expr = chain == bot ? payload : make_expr(LabeledNode{chain, payload});
                }
                if (is_value_term(state.expr)) {
                    out = EvalSuccess{state.conv, s.to_value(state.expr)};
                    return;
                }
                if (--fuel < 0) {
                    out = FuelExhausted{};
                    return;
                }
                // Substitution can grow self-applicating terms exponentially;
                // runaway growth counts as running out of fuel.
                if ((++steps & 31) == 0 && node_count(state.expr) > 5000) {
                    out = FuelExhausted{};
                    return;
                }
                auto next = s.try_step(state.conv, state.expr, bot);
                if (!next) throw std::runtime_error("internal: non-value failed to step");
                state = std::move(*next);
            }
        } catch (const StepFailure& f) {
            out = f.failure;
        }
    });
    return out;
}

namespace {

// Failure classes for differential comparison: distinct kinds that express
// the same phenomenon (a stuck program) compare equal.
int failure_class(ErrorKind k) {
    switch (k) {
        case ErrorKind::NoHighUpgrade: return 0;
        case ErrorKind::ModelError: return 1;
        case ErrorKind::AssertionFailed: return 2;
        default: return 3;  // stuck in some way
    }
}

}  // namespace

DiffResult differential_check(const ExprPtr& e, const EvalConfig& cfg_big, const EvalConfig& cfg_small) {
    EvalOutcome big = eval_top(e, cfg_big);
    EvalOutcome small = run_small(e, cfg_small);
    if (fuel_exhausted(big) || fuel_exhausted(small)) return {DiffVerdict::BothCutOff, ""};

    const LatticeSpec& lattice = *cfg_big.lattice;
    const auto* big_ok = success_of(big);
    const auto* small_ok = success_of(small);
    if (big_ok && small_ok) {
        if (big_ok->conv != small_ok->conv)
            return {DiffVerdict::Disagree, "conversations differ: big " + pretty_conversation(big_ok->conv, lattice) +
                                               " vs small " + pretty_conversation(small_ok->conv, lattice)};
        if (!values_observationally_equal(big_ok->value, small_ok->value, lattice))
            return {DiffVerdict::Disagree,
                    "values differ: big " + pretty(big_ok->value, lattice) + " vs small " +
                        pretty(small_ok->value, lattice)};
        return {DiffVerdict::Agree, ""};
    }
    const auto* big_err = failure_of(big);
    const auto* small_err = failure_of(small);
    if (big_err && small_err) {
        if (failure_class(big_err->kind) == failure_class(small_err->kind)) return {DiffVerdict::Agree, ""};
        return {DiffVerdict::Disagree, std::string("failure classes differ: big ") + error_kind_name(big_err->kind) +
                                           " vs small " + error_kind_name(small_err->kind)};
    }
    std::string b = big_ok ? "success" : error_kind_name(big_err->kind);
    std::string s = small_ok ? "success" : error_kind_name(small_err->kind);
    return {DiffVerdict::Disagree, "outcomes differ: big " + b + " vs small " + s};
}

}  // namespace llmbda
