#include "llmbda/eval.hpp"

#include <iostream>

#include "llmbda/printer.hpp"
#include "llmbda/util.hpp"

namespace llmbda {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::NoHighUpgrade: return "no-high-upgrade";
        case ErrorKind::ApplyNonFunction: return "apply-non-function";
        case ErrorKind::UnboundVariable: return "unbound-variable";
        case ErrorKind::TypeMismatch: return "type-mismatch";
        case ErrorKind::IndexOutOfBounds: return "index-out-of-bounds";
        case ErrorKind::MissingField: return "missing-field";
        case ErrorKind::DivideByZero: return "divide-by-zero";
        case ErrorKind::AssertionFailed: return "assertion-failed";
        case ErrorKind::ModelError: return "model-error";
        case ErrorKind::StuckTerm: return "stuck-term";
    }
    return "unknown";
}

const EvalSuccess* success_of(const EvalOutcome& o) { return std::get_if<EvalSuccess>(&o); }
const EvalFailure* failure_of(const EvalOutcome& o) { return std::get_if<EvalFailure>(&o); }
bool fuel_exhausted(const EvalOutcome& o) { return std::holds_alternative<FuelExhausted>(o); }

namespace {

struct FailureSignal {
    EvalFailure failure;
};
struct FuelSignal {};

// Resource bound on term growth under substitution.
constexpr std::size_t kMaxTermNodes = 200000;

struct Evaluator {
    const EvalConfig& cfg;
    const LatticeSpec& lattice;
    std::int64_t fuel;

    [[noreturn]] void fail(ErrorKind kind, std::string message, const ExprPtr& e) {
        std::optional<SourceLoc> loc;
        if (e && e->loc.valid()) loc = e->loc;
        throw FailureSignal{EvalFailure{kind, std::move(message), loc}};
    }

    void burn(const ExprPtr& e) {
        (void)e;
        if (--fuel < 0) throw FuelSignal{};
    }

    Label join(Label a, Label b) const { return lattice.join(a, b); }
    bool leq(Label a, Label b) const { return lattice.leq(a, b); }

    // The judgement pc |- C, e  =>  C', V. The conversation is threaded
    // through `conv` in place.
    LabelledValue eval(Label pc, Conversation& conv, const ExprPtr& e) {
        burn(e);
        Conversation before = (cfg.hook || cfg.trace) ? conv : Conversation{};
        LabelledValue v = dispatch(pc, conv, e);
        if (cfg.hook) cfg.hook(pc, before, conv, v);
        if (cfg.trace) {
            std::cerr << "[trace] " << lattice.show_or_bot(pc) << " |- " << pretty_conversation(before, lattice)
                      << ", " << pretty(e, lattice) << "  =>  " << pretty_conversation(conv, lattice) << ", "
                      << pretty(v, lattice) << "\n";
        }
        return v;
    }

    LabelledValue dispatch(Label pc, Conversation& conv, const ExprPtr& e) {
        return std::visit(
            [&](const auto& x) -> LabelledValue {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, VarNode>) {
                    fail(ErrorKind::UnboundVariable, "unbound variable '" + x.name + "'", e);
                } else if constexpr (std::is_same_v<T, LambdaNode>) {
                    return LabelledValue{pc, make_value(LambdaValue{x.param, x.body})};
                } else if constexpr (std::is_same_v<T, LitNode>) {
                    return std::visit([&](const auto& lit) { return LabelledValue{pc, make_value(lit)}; }, x.value);
                } else if constexpr (std::is_same_v<T, LabeledNode>) {
                    return eval(join(pc, x.label), conv, x.body);
                } else if constexpr (std::is_same_v<T, AppNode>) {
                    return eval_app(pc, conv, x, e);
                } else if constexpr (std::is_same_v<T, PromptNode>) {
                    return eval_prompt(pc, conv, x, e);
                } else if constexpr (std::is_same_v<T, ForkNode>) {
                    Conversation saved = conv;
                    LabelledValue v = eval(pc, conv, x.body);
                    conv = std::move(saved);
                    return v;
                } else if constexpr (std::is_same_v<T, ClearNode>) {
                    if (!leq(pc, conv.label))
                        fail(ErrorKind::NoHighUpgrade,
                             "cannot clear the conversation: pc label " + lattice.show_or_bot(pc) +
                                 " does not flow to conversation label " + lattice.show_or_bot(conv.label) +
                                 " (the 'no high upgrade' check)",
                             e);
                    conv = Conversation{pc, {}};
                    return LabelledValue{pc, make_value(UnitLit{})};
                } else if constexpr (std::is_same_v<T, TestNode>) {
                    LabelledValue v = eval(pc, conv, x.body);
                    return LabelledValue{pc, make_value(leq(v.label, x.label))};
                } else if constexpr (std::is_same_v<T, LetNode>) {
                    LabelledValue bound = eval(pc, conv, x.bound);
                    ExprPtr body = substitute(x.body, x.name, to_expr(bound, lattice));
                    return eval(pc, conv, body);
                } else if constexpr (std::is_same_v<T, IfNode>) {
                    LabelledValue cond = eval(pc, conv, x.cond);
                    const bool* b = value_as<bool>(cond.value);
                    if (!b) fail(ErrorKind::TypeMismatch, "if condition is not a boolean", x.cond);
                    // The condition's label raises the branch pc, mirroring the
                    // application rule of the boolean encoding.
                    return eval(join(pc, cond.label), conv, *b ? x.then_branch : x.else_branch);
                } else if constexpr (std::is_same_v<T, ArrayNode>) {
                    ArrayValue arr;
                    arr.elements.reserve(x.elements.size());
                    for (const auto& el : x.elements) arr.elements.push_back(eval(pc, conv, el));
                    return LabelledValue{pc, make_value(std::move(arr))};
                } else if constexpr (std::is_same_v<T, RecordNode>) {
                    RecordValue rec;
                    rec.fields.reserve(x.fields.size());
                    for (const auto& [k, sub] : x.fields) rec.fields.emplace_back(k, eval(pc, conv, sub));
                    return LabelledValue{pc, make_value(std::move(rec))};
                } else if constexpr (std::is_same_v<T, IndexNode>) {
                    return eval_index(pc, conv, x, e);
                } else if constexpr (std::is_same_v<T, FieldNode>) {
                    LabelledValue rec = eval(pc, conv, x.record);
                    const auto* r = value_as<RecordValue>(rec.value);
                    if (!r) fail(ErrorKind::TypeMismatch, "field access '." + x.name + "' on a non-record", e);
                    const LabelledValue* field = r->find(x.name);
                    if (!field) fail(ErrorKind::MissingField, "record has no field '" + x.name + "'", e);
                    return LabelledValue{join(field->label, join(pc, rec.label)), field->value};
                } else if constexpr (std::is_same_v<T, FieldUpdateNode>) {
                    LabelledValue rec = eval(pc, conv, x.record);
                    LabelledValue val = eval(pc, conv, x.value);
                    const auto* r = value_as<RecordValue>(rec.value);
                    if (!r) fail(ErrorKind::TypeMismatch, "field update '." + x.name + "' on a non-record", e);
                    if (!r->find(x.name)) fail(ErrorKind::MissingField, "record has no field '" + x.name + "'", e);
                    RecordValue updated = *r;
                    for (auto& [k, slot] : updated.fields)
                        if (k == x.name) slot = val;
                    return LabelledValue{join(pc, rec.label), make_value(std::move(updated))};
                } else if constexpr (std::is_same_v<T, BinOpNode>) {
                    return eval_binop(pc, conv, x, e);
                } else if constexpr (std::is_same_v<T, NotNode>) {
                    LabelledValue v = eval(pc, conv, x.arg);
                    const bool* b = value_as<bool>(v.value);
                    if (!b) fail(ErrorKind::TypeMismatch, "'not' needs a boolean", e);
                    return LabelledValue{join(pc, v.label), make_value(!*b)};
                } else if constexpr (std::is_same_v<T, IsFnNode>) {
                    LabelledValue v = eval(pc, conv, x.arg);
                    return LabelledValue{join(pc, v.label), make_value(is_function(v.value))};
                } else if constexpr (std::is_same_v<T, InterpNode>) {
                    return eval_interp(pc, conv, x);
                } else if constexpr (std::is_same_v<T, AssertNode>) {
                    LabelledValue v = eval(pc, conv, x.arg);
                    if (!leq(v.label, x.label))
                        fail(ErrorKind::AssertionFailed,
                             "assertion failed: value label " + lattice.show_or_bot(v.label) + " does not flow to " +
                                 lattice.show(x.label),
                             e);
                    return LabelledValue{pc, make_value(UnitLit{})};
                } else if constexpr (std::is_same_v<T, StrongTestNode>) {
                    LabelledValue v = eval(pc, conv, x.arg);
                    return LabelledValue{join(pc, x.label), make_value(leq(v.label, x.label))};
                } else if constexpr (std::is_same_v<T, ForkedNode>) {
                    if (!cfg.allow_forked_terms)
                        fail(ErrorKind::TypeMismatch, "forked terms are not evaluable here", e);
                    LabelledValue v = eval(pc, conv, x.body);
                    conv = x.saved;
                    return v;
                }
            },
            e->node);
    }

    LabelledValue eval_app(Label pc, Conversation& conv, const AppNode& x, const ExprPtr& e) {
        LabelledValue fn = eval(pc, conv, x.fn);
        const auto* lam = value_as<LambdaValue>(fn.value);
        if (!lam)
            fail(ErrorKind::ApplyNonFunction,
                 "cannot apply a non-function (" + pretty(fn, lattice) + ")", e);
        LabelledValue arg = eval(pc, conv, x.arg);
        ExprPtr body = substitute(lam->body, lam->param, to_expr(arg, lattice));
        // Self-applicating terms can grow exponentially under substitution;
        // treat runaway growth as running out of fuel.
        if (node_count(body) > kMaxTermNodes) throw FuelSignal{};
        return eval(join(pc, fn.label), conv, body);
    }

    LabelledValue eval_prompt(Label pc, Conversation& conv, const PromptNode& x, const ExprPtr& e) {
        LabelledValue arg = eval(pc, conv, x.arg);
        Label n = join(conv.label, arg.label);
        std::string prompt = serialize(erase(lattice, n, payload_to_expr(arg.value, lattice)), lattice);
        if (!leq(pc, conv.label))
            fail(ErrorKind::NoHighUpgrade,
                 "cannot prompt the model with " + prompt + ": pc label " + lattice.show_or_bot(pc) +
                     " does not flow to conversation label " + lattice.show_or_bot(conv.label) +
                     " (the 'no high upgrade' check)",
                 e);
        auto [entries, parsed] = generate_entries(conv.entries, prompt, e);
        conv = Conversation{n, std::move(entries)};
        LabelledValue result = value_from_expr(parsed, lattice);
        result.label = join(n, result.label);
        return result;
    }

    std::pair<std::vector<Message>, ExprPtr> generate_entries(const std::vector<Message>& entries,
                                                              const std::string& prompt, const ExprPtr& e) {
        std::string history;
        for (const auto& m : entries) {
            history += m.prompt;
            history += m.response;
        }
        std::string response;
        try {
            response = cfg.model->complete(history, prompt);
        } catch (const ModelError& err) {
            fail(ErrorKind::ModelError, err.what(), e);
        }
        static const PreludeDefs kEmpty;
        ExprPtr parsed = parse_response(response, lattice, cfg.prelude ? *cfg.prelude : kEmpty);
        std::vector<Message> extended = entries;
        extended.push_back(Message{prompt, std::move(response)});
        return {std::move(extended), parsed};
    }

    LabelledValue eval_index(Label pc, Conversation& conv, const IndexNode& x, const ExprPtr& e) {
        LabelledValue arr = eval(pc, conv, x.array);
        LabelledValue idx = eval(pc, conv, x.index);
        const auto* a = value_as<ArrayValue>(arr.value);
        if (!a) fail(ErrorKind::TypeMismatch, "indexing a non-array", e);
        const auto* i = value_as<std::int64_t>(idx.value);
        if (!i) fail(ErrorKind::TypeMismatch, "array index is not an integer", e);
        if (*i < 0 || static_cast<std::size_t>(*i) >= a->elements.size())
            fail(ErrorKind::IndexOutOfBounds,
                 "index " + std::to_string(*i) + " out of bounds for array of length " +
                     std::to_string(a->elements.size()),
                 e);
        const LabelledValue& el = a->elements[static_cast<std::size_t>(*i)];
        return LabelledValue{join(el.label, join(pc, join(arr.label, idx.label))), el.value};
    }

    [[noreturn]] void binop_type_error(BinOpKind op, const ExprPtr& e) {
        fail(ErrorKind::TypeMismatch, std::string("operator '") + binop_symbol(op) + "' applied to incompatible operands",
             e);
    }

    LabelledValue eval_binop(Label pc, Conversation& conv, const BinOpNode& x, const ExprPtr& e) {
        LabelledValue lhs = eval(pc, conv, x.lhs);
        LabelledValue rhs = eval(pc, conv, x.rhs);
        Label out = join(pc, join(lhs.label, rhs.label));
        auto type_error = [&]() { binop_type_error(x.op, e); };
        auto ints = [&]() -> std::pair<std::int64_t, std::int64_t> {
            const auto* a = value_as<std::int64_t>(lhs.value);
            const auto* b = value_as<std::int64_t>(rhs.value);
            if (!a || !b) binop_type_error(x.op, e);
            return {*a, *b};
        };
        switch (x.op) {
            case BinOpKind::Add: {
                if (const auto* a = value_as<std::int64_t>(lhs.value)) {
                    const auto* b = value_as<std::int64_t>(rhs.value);
                    if (!b) type_error();
                    std::int64_t sum;
                    if (__builtin_add_overflow(*a, *b, &sum))
                        fail(ErrorKind::TypeMismatch, "integer overflow in '+'", e);
                    return LabelledValue{out, make_value(sum)};
                }
                if (const auto* a = value_as<std::string>(lhs.value)) {
                    const auto* b = value_as<std::string>(rhs.value);
                    if (!b) type_error();
                    return LabelledValue{out, make_value(*a + *b)};
                }
                if (const auto* a = value_as<ArrayValue>(lhs.value)) {
                    const auto* b = value_as<ArrayValue>(rhs.value);
                    if (!b) type_error();
                    ArrayValue joined = *a;
                    joined.elements.insert(joined.elements.end(), b->elements.begin(), b->elements.end());
                    return LabelledValue{out, make_value(std::move(joined))};
                }
                binop_type_error(x.op, e);
            }
            case BinOpKind::Sub: {
                auto [a, b] = ints();
                std::int64_t r;
                if (__builtin_sub_overflow(a, b, &r)) fail(ErrorKind::TypeMismatch, "integer overflow in '-'", e);
                return LabelledValue{out, make_value(r)};
            }
            case BinOpKind::Mul: {
                auto [a, b] = ints();
                std::int64_t r;
                if (__builtin_mul_overflow(a, b, &r)) fail(ErrorKind::TypeMismatch, "integer overflow in '*'", e);
                return LabelledValue{out, make_value(r)};
            }
            case BinOpKind::Div: {
                auto [a, b] = ints();
                if (b == 0) fail(ErrorKind::DivideByZero, "division by zero", e);
                if (a == INT64_MIN && b == -1) fail(ErrorKind::TypeMismatch, "integer overflow in '/'", e);
                return LabelledValue{out, make_value(a / b)};
            }
            case BinOpKind::Eq:
            case BinOpKind::Ne: {
                auto equal = payload_equal(lhs.value, rhs.value);
                if (!equal) fail(ErrorKind::TypeMismatch, "'=='/'!=' cannot compare functions", e);
                // Comparison walks the whole structure, so every nested label
                // influences the result.
                Label all = join(join_all_labels(lhs, lattice), join_all_labels(rhs, lattice));
                bool b = x.op == BinOpKind::Eq ? *equal : !*equal;
                return LabelledValue{join(pc, all), make_value(b)};
            }
            case BinOpKind::Lt:
            case BinOpKind::Le:
            case BinOpKind::Gt:
            case BinOpKind::Ge: {
                auto [a, b] = ints();
                bool r = x.op == BinOpKind::Lt   ? a < b
                         : x.op == BinOpKind::Le ? a <= b
                         : x.op == BinOpKind::Gt ? a > b
                                                 : a >= b;
                return LabelledValue{out, make_value(r)};
            }
            case BinOpKind::And:
            case BinOpKind::Or: {
                const auto* a = value_as<bool>(lhs.value);
                const auto* b = value_as<bool>(rhs.value);
                if (!a || !b) type_error();
                bool r = x.op == BinOpKind::And ? (*a && *b) : (*a || *b);
                return LabelledValue{out, make_value(r)};
            }
        }
        binop_type_error(x.op, e);
    }

    LabelledValue eval_interp(Label pc, Conversation& conv, const InterpNode& x) {
        std::string text;
        Label label = pc;
        for (const auto& p : x.parts) {
            text += p.text;
            if (p.expr) {
                LabelledValue v = eval(pc, conv, p.expr);
                label = join(label, join_all_labels(v, lattice));
                text += render_for_interp(v);
            }
        }
        return LabelledValue{label, make_value(std::move(text))};
    }

    // Interpolated strings splice in raw text: a string value contributes its
    // characters, anything else its canonical rendering (labels contribute to
    // the result label, never to the text).
    std::string render_for_interp(const LabelledValue& v) {
        if (const auto* s = value_as<std::string>(v.value)) return *s;
        return print_expr(erase(lattice, lattice.top(), payload_to_expr(v.value, lattice)), lattice);
    }
};

EvalOutcome eval_inner(Label pc, Conversation conv, const ExprPtr& e, const EvalConfig& cfg) {
    Evaluator ev{cfg, *cfg.lattice, cfg.fuel};
    try {
        LabelledValue v = ev.eval(pc, conv, e);
        return EvalSuccess{std::move(conv), std::move(v)};
    } catch (const FailureSignal& f) {
        return f.failure;
    } catch (const FuelSignal&) {
        return FuelExhausted{};
    }
}

}  // namespace

EvalOutcome eval(Label pc, const Conversation& conv, const ExprPtr& e, const EvalConfig& cfg) {
    EvalOutcome out = FuelExhausted{};
    util::run_with_large_stack([&] { out = eval_inner(pc, conv, e, cfg); });
    return out;
}

EvalOutcome eval_top(const ExprPtr& e, const EvalConfig& cfg) {
    return eval(cfg.lattice->bot(), Conversation::empty(cfg.lattice->bot()), e, cfg);
}

std::pair<std::vector<Message>, ExprPtr> generate(const std::vector<Message>& entries, const std::string& prompt,
                                                  const EvalConfig& cfg) {
    std::string history;
    for (const auto& m : entries) {
        history += m.prompt;
        history += m.response;
    }
    std::string response = cfg.model->complete(history, prompt);
    static const PreludeDefs kEmpty;
    ExprPtr parsed = parse_response(response, *cfg.lattice, cfg.prelude ? *cfg.prelude : kEmpty);
    std::vector<Message> extended = entries;
    extended.push_back(Message{prompt, std::move(response)});
    return {std::move(extended), parsed};
}

}  // namespace llmbda
