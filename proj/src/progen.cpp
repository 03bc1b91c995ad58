#include "llmbda/progen.hpp"

#include <functional>

#include "llmbda/util.hpp"

namespace llmbda {

const char* sublanguage_name(Sublanguage s) {
    switch (s) {
        case Sublanguage::NoTest: return "notest";
        case Sublanguage::SingleLabel: return "single";
        case Sublanguage::AssertStrongOnly: return "assertstrong";
        case Sublanguage::Unrestricted: return "unrestricted";
    }
    return "?";
}

std::optional<Sublanguage> sublanguage_from_name(const std::string& name) {
    if (name == "notest") return Sublanguage::NoTest;
    if (name == "single") return Sublanguage::SingleLabel;
    if (name == "assertstrong") return Sublanguage::AssertStrongOnly;
    if (name == "unrestricted") return Sublanguage::Unrestricted;
    return std::nullopt;
}

namespace {

const char* kPromptPool[] = {"alpha", "beta", "gamma", "delta", "omega", "noise"};
const char* kStringPool[] = {"lo", "hi", "mid", "zig", "zag"};

}  // namespace

Transcript generated_prompt_transcript() {
    // Pure function of the prompt: only substring/always matchers, so the
    // modelled behaviour is deterministic across runs and trial pairs.
    Transcript t;
    auto rule = [&](TranscriptRule::Matcher m, std::string pat, std::string resp) {
        TranscriptRule r;
        r.matcher = m;
        r.pattern = std::move(pat);
        r.response = std::move(resp);
        t.rules.push_back(std::move(r));
    };
    rule(TranscriptRule::Matcher::Substring, "alpha", "1");
    rule(TranscriptRule::Matcher::Substring, "beta", "true");
    rule(TranscriptRule::Matcher::Substring, "gamma", "\"resp\"");
    rule(TranscriptRule::Matcher::Substring, "delta", "{a: 1, b: 2}");
    rule(TranscriptRule::Matcher::Substring, "omega", "[1, 2]");
    rule(TranscriptRule::Matcher::Substring, "noise", "mostly prose, never a term");
    rule(TranscriptRule::Matcher::Always, "", "0");
    return t;
}

namespace {

enum Shape : int { kInt = 0, kBool = 1, kStr = 2, kUnit = 3 };

struct ScopeVar {
    std::string name;
    int shape;
};

struct PairGen {
    const GenConfig& cfg;
    const LatticeSpec& lat;
    util::SplitMix64 rng;
    std::size_t budget;
    int fresh_counter = 0;
    std::vector<ScopeVar> scope;
    // Depth of enclosing syntactic labels. Prompts and clears beneath a
    // raised pc always hit the no-high-upgrade check, so generating them
    // there only produces skipped trials.
    int label_depth = 0;

    bool prompts_here() const { return cfg.with_prompts && label_depth == 0; }

    std::vector<Label> label_pool() const {
        std::vector<Label> pool;
        if (cfg.sub == Sublanguage::SingleLabel) {
            pool.push_back(lat.bot());
            pool.push_back(cfg.single_label);
        } else {
            for (std::size_t i = 0; i < lat.size(); ++i) pool.push_back(lat.element(i));
        }
        return pool;
    }

    Label pick_label() {
        // Biased toward bottom so that prompts and clears beneath labelled
        // contexts do not dominate the trials with no-high-upgrade skips.
        if (rng.chance(45)) return lat.bot();
        auto pool = label_pool();
        return pool[rng.below(pool.size())];
    }

    std::optional<Label> pick_high_label() {
        std::vector<Label> high;
        for (Label l : label_pool())
            if (!lat.leq(l, cfg.k)) high.push_back(l);
        if (high.empty()) return std::nullopt;
        return high[rng.below(high.size())];
    }

    bool tests_allowed() const {
        return cfg.sub == Sublanguage::SingleLabel || cfg.sub == Sublanguage::Unrestricted;
    }
    bool assert_strong_allowed() const {
        return cfg.sub == Sublanguage::AssertStrongOnly || cfg.sub == Sublanguage::Unrestricted;
    }

    std::string fresh(const char* base) { return std::string(base) + std::to_string(fresh_counter++); }

    const ScopeVar* scoped_var(int shape) {
        std::vector<const ScopeVar*> hits;
        for (const auto& v : scope)
            if (v.shape == shape) hits.push_back(&v);
        if (hits.empty()) return nullptr;
        return hits[rng.below(hits.size())];
    }

    using Pair = std::pair<ExprPtr, ExprPtr>;

    static Pair both(ExprPtr e) { return {e, e}; }

    Pair leaf(int shape) {
        if (const ScopeVar* v = scoped_var(shape); v && rng.chance(40)) return both(var(v->name));
        switch (shape) {
            case kInt: return both(int_lit(static_cast<std::int64_t>(rng.below(10))));
            case kBool: return both(bool_lit(rng.chance(50)));
            case kStr: return both(string_lit(kStringPool[rng.below(std::size(kStringPool))]));
            default: return both(unit_lit());
        }
    }

    ExprPtr prompt_argument(util::SplitMix64& r) {
        ExprPtr text = string_lit(kPromptPool[r.below(std::size(kPromptPool))]);
        if (r.chance(25)) return make_expr(LabeledNode{label_pool()[r.below(label_pool().size())], text});
        return text;
    }

    // Generates the two sides in lockstep. Divergence happens only in the
    // labelled production, beneath labels that do not flow to k.
    Pair gen(int shape) {
        if (budget <= 1) return leaf(shape);
        --budget;
        unsigned roll = static_cast<unsigned>(rng.below(100));

        // Labelled subterm; possibly a rewrite site.
        if (roll < 16) return gen_labeled(shape);
        if (roll < 28) {  // let
            std::string x = fresh("x");
            int bound_shape = static_cast<int>(rng.below(4));
            auto [ba, bb] = gen(bound_shape);
            scope.push_back({x, bound_shape});
            auto [a, b] = gen(shape);
            scope.pop_back();
            return {make_expr(LetNode{x, ba, a}), make_expr(LetNode{x, bb, b})};
        }
        if (roll < 36) {  // if
            auto [ca, cb] = gen(kBool);
            auto [ta, tb] = gen(shape);
            auto [ea, eb] = gen(shape);
            return {make_expr(IfNode{ca, ta, ea}), make_expr(IfNode{cb, tb, eb})};
        }
        if (roll < 44) {  // immediately applied lambda
            std::string x = fresh("a");
            int arg_shape = static_cast<int>(rng.below(4));
            auto [arga, argb] = gen(arg_shape);
            scope.push_back({x, arg_shape});
            auto [ba, bb] = gen(shape);
            scope.pop_back();
            return {app(lambda(x, ba), arga), app(lambda(x, bb), argb)};
        }
        if (roll < 50) {  // fork
            auto [a, b] = gen(shape);
            return {make_expr(ForkNode{a}), make_expr(ForkNode{b})};
        }
        if (roll < 58 && prompts_here()) {  // prompt in sequence position
            std::uint64_t arg_seed = rng.next();
            util::SplitMix64 ra(arg_seed), rb(arg_seed);
            ExprPtr pa = prompt_argument(ra), pb = prompt_argument(rb);
            std::string x = fresh("p");
            auto [a, b] = gen(shape);
            return {make_expr(LetNode{x, make_expr(PromptNode{pa}), a}),
                    make_expr(LetNode{x, make_expr(PromptNode{pb}), b})};
        }

        switch (shape) {
            case kInt: {
                if (roll < 78) {
                    BinOpKind op = roll < 65 ? BinOpKind::Add : roll < 72 ? BinOpKind::Sub : BinOpKind::Mul;
                    auto [la, lb] = gen(kInt);
                    auto [ra2, rb2] = gen(kInt);
                    return {make_expr(BinOpNode{op, la, ra2}), make_expr(BinOpNode{op, lb, rb2})};
                }
                if (roll < 88) {  // array indexing with an in-range literal
                    auto [e0a, e0b] = gen(kInt);
                    auto [e1a, e1b] = gen(kInt);
                    std::int64_t idx = static_cast<std::int64_t>(rng.below(2));
                    return {make_expr(IndexNode{make_expr(ArrayNode{{e0a, e1a}}), int_lit(idx)}),
                            make_expr(IndexNode{make_expr(ArrayNode{{e0b, e1b}}), int_lit(idx)})};
                }
                // record field access
                auto [fa, fb] = gen(kInt);
                auto [ga, gb] = gen(kStr);
                return {make_expr(FieldNode{make_expr(RecordNode{{{"a", fa}, {"b", ga}}}), "a"}),
                        make_expr(FieldNode{make_expr(RecordNode{{{"a", fb}, {"b", gb}}}), "a"})};
            }
            case kBool: {
                if (roll < 66) {
                    BinOpKind op = roll < 61 ? BinOpKind::Eq : BinOpKind::Lt;
                    auto [la, lb] = gen(kInt);
                    auto [ra2, rb2] = gen(kInt);
                    return {make_expr(BinOpNode{op, la, ra2}), make_expr(BinOpNode{op, lb, rb2})};
                }
                if (roll < 74) {
                    BinOpKind op = rng.chance(50) ? BinOpKind::And : BinOpKind::Or;
                    auto [la, lb] = gen(kBool);
                    auto [ra2, rb2] = gen(kBool);
                    return {make_expr(BinOpNode{op, la, ra2}), make_expr(BinOpNode{op, lb, rb2})};
                }
                if (roll < 80) {
                    auto [a, b] = gen(kBool);
                    return {make_expr(NotNode{a}), make_expr(NotNode{b})};
                }
                if (roll < 88 && tests_allowed()) {  // label test
                    Label l = pick_label();
                    int subject_shape = static_cast<int>(rng.below(4));
                    // Aim half the tests straight at labelled subterms: that
                    // is where the unrestricted language goes wrong.
                    auto [a, b] = rng.chance(50) ? gen_labeled(subject_shape) : gen(subject_shape);
                    return {make_expr(TestNode{a, l}), make_expr(TestNode{b, l})};
                }
                if (roll < 94 && assert_strong_allowed()) {  // strong test
                    Label l = pick_label();
                    int subject_shape = static_cast<int>(rng.below(4));
                    auto [a, b] = gen(subject_shape);
                    return {make_expr(StrongTestNode{a, l}), make_expr(StrongTestNode{b, l})};
                }
                if (prompts_here()) {  // the parse-succeeded flag of a prompt
                    std::uint64_t arg_seed = rng.next();
                    util::SplitMix64 ra(arg_seed), rb(arg_seed);
                    return {make_expr(IndexNode{make_expr(PromptNode{prompt_argument(ra)}), int_lit(0)}),
                            make_expr(IndexNode{make_expr(PromptNode{prompt_argument(rb)}), int_lit(0)})};
                }
                return leaf(shape);
            }
            case kStr: {
                if (roll < 75) {
                    auto [la, lb] = gen(kStr);
                    auto [ra2, rb2] = gen(kStr);
                    return {make_expr(BinOpNode{BinOpKind::Add, la, ra2}),
                            make_expr(BinOpNode{BinOpKind::Add, lb, rb2})};
                }
                // interpolation over an integer hole
                auto [a, b] = gen(kInt);
                InterpNode ia, ib;
                ia.parts.push_back({"v=", a});
                ia.parts.push_back({".", nullptr});
                ib.parts.push_back({"v=", b});
                ib.parts.push_back({".", nullptr});
                return {make_expr(std::move(ia)), make_expr(std::move(ib))};
            }
            default: {  // unit
                if (roll < 70 && assert_strong_allowed()) {
                    // Assertions mostly against top so most runs survive.
                    Label l = rng.chance(75) ? lat.top() : pick_label();
                    int subject_shape = static_cast<int>(rng.below(4));
                    auto [a, b] = gen(subject_shape);
                    return {make_expr(AssertNode{l, a}), make_expr(AssertNode{l, b})};
                }
                if (roll < 72 && prompts_here()) {  // clear
                    return both(make_expr(ClearNode{}));
                }
                return leaf(shape);
            }
        }
    }

    Pair gen_labeled(int shape) {
        if (auto high = pick_high_label(); high && rng.chance(55)) {
            Label l1 = *high;
            Label l2 = rng.chance(40) ? *pick_high_label() : l1;
            std::uint64_t seed_a = rng.next(), seed_b = rng.next();
            ++label_depth;
            ExprPtr a = gen_one(shape, seed_a);
            ExprPtr b = gen_one(shape, seed_b);
            --label_depth;
            return {make_expr(LabeledNode{l1, a}), make_expr(LabeledNode{l2, b})};
        }
        Label l = pick_label();
        if (!(l == lat.bot())) ++label_depth;
        auto [a, b] = gen(shape);
        if (!(l == lat.bot())) --label_depth;
        return {make_expr(LabeledNode{l, a}), make_expr(LabeledNode{l, b})};
    }

    // A single-sided subtree (rewrite site contents).
    ExprPtr gen_one(int shape, std::uint64_t seed) {
        PairGen sub{cfg, lat, util::SplitMix64(seed), budget / 2 + 1, fresh_counter + 100, scope, label_depth};
        auto [a, _] = sub.gen(shape);
        return a;
    }
};

}  // namespace

std::pair<ExprPtr, ExprPtr> gen_pair(const GenConfig& cfg, std::uint64_t seed) {
    util::SplitMix64 rng(seed);
    PairGen g{cfg, *cfg.lattice, util::SplitMix64(rng.next()), cfg.max_nodes, 0, {}, 0};
    int shape = static_cast<int>(rng.below(4));
    return g.gen(shape);
}

ExprPtr gen_program(const GenConfig& cfg, std::uint64_t seed) { return gen_pair(cfg, seed).first; }

namespace {

struct CoreGen {
    const LatticeSpec& lat;
    util::SplitMix64 rng;
    std::size_t budget;
    int fresh_counter = 0;
    std::vector<std::string> scope;

    Label pick_label() { return lat.element(rng.below(lat.size())); }

    ExprPtr leaf() {
        if (!scope.empty() && rng.chance(35)) return var(scope[rng.below(scope.size())]);
        switch (rng.below(4)) {
            case 0: return int_lit(static_cast<std::int64_t>(rng.below(10)));
            case 1: return bool_lit(rng.chance(50));
            case 2: return string_lit(kStringPool[rng.below(std::size(kStringPool))]);
            default: return unit_lit();
        }
    }

    ExprPtr lambda_term() {
        std::string x = "c" + std::to_string(fresh_counter++);
        scope.push_back(x);
        ExprPtr body = gen();
        scope.pop_back();
        return lambda(x, body);
    }

    ExprPtr gen() {
        if (budget <= 1) return leaf();
        --budget;
        unsigned roll = static_cast<unsigned>(rng.below(100));
        if (roll < 12) return make_expr(LabeledNode{pick_label(), gen()});
        if (roll < 22) return make_expr(TestNode{gen(), pick_label()});
        if (roll < 30) return make_expr(ForkNode{gen()});
        if (roll < 38) {
            ExprPtr arg = rng.chance(70) ? string_lit(kPromptPool[rng.below(std::size(kPromptPool))])
                                         : make_expr(LabeledNode{pick_label(),
                                                                 string_lit(kPromptPool[rng.below(
                                                                     std::size(kPromptPool))])});
            return make_expr(PromptNode{arg});
        }
        if (roll < 41) return make_expr(ClearNode{});
        if (roll < 43) {  // the canonical diverger
            ExprPtr omega_half = lambda("w", app(var("w"), var("w")));
            return app(omega_half, omega_half);
        }
        if (roll < 48 && !scope.empty()) {  // apply a variable; often stuck, which both engines agree on
            return app(var(scope[rng.below(scope.size())]), leaf());
        }
        if (roll < 72) {  // application of a (possibly labelled) lambda
            ExprPtr fn = lambda_term();
            if (rng.chance(30)) fn = make_expr(LabeledNode{pick_label(), fn});
            return app(fn, gen());
        }
        if (roll < 82) return lambda_term();
        return leaf();
    }
};

}  // namespace

ExprPtr gen_core_program(const LatticeSpec& lattice, std::uint64_t seed, std::size_t max_nodes) {
    CoreGen g{lattice, util::SplitMix64(seed), max_nodes, 0, {}};
    return g.gen();
}

namespace {

struct ValuePairGen {
    const LatticeSpec& lat;
    Label n;
    util::SplitMix64 rng;
    std::size_t budget;

    using Pair = std::pair<ExprPtr, ExprPtr>;
    static Pair both(ExprPtr e) { return {e, e}; }

    std::optional<Label> pick_high() {
        std::vector<Label> high;
        for (std::size_t i = 0; i < lat.size(); ++i)
            if (!lat.leq(lat.element(i), n)) high.push_back(lat.element(i));
        if (high.empty()) return std::nullopt;
        return high[rng.below(high.size())];
    }

    ExprPtr scalar(util::SplitMix64& r) {
        switch (r.below(5)) {
            case 0: return int_lit(static_cast<std::int64_t>(r.below(100)));
            case 1: return bool_lit(r.chance(50));
            case 2: return string_lit(kStringPool[r.below(std::size(kStringPool))]);
            case 3: return unit_lit();
            default: return lambda("x", r.chance(50) ? var("x") : int_lit(static_cast<std::int64_t>(r.below(5))));
        }
    }

    ExprPtr one_value(util::SplitMix64& r, std::size_t depth) {
        if (depth == 0 || r.chance(45)) return scalar(r);
        switch (r.below(3)) {
            case 0: {
                std::vector<ExprPtr> els;
                std::size_t count = 1 + r.below(3);
                for (std::size_t i = 0; i < count; ++i) els.push_back(one_value(r, depth - 1));
                return make_expr(ArrayNode{std::move(els)});
            }
            case 1: {
                std::vector<std::pair<std::string, ExprPtr>> fields;
                fields.emplace_back("a", one_value(r, depth - 1));
                if (r.chance(60)) fields.emplace_back("b", one_value(r, depth - 1));
                return make_expr(RecordNode{std::move(fields)});
            }
            default:
                return make_expr(LabeledNode{lat.element(r.below(lat.size())), one_value(r, depth - 1)});
        }
    }

    Pair gen(std::size_t depth) {
        if (budget <= 1 || depth == 0) {
            std::uint64_t s = rng.next();
            util::SplitMix64 ra(s), rb(s);
            return both(scalar(ra));
        }
        --budget;
        unsigned roll = static_cast<unsigned>(rng.below(100));
        if (roll < 30) {
            if (auto high = pick_high(); high && rng.chance(60)) {
                Label l1 = *high;
                Label l2 = rng.chance(40) ? *pick_high() : l1;
                util::SplitMix64 ra(rng.next()), rb(rng.next());
                return {make_expr(LabeledNode{l1, one_value(ra, depth - 1)}),
                        make_expr(LabeledNode{l2, one_value(rb, depth - 1)})};
            }
            Label l = lat.element(rng.below(lat.size()));
            auto [a, b] = gen(depth - 1);
            return {make_expr(LabeledNode{l, a}), make_expr(LabeledNode{l, b})};
        }
        if (roll < 60) {
            std::size_t count = 1 + rng.below(3);
            std::vector<ExprPtr> as, bs;
            for (std::size_t i = 0; i < count; ++i) {
                auto [a, b] = gen(depth - 1);
                as.push_back(a);
                bs.push_back(b);
            }
            return {make_expr(ArrayNode{std::move(as)}), make_expr(ArrayNode{std::move(bs)})};
        }
        if (roll < 85) {
            auto [a0, b0] = gen(depth - 1);
            std::vector<std::pair<std::string, ExprPtr>> fa{{"a", a0}}, fb{{"a", b0}};
            if (rng.chance(60)) {
                auto [a1, b1] = gen(depth - 1);
                fa.emplace_back("b", a1);
                fb.emplace_back("b", b1);
            }
            return {make_expr(RecordNode{std::move(fa)}), make_expr(RecordNode{std::move(fb)})};
        }
        std::uint64_t s = rng.next();
        util::SplitMix64 ra(s), rb(s);
        return both(scalar(ra));
    }
};

}  // namespace

std::pair<ExprPtr, ExprPtr> gen_value_pair(const LatticeSpec& lattice, Label n, std::uint64_t seed,
                                           std::size_t max_nodes) {
    ValuePairGen g{lattice, n, util::SplitMix64(seed), max_nodes};
    return g.gen(4);
}

ExprPtr gen_labelled_value_expr(const LatticeSpec& lattice, std::uint64_t seed, std::size_t max_nodes) {
    ValuePairGen g{lattice, lattice.bot(), util::SplitMix64(seed), max_nodes};
    util::SplitMix64 r(seed ^ 0x5eedULL);
    return g.one_value(r, 3);
}

bool respects_sublanguage(const LatticeSpec& lattice, Sublanguage sub, Label single_label, const ExprPtr& e) {
    bool ok = true;
    std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& cur) {
        if (!cur || !ok) return;
        auto check_label = [&](Label l) {
            if (sub == Sublanguage::SingleLabel && !(l == lattice.bot() || l == single_label)) ok = false;
        };
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, TestNode>) {
                    if (sub == Sublanguage::NoTest || sub == Sublanguage::AssertStrongOnly) ok = false;
                    check_label(x.label);
                    walk(x.body);
                } else if constexpr (std::is_same_v<T, AssertNode>) {
                    if (sub == Sublanguage::NoTest) ok = false;
                    check_label(x.label);
                    walk(x.arg);
                } else if constexpr (std::is_same_v<T, StrongTestNode>) {
                    if (sub == Sublanguage::NoTest) ok = false;
                    check_label(x.label);
                    walk(x.arg);
                } else if constexpr (std::is_same_v<T, LabeledNode>) {
                    check_label(x.label);
                    walk(x.body);
                } else if constexpr (std::is_same_v<T, LambdaNode> || std::is_same_v<T, ForkNode> ||
                                     std::is_same_v<T, ForkedNode>) {
                    walk(x.body);
                } else if constexpr (std::is_same_v<T, AppNode>) {
                    walk(x.fn);
                    walk(x.arg);
                } else if constexpr (std::is_same_v<T, PromptNode> || std::is_same_v<T, NotNode> ||
                                     std::is_same_v<T, IsFnNode>) {
                    walk(x.arg);
                } else if constexpr (std::is_same_v<T, LetNode>) {
                    walk(x.bound);
                    walk(x.body);
                } else if constexpr (std::is_same_v<T, IfNode>) {
                    walk(x.cond);
                    walk(x.then_branch);
                    walk(x.else_branch);
                } else if constexpr (std::is_same_v<T, ArrayNode>) {
                    for (const auto& el : x.elements) walk(el);
                } else if constexpr (std::is_same_v<T, IndexNode>) {
                    walk(x.array);
                    walk(x.index);
                } else if constexpr (std::is_same_v<T, RecordNode>) {
                    for (const auto& [_, v] : x.fields) walk(v);
                } else if constexpr (std::is_same_v<T, FieldNode>) {
                    walk(x.record);
                } else if constexpr (std::is_same_v<T, FieldUpdateNode>) {
                    walk(x.record);
                    walk(x.value);
                } else if constexpr (std::is_same_v<T, BinOpNode>) {
                    walk(x.lhs);
                    walk(x.rhs);
                } else if constexpr (std::is_same_v<T, InterpNode>) {
                    for (const auto& p : x.parts)
                        if (p.expr) walk(p.expr);
                }
            },
            cur->node);
    };
    walk(e);
    return ok;
}

}  // namespace llmbda
