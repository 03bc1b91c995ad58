#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "llmbda/progen.hpp"
#include "llmbda/smallstep.hpp"
#include "llmbda/util.hpp"

using namespace llmbda;
using namespace llmbda::test;

TEST_CASE("single contractions follow the indexed rules") {
    auto cfg = config();
    Label bot = us().bot();

    // S-App: (l:\x.x) V -> l:V with the argument stamped at the index
    StepState s{Conversation::empty(bot), parse1("({U}:(\\x.x)) 7")};
    auto next = step(s, bot, cfg);
    REQUIRE(next.has_value());
    CHECK(label_equiv(next->expr, parse1("{U}:7"), us()));
    CHECK(next->conv == s.conv);

    // S-Fork: fork e captures the conversation to restore
    s = StepState{Conversation{lbl("{U}"), {{"p", "r"}}}, parse1("fork 1")};
    next = step(s, bot, cfg);
    REQUIRE(next.has_value());
    const auto* forked = as<ForkedNode>(next->expr);
    REQUIRE(forked != nullptr);
    CHECK(forked->saved == s.conv);

    // S-Unfork: a forked value restores the saved conversation
    Conversation saved{bot, {}};
    s = StepState{Conversation{lbl("{U}"), {{"p", "r"}}},
                  make_expr(ForkedNode{saved, int_lit(3)})};
    next = step(s, bot, cfg);
    REQUIRE(next.has_value());
    CHECK(next->conv == saved);
    CHECK(equal(next->expr, int_lit(3)));

    // S-Test joins the pc into the subject's label
    s = StepState{Conversation::empty(bot), parse1("{U}?({U}:1)")};
    next = step(s, bot, cfg);
    REQUIRE(next.has_value());
    CHECK(equal(next->expr, bool_lit(true)));

    // Under: steps beneath a label run at the raised index
    s = StepState{Conversation::empty(bot), parse1("{S}:clear")};
    CHECK_THROWS_AS(step(s, bot, cfg), EvalFailure);

    // stuck terms report the redex
    s = StepState{Conversation::empty(bot), parse1("1 2")};
    CHECK_THROWS_AS(step(s, bot, cfg), EvalFailure);
}

TEST_CASE("label equivalence joins chains and drops bottom") {
    CHECK(label_equiv(parse1("{U}:{S}:1"), parse1("{U,S}:1"), us()));
    CHECK(label_equiv(parse1("{}:1"), parse1("1"), us()));
    CHECK(label_equiv(parse1("\\x.{}:{U}:{S}:x"), parse1("\\x.{S}:{U}:x"), us()));
    CHECK_FALSE(label_equiv(parse1("\\x.x"), parse1("\\x.x x"), us()));
    CHECK_FALSE(label_equiv(parse1("{U}:1"), parse1("{S}:1"), us()));

    // equivalence laws on generated terms
    util::SplitMix64 rng(5);
    for (int i = 0; i < 100; ++i) {
        ExprPtr a = gen_core_program(us(), rng.next(), 20);
        CHECK(label_equiv(a, a, us()));  // reflexive
        ExprPtr wrapped = make_expr(LabeledNode{us().bot(), a});
        CHECK(label_equiv(a, wrapped, us()));   // bot intro
        CHECK(label_equiv(wrapped, a, us()));   // symmetric
        // congruence under an applied context
        ExprPtr ctx_a = app(lambda("z", var("z")), a);
        ExprPtr ctx_b = app(lambda("z", var("z")), wrapped);
        CHECK(label_equiv(ctx_a, ctx_b, us()));
    }
}

TEST_CASE("run_small evaluates the core calculus") {
    auto cfg = config();
    EvalSuccess r = ok(run_small(parse1("3"), cfg));
    CHECK(r.conv.entries.empty());
    CHECK(pretty(r.value, us()) == "3");

    r = ok(run_small(parse1("({U}:(\\x.x)) (\\y.y)"), cfg));
    CHECK(r.value.label == lbl("{U}"));

    // the canonical diverger runs out of fuel
    auto cut = config(us(), nullptr, 2000);
    CHECK(fuel_exhausted(run_small(parse1("(\\x.x x) (\\x.x x)"), cut)));

    // prompts thread the conversation
    r = ok(run_small(parse1("{U}?(fork @'q')"), cfg));
    CHECK(pretty(r.value, us()) == "true");
    CHECK(r.conv.entries.empty());
}

TEST_CASE("forked terms evaluate in the big-step engine only behind the test flag") {
    auto cfg = config();
    ExprPtr term = make_expr(ForkedNode{Conversation{lbl("{U}"), {{"p", "r"}}}, parse1("@'q'")});
    EvalFailure f = fail_of(eval_top(term, cfg));
    CHECK(f.kind == ErrorKind::TypeMismatch);

    cfg.allow_forked_terms = true;
    EvalSuccess r = ok(eval_top(term, cfg));
    CHECK(r.conv.label == lbl("{U}"));  // the saved conversation was restored
    REQUIRE(r.conv.entries.size() == 1);
    CHECK(r.conv.entries[0].prompt == "p");

    // differential agreement for a program started mid-fork
    EvalConfig small_cfg = config();
    EvalOutcome small = run_small(term, small_cfg);
    EvalSuccess s = ok(small);
    CHECK(s.conv == r.conv);
    CHECK(values_observationally_equal(s.value, r.value, us()));
}

TEST_CASE("differential spot checks") {
    auto mk = [&]() {
        EvalConfig cfg;
        cfg.lattice = &us();
        cfg.model = make_transcript_backend(generated_prompt_transcript(), false);
        cfg.fuel = 3000;
        return cfg;
    };
    CHECK(differential_check(parse1("3"), mk(), mk()).verdict == DiffVerdict::Agree);
    CHECK(differential_check(parse1("(\\x.x x) (\\x.x x)"), mk(), mk()).verdict == DiffVerdict::BothCutOff);
    CHECK(differential_check(parse1("let_is_not_core"), mk(), mk()).verdict == DiffVerdict::Agree);  // both unbound
    CHECK(differential_check(parse1("{S}:@'alpha'"), mk(), mk()).verdict == DiffVerdict::Agree);     // both blocked
    // a prompt-bearing program agrees including the conversation
    CHECK(differential_check(parse1("{U}?(fork @\"alpha\")"), mk(), mk()).verdict == DiffVerdict::Agree);
    CHECK(differential_check(parse1("(\\c.fork {U}:c) (@\"alpha\")"), mk(), mk()).verdict == DiffVerdict::Agree);
}

TEST_CASE("generated core programs agree between the engines") {
    util::SplitMix64 rng(424242);
    std::size_t cut = 0;
    const int trials = 200;
    for (int i = 0; i < trials; ++i) {
        ExprPtr program = gen_core_program(us(), rng.next());
        EvalConfig big;
        big.lattice = &us();
        big.model = make_transcript_backend(generated_prompt_transcript(), false);
        big.fuel = 3000;
        EvalConfig small = big;
        small.model = make_transcript_backend(generated_prompt_transcript(), false);
        DiffResult r = differential_check(program, big, small);
        if (r.verdict == DiffVerdict::BothCutOff) {
            ++cut;
            continue;
        }
        CAPTURE(print_expr(program, us()));
        CAPTURE(r.details);
        CHECK(r.verdict == DiffVerdict::Agree);
    }
    CHECK(cut <= trials / 2);
}

TEST_CASE("stepping never mutates the conversation saved in a forked node") {
    auto cfg = config();
    Label bot = us().bot();
    Conversation saved{bot, {{"keep", "me"}}};
    StepState s{Conversation::empty(bot), make_expr(ForkedNode{saved, parse1("(\\x.x) (@'q')")})};
    for (int i = 0; i < 50; ++i) {
        auto next = step(s, bot, cfg);
        if (!next) break;
        const auto* forked = as<ForkedNode>(next->expr);
        if (forked) CHECK(forked->saved == saved);
        s = *next;
    }
}
