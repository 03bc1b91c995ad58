#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "llmbda/harness.hpp"
#include "llmbda/util.hpp"

using namespace llmbda;
using namespace llmbda::test;

namespace {

const LatticeSpec& c3() { return LatticeSpec::chain3(); }

GenConfig gen_config(const LatticeSpec& lattice, Sublanguage sub, Label k) {
    GenConfig g;
    g.lattice = &lattice;
    g.sub = sub;
    g.single_label = lattice.top();
    g.k = k;
    return g;
}

}  // namespace

TEST_CASE("indistinguishability on terms") {
    Label s = lbl("{S}");
    // both labels invisible at k
    CHECK(indistinguishable(us(), s, parse1("{U,S}:1"), parse1("{U}:2")));
    // chain3: M:true ~L M:(H:false)
    Label L = c3().bot();
    CHECK(indistinguishable(c3(), L, parse1("{M}:true", c3()), parse1("{M}:({H}:false)", c3())));
    // distinct unlabelled literals are distinguishable
    CHECK_FALSE(indistinguishable(us(), s, int_lit(1), int_lit(2)));
    // homomorphic cases need equal atoms
    CHECK(indistinguishable(us(), s, parse1("\\x.{U,S}:1"), parse1("\\x.{U}:2")));
    CHECK_FALSE(indistinguishable(us(), s, parse1("\\x.x"), parse1("\\y.y")));
    CHECK_FALSE(indistinguishable(us(), s, parse1("{S}?1"), parse1("{U}?1")));   // test labels differ
    CHECK(indistinguishable(us(), s, parse1("{U}?({U,S}:1)"), parse1("{U}?({U}:2)")));
    // same-label bodies must relate
    CHECK(indistinguishable(us(), s, parse1("{U}:1"), parse1("{U}:1")));
    CHECK(indistinguishable(us(), lbl("{U}"), parse1("{S}:1"), parse1("{S}:2")));        // {S} invisible at {U}
    CHECK_FALSE(indistinguishable(us(), s, parse1("{S}:1"), parse1("{S}:2")));           // visible at {S}
}

TEST_CASE("indistinguishability is an equivalence and monotone on generated pairs") {
    util::SplitMix64 rng(99);
    for (std::size_t ki = 0; ki < us().size(); ++ki) {
        Label k = us().element(ki);
        GenConfig g = gen_config(us(), Sublanguage::Unrestricted, k);
        for (int i = 0; i < 60; ++i) {
            auto [e0, e1] = gen_pair(g, rng.next());
            REQUIRE(indistinguishable(us(), k, e0, e1));  // by construction
            CHECK(indistinguishable(us(), k, e1, e0));    // symmetry
            CHECK(indistinguishable(us(), k, e0, e0));    // reflexivity
            // monotonicity: m leq k implies ~k included in ~m
            for (std::size_t mi = 0; mi < us().size(); ++mi) {
                Label m = us().element(mi);
                if (us().leq(m, k)) CHECK(indistinguishable(us(), m, e0, e1));
            }
            // substitutivity on a fresh variable
            auto [v0, v1] = gen_value_pair(us(), k, rng.next());
            ExprPtr w0 = make_expr(LetNode{"hole", v0, e0});
            ExprPtr w1 = make_expr(LetNode{"hole", v1, e1});
            CHECK(indistinguishable(us(), k, w0, w1));
        }
    }
}

TEST_CASE("conversation indistinguishability") {
    Conversation a{us().bot(), {{"a", "b"}}};
    CHECK(indistinguishable_conv(us(), lbl("{S}"), a, a));  // HistSame
    Conversation x{us().top(), {{"p", "q"}}};
    Conversation y{us().top(), {{"r", "s"}}};
    CHECK(indistinguishable_conv(us(), lbl("{S}"), x, y));  // HistDiff: top not leq {S}
    Conversation b{us().bot(), {{"a", "c"}}};
    CHECK_FALSE(indistinguishable_conv(us(), lbl("{S}"), a, b));
}

TEST_CASE("generated pairs stay inside their sublanguage") {
    util::SplitMix64 rng(123);
    for (int i = 0; i < 80; ++i) {
        GenConfig g = gen_config(us(), Sublanguage::NoTest, us().bot());
        auto [a, b] = gen_pair(g, rng.next());
        CHECK(respects_sublanguage(us(), Sublanguage::NoTest, g.single_label, a));
        CHECK(respects_sublanguage(us(), Sublanguage::NoTest, g.single_label, b));
        CHECK(is_closed(a));
        CHECK(is_closed(b));

        GenConfig gs = gen_config(us(), Sublanguage::SingleLabel, us().element(1));
        gs.single_label = lbl("{U}");
        auto [c, d] = gen_pair(gs, rng.next());
        CHECK(respects_sublanguage(us(), Sublanguage::SingleLabel, lbl("{U}"), c));
        CHECK(respects_sublanguage(us(), Sublanguage::SingleLabel, lbl("{U}"), d));

        GenConfig ga = gen_config(c3(), Sublanguage::AssertStrongOnly, c3().bot());
        auto [e, f] = gen_pair(ga, rng.next());
        CHECK(respects_sublanguage(c3(), Sublanguage::AssertStrongOnly, c3().top(), e));
        CHECK(respects_sublanguage(c3(), Sublanguage::AssertStrongOnly, c3().top(), f));
    }
    // size 0 produces identical pairs
    GenConfig tiny = gen_config(us(), Sublanguage::NoTest, us().bot());
    tiny.max_nodes = 1;
    auto [a, b] = gen_pair(tiny, 5);
    CHECK(equal(a, b));
}

TEST_CASE("the three-level counterexample yields a violation with L:true vs L:false") {
    // M:true vs M:(H:false), tested against M, observed at L.
    ExprPtr e0 = parse1("{M}?({M}:true)", c3());
    ExprPtr e1 = parse1("{M}?({M}:({H}:false))", c3());
    Label L = c3().bot();
    REQUIRE(indistinguishable(c3(), L, e0, e1));

    EvalConfig cfg = config(c3());
    EvalSuccess r0 = ok(eval_top(e0, cfg));
    EvalSuccess r1 = ok(eval_top(e1, cfg));
    CHECK(r0.value.label == L);
    CHECK(r1.value.label == L);
    CHECK(pretty(r0.value, c3()) == "true");
    CHECK(pretty(r1.value, c3()) == "false");
    CHECK_FALSE(indistinguishable(c3(), L, to_expr(r0.value, c3()), to_expr(r1.value, c3())));
}

TEST_CASE("sound sublanguages show zero violations at desk scale") {
    for (std::size_t ki = 0; ki < us().size(); ++ki) {
        GenConfig g = gen_config(us(), Sublanguage::NoTest, us().element(ki));
        CampaignSummary s = run_tini_campaign(g, 150, 1000 + ki, 100000);
        CHECK(s.violations == 0);
        CHECK(s.non_skipped_fraction() >= 0.3);
    }
    GenConfig g1 = gen_config(us(), Sublanguage::SingleLabel, lbl("{S}"));
    g1.single_label = lbl("{U}");
    CampaignSummary s1 = run_tini_campaign(g1, 200, 77, 100000);
    CHECK(s1.violations == 0);

    GenConfig g2 = gen_config(c3(), Sublanguage::AssertStrongOnly, c3().element(1));
    CampaignSummary s2 = run_tini_campaign(g2, 200, 78, 100000);
    CHECK(s2.violations == 0);
}

TEST_CASE("the unrestricted language over chain3 is caught by the fuzz") {
    bool found = false;
    for (std::size_t ki = 0; ki < c3().size() && !found; ++ki) {
        GenConfig g = gen_config(c3(), Sublanguage::Unrestricted, c3().element(ki));
        CampaignSummary s = run_tini_campaign(g, 800, 4242, 100000);
        found = s.violations > 0;
    }
    CHECK(found);
}

TEST_CASE("erasure lemma checker distinguishes pass, fail, and bad preconditions") {
    Label u = lbl("{U}");
    // identical values pass
    CHECK(erasure_lemma_check(us(), u, parse1("[1, 2]"), parse1("[1, 2]")) == ErasureCheck::Pass);
    // values differing only above n pass
    CHECK(erasure_lemma_check(us(), u, parse1("[{U,S}:1, 2]"), parse1("[{S}:9, 2]")) == ErasureCheck::Pass);
    // precondition violation: the values differ below n
    CHECK(erasure_lemma_check(us(), u, parse1("[1, 2]"), parse1("[3, 2]")) == ErasureCheck::PreconditionViolated);

    util::SplitMix64 rng(7);
    for (int i = 0; i < 200; ++i) {
        Label n = us().element(rng.below(us().size()));
        auto [v0, v1] = gen_value_pair(us(), n, rng.next());
        CHECK(erasure_lemma_check(us(), n, v0, v1) == ErasureCheck::Pass);
    }
}

TEST_CASE("erasure congruence holds via the campaign runner") {
    ErasureSummary s = run_erasure_campaign(us(), 300, 12, nullptr);
    CHECK(s.passed == s.trials);
    ErasureSummary s3 = run_erasure_campaign(c3(), 200, 13, nullptr);
    CHECK(s3.passed == s3.trials);
}

TEST_CASE("derived-rule agreement campaign") {
    DerivedRuleSummary s = run_derived_rule_campaign(us(), 250, 21, nullptr);
    CHECK(s.agreed == s.trials);
    DerivedRuleSummary s3 = run_derived_rule_campaign(c3(), 150, 22, nullptr);
    CHECK(s3.agreed == s3.trials);
}

TEST_CASE("confinement holds over the fuzz corpus and the checker has teeth") {
    ConfinementChecker checker(us());
    GenConfig g = gen_config(us(), Sublanguage::Unrestricted, lbl("{S}"));
    CampaignSummary s = run_tini_campaign(g, 200, 31, 100000, nullptr, &checker);
    CHECK(s.trials == 200);
    CHECK(checker.judgements() > 1000);
    CHECK(checker.violations() == 0);

    ConfinementChecker fake(us());
    LabelledValue bad{us().bot(), make_value(std::int64_t{0})};
    Conversation c0{us().bot(), {}};
    Conversation c1{us().bot(), {{"p", "r"}}};
    fake.observe(lbl("{S}"), c0, c1, bad);  // pc is high but value and histories are low
    CHECK(fake.violations() == 3);
}

TEST_CASE("differential campaign summary shape") {
    DiffSummary s = run_diff_campaign(us(), 120, 51, 3000, nullptr);
    CHECK(s.trials == 120);
    CHECK(s.disagreements.empty());
    CHECK(s.non_cut_off_fraction() >= 0.7);
}
