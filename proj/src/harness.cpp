#include "llmbda/harness.hpp"

#include <ostream>

#include "json.hpp"
#include "llmbda/printer.hpp"
#include "llmbda/util.hpp"

namespace llmbda {

using nlohmann::json;

void require_formal_backend(const ModelBackend& backend) {
    if (!backend.is_formal())
        throw std::runtime_error("the property harness needs a deterministic backend; '" + backend.describe() +
                                 "' is not formal");
}

void ConfinementChecker::observe(Label pc, const Conversation& before, const Conversation& after,
                                 const LabelledValue& value) {
    ++judgements_;
    if (!lattice_->leq(pc, value.label))
        details_.push_back("pc " + lattice_->show_or_bot(pc) + " does not flow to value label " +
                           lattice_->show_or_bot(value.label));
    if (before != after) {
        if (!lattice_->leq(pc, before.label))
            details_.push_back("history changed but pc " + lattice_->show_or_bot(pc) +
                               " does not flow to the incoming label " + lattice_->show_or_bot(before.label));
        if (!lattice_->leq(pc, after.label))
            details_.push_back("history changed but pc " + lattice_->show_or_bot(pc) +
                               " does not flow to the outgoing label " + lattice_->show_or_bot(after.label));
    }
}

JudgementHook ConfinementChecker::hook() {
    return [this](Label pc, const Conversation& before, const Conversation& after, const LabelledValue& value) {
        observe(pc, before, after, value);
    };
}

namespace {

EvalConfig trial_config(const LatticeSpec& lattice, std::int64_t fuel, ConfinementChecker* confinement) {
    EvalConfig cfg;
    cfg.lattice = &lattice;
    cfg.model = make_transcript_backend(generated_prompt_transcript(), /*strict=*/false);
    cfg.fuel = fuel;
    if (confinement) cfg.hook = confinement->hook();
    return cfg;
}

// Blocked runs leak only through termination, which TINI ignores.
std::optional<std::string> skip_reason(const EvalOutcome& out) {
    if (fuel_exhausted(out)) return "fuel";
    const auto* f = failure_of(out);
    if (!f) return std::nullopt;
    switch (f->kind) {
        case ErrorKind::AssertionFailed: return "assertion-failed";
        case ErrorKind::NoHighUpgrade: return "no-high-upgrade";
        default: return "other-failure";
    }
}

}  // namespace

TrialResult tini_trial(const GenConfig& gen, std::uint64_t seed, std::int64_t fuel, ConfinementChecker* confinement) {
    TrialResult result;
    result.seed = seed;
    auto [e0, e1] = gen_pair(gen, seed);

    const LatticeSpec& lattice = *gen.lattice;
    EvalConfig cfg0 = trial_config(lattice, fuel, confinement);
    EvalConfig cfg1 = trial_config(lattice, fuel, confinement);
    EvalOutcome o0 = eval_top(e0, cfg0);
    EvalOutcome o1 = eval_top(e1, cfg1);

    if (auto reason = skip_reason(o0)) {
        result.status = TrialStatus::Skipped;
        result.skip_reason = *reason;
        return result;
    }
    if (auto reason = skip_reason(o1)) {
        result.status = TrialStatus::Skipped;
        result.skip_reason = *reason;
        return result;
    }
    const auto* s0 = success_of(o0);
    const auto* s1 = success_of(o1);
    bool conv_ok = indistinguishable_conv(lattice, gen.k, s0->conv, s1->conv);
    bool value_ok = indistinguishable(lattice, gen.k, to_expr(s0->value, lattice), to_expr(s1->value, lattice));
    if (conv_ok && value_ok) {
        result.status = TrialStatus::Pass;
        return result;
    }
    result.status = TrialStatus::Violation;
    std::string witness;
    if (!conv_ok)
        witness += "conversations distinguishable at " + lattice.show_or_bot(gen.k) + ": " +
                   pretty_conversation(s0->conv, lattice) + " vs " + pretty_conversation(s1->conv, lattice) + "; ";
    if (!value_ok)
        witness += "values distinguishable at " + lattice.show_or_bot(gen.k) + ": " + pretty(s0->value, lattice) +
                   " vs " + pretty(s1->value, lattice) + "; ";
    witness += "e0 = " + print_expr(e0, lattice) + "; e1 = " + print_expr(e1, lattice) +
               "; seed = " + std::to_string(seed);
    result.witness = witness;
    return result;
}

CampaignSummary run_tini_campaign(const GenConfig& gen, std::size_t trials, std::uint64_t seed0, std::int64_t fuel,
                                  std::ostream* report, ConfinementChecker* confinement) {
    CampaignSummary summary;
    util::SplitMix64 seeds(seed0);
    for (std::size_t i = 0; i < trials; ++i) {
        std::uint64_t seed = seeds.next();
        TrialResult r = tini_trial(gen, seed, fuel, confinement);
        ++summary.trials;
        switch (r.status) {
            case TrialStatus::Pass: ++summary.passed; break;
            case TrialStatus::Skipped: ++summary.skipped; break;
            case TrialStatus::Violation:
                ++summary.violations;
                summary.violation_details.push_back(r);
                break;
        }
        if (report) {
            json record = {{"trial", i},
                           {"seed", seed},
                           {"property", "tini"},
                           {"sublanguage", sublanguage_name(gen.sub)},
                           {"k", gen.lattice->show_or_bot(gen.k)},
                           {"status", r.status == TrialStatus::Pass      ? "pass"
                                      : r.status == TrialStatus::Skipped ? "skipped"
                                                                         : "violation"}};
            if (!r.skip_reason.empty()) record["skip_reason"] = r.skip_reason;
            if (!r.witness.empty()) record["witness"] = r.witness;
            *report << record.dump() << "\n";
        }
    }
    return summary;
}

DiffSummary run_diff_campaign(const LatticeSpec& lattice, std::size_t trials, std::uint64_t seed0, std::int64_t fuel,
                              std::ostream* report, ConfinementChecker* confinement) {
    DiffSummary summary;
    util::SplitMix64 seeds(seed0);
    for (std::size_t i = 0; i < trials; ++i) {
        std::uint64_t seed = seeds.next();
        ExprPtr program = gen_core_program(lattice, seed);
        EvalConfig cfg_big = trial_config(lattice, fuel, confinement);
        EvalConfig cfg_small = trial_config(lattice, fuel, nullptr);
        DiffResult r = differential_check(program, cfg_big, cfg_small);
        ++summary.trials;
        if (r.verdict == DiffVerdict::BothCutOff) {
            ++summary.cut_off;
        } else if (r.verdict == DiffVerdict::Agree) {
            ++summary.agreed;
        } else {
            summary.disagreements.emplace_back(seed, r.details + "; program = " + print_expr(program, lattice));
        }
        if (report) {
            json record = {{"trial", i},
                           {"seed", seed},
                           {"property", "diff"},
                           {"verdict", r.verdict == DiffVerdict::Agree      ? "agree"
                                       : r.verdict == DiffVerdict::Disagree ? "disagree"
                                                                            : "both-cut-off"}};
            if (!r.details.empty()) record["details"] = r.details;
            *report << record.dump() << "\n";
        }
    }
    return summary;
}

ErasureSummary run_erasure_campaign(const LatticeSpec& lattice, std::size_t trials, std::uint64_t seed0,
                                    std::ostream* report) {
    ErasureSummary summary;
    util::SplitMix64 seeds(seed0);
    for (std::size_t i = 0; i < trials; ++i) {
        std::uint64_t seed = seeds.next();
        Label n = lattice.element(seed % lattice.size());
        auto [v0, v1] = gen_value_pair(lattice, n, seed);
        ErasureCheck check = erasure_lemma_check(lattice, n, v0, v1);
        ++summary.trials;
        // The generator guarantees the ~n precondition; anything else is a bug.
        if (check == ErasureCheck::Pass)
            ++summary.passed;
        else
            summary.failures.push_back(seed);
        if (report) {
            json record = {{"trial", i},
                           {"seed", seed},
                           {"property", "erase"},
                           {"n", lattice.show_or_bot(n)},
                           {"status", check == ErasureCheck::Pass ? "pass" : "fail"}};
            *report << record.dump() << "\n";
        }
    }
    return summary;
}

namespace {

// The paper's nonterminating else-branch, (\x. x x)(\x. x x).
ExprPtr omega() {
    ExprPtr half = lambda("x", app(var("x"), var("x")));
    return app(half, half);
}

bool same_success(const LatticeSpec& lattice, const EvalOutcome& a, const EvalOutcome& b) {
    const auto* sa = success_of(a);
    const auto* sb = success_of(b);
    if (!sa || !sb) return false;
    return sa->conv == sb->conv && sa->value.label == sb->value.label &&
           equal(payload_to_expr(sa->value.value, lattice), payload_to_expr(sb->value.value, lattice));
}

}  // namespace

DerivedRuleSummary run_derived_rule_campaign(const LatticeSpec& lattice, std::size_t trials, std::uint64_t seed0,
                                             std::ostream* report) {
    DerivedRuleSummary summary;
    util::SplitMix64 seeds(seed0);
    for (std::size_t i = 0; i < trials; ++i) {
        std::uint64_t seed = seeds.next();
        ExprPtr subject = gen_labelled_value_expr(lattice, seed);
        Label level = lattice.element(seed % lattice.size());
        bool strong = (seed >> 8) % 2 == 0;

        EvalConfig cfg = trial_config(lattice, /*fuel=*/20000, nullptr);
        std::string disagreement;
        if (strong) {
            // strong_test l e  ==  let x = e in let b = l?x in l:b
            ExprPtr direct = make_expr(StrongTestNode{subject, level});
            ExprPtr expansion = make_expr(
                LetNode{"x", subject,
                        make_expr(LetNode{"b", make_expr(TestNode{var("x"), level}),
                                          make_expr(LabeledNode{level, var("b")})})});
            EvalOutcome od = eval_top(direct, cfg);
            EvalOutcome oe = eval_top(expansion, cfg);
            if (!same_success(lattice, od, oe)) disagreement = "strong test disagrees with its expansion";
        } else {
            // assert l e  ==  if l?e then () else omega;  a failed assertion
            // maps to the expansion diverging (fuel exhaustion).
            ExprPtr direct = make_expr(AssertNode{level, subject});
            ExprPtr expansion =
                make_expr(IfNode{make_expr(TestNode{subject, level}), unit_lit(), omega()});
            EvalOutcome od = eval_top(direct, cfg);
            EvalOutcome oe = eval_top(expansion, cfg);
            const auto* fd = failure_of(od);
            if (fd && fd->kind == ErrorKind::AssertionFailed) {
                if (!fuel_exhausted(oe)) disagreement = "failed assert but the expansion terminated";
            } else if (success_of(od)) {
                if (!same_success(lattice, od, oe)) disagreement = "passing assert disagrees with its expansion";
            } else {
                disagreement = "assert produced an unexpected outcome";
            }
        }
        ++summary.trials;
        if (disagreement.empty())
            ++summary.agreed;
        else
            summary.disagreements.emplace_back(seed, disagreement);
        if (report) {
            json record = {{"trial", i},
                           {"seed", seed},
                           {"property", "derived-rules"},
                           {"form", strong ? "strong-test" : "assert"},
                           {"status", disagreement.empty() ? "agree" : "disagree"}};
            if (!disagreement.empty()) record["details"] = disagreement;
            *report << record.dump() << "\n";
        }
    }
    return summary;
}

}  // namespace llmbda
