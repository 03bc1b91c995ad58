#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "llmbda/eval.hpp"
#include "llmbda/indist.hpp"
#include "llmbda/progen.hpp"
#include "llmbda/smallstep.hpp"

namespace llmbda {

enum class TrialStatus { Pass, Skipped, Violation };

struct TrialResult {
    TrialStatus status = TrialStatus::Pass;
    std::string skip_reason;  // fuel | assertion-failed | no-high-upgrade | other-failure
    std::string witness;      // replay details for violations
    std::uint64_t seed = 0;
};

struct CampaignSummary {
    std::size_t trials = 0;
    std::size_t passed = 0;
    std::size_t skipped = 0;
    std::size_t violations = 0;
    std::vector<TrialResult> violation_details;
    double non_skipped_fraction() const { return trials ? double(trials - skipped) / double(trials) : 0.0; }
};

/// Accumulates confinement violations from evaluator judgements:
/// pc must flow to the value label, and a history change requires pc to flow
/// to both history labels.
class ConfinementChecker {
  public:
    explicit ConfinementChecker(const LatticeSpec& lattice) : lattice_(&lattice) {}

    void observe(Label pc, const Conversation& before, const Conversation& after, const LabelledValue& value);
    JudgementHook hook();

    std::size_t judgements() const { return judgements_; }
    std::size_t violations() const { return details_.size(); }
    const std::vector<std::string>& details() const { return details_; }

  private:
    const LatticeSpec* lattice_;
    std::size_t judgements_ = 0;
    std::vector<std::string> details_;
};

/// Runs one TINI trial: generates the pair, evaluates both sides against the
/// shared deterministic transcript, and compares outcomes at level k.
/// Blocked runs (fuel, failed assertions, no-high-upgrade) are Skipped.
TrialResult tini_trial(const GenConfig& gen, std::uint64_t seed, std::int64_t fuel,
                       ConfinementChecker* confinement = nullptr);

/// Writes one JSON record per trial to `report` when non-null.
CampaignSummary run_tini_campaign(const GenConfig& gen, std::size_t trials, std::uint64_t seed0, std::int64_t fuel,
                                  std::ostream* report = nullptr, ConfinementChecker* confinement = nullptr);

/// Big/small differential campaign over generated core programs.
struct DiffSummary {
    std::size_t trials = 0;
    std::size_t agreed = 0;
    std::size_t cut_off = 0;
    std::vector<std::pair<std::uint64_t, std::string>> disagreements;  // (seed, details)
    double non_cut_off_fraction() const { return trials ? double(trials - cut_off) / double(trials) : 0.0; }
};
DiffSummary run_diff_campaign(const LatticeSpec& lattice, std::size_t trials, std::uint64_t seed0, std::int64_t fuel,
                              std::ostream* report = nullptr, ConfinementChecker* confinement = nullptr);

/// Erasure-congruence campaign over generated ~n value pairs.
struct ErasureSummary {
    std::size_t trials = 0;
    std::size_t passed = 0;
    std::vector<std::uint64_t> failures;
};
ErasureSummary run_erasure_campaign(const LatticeSpec& lattice, std::size_t trials, std::uint64_t seed0,
                                    std::ostream* report = nullptr);

/// Agreement between direct assert/strong-test evaluation and their
/// expansions (`if e?k then () else loop-forever` and
/// `let x = e in let b = x?k in k:b`).
struct DerivedRuleSummary {
    std::size_t trials = 0;
    std::size_t agreed = 0;
    std::vector<std::pair<std::uint64_t, std::string>> disagreements;
};
DerivedRuleSummary run_derived_rule_campaign(const LatticeSpec& lattice, std::size_t trials, std::uint64_t seed0,
                                             std::ostream* report = nullptr);

/// Fails when the backend is not formal (deterministic); harness entry
/// points call this before running trials.
void require_formal_backend(const ModelBackend& backend);

}  // namespace llmbda
