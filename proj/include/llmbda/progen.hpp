#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "llmbda/ast.hpp"
#include "llmbda/lattice.hpp"
#include "llmbda/model.hpp"

namespace llmbda {

/// The theorem's three sound sublanguages plus the unrestricted language
/// (the negative control).
enum class Sublanguage { NoTest, SingleLabel, AssertStrongOnly, Unrestricted };

const char* sublanguage_name(Sublanguage s);
std::optional<Sublanguage> sublanguage_from_name(const std::string& name);

struct GenConfig {
    const LatticeSpec* lattice = nullptr;
    Sublanguage sub = Sublanguage::Unrestricted;
    Label single_label{0};  // the one non-bottom label for SingleLabel
    Label k{0};             // observer level; rewrites happen under labels not below k
    std::size_t max_nodes = 40;
    bool with_prompts = true;
};

/// The deterministic transcript backing generated prompts: every pool prompt
/// has a matching rule, so prompting always terminates. Responses are
/// label-free and test-free (the closure condition on parse).
Transcript generated_prompt_transcript();

/// Generates a program pair with e0 ~k e1 by construction: the two sides are
/// built in lockstep and may differ only beneath labels that do not flow
/// to k. Both are closed and within the sublanguage.
std::pair<ExprPtr, ExprPtr> gen_pair(const GenConfig& cfg, std::uint64_t seed);

/// The single-program variant (used by the confinement fuzz).
ExprPtr gen_program(const GenConfig& cfg, std::uint64_t seed);

/// Core-calculus programs (plus literals) for big/small differential runs.
ExprPtr gen_core_program(const LatticeSpec& lattice, std::uint64_t seed, std::size_t max_nodes = 40);

/// Value-form pairs related by ~n, for the erasure-congruence oracle.
std::pair<ExprPtr, ExprPtr> gen_value_pair(const LatticeSpec& lattice, Label n, std::uint64_t seed,
                                           std::size_t max_nodes = 24);

/// A single value-form expression with labels (assert/strong-test trials).
ExprPtr gen_labelled_value_expr(const LatticeSpec& lattice, std::uint64_t seed, std::size_t max_nodes = 16);

/// Structural scan: true when the term stays inside the sublanguage.
bool respects_sublanguage(const LatticeSpec& lattice, Sublanguage sub, Label single_label, const ExprPtr& e);

}  // namespace llmbda
