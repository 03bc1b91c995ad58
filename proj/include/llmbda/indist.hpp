#pragma once

#include "llmbda/ast.hpp"
#include "llmbda/conversation.hpp"
#include "llmbda/lattice.hpp"

namespace llmbda {

/// k-indistinguishability on terms: l:e0 relates to m:e1 whenever neither
/// label flows to k; otherwise the relation is homomorphic (same constructor,
/// equal atoms, pairwise related children). Derived constructors are related
/// homomorphically.
bool indistinguishable(const LatticeSpec& lattice, Label k, const ExprPtr& e0, const ExprPtr& e1);

/// k-indistinguishability on labelled conversations: identical, or both
/// labels fail to flow to k.
bool indistinguishable_conv(const LatticeSpec& lattice, Label k, const Conversation& c0, const Conversation& c1);

enum class ErasureCheck { Pass, Fail, PreconditionViolated };

/// Erasure congruence oracle: given v ~n v', n-erasure must agree on both.
ErasureCheck erasure_lemma_check(const LatticeSpec& lattice, Label n, const ExprPtr& v0, const ExprPtr& v1);

}  // namespace llmbda
