#pragma once

#include <cstdint>
#include <functional>

namespace llmbda::util {

/// Runs `fn` on a thread with a large stack and returns when it finishes.
/// Exceptions propagate to the caller. Substitution-based evaluation recurses
/// one C++ frame per rule application, so fuel-bounded runs of divergent
/// programs need far more than the default 8 MiB.
void run_with_large_stack(const std::function<void()>& fn, std::size_t stack_bytes = 512u << 20);

/// Deterministic 64-bit stream used by the generators; splitmix64 keeps
/// derived seeds independent.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    /// Uniform in [0, n).
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }
    bool chance(unsigned percent) { return below(100) < percent; }
};

}  // namespace llmbda::util
