#pragma once

#include <string>

#include "llmbda/eval.hpp"
#include "llmbda/model.hpp"
#include "llmbda/parser.hpp"
#include "llmbda/printer.hpp"

namespace llmbda::test {

inline const LatticeSpec& us() { return LatticeSpec::powerset_us(); }

inline Label lbl(const char* text, const LatticeSpec& lattice = us()) {
    auto l = lattice.parse_label(text);
    REQUIRE(l.has_value());
    return *l;
}

inline ExprPtr parse1(const std::string& text, const LatticeSpec& lattice = us()) {
    return parse_expression(text, lattice);
}

inline EvalConfig config(const LatticeSpec& lattice = us(), ModelPtr model = nullptr, std::int64_t fuel = 100000) {
    EvalConfig cfg;
    cfg.lattice = &lattice;
    cfg.model = model ? std::move(model) : make_echo_backend();
    cfg.fuel = fuel;
    return cfg;
}

inline EvalOutcome run(const std::string& text, const EvalConfig& cfg) {
    return eval_top(parse1(text, *cfg.lattice), cfg);
}

inline EvalSuccess ok(const EvalOutcome& out) {
    const auto* s = success_of(out);
    if (!s) {
        if (const auto* f = failure_of(out)) FAIL("evaluation failed: ", f->message);
        FAIL("evaluation ran out of fuel");
    }
    REQUIRE(s != nullptr);
    return *s;
}

inline std::string show(const EvalOutcome& out, const LatticeSpec& lattice = us()) {
    return pretty(ok(out).value, lattice);
}

}  // namespace llmbda::test

namespace llmbda::test {

/// Keeps the tree alive for the duration of the test binary so node pointers
/// taken from temporaries stay valid.
inline std::vector<ExprPtr>& retained() {
    static std::vector<ExprPtr> v;
    return v;
}
template <typename T>
const T* nodep(ExprPtr e) {
    retained().push_back(std::move(e));
    return as<T>(retained().back());
}

}  // namespace llmbda::test

namespace llmbda::test {

inline EvalFailure fail_of(const EvalOutcome& out) {
    const auto* f = failure_of(out);
    REQUIRE(f != nullptr);
    return *f;
}

}  // namespace llmbda::test
