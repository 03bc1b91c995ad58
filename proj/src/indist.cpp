#include "llmbda/indist.hpp"

namespace llmbda {

bool indistinguishable(const LatticeSpec& lattice, Label k, const ExprPtr& e0, const ExprPtr& e1) {
    if (!e0 || !e1) return e0 == e1;
    const auto* l0 = as<LabeledNode>(e0);
    const auto* l1 = as<LabeledNode>(e1);
    if (l0 && l1) {
        // Either both labels are invisible at k, or the labels agree and the
        // bodies are related.
        if (!lattice.leq(l0->label, k) && !lattice.leq(l1->label, k)) return true;
        return l0->label == l1->label && indistinguishable(lattice, k, l0->body, l1->body);
    }
    if (e0->node.index() != e1->node.index()) return false;
    auto rec = [&](const ExprPtr& a, const ExprPtr& b) { return indistinguishable(lattice, k, a, b); };
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(e1->node);
            if constexpr (std::is_same_v<T, VarNode>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, LambdaNode>) {
                return x.param == y.param && rec(x.body, y.body);
            } else if constexpr (std::is_same_v<T, AppNode>) {
                return rec(x.fn, y.fn) && rec(x.arg, y.arg);
            } else if constexpr (std::is_same_v<T, PromptNode>) {
                return rec(x.arg, y.arg);
            } else if constexpr (std::is_same_v<T, ForkNode>) {
                return rec(x.body, y.body);
            } else if constexpr (std::is_same_v<T, ClearNode>) {
                return true;
            } else if constexpr (std::is_same_v<T, LabeledNode>) {
                return false;  // handled above
            } else if constexpr (std::is_same_v<T, TestNode>) {
                return x.label == y.label && rec(x.body, y.body);
            } else if constexpr (std::is_same_v<T, LitNode>) {
                return equal(e0, e1);
            } else if constexpr (std::is_same_v<T, LetNode>) {
                return x.name == y.name && rec(x.bound, y.bound) && rec(x.body, y.body);
            } else if constexpr (std::is_same_v<T, IfNode>) {
                return rec(x.cond, y.cond) && rec(x.then_branch, y.then_branch) && rec(x.else_branch, y.else_branch);
            } else if constexpr (std::is_same_v<T, ArrayNode>) {
                if (x.elements.size() != y.elements.size()) return false;
                for (std::size_t i = 0; i < x.elements.size(); ++i)
                    if (!rec(x.elements[i], y.elements[i])) return false;
                return true;
            } else if constexpr (std::is_same_v<T, IndexNode>) {
                return rec(x.array, y.array) && rec(x.index, y.index);
            } else if constexpr (std::is_same_v<T, RecordNode>) {
                if (x.fields.size() != y.fields.size()) return false;
                for (std::size_t i = 0; i < x.fields.size(); ++i) {
                    if (x.fields[i].first != y.fields[i].first) return false;
                    if (!rec(x.fields[i].second, y.fields[i].second)) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<T, FieldNode>) {
                return x.name == y.name && rec(x.record, y.record);
            } else if constexpr (std::is_same_v<T, FieldUpdateNode>) {
                return x.name == y.name && rec(x.record, y.record) && rec(x.value, y.value);
            } else if constexpr (std::is_same_v<T, BinOpNode>) {
                return x.op == y.op && rec(x.lhs, y.lhs) && rec(x.rhs, y.rhs);
            } else if constexpr (std::is_same_v<T, NotNode>) {
                return rec(x.arg, y.arg);
            } else if constexpr (std::is_same_v<T, IsFnNode>) {
                return rec(x.arg, y.arg);
            } else if constexpr (std::is_same_v<T, InterpNode>) {
                if (x.parts.size() != y.parts.size()) return false;
                for (std::size_t i = 0; i < x.parts.size(); ++i) {
                    if (x.parts[i].text != y.parts[i].text) return false;
                    if (static_cast<bool>(x.parts[i].expr) != static_cast<bool>(y.parts[i].expr)) return false;
                    if (x.parts[i].expr && !rec(x.parts[i].expr, y.parts[i].expr)) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<T, AssertNode>) {
                return x.label == y.label && rec(x.arg, y.arg);
            } else if constexpr (std::is_same_v<T, StrongTestNode>) {
                return x.label == y.label && rec(x.arg, y.arg);
            } else if constexpr (std::is_same_v<T, ForkedNode>) {
                return indistinguishable_conv(lattice, k, x.saved, y.saved) && rec(x.body, y.body);
            }
        },
        e0->node);
}

bool indistinguishable_conv(const LatticeSpec& lattice, Label k, const Conversation& c0, const Conversation& c1) {
    if (!lattice.leq(c0.label, k) && !lattice.leq(c1.label, k)) return true;  // HistDiff
    return c0 == c1;                                                          // HistSame
}

ErasureCheck erasure_lemma_check(const LatticeSpec& lattice, Label n, const ExprPtr& v0, const ExprPtr& v1) {
    if (!indistinguishable(lattice, n, v0, v1)) return ErasureCheck::PreconditionViolated;
    return equal(erase(lattice, n, v0), erase(lattice, n, v1)) ? ErasureCheck::Pass : ErasureCheck::Fail;
}

}  // namespace llmbda
