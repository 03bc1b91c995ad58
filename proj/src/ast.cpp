#include "llmbda/ast.hpp"

#include <stdexcept>

namespace llmbda {

const char* binop_symbol(BinOpKind op) {
    switch (op) {
        case BinOpKind::Add: return "+";
        case BinOpKind::Sub: return "-";
        case BinOpKind::Mul: return "*";
        case BinOpKind::Div: return "/";
        case BinOpKind::Eq: return "==";
        case BinOpKind::Ne: return "!=";
        case BinOpKind::Lt: return "<";
        case BinOpKind::Le: return "<=";
        case BinOpKind::Gt: return ">";
        case BinOpKind::Ge: return ">=";
        case BinOpKind::And: return "&&";
        case BinOpKind::Or: return "||";
    }
    return "?";
}

ExprPtr unit_lit() { return make_expr(LitNode{UnitLit{}}); }
ExprPtr bool_lit(bool b) { return make_expr(LitNode{b}); }
ExprPtr int_lit(std::int64_t n) { return make_expr(LitNode{n}); }
ExprPtr string_lit(std::string s) { return make_expr(LitNode{std::move(s)}); }
ExprPtr var(std::string name) { return make_expr(VarNode{std::move(name)}); }
ExprPtr lambda(std::string param, ExprPtr body) { return make_expr(LambdaNode{std::move(param), std::move(body)}); }
ExprPtr app(ExprPtr fn, ExprPtr arg) { return make_expr(AppNode{std::move(fn), std::move(arg)}); }

namespace {

bool lit_equal(const LitValue& a, const LitValue& b) {
    if (a.index() != b.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, UnitLit>) {
                return true;
            } else {
                return x == std::get<T>(b);
            }
        },
        a);
}

}  // namespace

bool equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(b->node);
            if constexpr (std::is_same_v<T, VarNode>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, LambdaNode>) {
                return x.param == y.param && equal(x.body, y.body);
            } else if constexpr (std::is_same_v<T, AppNode>) {
                return equal(x.fn, y.fn) && equal(x.arg, y.arg);
            } else if constexpr (std::is_same_v<T, PromptNode>) {
                return equal(x.arg, y.arg);
            } else if constexpr (std::is_same_v<T, ForkNode>) {
                return equal(x.body, y.body);
            } else if constexpr (std::is_same_v<T, ClearNode>) {
                return true;
            } else if constexpr (std::is_same_v<T, LabeledNode>) {
                return x.label == y.label && equal(x.body, y.body);
            } else if constexpr (std::is_same_v<T, TestNode>) {
                return x.label == y.label && equal(x.body, y.body);
            } else if constexpr (std::is_same_v<T, LitNode>) {
                return lit_equal(x.value, y.value);
            } else if constexpr (std::is_same_v<T, LetNode>) {
                return x.name == y.name && equal(x.bound, y.bound) && equal(x.body, y.body);
            } else if constexpr (std::is_same_v<T, IfNode>) {
                return equal(x.cond, y.cond) && equal(x.then_branch, y.then_branch) &&
                       equal(x.else_branch, y.else_branch);
            } else if constexpr (std::is_same_v<T, ArrayNode>) {
                if (x.elements.size() != y.elements.size()) return false;
                for (std::size_t i = 0; i < x.elements.size(); ++i)
                    if (!equal(x.elements[i], y.elements[i])) return false;
                return true;
            } else if constexpr (std::is_same_v<T, IndexNode>) {
                return equal(x.array, y.array) && equal(x.index, y.index);
            } else if constexpr (std::is_same_v<T, RecordNode>) {
                if (x.fields.size() != y.fields.size()) return false;
                for (std::size_t i = 0; i < x.fields.size(); ++i) {
                    if (x.fields[i].first != y.fields[i].first) return false;
                    if (!equal(x.fields[i].second, y.fields[i].second)) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<T, FieldNode>) {
                return x.name == y.name && equal(x.record, y.record);
            } else if constexpr (std::is_same_v<T, FieldUpdateNode>) {
                return x.name == y.name && equal(x.record, y.record) && equal(x.value, y.value);
            } else if constexpr (std::is_same_v<T, BinOpNode>) {
                return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
            } else if constexpr (std::is_same_v<T, NotNode>) {
                return equal(x.arg, y.arg);
            } else if constexpr (std::is_same_v<T, IsFnNode>) {
                return equal(x.arg, y.arg);
            } else if constexpr (std::is_same_v<T, InterpNode>) {
                if (x.parts.size() != y.parts.size()) return false;
                for (std::size_t i = 0; i < x.parts.size(); ++i) {
                    if (x.parts[i].text != y.parts[i].text) return false;
                    if (static_cast<bool>(x.parts[i].expr) != static_cast<bool>(y.parts[i].expr)) return false;
                    if (x.parts[i].expr && !equal(x.parts[i].expr, y.parts[i].expr)) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<T, AssertNode>) {
                return x.label == y.label && equal(x.arg, y.arg);
            } else if constexpr (std::is_same_v<T, StrongTestNode>) {
                return x.label == y.label && equal(x.arg, y.arg);
            } else if constexpr (std::is_same_v<T, ForkedNode>) {
                return x.saved == y.saved && equal(x.body, y.body);
            }
        },
        a->node);
}

namespace {

void collect_free(const ExprPtr& e, std::set<std::string>& bound, std::set<std::string>& out) {
    if (!e) return;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, VarNode>) {
                if (!bound.count(x.name)) out.insert(x.name);
            } else if constexpr (std::is_same_v<T, LambdaNode>) {
                bool inserted = bound.insert(x.param).second;
                collect_free(x.body, bound, out);
                if (inserted) bound.erase(x.param);
            } else if constexpr (std::is_same_v<T, AppNode>) {
                collect_free(x.fn, bound, out);
                collect_free(x.arg, bound, out);
            } else if constexpr (std::is_same_v<T, PromptNode>) {
                collect_free(x.arg, bound, out);
            } else if constexpr (std::is_same_v<T, ForkNode>) {
                collect_free(x.body, bound, out);
            } else if constexpr (std::is_same_v<T, LabeledNode>) {
                collect_free(x.body, bound, out);
            } else if constexpr (std::is_same_v<T, TestNode>) {
                collect_free(x.body, bound, out);
            } else if constexpr (std::is_same_v<T, LetNode>) {
                collect_free(x.bound, bound, out);
                bool inserted = bound.insert(x.name).second;
                collect_free(x.body, bound, out);
                if (inserted) bound.erase(x.name);
            } else if constexpr (std::is_same_v<T, IfNode>) {
                collect_free(x.cond, bound, out);
                collect_free(x.then_branch, bound, out);
                collect_free(x.else_branch, bound, out);
            } else if constexpr (std::is_same_v<T, ArrayNode>) {
                for (const auto& el : x.elements) collect_free(el, bound, out);
            } else if constexpr (std::is_same_v<T, IndexNode>) {
                collect_free(x.array, bound, out);
                collect_free(x.index, bound, out);
            } else if constexpr (std::is_same_v<T, RecordNode>) {
                for (const auto& [_, v] : x.fields) collect_free(v, bound, out);
            } else if constexpr (std::is_same_v<T, FieldNode>) {
                collect_free(x.record, bound, out);
            } else if constexpr (std::is_same_v<T, FieldUpdateNode>) {
                collect_free(x.record, bound, out);
                collect_free(x.value, bound, out);
            } else if constexpr (std::is_same_v<T, BinOpNode>) {
                collect_free(x.lhs, bound, out);
                collect_free(x.rhs, bound, out);
            } else if constexpr (std::is_same_v<T, NotNode>) {
                collect_free(x.arg, bound, out);
            } else if constexpr (std::is_same_v<T, IsFnNode>) {
                collect_free(x.arg, bound, out);
            } else if constexpr (std::is_same_v<T, InterpNode>) {
                for (const auto& p : x.parts)
                    if (p.expr) collect_free(p.expr, bound, out);
            } else if constexpr (std::is_same_v<T, AssertNode>) {
                collect_free(x.arg, bound, out);
            } else if constexpr (std::is_same_v<T, StrongTestNode>) {
                collect_free(x.arg, bound, out);
            } else if constexpr (std::is_same_v<T, ForkedNode>) {
                collect_free(x.body, bound, out);
            }
        },
        e->node);
}

}  // namespace

std::set<std::string> free_vars(const ExprPtr& e) {
    std::set<std::string> bound, out;
    collect_free(e, bound, out);
    return out;
}

bool is_closed(const ExprPtr& e) { return free_vars(e).empty(); }

ExprPtr substitute(const ExprPtr& e, const std::string& x, const ExprPtr& v) {
    if (!e) return e;
    return std::visit(
        [&](const auto& n) -> ExprPtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, VarNode>) {
                return n.name == x ? v : e;
            } else if constexpr (std::is_same_v<T, LambdaNode>) {
                if (n.param == x) return e;  // shadowed
                auto body = substitute(n.body, x, v);
                return body == n.body ? e : make_expr(LambdaNode{n.param, body}, e->loc);
            } else if constexpr (std::is_same_v<T, AppNode>) {
                auto fn = substitute(n.fn, x, v);
                auto arg = substitute(n.arg, x, v);
                return (fn == n.fn && arg == n.arg) ? e : make_expr(AppNode{fn, arg}, e->loc);
            } else if constexpr (std::is_same_v<T, PromptNode>) {
                auto arg = substitute(n.arg, x, v);
                return arg == n.arg ? e : make_expr(PromptNode{arg}, e->loc);
            } else if constexpr (std::is_same_v<T, ForkNode>) {
                auto body = substitute(n.body, x, v);
                return body == n.body ? e : make_expr(ForkNode{body}, e->loc);
            } else if constexpr (std::is_same_v<T, ClearNode>) {
                return e;
            } else if constexpr (std::is_same_v<T, LabeledNode>) {
                auto body = substitute(n.body, x, v);
                return body == n.body ? e : make_expr(LabeledNode{n.label, body}, e->loc);
            } else if constexpr (std::is_same_v<T, TestNode>) {
                auto body = substitute(n.body, x, v);
                return body == n.body ? e : make_expr(TestNode{body, n.label}, e->loc);
            } else if constexpr (std::is_same_v<T, LitNode>) {
                return e;
            } else if constexpr (std::is_same_v<T, LetNode>) {
                auto bound = substitute(n.bound, x, v);
                auto body = n.name == x ? n.body : substitute(n.body, x, v);
                return (bound == n.bound && body == n.body) ? e : make_expr(LetNode{n.name, bound, body}, e->loc);
            } else if constexpr (std::is_same_v<T, IfNode>) {
                auto c = substitute(n.cond, x, v);
                auto t = substitute(n.then_branch, x, v);
                auto f = substitute(n.else_branch, x, v);
                return (c == n.cond && t == n.then_branch && f == n.else_branch)
                           ? e
                           : make_expr(IfNode{c, t, f}, e->loc);
            } else if constexpr (std::is_same_v<T, ArrayNode>) {
                std::vector<ExprPtr> els;
                els.reserve(n.elements.size());
                bool changed = false;
                for (const auto& el : n.elements) {
                    els.push_back(substitute(el, x, v));
                    changed |= els.back() != el;
                }
                return changed ? make_expr(ArrayNode{std::move(els)}, e->loc) : e;
            } else if constexpr (std::is_same_v<T, IndexNode>) {
                auto a = substitute(n.array, x, v);
                auto i = substitute(n.index, x, v);
                return (a == n.array && i == n.index) ? e : make_expr(IndexNode{a, i}, e->loc);
            } else if constexpr (std::is_same_v<T, RecordNode>) {
                std::vector<std::pair<std::string, ExprPtr>> fields;
                fields.reserve(n.fields.size());
                bool changed = false;
                for (const auto& [k, val] : n.fields) {
                    fields.emplace_back(k, substitute(val, x, v));
                    changed |= fields.back().second != val;
                }
                return changed ? make_expr(RecordNode{std::move(fields)}, e->loc) : e;
            } else if constexpr (std::is_same_v<T, FieldNode>) {
                auto r = substitute(n.record, x, v);
                return r == n.record ? e : make_expr(FieldNode{r, n.name}, e->loc);
            } else if constexpr (std::is_same_v<T, FieldUpdateNode>) {
                auto r = substitute(n.record, x, v);
                auto val = substitute(n.value, x, v);
                return (r == n.record && val == n.value) ? e : make_expr(FieldUpdateNode{r, n.name, val}, e->loc);
            } else if constexpr (std::is_same_v<T, BinOpNode>) {
                auto l = substitute(n.lhs, x, v);
                auto r = substitute(n.rhs, x, v);
                return (l == n.lhs && r == n.rhs) ? e : make_expr(BinOpNode{n.op, l, r}, e->loc);
            } else if constexpr (std::is_same_v<T, NotNode>) {
                auto a = substitute(n.arg, x, v);
                return a == n.arg ? e : make_expr(NotNode{a}, e->loc);
            } else if constexpr (std::is_same_v<T, IsFnNode>) {
                auto a = substitute(n.arg, x, v);
                return a == n.arg ? e : make_expr(IsFnNode{a}, e->loc);
            } else if constexpr (std::is_same_v<T, InterpNode>) {
                InterpNode out;
                out.parts.reserve(n.parts.size());
                bool changed = false;
                for (const auto& p : n.parts) {
                    InterpNode::Part q{p.text, p.expr ? substitute(p.expr, x, v) : nullptr};
                    changed |= q.expr != p.expr;
                    out.parts.push_back(std::move(q));
                }
                return changed ? make_expr(std::move(out), e->loc) : e;
            } else if constexpr (std::is_same_v<T, AssertNode>) {
                auto a = substitute(n.arg, x, v);
                return a == n.arg ? e : make_expr(AssertNode{n.label, a}, e->loc);
            } else if constexpr (std::is_same_v<T, StrongTestNode>) {
                auto a = substitute(n.arg, x, v);
                return a == n.arg ? e : make_expr(StrongTestNode{a, n.label}, e->loc);
            } else if constexpr (std::is_same_v<T, ForkedNode>) {
                auto body = substitute(n.body, x, v);
                return body == n.body ? e : make_expr(ForkedNode{n.saved, body}, e->loc);
            }
        },
        e->node);
}

ExprPtr erase(const LatticeSpec& lattice, Label n, const ExprPtr& e) {
    if (!e) return e;
    return std::visit(
        [&](const auto& x) -> ExprPtr {
            using T = std::decay_t<decltype(x)>;
            auto rec = [&](const ExprPtr& sub) { return erase(lattice, n, sub); };
            if constexpr (std::is_same_v<T, LabeledNode>) {
                if (lattice.leq(x.label, n)) return rec(x.body);
                return unit_lit();
            } else if constexpr (std::is_same_v<T, TestNode>) {
                return rec(x.body);
            } else if constexpr (std::is_same_v<T, VarNode> || std::is_same_v<T, ClearNode> ||
                                 std::is_same_v<T, LitNode>) {
                return e;
            } else if constexpr (std::is_same_v<T, LambdaNode>) {
                return make_expr(LambdaNode{x.param, rec(x.body)}, e->loc);
            } else if constexpr (std::is_same_v<T, AppNode>) {
                return make_expr(AppNode{rec(x.fn), rec(x.arg)}, e->loc);
            } else if constexpr (std::is_same_v<T, PromptNode>) {
                return make_expr(PromptNode{rec(x.arg)}, e->loc);
            } else if constexpr (std::is_same_v<T, ForkNode>) {
                return make_expr(ForkNode{rec(x.body)}, e->loc);
            } else if constexpr (std::is_same_v<T, LetNode>) {
                return make_expr(LetNode{x.name, rec(x.bound), rec(x.body)}, e->loc);
            } else if constexpr (std::is_same_v<T, IfNode>) {
                return make_expr(IfNode{rec(x.cond), rec(x.then_branch), rec(x.else_branch)}, e->loc);
            } else if constexpr (std::is_same_v<T, ArrayNode>) {
                std::vector<ExprPtr> els;
                els.reserve(x.elements.size());
                for (const auto& el : x.elements) els.push_back(rec(el));
                return make_expr(ArrayNode{std::move(els)}, e->loc);
            } else if constexpr (std::is_same_v<T, IndexNode>) {
                return make_expr(IndexNode{rec(x.array), rec(x.index)}, e->loc);
            } else if constexpr (std::is_same_v<T, RecordNode>) {
                std::vector<std::pair<std::string, ExprPtr>> fields;
                fields.reserve(x.fields.size());
                for (const auto& [k, v] : x.fields) fields.emplace_back(k, rec(v));
                return make_expr(RecordNode{std::move(fields)}, e->loc);
            } else if constexpr (std::is_same_v<T, FieldNode>) {
                return make_expr(FieldNode{rec(x.record), x.name}, e->loc);
            } else if constexpr (std::is_same_v<T, FieldUpdateNode>) {
                return make_expr(FieldUpdateNode{rec(x.record), x.name, rec(x.value)}, e->loc);
            } else if constexpr (std::is_same_v<T, BinOpNode>) {
                return make_expr(BinOpNode{x.op, rec(x.lhs), rec(x.rhs)}, e->loc);
            } else if constexpr (std::is_same_v<T, NotNode>) {
                return make_expr(NotNode{rec(x.arg)}, e->loc);
            } else if constexpr (std::is_same_v<T, IsFnNode>) {
                return make_expr(IsFnNode{rec(x.arg)}, e->loc);
            } else if constexpr (std::is_same_v<T, InterpNode>) {
                InterpNode out;
                out.parts.reserve(x.parts.size());
                for (const auto& p : x.parts) out.parts.push_back({p.text, p.expr ? rec(p.expr) : nullptr});
                return make_expr(std::move(out), e->loc);
            } else if constexpr (std::is_same_v<T, AssertNode>) {
                return make_expr(AssertNode{x.label, rec(x.arg)}, e->loc);
            } else if constexpr (std::is_same_v<T, StrongTestNode>) {
                return make_expr(StrongTestNode{rec(x.arg), x.label}, e->loc);
            } else if constexpr (std::is_same_v<T, ForkedNode>) {
                throw std::runtime_error("internal: erase over forked term");
            }
        },
        e->node);
}

namespace {

template <typename F>
void for_each_child(const ExprPtr& e, F&& f) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, LambdaNode> || std::is_same_v<T, ForkNode> ||
                          std::is_same_v<T, LabeledNode> || std::is_same_v<T, TestNode> ||
                          std::is_same_v<T, ForkedNode>) {
                f(x.body);
            } else if constexpr (std::is_same_v<T, AppNode>) {
                f(x.fn);
                f(x.arg);
            } else if constexpr (std::is_same_v<T, PromptNode> || std::is_same_v<T, NotNode> ||
                                 std::is_same_v<T, IsFnNode> || std::is_same_v<T, AssertNode> ||
                                 std::is_same_v<T, StrongTestNode>) {
                f(x.arg);
            } else if constexpr (std::is_same_v<T, LetNode>) {
                f(x.bound);
                f(x.body);
            } else if constexpr (std::is_same_v<T, IfNode>) {
                f(x.cond);
                f(x.then_branch);
                f(x.else_branch);
            } else if constexpr (std::is_same_v<T, ArrayNode>) {
                for (const auto& el : x.elements) f(el);
            } else if constexpr (std::is_same_v<T, IndexNode>) {
                f(x.array);
                f(x.index);
            } else if constexpr (std::is_same_v<T, RecordNode>) {
                for (const auto& [_, v] : x.fields) f(v);
            } else if constexpr (std::is_same_v<T, FieldNode>) {
                f(x.record);
            } else if constexpr (std::is_same_v<T, FieldUpdateNode>) {
                f(x.record);
                f(x.value);
            } else if constexpr (std::is_same_v<T, BinOpNode>) {
                f(x.lhs);
                f(x.rhs);
            } else if constexpr (std::is_same_v<T, InterpNode>) {
                for (const auto& p : x.parts)
                    if (p.expr) f(p.expr);
            }
        },
        e->node);
}

}  // namespace

bool mentions_labels(const ExprPtr& e) {
    if (!e) return false;
    if (std::holds_alternative<LabeledNode>(e->node) || std::holds_alternative<TestNode>(e->node) ||
        std::holds_alternative<AssertNode>(e->node) || std::holds_alternative<StrongTestNode>(e->node))
        return true;
    bool found = false;
    for_each_child(e, [&](const ExprPtr& c) { found = found || mentions_labels(c); });
    return found;
}

std::size_t node_count(const ExprPtr& e) {
    if (!e) return 0;
    std::size_t n = 1;
    for_each_child(e, [&](const ExprPtr& c) { n += node_count(c); });
    return n;
}

}  // namespace llmbda
