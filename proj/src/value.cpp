#include "llmbda/value.hpp"

#include <stdexcept>

namespace llmbda {

bool is_function(const ValuePtr& v) { return value_as<LambdaValue>(v) != nullptr; }

ExprPtr payload_to_expr(const ValuePtr& v, const LatticeSpec& lattice) {
    if (!v) throw std::runtime_error("internal: null value");
    return std::visit(
        [&](const auto& x) -> ExprPtr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, UnitLit>) {
                return unit_lit();
            } else if constexpr (std::is_same_v<T, bool>) {
                return bool_lit(x);
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return int_lit(x);
            } else if constexpr (std::is_same_v<T, std::string>) {
                return string_lit(x);
            } else if constexpr (std::is_same_v<T, LambdaValue>) {
                return make_expr(LambdaNode{x.param, x.body});
            } else if constexpr (std::is_same_v<T, ArrayValue>) {
                std::vector<ExprPtr> els;
                els.reserve(x.elements.size());
                for (const auto& el : x.elements) els.push_back(to_expr(el, lattice));
                return make_expr(ArrayNode{std::move(els)});
            } else if constexpr (std::is_same_v<T, RecordValue>) {
                std::vector<std::pair<std::string, ExprPtr>> fields;
                fields.reserve(x.fields.size());
                for (const auto& [k, val] : x.fields) fields.emplace_back(k, to_expr(val, lattice));
                return make_expr(RecordNode{std::move(fields)});
            }
        },
        v->node);
}

ExprPtr to_expr(const LabelledValue& v, const LatticeSpec& lattice) {
    ExprPtr payload = payload_to_expr(v.value, lattice);
    if (v.label == lattice.bot()) return payload;
    return make_expr(LabeledNode{v.label, payload});
}

LabelledValue value_from_expr(const ExprPtr& e, const LatticeSpec& lattice) {
    if (!e) throw std::runtime_error("internal: null expression");
    const Label bot = lattice.bot();
    return std::visit(
        [&](const auto& x) -> LabelledValue {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, LitNode>) {
                return std::visit([&](const auto& lit) { return LabelledValue{bot, make_value(lit)}; }, x.value);
            } else if constexpr (std::is_same_v<T, LambdaNode>) {
                return LabelledValue{bot, make_value(LambdaValue{x.param, x.body})};
            } else if constexpr (std::is_same_v<T, ArrayNode>) {
                ArrayValue arr;
                arr.elements.reserve(x.elements.size());
                for (const auto& el : x.elements) arr.elements.push_back(value_from_expr(el, lattice));
                return LabelledValue{bot, make_value(std::move(arr))};
            } else if constexpr (std::is_same_v<T, RecordNode>) {
                RecordValue rec;
                rec.fields.reserve(x.fields.size());
                for (const auto& [k, v] : x.fields) rec.fields.emplace_back(k, value_from_expr(v, lattice));
                return LabelledValue{bot, make_value(std::move(rec))};
            } else if constexpr (std::is_same_v<T, LabeledNode>) {
                // Prelude expansions are rendered parsimoniously but may carry
                // labels if a prelude definition labelled data explicitly.
                LabelledValue inner = value_from_expr(x.body, lattice);
                return LabelledValue{lattice.join(x.label, inner.label), inner.value};
            } else {
                throw std::runtime_error("internal: expression is not a value form");
            }
        },
        e->node);
}

Label join_all_labels(const LabelledValue& v, const LatticeSpec& lattice) {
    Label acc = v.label;
    if (const auto* arr = value_as<ArrayValue>(v.value)) {
        for (const auto& el : arr->elements) acc = lattice.join(acc, join_all_labels(el, lattice));
    } else if (const auto* rec = value_as<RecordValue>(v.value)) {
        for (const auto& [_, f] : rec->fields) acc = lattice.join(acc, join_all_labels(f, lattice));
    }
    return acc;
}

std::optional<bool> payload_equal(const ValuePtr& a, const ValuePtr& b) {
    if (is_function(a) || is_function(b)) return std::nullopt;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        [&](const auto& x) -> std::optional<bool> {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(b->node);
            if constexpr (std::is_same_v<T, UnitLit>) {
                return true;
            } else if constexpr (std::is_same_v<T, ArrayValue>) {
                if (x.elements.size() != y.elements.size()) return false;
                for (std::size_t i = 0; i < x.elements.size(); ++i) {
                    auto r = payload_equal(x.elements[i].value, y.elements[i].value);
                    if (!r) return std::nullopt;
                    if (!*r) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<T, RecordValue>) {
                if (x.fields.size() != y.fields.size()) return false;
                for (std::size_t i = 0; i < x.fields.size(); ++i) {
                    if (x.fields[i].first != y.fields[i].first) return false;
                    auto r = payload_equal(x.fields[i].second.value, y.fields[i].second.value);
                    if (!r) return std::nullopt;
                    if (!*r) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<T, LambdaValue>) {
                return std::nullopt;  // unreachable, guarded above
            } else {
                return x == y;
            }
        },
        a->node);
}

}  // namespace llmbda
