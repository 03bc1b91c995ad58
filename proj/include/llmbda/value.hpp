#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "llmbda/ast.hpp"
#include "llmbda/lattice.hpp"

namespace llmbda {

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

/// A label paired with a closed value. After any successful evaluation under
/// pc, pc flows to the label (confinement).
struct LabelledValue {
    Label label;
    ValuePtr value;
};

struct LambdaValue {
    std::string param;
    ExprPtr body;  // closed except for param
};
struct ArrayValue {
    std::vector<LabelledValue> elements;
};
struct RecordValue {
    std::vector<std::pair<std::string, LabelledValue>> fields;
    const LabelledValue* find(const std::string& name) const {
        for (const auto& [k, v] : fields)
            if (k == name) return &v;
        return nullptr;
    }
};

using ValueNode = std::variant<UnitLit, bool, std::int64_t, std::string, LambdaValue, ArrayValue, RecordValue>;

struct Value {
    ValueNode node;
};

template <typename T>
ValuePtr make_value(T&& v) {
    return std::make_shared<Value>(Value{ValueNode{std::forward<T>(v)}});
}

template <typename T>
const T* value_as(const ValuePtr& v) {
    return v ? std::get_if<T>(&v->node) : nullptr;
}

bool is_function(const ValuePtr& v);

/// Renders a labelled value back into surface syntax: non-bottom labels
/// become label expressions, bottom labels are omitted (parsimonious).
/// The result is closed and re-evaluates to an equal value.
ExprPtr to_expr(const LabelledValue& v, const LatticeSpec& lattice);
/// Renders only the payload; the top-level label is not wrapped.
ExprPtr payload_to_expr(const ValuePtr& v, const LatticeSpec& lattice);

/// Converts a label-free value-form expression (a parse_response result or a
/// prelude expansion) into a value; inner labels are bottom. Throws on
/// non-value forms.
LabelledValue value_from_expr(const ExprPtr& e, const LatticeSpec& lattice);

/// Join of the top label and every nested element/field label.
Label join_all_labels(const LabelledValue& v, const LatticeSpec& lattice);

/// Deep structural equality of payloads, ignoring labels. Errors (returns
/// nullopt) when a function is encountered on either side.
std::optional<bool> payload_equal(const ValuePtr& a, const ValuePtr& b);

}  // namespace llmbda
