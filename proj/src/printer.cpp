#include "llmbda/printer.hpp"

#include <stdexcept>

namespace llmbda {

namespace {

// Precedence classes, loosest first. A node is parenthesized when its class
// is looser than the context requires.
enum Prec : int {
    kOpen = 0,     // lambda, let, if, field update
    kOr = 1,
    kAnd = 2,
    kCmp = 3,
    kAdd = 4,
    kMul = 5,
    kUnary = 6,    // fork, @, not, is_fn, label forms, assert, strong_test
    kApp = 7,
    kPostfix = 8,
    kAtom = 9,
};

int binop_prec(BinOpKind op) {
    switch (op) {
        case BinOpKind::Or: return kOr;
        case BinOpKind::And: return kAnd;
        case BinOpKind::Eq:
        case BinOpKind::Ne:
        case BinOpKind::Lt:
        case BinOpKind::Le:
        case BinOpKind::Gt:
        case BinOpKind::Ge: return kCmp;
        case BinOpKind::Add:
        case BinOpKind::Sub: return kAdd;
        case BinOpKind::Mul:
        case BinOpKind::Div: return kMul;
    }
    return kAtom;
}

struct Printer {
    const LatticeSpec& lattice;
    std::string out;

    void print(const ExprPtr& e, int ctx) {
        int prec = node_prec(e);
        if (prec < ctx) {
            out += "(";
            emit(e);
            out += ")";
        } else {
            emit(e);
        }
    }

    int node_prec(const ExprPtr& e) {
        return std::visit(
            [&](const auto& x) -> int {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, LambdaNode> || std::is_same_v<T, LetNode> ||
                              std::is_same_v<T, IfNode> || std::is_same_v<T, FieldUpdateNode>) {
                    return kOpen;
                } else if constexpr (std::is_same_v<T, BinOpNode>) {
                    return binop_prec(x.op);
                } else if constexpr (std::is_same_v<T, NotNode> || std::is_same_v<T, IsFnNode> ||
                                     std::is_same_v<T, ForkNode> || std::is_same_v<T, PromptNode> ||
                                     std::is_same_v<T, LabeledNode> || std::is_same_v<T, TestNode> ||
                                     std::is_same_v<T, AssertNode> || std::is_same_v<T, StrongTestNode> ||
                                     std::is_same_v<T, ForkedNode>) {
                    return kUnary;
                } else if constexpr (std::is_same_v<T, AppNode>) {
                    return kApp;
                } else if constexpr (std::is_same_v<T, IndexNode> || std::is_same_v<T, FieldNode>) {
                    return kPostfix;
                } else {
                    return kAtom;
                }
            },
            e->node);
    }

    void emit(const ExprPtr& e) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, VarNode>) {
                    out += x.name;
                } else if constexpr (std::is_same_v<T, LambdaNode>) {
                    out += "\\" + x.param + ".";
                    print(x.body, kOpen);
                } else if constexpr (std::is_same_v<T, AppNode>) {
                    print(x.fn, kApp);
                    out += " ";
                    print(x.arg, kPostfix);
                } else if constexpr (std::is_same_v<T, PromptNode>) {
                    out += "@";
                    print(x.arg, kAtom);
                } else if constexpr (std::is_same_v<T, ForkNode>) {
                    out += "fork ";
                    print(x.body, kUnary);
                } else if constexpr (std::is_same_v<T, ClearNode>) {
                    out += "clear";
                } else if constexpr (std::is_same_v<T, LabeledNode>) {
                    out += lattice.show(x.label) + ":";
                    print(x.body, kUnary);
                } else if constexpr (std::is_same_v<T, TestNode>) {
                    out += lattice.show(x.label) + "?";
                    print(x.body, kUnary);
                } else if constexpr (std::is_same_v<T, LitNode>) {
                    emit_lit(x.value);
                } else if constexpr (std::is_same_v<T, LetNode>) {
                    out += "let " + x.name + " = ";
                    print(x.bound, kOpen);
                    out += " in ";
                    print(x.body, kOpen);
                } else if constexpr (std::is_same_v<T, IfNode>) {
                    out += "if ";
                    print(x.cond, kOpen);
                    out += " then ";
                    print(x.then_branch, kOpen);
                    out += " else ";
                    print(x.else_branch, kOpen);
                } else if constexpr (std::is_same_v<T, ArrayNode>) {
                    out += "[";
                    for (std::size_t i = 0; i < x.elements.size(); ++i) {
                        if (i) out += ", ";
                        print(x.elements[i], kOpen);
                    }
                    out += "]";
                } else if constexpr (std::is_same_v<T, IndexNode>) {
                    print(x.array, kPostfix);
                    out += ".[";
                    print(x.index, kOpen);
                    out += "]";
                } else if constexpr (std::is_same_v<T, RecordNode>) {
                    out += "{";
                    for (std::size_t i = 0; i < x.fields.size(); ++i) {
                        if (i) out += ", ";
                        emit_field_name(x.fields[i].first);
                        out += ": ";
                        print(x.fields[i].second, kOpen);
                    }
                    out += "}";
                } else if constexpr (std::is_same_v<T, FieldNode>) {
                    print(x.record, kPostfix);
                    out += "." + x.name;
                } else if constexpr (std::is_same_v<T, FieldUpdateNode>) {
                    print(x.record, kPostfix);
                    out += "." + x.name + " := ";
                    print(x.value, kOpen);
                } else if constexpr (std::is_same_v<T, BinOpNode>) {
                    int prec = binop_prec(x.op);
                    print(x.lhs, prec);
                    out += std::string(" ") + binop_symbol(x.op) + " ";
                    print(x.rhs, prec + 1);
                } else if constexpr (std::is_same_v<T, NotNode>) {
                    out += "not ";
                    print(x.arg, kUnary);
                } else if constexpr (std::is_same_v<T, IsFnNode>) {
                    out += "is_fn ";
                    print(x.arg, kUnary);
                } else if constexpr (std::is_same_v<T, InterpNode>) {
                    out += "\"";
                    for (const auto& p : x.parts) {
                        out += escape_string(p.text);
                        if (p.expr) {
                            out += "{";
                            print(p.expr, kOpen);
                            out += "}";
                        }
                    }
                    out += "\"";
                } else if constexpr (std::is_same_v<T, AssertNode>) {
                    out += "assert " + lattice.show(x.label) + " ";
                    print(x.arg, kUnary);
                } else if constexpr (std::is_same_v<T, StrongTestNode>) {
                    out += "strong_test " + lattice.show(x.label) + " ";
                    print(x.arg, kUnary);
                } else if constexpr (std::is_same_v<T, ForkedNode>) {
                    // Debug-only rendering; forked terms never reach user output.
                    out += "forked <conversation> ";
                    print(x.body, kUnary);
                }
            },
            e->node);
    }

    void emit_lit(const LitValue& v) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, UnitLit>) {
                    out += "()";
                } else if constexpr (std::is_same_v<T, bool>) {
                    out += x ? "true" : "false";
                } else if constexpr (std::is_same_v<T, std::int64_t>) {
                    out += std::to_string(x);
                } else {
                    out += "\"" + escape_string(x) + "\"";
                }
            },
            v);
    }

    void emit_field_name(const std::string& name) {
        bool ident = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
        for (char c : name)
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) ident = false;
        if (ident)
            out += name;
        else
            out += "\"" + escape_string(name) + "\"";
    }
};

bool is_value_form(const ExprPtr& e) {
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, LitNode> || std::is_same_v<T, LambdaNode>) {
                return true;
            } else if constexpr (std::is_same_v<T, ArrayNode>) {
                for (const auto& el : x.elements)
                    if (!is_value_form(el)) return false;
                return true;
            } else if constexpr (std::is_same_v<T, RecordNode>) {
                for (const auto& [_, v] : x.fields)
                    if (!is_value_form(v)) return false;
                return true;
            } else {
                return false;
            }
        },
        e->node);
}

bool contains_label_or_test(const ExprPtr& e) {
    if (!e) return false;
    if (std::holds_alternative<LabeledNode>(e->node) || std::holds_alternative<TestNode>(e->node)) return true;
    bool found = false;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, LambdaNode>) {
                found = contains_label_or_test(x.body);
            } else if constexpr (std::is_same_v<T, AppNode>) {
                found = contains_label_or_test(x.fn) || contains_label_or_test(x.arg);
            } else if constexpr (std::is_same_v<T, PromptNode> || std::is_same_v<T, NotNode> ||
                                 std::is_same_v<T, IsFnNode> || std::is_same_v<T, AssertNode> ||
                                 std::is_same_v<T, StrongTestNode>) {
                found = contains_label_or_test(x.arg);
            } else if constexpr (std::is_same_v<T, ForkNode> || std::is_same_v<T, ForkedNode>) {
                found = contains_label_or_test(x.body);
            } else if constexpr (std::is_same_v<T, LetNode>) {
                found = contains_label_or_test(x.bound) || contains_label_or_test(x.body);
            } else if constexpr (std::is_same_v<T, IfNode>) {
                found = contains_label_or_test(x.cond) || contains_label_or_test(x.then_branch) ||
                        contains_label_or_test(x.else_branch);
            } else if constexpr (std::is_same_v<T, ArrayNode>) {
                for (const auto& el : x.elements) found = found || contains_label_or_test(el);
            } else if constexpr (std::is_same_v<T, IndexNode>) {
                found = contains_label_or_test(x.array) || contains_label_or_test(x.index);
            } else if constexpr (std::is_same_v<T, RecordNode>) {
                for (const auto& [_, v] : x.fields) found = found || contains_label_or_test(v);
            } else if constexpr (std::is_same_v<T, FieldNode>) {
                found = contains_label_or_test(x.record);
            } else if constexpr (std::is_same_v<T, FieldUpdateNode>) {
                found = contains_label_or_test(x.record) || contains_label_or_test(x.value);
            } else if constexpr (std::is_same_v<T, BinOpNode>) {
                found = contains_label_or_test(x.lhs) || contains_label_or_test(x.rhs);
            } else if constexpr (std::is_same_v<T, InterpNode>) {
                for (const auto& p : x.parts)
                    if (p.expr) found = found || contains_label_or_test(p.expr);
            }
        },
        e->node);
    return found;
}

}  // namespace

std::string escape_string(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\n': out += "\\n"; break;
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '{': out += "\\{"; break;
            default: out += c;
        }
    }
    return out;
}

std::string print_expr(const ExprPtr& e, const LatticeSpec& lattice) {
    Printer p{lattice, {}};
    p.print(e, kOpen);
    return std::move(p.out);
}

std::string serialize(const ExprPtr& v, const LatticeSpec& lattice) {
    if (!v || !is_value_form(v)) throw std::runtime_error("serialize: not a value form");
    if (contains_label_or_test(v)) throw std::runtime_error("serialize: value is not label-free");
    return print_expr(v, lattice);
}

std::string pretty(const ExprPtr& e, const LatticeSpec& lattice) { return print_expr(e, lattice); }

std::string pretty(const LabelledValue& v, const LatticeSpec& lattice) {
    std::string prefix = v.label == lattice.bot() ? "" : lattice.show(v.label) + ":";
    return std::visit(
        [&](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ArrayValue>) {
                std::string out = prefix + "[";
                for (std::size_t i = 0; i < x.elements.size(); ++i) {
                    if (i) out += ", ";
                    out += pretty(x.elements[i], lattice);
                }
                return out + "]";
            } else if constexpr (std::is_same_v<T, RecordValue>) {
                std::string out = prefix + "{";
                for (std::size_t i = 0; i < x.fields.size(); ++i) {
                    if (i) out += ", ";
                    out += x.fields[i].first + ": " + pretty(x.fields[i].second, lattice);
                }
                return out + "}";
            } else {
                return prefix + print_expr(payload_to_expr(v.value, lattice), lattice);
            }
        },
        v.value->node);
}

std::string pretty_binding(const LabelledValue& v, const LatticeSpec& lattice) {
    if (is_function(v.value)) {
        std::string prefix = v.label == lattice.bot() ? "" : lattice.show(v.label) + ":";
        return prefix + "fn";
    }
    return pretty(v, lattice);
}

std::string pretty_conversation(const Conversation& c, const LatticeSpec& lattice) {
    std::string out = lattice.show_or_bot(c.label) + ":[";
    for (std::size_t i = 0; i < c.entries.size(); ++i) {
        if (i) out += ", ";
        out += "(\"" + escape_string(c.entries[i].prompt) + "\", \"" + escape_string(c.entries[i].response) + "\")";
    }
    return out + "]";
}

}  // namespace llmbda
