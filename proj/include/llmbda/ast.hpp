#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "llmbda/conversation.hpp"
#include "llmbda/lattice.hpp"

namespace llmbda {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct SourceLoc {
    int line = 0;
    int column = 0;
    bool valid() const { return line > 0; }
};

enum class BinOpKind { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

const char* binop_symbol(BinOpKind op);

// --- node payloads -----------------------------------------------------------

struct VarNode { std::string name; };
struct LambdaNode { std::string param; ExprPtr body; };
struct AppNode { ExprPtr fn; ExprPtr arg; };
struct PromptNode { ExprPtr arg; };
struct ForkNode { ExprPtr body; };
struct ClearNode {};
struct LabeledNode { Label label; ExprPtr body; };
struct TestNode { ExprPtr body; Label label; };

struct UnitLit {};
using LitValue = std::variant<UnitLit, bool, std::int64_t, std::string>;
struct LitNode { LitValue value; };

struct LetNode { std::string name; ExprPtr bound; ExprPtr body; };
struct IfNode { ExprPtr cond; ExprPtr then_branch; ExprPtr else_branch; };
struct ArrayNode { std::vector<ExprPtr> elements; };
struct IndexNode { ExprPtr array; ExprPtr index; };
struct RecordNode { std::vector<std::pair<std::string, ExprPtr>> fields; };
struct FieldNode { ExprPtr record; std::string name; };
struct FieldUpdateNode { ExprPtr record; std::string name; ExprPtr value; };
struct BinOpNode { BinOpKind op; ExprPtr lhs; ExprPtr rhs; };
struct NotNode { ExprPtr arg; };
struct IsFnNode { ExprPtr arg; };
/// String template: literal text pieces interleaved with embedded expressions.
struct InterpNode {
    struct Part {
        std::string text;  // literal text before the hole (may be empty)
        ExprPtr expr;      // null for the trailing text-only part
    };
    std::vector<Part> parts;
};
struct AssertNode { Label label; ExprPtr arg; };
struct StrongTestNode { ExprPtr arg; Label label; };

/// Small-step only: a forked computation holding the conversation to restore.
/// Never produced by the parser.
struct ForkedNode { Conversation saved; ExprPtr body; };

using ExprNode =
    std::variant<VarNode, LambdaNode, AppNode, PromptNode, ForkNode, ClearNode, LabeledNode, TestNode, LitNode,
                 LetNode, IfNode, ArrayNode, IndexNode, RecordNode, FieldNode, FieldUpdateNode, BinOpNode, NotNode,
                 IsFnNode, InterpNode, AssertNode, StrongTestNode, ForkedNode>;

struct Expr {
    ExprNode node;
    SourceLoc loc;
};

template <typename T>
ExprPtr make_expr(T&& node, SourceLoc loc = {}) {
    return std::make_shared<Expr>(Expr{ExprNode{std::forward<T>(node)}, loc});
}

template <typename T>
const T* as(const ExprPtr& e) {
    return e ? std::get_if<T>(&e->node) : nullptr;
}

// --- convenience constructors -------------------------------------------------

ExprPtr unit_lit();
ExprPtr bool_lit(bool b);
ExprPtr int_lit(std::int64_t n);
ExprPtr string_lit(std::string s);
ExprPtr var(std::string name);
ExprPtr lambda(std::string param, ExprPtr body);
ExprPtr app(ExprPtr fn, ExprPtr arg);

// --- structural operations ----------------------------------------------------

/// Structural equality, including labels and source-order record fields.
/// Source locations are ignored.
bool equal(const ExprPtr& a, const ExprPtr& b);

/// The free-variable set.
std::set<std::string> free_vars(const ExprPtr& e);
bool is_closed(const ExprPtr& e);

/// Substitutes closed `v` for every free occurrence of `x` in `e`.
/// No alpha-renaming is performed; `v` must be closed.
ExprPtr substitute(const ExprPtr& e, const std::string& x, const ExprPtr& v);

/// n-erasure: replaces every subterm labelled above n with the unit literal,
/// drops kept labels and test nodes, and recurses homomorphically elsewhere.
ExprPtr erase(const LatticeSpec& lattice, Label n, const ExprPtr& e);

/// True if the term contains any label-bearing construct (label expression,
/// test, assert, or strong test), anywhere including under binders.
bool mentions_labels(const ExprPtr& e);

/// Number of nodes (used by generators to enforce size budgets).
std::size_t node_count(const ExprPtr& e);

}  // namespace llmbda
