#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "mveq/error.hpp"

namespace mveq {

enum class NodeKind { Literal, Variable, Constant, Negate, Binary, Call };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class UnaryFn { Sin, Cos, Exp, Ln, Sinh, Cosh, Sqrt };
enum class NamedConst { Pi, E };

/// Immutable expression tree for a univariate real function of `x`.
/// Nodes are shared; copying an Expr is cheap and thread-safe.
class Expr {
public:
    struct Node {
        NodeKind kind;
        double literal = 0.0;             // Literal
        NamedConst constant = NamedConst::Pi; // Constant
        BinaryOp op = BinaryOp::Add;      // Binary
        UnaryFn fn = UnaryFn::Sin;        // Call
        std::shared_ptr<const Node> a, b; // operands (a for unary, a/b for binary)
    };

    static Expr literal(double v);
    static Expr variable();
    static Expr constant(NamedConst c);
    /// Negation of a literal folds into a signed literal, so no constructible
    /// tree ever has Negate directly above Literal (keeps serialization
    /// round-trips structural).
    static Expr negate(Expr operand);
    static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
    static Expr call(UnaryFn fn, Expr arg);

    NodeKind kind() const { return node_->kind; }
    double literalValue() const { return node_->literal; }
    NamedConst constantName() const { return node_->constant; }
    BinaryOp binaryOp() const { return node_->op; }
    UnaryFn callFn() const { return node_->fn; }
    Expr child(int i) const;

    /// True if any descendant is the variable node.
    bool dependsOnVariable() const;

    const Node& root() const { return *node_; }

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

bool structurally_equal(const Expr& a, const Expr& b);

/// Parse an expression in the CLI grammar.  Standard precedence: `^` binds
/// tightest (right-associative), then unary minus, then `*` `/`, then `+` `-`.
/// Implicit multiplication is a syntax error.  Known functions: sin cos exp
/// ln sinh cosh sqrt; known constants: pi e; the variable is `x`.
/// Throws ParseError with the byte position of the offending token.
Expr parse(std::string_view src);

/// Render back to grammar text; parse(serialize(e)) is structurally equal to e.
std::string serialize(const Expr& e);

/// Evaluate at x.  Domain violations (ln of a non-positive number, division
/// by zero, non-integer power of a non-positive base) and non-finite
/// intermediates throw DomainError eagerly; NaN/Inf are never returned.
double eval(const Expr& e, double x);

/// Exact symbolic derivative.  The result is lightly folded (units and zeros)
/// but not canonicalized; correctness is by evaluation.
Expr differentiate(const Expr& e);

} // namespace mveq
