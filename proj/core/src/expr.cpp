#include "mveq/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

namespace mveq {

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr makeNode(Expr::Node n) { return std::make_shared<const Expr::Node>(std::move(n)); }

} // namespace

Expr Expr::literal(double v) {
    Node n;
    n.kind = NodeKind::Literal;
    n.literal = v;
    return Expr(makeNode(std::move(n)));
}

Expr Expr::variable() {
    Node n;
    n.kind = NodeKind::Variable;
    return Expr(makeNode(std::move(n)));
}

Expr Expr::constant(NamedConst c) {
    Node n;
    n.kind = NodeKind::Constant;
    n.constant = c;
    return Expr(makeNode(std::move(n)));
}

Expr Expr::negate(Expr operand) {
    if (operand.kind() == NodeKind::Literal)
        return literal(-operand.literalValue());
    Node n;
    n.kind = NodeKind::Negate;
    n.a = operand.node_;
    return Expr(makeNode(std::move(n)));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
    Node n;
    n.kind = NodeKind::Binary;
    n.op = op;
    n.a = lhs.node_;
    n.b = rhs.node_;
    return Expr(makeNode(std::move(n)));
}

Expr Expr::call(UnaryFn fn, Expr arg) {
    Node n;
    n.kind = NodeKind::Call;
    n.fn = fn;
    n.a = arg.node_;
    return Expr(makeNode(std::move(n)));
}

Expr Expr::child(int i) const {
    const NodePtr& p = (i == 0) ? node_->a : node_->b;
    if (!p) throw Error("expr node has no child " + std::to_string(i));
    return Expr(p);
}

bool Expr::dependsOnVariable() const {
    switch (kind()) {
        case NodeKind::Variable: return true;
        case NodeKind::Literal:
        case NodeKind::Constant: return false;
        case NodeKind::Negate:
        case NodeKind::Call: return child(0).dependsOnVariable();
        case NodeKind::Binary:
            return child(0).dependsOnVariable() || child(1).dependsOnVariable();
    }
    return false;
}

namespace {

bool nodesEqual(const Expr::Node& a, const Expr::Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case NodeKind::Literal: return a.literal == b.literal;
        case NodeKind::Variable: return true;
        case NodeKind::Constant: return a.constant == b.constant;
        case NodeKind::Negate: return nodesEqual(*a.a, *b.a);
        case NodeKind::Call: return a.fn == b.fn && nodesEqual(*a.a, *b.a);
        case NodeKind::Binary:
            return a.op == b.op && nodesEqual(*a.a, *b.a) && nodesEqual(*a.b, *b.b);
    }
    return false;
}

} // namespace

bool structurally_equal(const Expr& a, const Expr& b) {
    return nodesEqual(a.root(), b.root());
}

// ---------------------------------------------------------------------------
// Tokenizer + recursive-descent parser
// ---------------------------------------------------------------------------

namespace {

enum class TokKind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    TokKind kind;
    double number = 0.0;
    std::string ident;
    std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token t;
        t.pos = i;
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && src[j] == '.') {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    ++k;
                    while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
                    j = k;
                }
            }
            std::string text(src.substr(i, j - i));
            t.kind = TokKind::Number;
            t.number = std::strtod(text.c_str(), nullptr);
            out.push_back(std::move(t));
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            t.kind = TokKind::Ident;
            t.ident = std::string(src.substr(i, j - i));
            out.push_back(std::move(t));
            i = j;
            continue;
        }
        switch (c) {
            case '+': t.kind = TokKind::Plus; break;
            case '-': t.kind = TokKind::Minus; break;
            case '*': t.kind = TokKind::Star; break;
            case '/': t.kind = TokKind::Slash; break;
            case '^': t.kind = TokKind::Caret; break;
            case '(': t.kind = TokKind::LParen; break;
            case ')': t.kind = TokKind::RParen; break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", i);
        }
        out.push_back(std::move(t));
        ++i;
    }
    Token end;
    end.kind = TokKind::End;
    end.pos = src.size();
    out.push_back(std::move(end));
    return out;
}

std::optional<UnaryFn> lookupFunction(const std::string& name) {
    if (name == "sin") return UnaryFn::Sin;
    if (name == "cos") return UnaryFn::Cos;
    if (name == "exp") return UnaryFn::Exp;
    if (name == "ln") return UnaryFn::Ln;
    if (name == "sinh") return UnaryFn::Sinh;
    if (name == "cosh") return UnaryFn::Cosh;
    if (name == "sqrt") return UnaryFn::Sqrt;
    return std::nullopt;
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

    Expr parseAll() {
        Expr e = parseSum();
        const Token& t = peek();
        if (t.kind != TokKind::End)
            throw ParseError("unexpected token (implicit multiplication is not allowed)", t.pos);
        return e;
    }

private:
    const Token& peek() const { return toks_[idx_]; }
    const Token& advance() { return toks_[idx_++]; }
    bool accept(TokKind k) {
        if (peek().kind == k) {
            ++idx_;
            return true;
        }
        return false;
    }

    Expr parseSum() {
        Expr lhs = parseProduct();
        for (;;) {
            if (accept(TokKind::Plus))
                lhs = Expr::binary(BinaryOp::Add, lhs, parseProduct());
            else if (accept(TokKind::Minus))
                lhs = Expr::binary(BinaryOp::Sub, lhs, parseProduct());
            else
                return lhs;
        }
    }

    Expr parseProduct() {
        Expr lhs = parseUnary();
        for (;;) {
            if (accept(TokKind::Star))
                lhs = Expr::binary(BinaryOp::Mul, lhs, parseUnary());
            else if (accept(TokKind::Slash))
                lhs = Expr::binary(BinaryOp::Div, lhs, parseUnary());
            else
                return lhs;
        }
    }

    Expr parseUnary() {
        if (accept(TokKind::Minus)) return Expr::negate(parseUnary());
        return parsePower();
    }

    // Right-associative; the exponent re-enters at unary level so `x^-2` works.
    Expr parsePower() {
        Expr base = parsePrimary();
        if (accept(TokKind::Caret)) return Expr::binary(BinaryOp::Pow, base, parseUnary());
        return base;
    }

    Expr parsePrimary() {
        const Token& t = advance();
        switch (t.kind) {
            case TokKind::Number:
                return Expr::literal(t.number);
            case TokKind::LParen: {
                Expr e = parseSum();
                if (!accept(TokKind::RParen))
                    throw ParseError("expected ')'", peek().pos);
                return e;
            }
            case TokKind::Ident: {
                if (t.ident == "x") return Expr::variable();
                if (t.ident == "pi") return Expr::constant(NamedConst::Pi);
                if (t.ident == "e") return Expr::constant(NamedConst::E);
                if (auto fn = lookupFunction(t.ident)) {
                    if (!accept(TokKind::LParen))
                        throw ParseError("expected '(' after function name '" + t.ident + "'",
                                         peek().pos);
                    Expr arg = parseSum();
                    if (!accept(TokKind::RParen))
                        throw ParseError("expected ')'", peek().pos);
                    return Expr::call(*fn, arg);
                }
                throw ParseError("unknown identifier '" + t.ident + "'", t.pos);
            }
            default:
                throw ParseError("expected a number, name, or '('", t.pos);
        }
    }

    std::vector<Token> toks_;
    std::size_t idx_ = 0;
};

} // namespace

Expr parse(std::string_view src) {
    if (src.empty()) throw ParseError("empty expression", 0);
    return Parser(src).parseAll();
}

// ---------------------------------------------------------------------------
// Serialization (precedence-aware; regenerates the exact tree on re-parse)
// ---------------------------------------------------------------------------

namespace {

int precedenceOf(const Expr& e) {
    switch (e.kind()) {
        case NodeKind::Binary:
            switch (e.binaryOp()) {
                case BinaryOp::Add:
                case BinaryOp::Sub: return 1;
                case BinaryOp::Mul:
                case BinaryOp::Div: return 2;
                case BinaryOp::Pow: return 4;
            }
            return 1;
        case NodeKind::Negate: return 3;
        default: return 5; // atoms
    }
}

std::string formatLiteral(double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

const char* functionName(UnaryFn fn) {
    switch (fn) {
        case UnaryFn::Sin: return "sin";
        case UnaryFn::Cos: return "cos";
        case UnaryFn::Exp: return "exp";
        case UnaryFn::Ln: return "ln";
        case UnaryFn::Sinh: return "sinh";
        case UnaryFn::Cosh: return "cosh";
        case UnaryFn::Sqrt: return "sqrt";
    }
    return "?";
}

void render(const Expr& e, std::string& out);

void renderChild(const Expr& c, bool needParens, std::string& out) {
    if (needParens) {
        out += '(';
        render(c, out);
        out += ')';
    } else {
        render(c, out);
    }
}

// A literal that prints with a leading '-' must be parenthesized when it
// appears as the right operand of a binary operator, otherwise "a--3" style
// text re-parses through the unary-minus fold and changes nothing, but stays
// unreadable; parens keep the output sane and the tree identical.
bool printsNegative(const Expr& e) {
    return e.kind() == NodeKind::Literal && std::signbit(e.literalValue()) &&
           e.literalValue() != 0.0;
}

void render(const Expr& e, std::string& out) {
    switch (e.kind()) {
        case NodeKind::Literal:
            out += formatLiteral(e.literalValue());
            return;
        case NodeKind::Variable:
            out += 'x';
            return;
        case NodeKind::Constant:
            out += (e.constantName() == NamedConst::Pi) ? "pi" : "e";
            return;
        case NodeKind::Negate: {
            Expr operand = e.child(0);
            out += '-';
            renderChild(operand, precedenceOf(operand) < 3, out);
            return;
        }
        case NodeKind::Call: {
            out += functionName(e.callFn());
            out += '(';
            render(e.child(0), out);
            out += ')';
            return;
        }
        case NodeKind::Binary: {
            Expr lhs = e.child(0), rhs = e.child(1);
            switch (e.binaryOp()) {
                case BinaryOp::Add:
                case BinaryOp::Sub:
                    renderChild(lhs, precedenceOf(lhs) < 1, out);
                    out += (e.binaryOp() == BinaryOp::Add) ? " + " : " - ";
                    renderChild(rhs, precedenceOf(rhs) <= 1 || printsNegative(rhs), out);
                    return;
                case BinaryOp::Mul:
                case BinaryOp::Div:
                    renderChild(lhs, precedenceOf(lhs) < 2, out);
                    out += (e.binaryOp() == BinaryOp::Mul) ? "*" : "/";
                    renderChild(rhs, precedenceOf(rhs) <= 2 || printsNegative(rhs), out);
                    return;
                case BinaryOp::Pow:
                    renderChild(lhs, precedenceOf(lhs) < 5, out);
                    out += '^';
                    // exponent parses at unary level: unary/pow/atom are fine bare
                    renderChild(rhs, precedenceOf(rhs) < 3, out);
                    return;
            }
            return;
        }
    }
}

} // namespace

std::string serialize(const Expr& e) {
    std::string out;
    render(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

bool isIntegerValued(double v) {
    return std::isfinite(v) && v == std::nearbyint(v) && std::abs(v) < 9.007199254740992e15;
}

double checkedResult(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
    return v;
}

double evalNode(const Expr::Node& n, double x) {
    switch (n.kind) {
        case NodeKind::Literal:
            return n.literal;
        case NodeKind::Variable:
            return x;
        case NodeKind::Constant:
            return n.constant == NamedConst::Pi ? std::numbers::pi : std::numbers::e;
        case NodeKind::Negate:
            return -evalNode(*n.a, x);
        case NodeKind::Call: {
            double a = evalNode(*n.a, x);
            switch (n.fn) {
                case UnaryFn::Sin: return checkedResult(std::sin(a), "sin");
                case UnaryFn::Cos: return checkedResult(std::cos(a), "cos");
                case UnaryFn::Exp: return checkedResult(std::exp(a), "exp");
                case UnaryFn::Ln:
                    if (a <= 0.0) throw DomainError("ln of a non-positive number");
                    return checkedResult(std::log(a), "ln");
                case UnaryFn::Sinh: return checkedResult(std::sinh(a), "sinh");
                case UnaryFn::Cosh: return checkedResult(std::cosh(a), "cosh");
                case UnaryFn::Sqrt:
                    if (a < 0.0) throw DomainError("sqrt of a negative number");
                    return checkedResult(std::sqrt(a), "sqrt");
            }
            throw Error("bad call node");
        }
        case NodeKind::Binary: {
            double a = evalNode(*n.a, x);
            double b = evalNode(*n.b, x);
            switch (n.op) {
                case BinaryOp::Add: return checkedResult(a + b, "+");
                case BinaryOp::Sub: return checkedResult(a - b, "-");
                case BinaryOp::Mul: return checkedResult(a * b, "*");
                case BinaryOp::Div:
                    if (b == 0.0) throw DomainError("division by zero");
                    return checkedResult(a / b, "/");
                case BinaryOp::Pow:
                    if (isIntegerValued(b)) {
                        if (a == 0.0 && b < 0.0)
                            throw DomainError("zero raised to a negative power");
                        return checkedResult(std::pow(a, b), "^");
                    }
                    // non-integer exponent: defined as exp(b*ln(a)), base must be positive
                    if (a <= 0.0)
                        throw DomainError("non-integer power of a non-positive base");
                    return checkedResult(std::pow(a, b), "^");
            }
            throw Error("bad binary node");
        }
    }
    throw Error("bad expr node");
}

} // namespace

double eval(const Expr& e, double x) {
    if (!std::isfinite(x)) throw DomainError("evaluation point is not finite");
    return evalNode(e.root(), x);
}

// ---------------------------------------------------------------------------
// Symbolic differentiation
// ---------------------------------------------------------------------------

namespace {

bool isLiteral(const Expr& e, double v) {
    return e.kind() == NodeKind::Literal && e.literalValue() == v;
}

// Folding builders used only for derivative construction.  They drop factors
// of the original tree only where the derivative is zero anyway, which is
// sound wherever the input is differentiable.
Expr sAdd(Expr a, Expr b) {
    if (isLiteral(a, 0.0)) return b;
    if (isLiteral(b, 0.0)) return a;
    return Expr::binary(BinaryOp::Add, a, b);
}

Expr sSub(Expr a, Expr b) {
    if (isLiteral(b, 0.0)) return a;
    if (isLiteral(a, 0.0)) return Expr::negate(b);
    return Expr::binary(BinaryOp::Sub, a, b);
}

Expr sMul(Expr a, Expr b) {
    if (isLiteral(a, 0.0) || isLiteral(b, 0.0)) return Expr::literal(0.0);
    if (isLiteral(a, 1.0)) return b;
    if (isLiteral(b, 1.0)) return a;
    if (a.kind() == NodeKind::Literal && b.kind() == NodeKind::Literal)
        return Expr::literal(a.literalValue() * b.literalValue());
    return Expr::binary(BinaryOp::Mul, a, b);
}

Expr sDiv(Expr a, Expr b) {
    if (isLiteral(a, 0.0)) return Expr::literal(0.0);
    if (isLiteral(b, 1.0)) return a;
    return Expr::binary(BinaryOp::Div, a, b);
}

Expr sPow(Expr a, Expr b) {
    if (isLiteral(b, 1.0)) return a;
    return Expr::binary(BinaryOp::Pow, a, b);
}

Expr d(const Expr& e);

Expr dCall(const Expr& e) {
    Expr u = e.child(0);
    Expr du = d(u);
    switch (e.callFn()) {
        case UnaryFn::Sin: return sMul(Expr::call(UnaryFn::Cos, u), du);
        case UnaryFn::Cos: return Expr::negate(sMul(Expr::call(UnaryFn::Sin, u), du));
        case UnaryFn::Exp: return sMul(Expr::call(UnaryFn::Exp, u), du);
        case UnaryFn::Ln: return sDiv(du, u);
        case UnaryFn::Sinh: return sMul(Expr::call(UnaryFn::Cosh, u), du);
        case UnaryFn::Cosh: return sMul(Expr::call(UnaryFn::Sinh, u), du);
        case UnaryFn::Sqrt:
            return sDiv(du, sMul(Expr::literal(2.0), Expr::call(UnaryFn::Sqrt, u)));
    }
    throw Error("bad call node");
}

Expr d(const Expr& e) {
    switch (e.kind()) {
        case NodeKind::Literal:
        case NodeKind::Constant:
            return Expr::literal(0.0);
        case NodeKind::Variable:
            return Expr::literal(1.0);
        case NodeKind::Negate:
            return Expr::negate(d(e.child(0)));
        case NodeKind::Call:
            return dCall(e);
        case NodeKind::Binary: {
            Expr u = e.child(0), v = e.child(1);
            switch (e.binaryOp()) {
                case BinaryOp::Add: return sAdd(d(u), d(v));
                case BinaryOp::Sub: return sSub(d(u), d(v));
                case BinaryOp::Mul: return sAdd(sMul(d(u), v), sMul(u, d(v)));
                case BinaryOp::Div:
                    return sDiv(sSub(sMul(d(u), v), sMul(u, d(v))),
                                sPow(v, Expr::literal(2.0)));
                case BinaryOp::Pow: {
                    if (!v.dependsOnVariable()) {
                        // d(u^c) = c * u^(c-1) * u'
                        Expr cm1 = v.kind() == NodeKind::Literal
                                       ? Expr::literal(v.literalValue() - 1.0)
                                       : Expr::binary(BinaryOp::Sub, v, Expr::literal(1.0));
                        return sMul(sMul(v, sPow(u, cm1)), d(u));
                    }
                    // general case: u^v * (v' ln u + v u'/u)
                    Expr term = sAdd(sMul(d(v), Expr::call(UnaryFn::Ln, u)),
                                     sDiv(sMul(v, d(u)), u));
                    return sMul(sPow(u, v), term);
                }
            }
            throw Error("bad binary node");
        }
    }
    throw Error("bad expr node");
}

} // namespace

Expr differentiate(const Expr& e) { return d(e); }

} // namespace mveq
