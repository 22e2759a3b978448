/**
 * @file expr_parser.hpp
 * @brief Arithmetic expressions for fixture coefficients and path components.
 *
 * Grammar (whitespace ignored):
 *
 *     expr    := term (('+' | '-') term)*
 *     term    := unary (('*' | '/') unary)*
 *     unary   := '-' unary | power
 *     power   := primary ('^' exponent)?
 *     exponent:= '-'? INTEGER ('^' exponent)?
 *     primary := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'
 *
 * Names are the variables t, s, x, y, z (restricted per slot), the constant
 * pi, and the functions sin, cos, exp.  Evaluation is templated on the scalar
 * so the same tree yields values and exact first derivatives (see Jet).
 */
#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace holonomy {

/// Error raised while lexing or parsing; position is a 0-based offset.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
    std::size_t position;
};

/// Error raised while evaluating; position is the offset of the failing subtree.
class EvalError : public std::runtime_error {
public:
    EvalError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
    std::size_t position;
};

/// Variable slots.  Every expression is evaluated against this fixed layout.
enum class Var : int { t = 0, s = 1, x = 2, y = 3, z = 4 };
inline constexpr int kNumVars = 5;
inline const std::array<const char*, kNumVars> kVarNames = {"t", "s", "x", "y", "z"};

enum class NodeKind { Literal, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Sin, Cos, Exp };

struct Node {
    NodeKind kind;
    std::size_t pos = 0;
    double value = 0.0;      // Literal
    int var = 0;             // Variable
    int exponent = 0;        // Pow
    Func func = Func::Sin;   // Call
    std::shared_ptr<const Node> lhs, rhs;
};

using NodePtr = std::shared_ptr<const Node>;

/// Immutable parsed expression.
class Expr {
public:
    Expr() = default;
    explicit Expr(NodePtr root, std::string src = {}) : root_(std::move(root)), src_(std::move(src)) {}
    const NodePtr& root() const { return root_; }
    const std::string& source() const { return src_; }
    bool empty() const { return !root_; }

private:
    NodePtr root_;
    std::string src_;
};

/**
 * Forward-mode value with two partial derivatives (d/dt, d/ds).
 */
struct Jet {
    double v = 0.0, dt = 0.0, ds = 0.0;
    Jet() = default;
    Jet(double value) : v(value) {}
    Jet(double value, double a, double b) : v(value), dt(a), ds(b) {}
};

inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.dt + b.dt, a.ds + b.ds}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.dt - b.dt, a.ds - b.ds}; }
inline Jet operator-(const Jet& a) { return {-a.v, -a.dt, -a.ds}; }
inline Jet operator*(const Jet& a, const Jet& b)
{
    return {a.v * b.v, a.dt * b.v + a.v * b.dt, a.ds * b.v + a.v * b.ds};
}
inline Jet operator/(const Jet& a, const Jet& b)
{
    double inv = 1.0 / b.v;
    double q = a.v * inv;
    return {q, (a.dt - q * b.dt) * inv, (a.ds - q * b.ds) * inv};
}
inline Jet sin(const Jet& a) { double c = std::cos(a.v); return {std::sin(a.v), c * a.dt, c * a.ds}; }
inline Jet cos(const Jet& a) { double m = -std::sin(a.v); return {std::cos(a.v), m * a.dt, m * a.ds}; }
inline Jet exp(const Jet& a) { double e = std::exp(a.v); return {e, e * a.dt, e * a.ds}; }
inline double value_of(double a) { return a; }
inline double value_of(const Jet& a) { return a.v; }

namespace detail {

enum class Tok { Number, Name, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::size_t pos;
    std::string text;
    double number = 0.0;
    bool integral = false;
};

inline std::vector<Token> lex(const std::string& src)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            bool integral = true;
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            if (i < src.size() && src[i] == '.') {
                integral = false;
                ++i;
                while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            }
            if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
                if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                    integral = false;
                    i = j;
                    while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
                }
            }
            std::string text = src.substr(start, i - start);
            if (text == ".") throw ParseError("malformed number", start);
            Token t{Tok::Number, start, text};
            try {
                t.number = std::stod(text);
            } catch (const std::out_of_range&) {
                throw ParseError("number out of range", start);
            }
            t.integral = integral;
            out.push_back(t);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
            out.push_back({Tok::Name, start, src.substr(start, i - start)});
            continue;
        }
        Tok k;
        switch (c) {
        case '+': k = Tok::Plus; break;
        case '-': k = Tok::Minus; break;
        case '*': k = Tok::Star; break;
        case '/': k = Tok::Slash; break;
        case '^': k = Tok::Caret; break;
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        default: throw ParseError(std::string("unexpected character '") + c + "'", start);
        }
        out.push_back({k, start, std::string(1, c)});
        ++i;
    }
    out.push_back({Tok::End, src.size(), ""});
    return out;
}

class Parser {
public:
    Parser(const std::string& src, const std::set<std::string>& allowed)
        : toks_(lex(src)), allowed_(allowed) {}

    NodePtr parse_all()
    {
        NodePtr e = expr();
        if (peek().kind != Tok::End) throw ParseError("unexpected token '" + peek().text + "'", peek().pos);
        return e;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    const Token& take() { return toks_[i_++]; }

    static NodePtr binary(NodeKind k, std::size_t pos, NodePtr a, NodePtr b)
    {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->pos = pos;
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        return n;
    }

    NodePtr expr()
    {
        NodePtr lhs = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            NodeKind k = take().kind == Tok::Plus ? NodeKind::Add : NodeKind::Sub;
            std::size_t pos = lhs->pos;
            lhs = binary(k, pos, lhs, term());
        }
        return lhs;
    }

    NodePtr term()
    {
        NodePtr lhs = unary();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            NodeKind k = take().kind == Tok::Star ? NodeKind::Mul : NodeKind::Div;
            std::size_t pos = lhs->pos;
            lhs = binary(k, pos, lhs, unary());
        }
        return lhs;
    }

    NodePtr unary()
    {
        if (peek().kind == Tok::Minus) {
            std::size_t pos = take().pos;
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Neg;
            n->pos = pos;
            n->lhs = unary();
            return n;
        }
        return power();
    }

    int exponent()
    {
        bool neg = false;
        if (peek().kind == Tok::Minus) { take(); neg = true; }
        const Token& t = peek();
        if (t.kind != Tok::Number || !t.integral)
            throw ParseError("exponent must be an integer literal", t.pos);
        take();
        if (t.number > 64) throw ParseError("exponent too large", t.pos);
        int e = static_cast<int>(t.number);
        if (peek().kind == Tok::Caret) {
            std::size_t pos = take().pos;
            int inner = exponent();
            if (inner < 0) throw ParseError("exponent must be an integer literal", pos);
            long long r = 1;
            for (int k = 0; k < inner; ++k) {
                r *= e;
                if (r > 64) throw ParseError("exponent too large", pos);
            }
            e = static_cast<int>(r);
        }
        return neg ? -e : e;
    }

    NodePtr power()
    {
        NodePtr base = primary();
        if (peek().kind == Tok::Caret) {
            take();
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Pow;
            n->pos = base->pos;
            n->lhs = base;
            n->exponent = exponent();
            return n;
        }
        return base;
    }

    NodePtr primary()
    {
        const Token t = peek();
        switch (t.kind) {
        case Tok::Number: {
            take();
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Literal;
            n->pos = t.pos;
            n->value = t.number;
            return n;
        }
        case Tok::LParen: {
            take();
            NodePtr e = expr();
            if (peek().kind != Tok::RParen) throw ParseError("expected ')'", peek().pos);
            take();
            return e;
        }
        case Tok::Name: {
            take();
            if (peek().kind == Tok::LParen) {
                Func f;
                if (t.text == "sin") f = Func::Sin;
                else if (t.text == "cos") f = Func::Cos;
                else if (t.text == "exp") f = Func::Exp;
                else throw ParseError("unknown function '" + t.text + "'", t.pos);
                take();
                NodePtr arg = expr();
                if (peek().kind != Tok::RParen) throw ParseError("expected ')'", peek().pos);
                take();
                auto n = std::make_shared<Node>();
                n->kind = NodeKind::Call;
                n->pos = t.pos;
                n->func = f;
                n->lhs = arg;
                return n;
            }
            auto n = std::make_shared<Node>();
            n->pos = t.pos;
            if (t.text == "pi") {
                n->kind = NodeKind::Literal;
                n->value = M_PI;
                return n;
            }
            for (int v = 0; v < kNumVars; ++v) {
                if (t.text == kVarNames[v]) {
                    if (!allowed_.count(t.text))
                        throw ParseError("variable '" + t.text + "' not allowed here", t.pos);
                    n->kind = NodeKind::Variable;
                    n->var = v;
                    return n;
                }
            }
            throw ParseError("unknown variable '" + t.text + "'", t.pos);
        }
        case Tok::End:
            throw ParseError("unexpected end of input", t.pos);
        default:
            throw ParseError("unexpected token '" + t.text + "'", t.pos);
        }
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    const std::set<std::string>& allowed_;
};

template <typename T>
T ipow(const T& base, int e, std::size_t pos)
{
    if (e < 0) {
        if (value_of(base) == 0.0) throw EvalError("division by zero", pos);
        return T(1.0) / ipow(base, -e, pos);
    }
    T r(1.0);
    T b = base;
    while (e > 0) {
        if (e & 1) r = r * b;
        e >>= 1;
        if (e) b = b * b;
    }
    return r;
}

template <typename T>
T eval_node(const Node& n, const std::array<T, kNumVars>& vars)
{
    using std::sin;
    using std::cos;
    using std::exp;
    switch (n.kind) {
    case NodeKind::Literal: return T(n.value);
    case NodeKind::Variable: return vars[n.var];
    case NodeKind::Neg: return -eval_node(*n.lhs, vars);
    case NodeKind::Add: return eval_node(*n.lhs, vars) + eval_node(*n.rhs, vars);
    case NodeKind::Sub: return eval_node(*n.lhs, vars) - eval_node(*n.rhs, vars);
    case NodeKind::Mul: return eval_node(*n.lhs, vars) * eval_node(*n.rhs, vars);
    case NodeKind::Div: {
        T den = eval_node(*n.rhs, vars);
        if (value_of(den) == 0.0) throw EvalError("division by zero", n.pos);
        return eval_node(*n.lhs, vars) / den;
    }
    case NodeKind::Pow: return ipow(eval_node(*n.lhs, vars), n.exponent, n.pos);
    case NodeKind::Call: {
        T a = eval_node(*n.lhs, vars);
        switch (n.func) {
        case Func::Sin: return sin(a);
        case Func::Cos: return cos(a);
        case Func::Exp: return exp(a);
        }
    }
    }
    throw EvalError("corrupt expression", n.pos);
}

inline std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void print_node(const Node& n, std::string& out)
{
    switch (n.kind) {
    case NodeKind::Literal: out += fmt_double(n.value); return;
    case NodeKind::Variable: out += kVarNames[n.var]; return;
    case NodeKind::Neg: out += "(-"; print_node(*n.lhs, out); out += ")"; return;
    case NodeKind::Pow:
        out += "(";
        print_node(*n.lhs, out);
        out += " ^ " + std::to_string(n.exponent) + ")";
        return;
    case NodeKind::Call:
        out += n.func == Func::Sin ? "sin(" : n.func == Func::Cos ? "cos(" : "exp(";
        print_node(*n.lhs, out);
        out += ")";
        return;
    default: {
        const char* op = n.kind == NodeKind::Add ? " + " : n.kind == NodeKind::Sub ? " - "
                       : n.kind == NodeKind::Mul ? " * " : " / ";
        out += "(";
        print_node(*n.lhs, out);
        out += op;
        print_node(*n.rhs, out);
        out += ")";
    }
    }
}

inline bool same_tree(const Node& a, const Node& b)
{
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case NodeKind::Literal: return a.value == b.value;
    case NodeKind::Variable: return a.var == b.var;
    case NodeKind::Neg: return same_tree(*a.lhs, *b.lhs);
    case NodeKind::Pow: return a.exponent == b.exponent && same_tree(*a.lhs, *b.lhs);
    case NodeKind::Call: return a.func == b.func && same_tree(*a.lhs, *b.lhs);
    default: return same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
    }
}

}  // namespace detail

/**
 * Parse @p src.  Only names listed in @p allowed_vars may appear as variables.
 */
inline Expr parse(const std::string& src, const std::set<std::string>& allowed_vars)
{
    detail::Parser p(src, allowed_vars);
    return Expr(p.parse_all(), src);
}

/// Parse with every variable allowed.
inline Expr parse(const std::string& src)
{
    return parse(src, {"t", "s", "x", "y", "z"});
}

template <typename T>
T eval(const Expr& e, const std::array<T, kNumVars>& vars)
{
    return detail::eval_node(*e.root(), vars);
}

/**
 * Evaluate against named bindings.  Unbound variables raise EvalError.
 */
inline double eval(const Expr& e, const std::map<std::string, double>& bindings)
{
    std::array<double, kNumVars> vars{};
    std::array<bool, kNumVars> bound{};
    for (const auto& [name, v] : bindings) {
        for (int i = 0; i < kNumVars; ++i)
            if (name == kVarNames[i]) { vars[i] = v; bound[i] = true; }
    }
    // walk the tree for unbound references before evaluating
    std::vector<const Node*> stack{e.root().get()};
    while (!stack.empty()) {
        const Node* n = stack.back();
        stack.pop_back();
        if (n->kind == NodeKind::Variable && !bound[n->var])
            throw EvalError(std::string("unbound variable '") + kVarNames[n->var] + "'", n->pos);
        if (n->lhs) stack.push_back(n->lhs.get());
        if (n->rhs) stack.push_back(n->rhs.get());
    }
    return eval<double>(e, vars);
}

/// Canonical fully parenthesised rendering; parse(print(e)) has the same tree as e.
inline std::string print(const Expr& e)
{
    std::string out;
    detail::print_node(*e.root(), out);
    return out;
}

/// Structural equality, ignoring source positions.
inline bool same_tree(const Expr& a, const Expr& b)
{
    return detail::same_tree(*a.root(), *b.root());
}

/// True when the tree is the literal 0 (used to skip dead coefficient terms).
inline bool is_literal(const Expr& e, double value)
{
    return e.root() && e.root()->kind == NodeKind::Literal && e.root()->value == value;
}

}  // namespace holonomy
