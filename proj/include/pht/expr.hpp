#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pht/quadrature.hpp"

namespace pht {

struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(const std::string& what, std::size_t off)
        : std::runtime_error(what + " at offset " + std::to_string(off)), offset(off) {}
};

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

enum class NodeKind { Number, Var, Add, Sub, Mul, Div, Pow, Neg, Call };

struct ExprNode;
using NodePtr = std::unique_ptr<ExprNode>;

struct ExprNode {
    NodeKind kind;
    double number = 0.0;     // Number
    std::string func;        // Call: sin cos exp sqrt
    NodePtr lhs, rhs;        // binary; unary uses lhs only

    double eval(double t) const {
        switch (kind) {
            case NodeKind::Number: return number;
            case NodeKind::Var: return t;
            case NodeKind::Add: return lhs->eval(t) + rhs->eval(t);
            case NodeKind::Sub: return lhs->eval(t) - rhs->eval(t);
            case NodeKind::Mul: return lhs->eval(t) * rhs->eval(t);
            case NodeKind::Div: {
                const double d = rhs->eval(t);
                const double r = lhs->eval(t) / d;
                if (!std::isfinite(r)) throw EvalError("division produced a non-finite value");
                return r;
            }
            case NodeKind::Pow: {
                const double r = std::pow(lhs->eval(t), rhs->eval(t));
                if (!std::isfinite(r)) throw EvalError("power produced a non-finite value");
                return r;
            }
            case NodeKind::Neg: return -lhs->eval(t);
            case NodeKind::Call: {
                const double a = lhs->eval(t);
                if (func == "sin") return std::sin(a);
                if (func == "cos") return std::cos(a);
                if (func == "exp") return std::exp(a);
                const double r = std::sqrt(a);
                if (!std::isfinite(r)) throw EvalError("sqrt of a negative value");
                return r;
            }
        }
        throw EvalError("corrupt expression node");
    }

    // Fully parenthesized print; reparsing evaluates identically.
    std::string print() const {
        switch (kind) {
            case NodeKind::Number: {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", number);
                return buf;
            }
            case NodeKind::Var: return "t";
            case NodeKind::Add: return "(" + lhs->print() + "+" + rhs->print() + ")";
            case NodeKind::Sub: return "(" + lhs->print() + "-" + rhs->print() + ")";
            case NodeKind::Mul: return "(" + lhs->print() + "*" + rhs->print() + ")";
            case NodeKind::Div: return "(" + lhs->print() + "/" + rhs->print() + ")";
            case NodeKind::Pow: return "(" + lhs->print() + "^" + rhs->print() + ")";
            case NodeKind::Neg: return "(-" + lhs->print() + ")";
            case NodeKind::Call: return func + "(" + lhs->print() + ")";
        }
        return "";
    }

    NodePtr clone() const {
        auto c = std::make_unique<ExprNode>();
        c->kind = kind;
        c->number = number;
        c->func = func;
        if (lhs) c->lhs = lhs->clone();
        if (rhs) c->rhs = rhs->clone();
        return c;
    }
};

// Grammar (standard precedence, ^ right-associative and binding tighter
// than unary minus, so -t^2 is -(t^2) while 2^-1 still parses):
//   sum    := prod (('+'|'-') prod)*
//   prod   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | 't' | 'pi' | 'e' | func '(' sum ')' | '(' sum ')'
class Parser {
  public:
    explicit Parser(std::string_view src) : s_(src) {}

    NodePtr run() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("empty expression", 0);
        auto e = sum();
        skip_ws();
        if (pos_ < s_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

  private:
    std::string_view s_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool accept(char c) {
        if (peek(c)) { ++pos_; return true; }
        return false;
    }

    static NodePtr make(NodeKind k, NodePtr l = nullptr, NodePtr r = nullptr) {
        auto n = std::make_unique<ExprNode>();
        n->kind = k;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        return n;
    }

    NodePtr sum() {
        auto e = prod();
        for (;;) {
            if (accept('+')) e = make(NodeKind::Add, std::move(e), prod());
            else if (accept('-')) e = make(NodeKind::Sub, std::move(e), prod());
            else return e;
        }
    }

    NodePtr prod() {
        auto e = unary();
        for (;;) {
            if (accept('*')) e = make(NodeKind::Mul, std::move(e), unary());
            else if (accept('/')) e = make(NodeKind::Div, std::move(e), unary());
            else return e;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(NodeKind::Neg, unary());
        return power();
    }

    NodePtr power() {
        auto base = atom();
        if (accept('^')) return make(NodeKind::Pow, std::move(base), unary());
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("expected a value", pos_);
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return ident();
        if (accept('(')) {
            auto e = sum();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr number() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
            ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
            if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
                pos_ = p;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            }
        }
        const std::string text(s_.substr(start, pos_ - start));
        try {
            std::size_t used = 0;
            const double val = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument("");
            auto n = make(NodeKind::Number);
            n->number = val;
            return n;
        } catch (const std::exception&) {
            throw ParseError("malformed number '" + text + "'", start);
        }
    }

    NodePtr ident() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        const std::string name(s_.substr(start, pos_ - start));
        if (name == "t") return make(NodeKind::Var);
        if (name == "pi") {
            auto n = make(NodeKind::Number);
            n->number = 3.14159265358979323846;
            return n;
        }
        if (name == "e") {
            auto n = make(NodeKind::Number);
            n->number = 2.71828182845904523536;
            return n;
        }
        if (name == "sin" || name == "cos" || name == "exp" || name == "sqrt") {
            if (!accept('(')) throw ParseError("expected '(' after function name", pos_);
            auto arg = sum();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            auto n = make(NodeKind::Call, std::move(arg));
            n->func = name;
            return n;
        }
        throw ParseError("unknown identifier '" + name + "'", start);
    }
};

}  // namespace detail

// One scalar function of t: either a parsed expression or a sampled table
// read back by piecewise-linear interpolation.
class ScalarFunc {
  public:
    ScalarFunc() : repr_(detail::NodePtr{}) {}
    explicit ScalarFunc(detail::NodePtr expr) : repr_(std::move(expr)) {}
    explicit ScalarFunc(GridFunction table) : repr_(std::move(table)) {}

    ScalarFunc(const ScalarFunc& o) { *this = o; }
    ScalarFunc& operator=(const ScalarFunc& o) {
        if (auto* e = std::get_if<detail::NodePtr>(&o.repr_))
            repr_ = *e ? (*e)->clone() : detail::NodePtr{};
        else
            repr_ = std::get<GridFunction>(o.repr_);
        return *this;
    }
    ScalarFunc(ScalarFunc&&) = default;
    ScalarFunc& operator=(ScalarFunc&&) = default;

    bool is_expr() const { return std::holds_alternative<detail::NodePtr>(repr_); }

    double operator()(double t) const {
        if (auto* e = std::get_if<detail::NodePtr>(&repr_)) {
            if (!*e) throw EvalError("empty scalar function");
            return (*e)->eval(t);
        }
        return std::get<GridFunction>(repr_)(t);
    }

    // Expression text that parses back to an identical evaluator.
    std::string print() const {
        if (auto* e = std::get_if<detail::NodePtr>(&repr_)) {
            if (!*e) return "";
            return (*e)->print();
        }
        throw EvalError("table-backed functions have no expression form");
    }

  private:
    std::variant<detail::NodePtr, GridFunction> repr_;
};

inline ScalarFunc parse_scalar_func(std::string_view src) {
    return ScalarFunc(detail::Parser(src).run());
}

}  // namespace pht
