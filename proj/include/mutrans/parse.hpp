#pragma once

#include <cctype>
#include <cstdlib>
#include <optional>
#include <string>

#include "special.hpp"
#include "symcore.hpp"
#include "symexpr.hpp"

namespace mutrans {

namespace detail {

// expr   := term (('+' | '-') term)*
// term   := unary (('*' | '/') unary)*
// unary  := ('+' | '-') unary | power
// power  := primary ('^' unary)?
// primary:= number ['i'] | 'i' | 'sigma' | 'xi' | builtin '(' expr ')' | '(' expr ')'
class SymbolParser {
public:
    explicit SymbolParser(std::string text) : s_(std::move(text)) {}

    SymExprPtr parse_all() {
        SymExprPtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    std::string s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw Error("cli", "parse_symbol", "syntax error at position " + std::to_string(pos_) + ": " + what);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    std::string ident() {
        std::size_t b = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        return s_.substr(b, pos_ - b);
    }

    SymExprPtr expr() {
        SymExprPtr e = term();
        for (;;) {
            if (eat('+')) e = SymExpr::binary(SymExpr::Kind::add, e, term());
            else if (eat('-')) e = SymExpr::binary(SymExpr::Kind::sub, e, term());
            else return e;
        }
    }
    SymExprPtr term() {
        SymExprPtr e = unary();
        for (;;) {
            if (eat('*')) e = SymExpr::binary(SymExpr::Kind::mul, e, unary());
            else if (eat('/')) e = SymExpr::binary(SymExpr::Kind::div, e, unary());
            else return e;
        }
    }
    SymExprPtr unary() {
        if (eat('-')) return SymExpr::negate(unary());
        if (eat('+')) return unary();
        return power();
    }
    SymExprPtr power() {
        SymExprPtr b = primary();
        if (eat('^')) return SymExpr::binary(SymExpr::Kind::pow, b, unary());
        return b;
    }
    SymExprPtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            pos_ += std::size_t(end - begin);
            if (pos_ < s_.size() && s_[pos_] == 'i' && (pos_ + 1 >= s_.size() || !std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])))) {
                ++pos_;
                return SymExpr::constant(cplx(0.0, v));
            }
            return SymExpr::constant(v);
        }
        if (c == '(') {
            ++pos_;
            SymExprPtr e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t at = pos_;
            std::string id = ident();
            if (id == "sigma") return SymExpr::sigma();
            if (id == "xi") return SymExpr::xi();
            if (id == "i") return SymExpr::constant(I);
            SymExpr::Kind k;
            if (id == "abs2pow") k = SymExpr::Kind::abs2pow;
            else if (id == "chiplus") k = SymExpr::Kind::chiplus;
            else if (id == "chiminus") k = SymExpr::Kind::chiminus;
            else {
                pos_ = at;
                fail("unknown name '" + id + "'");
            }
            if (!eat('(')) fail("expected '(' after " + id);
            std::size_t arg_at = pos_;
            SymExprPtr arg = expr();
            if (!eat(')')) fail("expected ')'");
            auto v = arg->constant_value();
            if (!v) {
                pos_ = arg_at;
                fail(id + " takes a constant argument");
            }
            return SymExpr::builtin(k, *v);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
};

}  // namespace detail

/// Parse a symbol expression. A trailing "; order=<constant>" (or ", order=") overrides the inferred order;
/// an explicit order argument overrides both.
inline BoundarySymbol parse_symbol(const std::string& text, std::optional<cplx> order = std::nullopt) {
    std::string body = text;
    std::optional<cplx> inline_order;
    auto k = text.find("order");
    if (k != std::string::npos) {
        auto sep = text.find_last_of(";,", k);
        auto eq = text.find('=', k);
        if (sep != std::string::npos && eq != std::string::npos) {
            body = text.substr(0, sep);
            auto oe = detail::SymbolParser(text.substr(eq + 1)).parse_all();
            auto v = oe->constant_value();
            if (!v) throw Error("cli", "parse_symbol", "order= must be a constant");
            inline_order = *v;
        }
    }
    SymExprPtr e = detail::SymbolParser(body).parse_all();
    if (!order) order = inline_order;
    if (!order && !e->degree()) throw Error("cli", "parse_symbol", "expression is not homogeneous; supply order=");
    BoundarySymbol p = make_symbol(e, order);
    return p;
}

}  // namespace mutrans
