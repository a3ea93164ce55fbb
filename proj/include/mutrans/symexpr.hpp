#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jet.hpp"
#include "special.hpp"

namespace mutrans {

/// Expression tree for symbols p(sigma, xi) built from sigma, xi, constants and the
/// builtins abs2pow(a) = (sigma^2+xi^2)^a, chiplus(nu) = (sigma+i xi)^nu, chiminus(nu) = (sigma-i xi)^nu.
class SymExpr {
public:
    enum class Kind { constant, sigma, xi, add, sub, mul, div, pow, neg, abs2pow, chiplus, chiminus };

    static std::shared_ptr<const SymExpr> constant(cplx c) { return make(Kind::constant, c); }
    static std::shared_ptr<const SymExpr> sigma() { return make(Kind::sigma); }
    static std::shared_ptr<const SymExpr> xi() { return make(Kind::xi); }
    static std::shared_ptr<const SymExpr> builtin(Kind k, cplx param) { return make(k, param); }
    static std::shared_ptr<const SymExpr> binary(Kind k, std::shared_ptr<const SymExpr> a, std::shared_ptr<const SymExpr> b) {
        auto e = std::make_shared<SymExpr>(k);
        e->a_ = std::move(a);
        e->b_ = std::move(b);
        return e;
    }
    static std::shared_ptr<const SymExpr> negate(std::shared_ptr<const SymExpr> a) {
        auto e = std::make_shared<SymExpr>(Kind::neg);
        e->a_ = std::move(a);
        return e;
    }

    explicit SymExpr(Kind k, cplx c = 0.0) : kind_(k), c_(c) {}

    Kind kind() const { return kind_; }

    /// Value of the subtree if it does not involve sigma or xi.
    std::optional<cplx> constant_value() const {
        switch (kind_) {
            case Kind::constant: return c_;
            case Kind::sigma:
            case Kind::xi:
            case Kind::abs2pow:
            case Kind::chiplus:
            case Kind::chiminus: return std::nullopt;
            case Kind::neg: {
                auto v = a_->constant_value();
                if (!v) return std::nullopt;
                return -*v;
            }
            default: {
                auto x = a_->constant_value(), y = b_->constant_value();
                if (!x || !y) return std::nullopt;
                switch (kind_) {
                    case Kind::add: return *x + *y;
                    case Kind::sub: return *x - *y;
                    case Kind::mul: return *x * *y;
                    case Kind::div: return *x / *y;
                    default: return std::pow(*x, *y);
                }
            }
        }
    }

    /// Degree of homogeneity, or nullopt when the expression mixes degrees.
    std::optional<cplx> degree() const {
        if (constant_value()) return cplx(0.0);
        switch (kind_) {
            case Kind::sigma:
            case Kind::xi: return cplx(1.0);
            case Kind::abs2pow: return 2.0 * c_;
            case Kind::chiplus:
            case Kind::chiminus: return c_;
            case Kind::neg: return a_->degree();
            case Kind::add:
            case Kind::sub: {
                auto x = a_->degree(), y = b_->degree();
                if (!x || !y) return std::nullopt;
                if (std::abs(*x - *y) > 1e-14) return std::nullopt;
                return x;
            }
            case Kind::mul:
            case Kind::div: {
                auto x = a_->degree(), y = b_->degree();
                if (!x || !y) return std::nullopt;
                return kind_ == Kind::mul ? *x + *y : *x - *y;
            }
            case Kind::pow: {
                auto x = a_->degree();
                auto e = b_->constant_value();
                if (!x || !e) return std::nullopt;
                return *x * *e;
            }
            default: return std::nullopt;
        }
    }

    /// Taylor jet in xi about (sigma, xi) up to the given order.
    Jet jet(double sigma, double xi, std::size_t order) const {
        switch (kind_) {
            case Kind::constant: return Jet(order, c_);
            case Kind::sigma: return Jet(order, sigma);
            case Kind::xi: return Jet::variable(order, xi);
            case Kind::abs2pow: {
                Jet x = Jet::variable(order, xi);
                return pow(Jet(order, sigma * sigma) + x * x, c_);
            }
            case Kind::chiplus: return pow(Jet(order, sigma) + I * Jet::variable(order, xi), c_);
            case Kind::chiminus: return pow(Jet(order, sigma) - I * Jet::variable(order, xi), c_);
            case Kind::neg: return -a_->jet(sigma, xi, order);
            case Kind::add: return a_->jet(sigma, xi, order) + b_->jet(sigma, xi, order);
            case Kind::sub: return a_->jet(sigma, xi, order) - b_->jet(sigma, xi, order);
            case Kind::mul: return a_->jet(sigma, xi, order) * b_->jet(sigma, xi, order);
            case Kind::div: return a_->jet(sigma, xi, order) / b_->jet(sigma, xi, order);
            case Kind::pow: {
                if (auto e = b_->constant_value()) return pow(a_->jet(sigma, xi, order), *e);
                return pow(a_->jet(sigma, xi, order), b_->jet(sigma, xi, order));
            }
        }
        return Jet(order, 0.0);
    }

    cplx eval(double sigma, double xi) const { return jet(sigma, xi, 0).value(); }

    std::string str() const {
        std::ostringstream os;
        auto num = [&](cplx c) {
            if (c.imag() == 0.0) os << c.real();
            else os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
        };
        switch (kind_) {
            case Kind::constant: num(c_); break;
            case Kind::sigma: os << "sigma"; break;
            case Kind::xi: os << "xi"; break;
            case Kind::abs2pow: os << "abs2pow("; num(c_); os << ")"; break;
            case Kind::chiplus: os << "chiplus("; num(c_); os << ")"; break;
            case Kind::chiminus: os << "chiminus("; num(c_); os << ")"; break;
            case Kind::neg: os << "-(" << a_->str() << ")"; break;
            default: {
                const char* op = kind_ == Kind::add ? "+" : kind_ == Kind::sub ? "-" : kind_ == Kind::mul ? "*" : kind_ == Kind::div ? "/" : "^";
                os << "(" << a_->str() << op << b_->str() << ")";
            }
        }
        return os.str();
    }

private:
    static std::shared_ptr<const SymExpr> make(Kind k, cplx c = 0.0) { return std::make_shared<SymExpr>(k, c); }

    Kind kind_;
    cplx c_;
    std::shared_ptr<const SymExpr> a_, b_;
};

using SymExprPtr = std::shared_ptr<const SymExpr>;

}  // namespace mutrans
