#pragma once

#include <complex>
#include <vector>

#include "special.hpp"

namespace mutrans {

/// Truncated Taylor series c_0 + c_1 t + ... + c_K t^K in the conormal variable.
class Jet {
public:
    Jet() : c_(1, cplx(0.0)) {}
    Jet(std::size_t order, cplx value) : c_(order + 1, cplx(0.0)) { c_[0] = value; }

    static Jet variable(std::size_t order, cplx value) {
        Jet j(order, value);
        if (order > 0) j.c_[1] = 1.0;
        return j;
    }

    std::size_t order() const { return c_.size() - 1; }
    cplx& operator[](std::size_t k) { return c_[k]; }
    const cplx& operator[](std::size_t k) const { return c_[k]; }
    cplx value() const { return c_[0]; }

    /// k-th derivative k! c_k.
    cplx derivative(std::size_t k) const {
        cplx f = 1.0;
        for (std::size_t i = 2; i <= k; ++i) f *= double(i);
        return f * c_[k];
    }

    Jet& operator+=(const Jet& o) {
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator-(Jet a) {
        for (auto& v : a.c_) v = -v;
        return a;
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r(a.order(), 0.0);
        for (std::size_t k = 0; k <= a.order(); ++k)
            for (std::size_t j = 0; j <= k; ++j) r.c_[k] += a.c_[j] * b.c_[k - j];
        return r;
    }
    friend Jet operator*(cplx s, Jet a) {
        for (auto& v : a.c_) v *= s;
        return a;
    }
    friend Jet operator/(const Jet& a, const Jet& b) {
        Jet q(a.order(), 0.0);
        for (std::size_t k = 0; k <= a.order(); ++k) {
            cplx s = a.c_[k];
            for (std::size_t j = 1; j <= k; ++j) s -= b.c_[j] * q.c_[k - j];
            q.c_[k] = s / b.c_[0];
        }
        return q;
    }

    friend Jet exp(const Jet& a) {
        Jet e(a.order(), std::exp(a.c_[0]));
        for (std::size_t k = 1; k <= a.order(); ++k) {
            cplx s = 0.0;
            for (std::size_t j = 1; j <= k; ++j) s += double(j) * a.c_[j] * e.c_[k - j];
            e.c_[k] = s / double(k);
        }
        return e;
    }

    /// Principal-branch logarithm.
    friend Jet log(const Jet& b) {
        Jet l(b.order(), std::log(b.c_[0]));
        for (std::size_t k = 1; k <= b.order(); ++k) {
            cplx s = b.c_[k];
            for (std::size_t j = 1; j < k; ++j) s -= double(j) / double(k) * l.c_[j] * b.c_[k - j];
            l.c_[k] = s / b.c_[0];
        }
        return l;
    }

    /// Principal-branch power with constant exponent.
    friend Jet pow(const Jet& b, cplx c) {
        Jet f(b.order(), std::pow(b.c_[0], c));
        for (std::size_t k = 1; k <= b.order(); ++k) {
            cplx s = 0.0;
            for (std::size_t j = 1; j <= k; ++j) s += (c * double(j) - double(k - j)) * b.c_[j] * f.c_[k - j];
            f.c_[k] = s / (double(k) * b.c_[0]);
        }
        return f;
    }

    friend Jet pow(const Jet& b, const Jet& e) { return exp(e * log(b)); }

private:
    std::vector<cplx> c_;
};

}  // namespace mutrans
