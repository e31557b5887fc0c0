#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "treeharm/errors.hpp"

namespace treeharm {

/// Truncated Taylor expansion of an analytic function around a base point:
/// coefficients c_0..c_N of f(base + delta) in powers of delta. All
/// arithmetic is exact truncation to order N; binary operations require
/// matching base and order.
template <typename Scalar>
class Jet {
public:
    Jet(Scalar base, std::vector<Scalar> coeffs) : base_(base), c_(std::move(coeffs)) {
        if (c_.empty()) throw precondition_error("jet needs at least the constant coefficient");
    }

    static Jet constant(Scalar base, Scalar value, int order) {
        std::vector<Scalar> c(static_cast<std::size_t>(order) + 1, Scalar{});
        c[0] = value;
        return Jet(base, std::move(c));
    }

    /// value + delta: the identity perturbation.
    static Jet variable(Scalar base, Scalar value, int order) {
        Jet j = constant(base, value, order);
        if (order >= 1) j.c_[1] = Scalar{1};
        return j;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    Scalar base() const { return base_; }
    const std::vector<Scalar>& coeffs() const { return c_; }
    Scalar operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    Scalar& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }

    /// Same series truncated or zero-padded to order M.
    Jet resized(int M) const {
        std::vector<Scalar> c(static_cast<std::size_t>(M) + 1, Scalar{});
        const std::size_t n = std::min(c.size(), c_.size());
        for (std::size_t i = 0; i < n; ++i) c[i] = c_[i];
        return Jet(base_, std::move(c));
    }

    friend Jet operator+(const Jet& a, const Jet& b) {
        check_compatible(a, b);
        Jet r = a;
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
        return r;
    }

    friend Jet operator-(const Jet& a, const Jet& b) {
        check_compatible(a, b);
        Jet r = a;
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_[i];
        return r;
    }

    friend Jet operator-(const Jet& a) {
        Jet r = a;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend Jet operator*(const Jet& a, Scalar s) {
        Jet r = a;
        for (auto& x : r.c_) x *= s;
        return r;
    }
    friend Jet operator*(Scalar s, const Jet& a) { return a * s; }

    // Cauchy product, truncated.
    friend Jet operator*(const Jet& a, const Jet& b) {
        check_compatible(a, b);
        std::vector<Scalar> c(a.c_.size(), Scalar{});
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = 0; j <= i; ++j) c[i] += a.c_[j] * b.c_[i - j];
        return Jet(a.base_, std::move(c));
    }

    friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

    // b = 1/a: b_0 = 1/a_0, b_i = -(sum_{j=1..i} a_j b_{i-j}) / a_0.
    friend Jet reciprocal(const Jet& a) {
        std::vector<Scalar> b(a.c_.size(), Scalar{});
        b[0] = Scalar{1} / a.c_[0];
        for (std::size_t i = 1; i < b.size(); ++i) {
            Scalar acc{};
            for (std::size_t j = 1; j <= i; ++j) acc += a.c_[j] * b[i - j];
            b[i] = -acc / a.c_[0];
        }
        return Jet(a.base_, std::move(b));
    }

    // b = exp(a): b_0 = exp(a_0), b_i = (1/i) sum_{j=1..i} j a_j b_{i-j}.
    friend Jet exp(const Jet& a) {
        using std::exp;
        std::vector<Scalar> b(a.c_.size(), Scalar{});
        b[0] = exp(a.c_[0]);
        for (std::size_t i = 1; i < b.size(); ++i) {
            Scalar acc{};
            for (std::size_t j = 1; j <= i; ++j)
                acc += static_cast<double>(j) * a.c_[j] * b[i - j];
            b[i] = acc / static_cast<double>(i);
        }
        return Jet(a.base_, std::move(b));
    }

    /// Coefficient-wise derivative; order drops by one.
    friend Jet derivative(const Jet& a) {
        if (a.order() == 0) return Jet(a.base_, {Scalar{}});
        std::vector<Scalar> b(a.c_.size() - 1, Scalar{});
        for (std::size_t i = 0; i < b.size(); ++i)
            b[i] = static_cast<double>(i + 1) * a.c_[i + 1];
        return Jet(a.base_, std::move(b));
    }

    /// outer(inner(delta)) truncated; requires inner constant term zero so
    /// the truncated composition is the true Taylor expansion.
    friend Jet compose(const Jet& outer, const Jet& inner) {
        if (inner.c_[0] != Scalar{})
            throw precondition_error("jet composition needs inner constant term zero");
        const Jet in = inner.resized(outer.order());
        Jet r = Jet::constant(inner.base_, outer.c_.back(), outer.order());
        for (int k = outer.order() - 1; k >= 0; --k) {
            r = r * in;
            r.c_[0] += outer.c_[static_cast<std::size_t>(k)];
        }
        return r;
    }

private:
    static void check_compatible(const Jet& a, const Jet& b) {
        if (a.c_.size() != b.c_.size())
            throw precondition_error("jet order mismatch");
        if (a.base_ != b.base_)
            throw precondition_error("jet base-point mismatch");
    }

    Scalar base_;
    std::vector<Scalar> c_;
};

using Complex = std::complex<double>;
using CJet = Jet<Complex>;

/// Compositional inverse: given g with g_0 = 0, g_1 != 0, returns h with
/// h_0 = 0 and g(h(delta)) = delta to the common order. Newton iteration
/// on truncated series, h <- h - (g o h - id) / (g' o h); the number of
/// correct coefficients doubles each step.
template <typename Scalar>
Jet<Scalar> invert_series(const Jet<Scalar>& g) {
    if (g[0] != Scalar{})
        throw precondition_error("series inversion needs zero constant term");
    if (g[1] == Scalar{})
        throw precondition_error("series inversion needs nonzero linear term");
    const int N = g.order();
    Jet<Scalar> h = Jet<Scalar>::constant(g.base(), Scalar{}, N);
    if (N >= 1) h[1] = Scalar{1} / g[1];
    if (N <= 1) return h;

    const Jet<Scalar> id = Jet<Scalar>::variable(g.base(), Scalar{}, N);
    const Jet<Scalar> dg = derivative(g).resized(N);
    int correct = 2;
    while (correct <= N) {
        h = h - (compose(g, h) - id) / compose(dg, h);
        h[0] = Scalar{}; // exact by construction; keep it exact
        correct *= 2;
    }
    return h;
}

} // namespace treeharm
