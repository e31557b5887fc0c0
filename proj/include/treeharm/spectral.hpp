#pragma once

#include <cmath>
#include <complex>

#include "treeharm/errors.hpp"
#include "treeharm/jet.hpp"
#include "treeharm/tree.hpp"

namespace treeharm {

/// Principal power q^z = exp(z ln q).
inline Complex q_pow(Degree d, Complex z) { return std::exp(z * d.log_q()); }

/// Eigenvalue map gamma(z) = (q^z + q^{1-z}) / (q+1); two-to-one with
/// gamma(z) = gamma(1-z).
inline Complex gamma(Complex z, Degree d) {
    return (q_pow(d, z) + q_pow(d, Complex(1.0) - z)) / static_cast<double>(d.q() + 1);
}

/// l2 spectral radius rho = 2 sqrt(q) / (q+1).
inline double spectral_radius(Degree d) {
    return 2.0 * std::sqrt(static_cast<double>(d.q())) / static_cast<double>(d.q() + 1);
}

/// Membership in the l2 spectrum [-rho, rho] of P.
inline bool in_l2_spectrum(Complex lambda, Degree d) {
    return std::abs(lambda.imag()) <= 1e-14 && std::abs(lambda.real()) <= spectral_radius(d);
}

/// Principal-branch inverse of gamma: solves w^2 - (q+1) lambda w + q = 0
/// for w = q^z, keeps the root with |w| > sqrt(q), and returns
/// z = log_q(w) with imaginary part in (-pi/ln q, pi/ln q]. Defined only
/// off the spectrum, where the two roots have distinct moduli.
inline Complex z_from_lambda(Complex lambda, Degree d) {
    if (in_l2_spectrum(lambda, d))
        throw spectrum_error("lambda lies in the l2 spectrum [-rho, rho]; z(lambda) undefined");
    const double q = static_cast<double>(d.q());
    const Complex b = (q + 1.0) * lambda;
    const Complex s = std::sqrt(b * b - 4.0 * q);
    // Pick the sign that avoids cancellation; that root is the larger one.
    const Complex w = (std::abs(b + s) >= std::abs(b - s)) ? (b + s) / 2.0 : (b - s) / 2.0;
    return std::log(w) / d.log_q();
}

/// The pair (lambda, z) with lambda = gamma(z) on the principal branch
/// Re z >= 1/2, restricted off the spectrum (every kernel, jet and measure
/// operation in this library needs that).
class EigenParam {
public:
    static EigenParam from_z(Degree d, Complex z) {
        if (z.real() < 0.5)
            throw precondition_error("principal branch requires Re z >= 1/2");
        const Complex lambda = treeharm::gamma(z, d);
        if (in_l2_spectrum(lambda, d))
            throw spectrum_error("gamma(z) lies in the l2 spectrum; pick Re z > 1/2");
        return EigenParam(d, z, lambda);
    }

    static EigenParam from_lambda(Degree d, Complex lambda) {
        return EigenParam(d, z_from_lambda(lambda, d), lambda);
    }

    Degree degree() const { return deg_; }
    Complex z() const { return z_; }
    Complex lambda() const { return lambda_; }

private:
    EigenParam(Degree d, Complex z, Complex lambda) : deg_(d), z_(z), lambda_(lambda) {}

    Degree deg_;
    Complex z_;
    Complex lambda_;
};

/// Expansion of gamma(z0 + eps) - closed form, since
/// q^{z0+eps} = q^{z0} exp(eps ln q):
///   G_k = (q^{z0} (ln q)^k + q^{1-z0} (-ln q)^k) / ((q+1) k!).
inline CJet gamma_jet(const EigenParam& p, int order) {
    const Degree d = p.degree();
    const Complex a = q_pow(d, p.z());
    const Complex b = q_pow(d, Complex(1.0) - p.z());
    std::vector<Complex> c(static_cast<std::size_t>(order) + 1);
    double lk = 1.0;   // (ln q)^k / k!
    double sign = 1.0; // (-1)^k
    for (int k = 0; k <= order; ++k) {
        c[static_cast<std::size_t>(k)] = (a * lk + b * sign * lk) / static_cast<double>(d.q() + 1);
        lk *= d.log_q() / static_cast<double>(k + 1);
        sign = -sign;
    }
    return CJet(p.z(), std::move(c));
}

/// Taylor coefficients z_0..z_N of z(lambda + delta) around the given
/// eigenvalue, by compositional inversion of the gamma expansion. The
/// linear term is z_1 = (q+1) / (ln q (q^z - q^{1-z})); near the branch
/// points lambda = +-rho that denominator vanishes and the expansion is
/// refused.
inline CJet z_jet(const EigenParam& p, int order) {
    if (order < 0) throw precondition_error("jet order must be nonnegative");
    const Degree d = p.degree();
    const Complex diff = q_pow(d, p.z()) - q_pow(d, Complex(1.0) - p.z());
    if (std::abs(diff) < 1e-12)
        throw branch_point_error("z(lambda) expansion at a branch point (lambda = +-rho)");

    if (order == 0) return CJet::constant(p.lambda(), p.z(), 0);

    CJet g = gamma_jet(p, order);
    g[0] = Complex{}; // g = gamma(z0 + eps) - lambda, exactly zero at eps = 0
    CJet h = invert_series(g); // eps as a series in delta = lambda-offset
    std::vector<Complex> c = h.coeffs();
    c[0] = p.z();
    return CJet(p.lambda(), std::move(c));
}

} // namespace treeharm
