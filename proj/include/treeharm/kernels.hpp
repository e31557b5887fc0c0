#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "treeharm/errors.hpp"
#include "treeharm/jet.hpp"
#include "treeharm/spectral.hpp"
#include "treeharm/tree.hpp"

namespace treeharm {

// ---------------------------------------------------------------------------
// Derivative-ladder sign convention.
//
// Applying (P - lambda I) to the r-th lambda-derivative K^{(r)}(., xi)
// returns a multiple of K^{(r-1)}. Differentiating (P - lambda I) K = 0
// r times in lambda gives the factor +r; part of the literature states it
// as (-1)^r r. The two conventions are arbitrated numerically by
// verify's resolve_sign_constant against the neighborhood stencil, which
// confirms +r; everything downstream (shifted Laplacian in measure
// coordinates, the right inverse, the heat series) references the factor
// only through ladder_factor().
// ---------------------------------------------------------------------------

enum class LadderSign { plus_r, alternating_r };

inline constexpr LadderSign kLadderSign = LadderSign::plus_r;

inline double ladder_factor(int r, LadderSign s = kLadderSign) {
    const double v = static_cast<double>(r);
    return (s == LadderSign::alternating_r && (r % 2)) ? -v : v;
}

// ---------------------------------------------------------------------------
// Poisson kernel and its lambda-derivatives
// ---------------------------------------------------------------------------

/// K at a given horospherical index: q^{z h}.
inline Complex kernel_at_hor(const EigenParam& p, int h) {
    return std::exp(p.z() * (static_cast<double>(h) * p.degree().log_q()));
}

/// Poisson kernel K(x, xi | lambda) = q^{z hor(x, xi)}, normalized so
/// K(o, xi | lambda) = 1; a lambda-eigenfunction of P in x.
inline Complex poisson_kernel(const Vertex& x, const BoundaryRay& xi, const EigenParam& p) {
    return kernel_at_hor(p, hor(x, xi));
}

/// Expansion of lambda -> q^{z(lambda) h} around p.lambda(), reusing a
/// precomputed z-jet: K(lambda0) * exp(h ln q (z(lambda0+delta) - z0)).
inline CJet kernel_jet_at_hor(const CJet& zjet, const EigenParam& p, int h) {
    CJet u = zjet;
    u[0] = Complex{};
    u = u * Complex(static_cast<double>(h) * p.degree().log_q());
    return exp(u) * kernel_at_hor(p, h);
}

inline CJet kernel_jet_at_hor(const EigenParam& p, int h, int order) {
    return kernel_jet_at_hor(z_jet(p, order), p, h);
}

/// r-th derivative of K(x, xi | lambda) with respect to lambda,
/// r! times the jet coefficient; r = 0 is the kernel itself.
inline Complex kernel_derivative(const Vertex& x, const BoundaryRay& xi, const EigenParam& p, int r) {
    if (r < 0) throw precondition_error("derivative order must be nonnegative");
    if (r == 0) return poisson_kernel(x, xi, p);
    const CJet kj = kernel_jet_at_hor(p, hor(x, xi), r);
    double rf = 1.0;
    for (int i = 2; i <= r; ++i) rf *= i;
    return rf * kj[r];
}

/// Values of K^{(r)} at hor = -hmax..hmax (index h + hmax), sharing one
/// z-jet across the row. This is what measure integration consumes.
inline std::vector<Complex> kernel_derivative_row(const EigenParam& p, int r, int hmax) {
    const CJet zj = z_jet(p, r == 0 ? 0 : r);
    double rf = 1.0;
    for (int i = 2; i <= r; ++i) rf *= i;
    std::vector<Complex> row(static_cast<std::size_t>(2 * hmax + 1));
    for (int h = -hmax; h <= hmax; ++h) {
        if (r == 0)
            row[static_cast<std::size_t>(h + hmax)] = kernel_at_hor(p, h);
        else
            row[static_cast<std::size_t>(h + hmax)] = rf * kernel_jet_at_hor(zj, p, h)[r];
    }
    return row;
}

// ---------------------------------------------------------------------------
// The coefficient matrix a_{k,r}(lambda)
// ---------------------------------------------------------------------------

/// Upper triangular matrix linking kernel derivatives to hor-powers:
/// K^{(r)} = K sum_{k=1}^r hor^k a_{k,r}. With u(delta) =
/// ln q (z(lambda+delta) - z(lambda)), expanding K(lambda+delta) =
/// K exp(hor u) gives a_{k,r} = r! [delta^r](u^k) / k!, so
/// a_{r,r} = (ln q z_1)^r != 0 and the matrix is invertible.
struct CoeffMatrix {
    Degree degree;
    Complex lambda;
    int n = 2; // entries 1 <= k <= r <= n-1
    std::vector<Complex> entries; // row-major over (k, r), k <= r
    double frobenius = 0.0;

    Complex at(int k, int r) const {
        if (k < 1 || r < 1 || k > r || r > n - 1)
            throw precondition_error("coefficient index out of range");
        // entries for r = 1..n-1 are stored as blocks of length r
        const int offset = (r - 1) * r / 2;
        return entries[static_cast<std::size_t>(offset + k - 1)];
    }
};

inline CoeffMatrix coeff_matrix(const EigenParam& p, int n) {
    if (n < 2) throw precondition_error("coefficient matrix needs order n >= 2");
    const int N = n - 1;
    CJet u = z_jet(p, N);
    u[0] = Complex{};
    u = u * Complex(p.degree().log_q());

    CoeffMatrix m{p.degree(), p.lambda(), n, {}, 0.0};
    m.entries.reserve(static_cast<std::size_t>(N * (N + 1) / 2));

    std::vector<double> fact(static_cast<std::size_t>(N) + 1, 1.0);
    for (int i = 1; i <= N; ++i) fact[static_cast<std::size_t>(i)] = fact[static_cast<std::size_t>(i - 1)] * i;

    double fro2 = 0.0;
    CJet upow = CJet::constant(u.base(), Complex(1.0), N);
    std::vector<CJet> powers;
    powers.reserve(static_cast<std::size_t>(N));
    for (int k = 1; k <= N; ++k) {
        upow = upow * u;
        powers.push_back(upow);
    }
    for (int r = 1; r <= N; ++r) {
        for (int k = 1; k <= r; ++k) {
            const Complex a = fact[static_cast<std::size_t>(r)] *
                              powers[static_cast<std::size_t>(k - 1)][r] /
                              fact[static_cast<std::size_t>(k)];
            m.entries.push_back(a);
            fro2 += std::norm(a);
        }
    }
    m.frobenius = std::sqrt(fro2);
    return m;
}

/// Growth constant C_m(x, lambda) = A(lambda) q^{|x| Re z} sqrt(m) |x|^m,
/// with A the Frobenius norm of the order-(m+1) coefficient matrix.
/// Vanishes at the root for every m >= 1.
inline double bound_constant(const Vertex& x, const EigenParam& p, int m) {
    if (m < 1) throw precondition_error("bound constant needs m >= 1");
    const double A = coeff_matrix(p, m + 1).frobenius;
    const double n = static_cast<double>(x.depth());
    return A * std::pow(static_cast<double>(p.degree().q()), n * p.z().real()) *
           std::sqrt(static_cast<double>(m)) * std::pow(n, m);
}

} // namespace treeharm
