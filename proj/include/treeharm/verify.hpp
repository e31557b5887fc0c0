#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "treeharm/errors.hpp"
#include "treeharm/kernels.hpp"
#include "treeharm/measures.hpp"
#include "treeharm/polyharmonic.hpp"
#include "treeharm/spectral.hpp"
#include "treeharm/tree.hpp"

// Independent oracles and the cross-validation suites. Nothing here may
// share a computation path with what it checks: finite differences never
// touch jets, and the stencil operators never touch measure coordinates.

namespace treeharm {

inline double q_growth(const EigenParam& p, int depth) {
    return std::exp(static_cast<double>(depth) * p.degree().log_q() * p.z().real());
}

/// Distance from lambda to the spectral segment [-rho, rho]; the safe
/// length scale for finite-difference steps.
inline double spectrum_distance(Complex lambda, Degree d) {
    const double rho = spectral_radius(d);
    if (std::abs(lambda.real()) <= rho) return std::abs(lambda.imag());
    const double dx = std::abs(lambda.real()) - rho;
    return std::hypot(dx, lambda.imag());
}

inline double fd_safe_step(Complex lambda, Degree d, double fraction = 0.01) {
    const double h = fraction * std::min(1.0, spectrum_distance(lambda, d));
    return std::min(9e-3, std::max(2e-7, h));
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

/// r-th central difference with step h (real direction; the integrand is
/// analytic in lambda). Optionally reports the worst cancellation ratio.
template <typename F>
Complex central_difference(F&& f, Complex x0, int r, double h, double* cancellation = nullptr) {
    if (r == 0) return f(x0);
    std::vector<double> binom(static_cast<std::size_t>(r) + 1, 1.0);
    for (int i = 1; i <= r; ++i)
        binom[static_cast<std::size_t>(i)] =
            binom[static_cast<std::size_t>(i - 1)] * (r - i + 1) / i;
    Complex acc{};
    double mag = 0.0;
    double sign = 1.0;
    for (int i = 0; i <= r; ++i) {
        const Complex term = sign * binom[static_cast<std::size_t>(i)] *
                             f(x0 + Complex((0.5 * r - i) * h));
        acc += term;
        mag = std::max(mag, std::abs(term));
        sign = -sign;
    }
    if (cancellation) *cancellation = std::max(*cancellation, std::abs(acc) > 0.0 ? mag / std::abs(acc) : 1e300);
    double hr = 1.0;
    for (int i = 0; i < r; ++i) hr *= h;
    return acc / hr;
}

/// One Richardson level on the central difference: (4 D_{h/2} - D_h) / 3,
/// error O(h^4).
template <typename F>
Complex richardson_fd(F&& f, Complex x0, int r, double h, double* cancellation = nullptr) {
    const Complex coarse = central_difference(f, x0, r, h, cancellation);
    const Complex fine = central_difference(f, x0, r, h / 2.0, cancellation);
    return (4.0 * fine - coarse) / 3.0;
}

/// Finite-difference oracle for the kernel lambda-derivatives. Goes through
/// z_from_lambda and the closed-form kernel only; never through jets.
inline Complex fd_kernel_derivative(const Vertex& x, const BoundaryRay& xi, const EigenParam& p,
                                    int r, double step, bool* cancellation_warning = nullptr) {
    if (r < 0 || r > 4) throw precondition_error("fd oracle supports 0 <= r <= 4");
    if (!(step > 1e-7 && step < 1e-2))
        throw precondition_error("fd step must lie in (1e-7, 1e-2)");
    if (cancellation_warning) *cancellation_warning = false;
    if (r == 0) return poisson_kernel(x, xi, p);
    const Degree d = p.degree();
    const int h = hor(x, xi);
    auto f = [&](Complex lambda) {
        return std::exp(z_from_lambda(lambda, d) * (static_cast<double>(h) * d.log_q()));
    };
    double cancel = 0.0;
    const Complex v = richardson_fd(f, p.lambda(), r, step, &cancel);
    if (cancellation_warning) *cancellation_warning = cancel > 1e6;
    return v;
}

// ---------------------------------------------------------------------------
// Stencil oracles
// ---------------------------------------------------------------------------

/// Values restricted to a smaller ball (flat prefix of the storage).
inline BallValues restricted(const BallValues& v, int radius) {
    if (radius > v.radius()) throw radius_error("cannot restrict to a larger radius");
    BallValues out(v.degree(), radius);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i];
    return out;
}

/// k-fold application of the (P - lambda I) stencil; radius shrinks by k.
inline BallValues stencil_power(const BallValues& v, const EigenParam& p, int k) {
    if (k < 0) throw precondition_error("stencil power must be nonnegative");
    if (k > v.radius()) throw radius_error("stencil power exceeds the ball radius");
    BallValues out = v;
    for (int i = 0; i < k; ++i) out = apply_stencil(out, p);
    return out;
}

/// Truncated exponential series sum_{k<terms} t^k/k! (P - lambda I)^k,
/// everything restricted to radius(v) - terms. Terminates exactly when the
/// sampled function is polyharmonic of order <= terms.
inline BallValues stencil_exponential(const BallValues& v, const EigenParam& p, double t, int terms) {
    if (terms < 1) throw precondition_error("stencil exponential needs terms >= 1");
    if (terms > v.radius()) throw radius_error("stencil exponential exceeds the ball radius");
    const int out_radius = v.radius() - terms;
    BallValues out(v.degree(), out_radius);
    BallValues cur = v;
    double coeff = 1.0;
    for (int k = 0; k < terms; ++k) {
        if (k > 0) {
            cur = apply_stencil(cur, p);
            coeff *= t / static_cast<double>(k);
        }
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += coeff * cur[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sign-constant arbitration
// ---------------------------------------------------------------------------

struct SignResidual {
    int r = 0;
    double residual_plus = 0.0;        // against +r K^{(r-1)}
    double residual_alternating = 0.0; // against (-1)^r r K^{(r-1)}
};

struct SignResolution {
    LadderSign chosen = LadderSign::plus_r;
    std::vector<SignResidual> per_r;
    double winning_max = 0.0;
    double losing_min_odd = 0.0; // smallest odd-r residual of the rejected convention
};

/// Applies the neighborhood stencil to K^{(r)}(., xi) at sample vertices
/// and measures the residual against both sign conventions for the ladder
/// (P - lambda I) K^{(r)} = s_r K^{(r-1)}. The samples include the root
/// and on-ray vertices, which separate the conventions decisively for odd
/// r. Residuals are normalized by q^{|x| Re z} to offset kernel growth.
inline SignResolution resolve_sign_constant(const EigenParam& p, int trials,
                                            std::uint64_t seed = 7) {
    if (trials < 10) throw precondition_error("sign resolution needs at least 10 trials");
    const Degree d = p.degree();
    std::mt19937_64 rng(seed);
    auto uniform_int = [&](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };

    std::vector<std::pair<Vertex, BoundaryRay>> samples;
    const BoundaryRay axis(root(), 0);
    samples.emplace_back(root(), axis);
    for (int k = 1; k <= 4; ++k)
        samples.emplace_back(Vertex(std::vector<Label>(static_cast<std::size_t>(k), 0)), axis);
    for (int t = 0; t < trials; ++t) {
        std::vector<Label> w;
        const int depth = uniform_int(0, 4);
        for (int i = 0; i < depth; ++i)
            w.push_back(static_cast<Label>(uniform_int(0, i == 0 ? d.q() : d.q() - 1)));
        Vertex x(std::move(w));
        std::vector<Label> pw;
        const int pdepth = uniform_int(0, 3);
        for (int i = 0; i < pdepth; ++i)
            pw.push_back(static_cast<Label>(uniform_int(0, i == 0 ? d.q() : d.q() - 1)));
        samples.emplace_back(std::move(x),
                             BoundaryRay(Vertex(std::move(pw)),
                                         static_cast<Label>(uniform_int(0, d.q() - 1))));
    }

    SignResolution res;
    const double invq1 = 1.0 / static_cast<double>(d.q() + 1);
    for (int r = 1; r <= 3; ++r) {
        SignResidual sr{r, 0.0, 0.0};
        for (const auto& [x, xi] : samples) {
            Complex lhs{};
            for (const auto& y : neighbors(d, x)) lhs += kernel_derivative(y, xi, p, r);
            lhs = invq1 * lhs - p.lambda() * kernel_derivative(x, xi, p, r);
            const Complex prev = kernel_derivative(x, xi, p, r - 1);
            const double denom = q_growth(p, x.depth()) + std::abs(lhs);
            sr.residual_plus = std::max(
                sr.residual_plus, std::abs(lhs - ladder_factor(r, LadderSign::plus_r) * prev) / denom);
            sr.residual_alternating = std::max(
                sr.residual_alternating,
                std::abs(lhs - ladder_factor(r, LadderSign::alternating_r) * prev) / denom);
        }
        res.per_r.push_back(sr);
    }

    double plus_max = 0.0, alt_max = 0.0;
    for (const auto& sr : res.per_r) {
        plus_max = std::max(plus_max, sr.residual_plus);
        alt_max = std::max(alt_max, sr.residual_alternating);
    }
    const bool plus_ok = plus_max < 1e-8;
    const bool alt_ok = alt_max < 1e-8;
    if (plus_ok == alt_ok)
        throw ambiguity_error("sign resolution: stencil residuals do not single out a convention");
    res.chosen = plus_ok ? LadderSign::plus_r : LadderSign::alternating_r;
    res.winning_max = plus_ok ? plus_max : alt_max;
    res.losing_min_odd = 1e300;
    for (const auto& sr : res.per_r)
        if (sr.r % 2)
            res.losing_min_odd = std::min(
                res.losing_min_odd, plus_ok ? sr.residual_alternating : sr.residual_plus);
    return res;
}

// ---------------------------------------------------------------------------
// Deterministic sampling
// ---------------------------------------------------------------------------

/// Seeded generator for the random test objects. All draws go through the
/// raw engine so that a fixed seed gives identical results everywhere.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) {
        const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    Complex complex_box(double r, double i) { return {uniform(-r, r), uniform(-i, i)}; }

    /// Modulus in [0.2, 1], arbitrary phase: keeps coordinates robustly
    /// away from the order-demotion tolerance.
    Complex unit_weight() {
        const double m = uniform(0.2, 1.0);
        const double a = uniform(0.0, 6.283185307179586);
        return {m * std::cos(a), m * std::sin(a)};
    }

    Vertex vertex(Degree d, int max_depth) {
        const int depth = uniform_int(0, max_depth);
        std::vector<Label> w;
        w.reserve(static_cast<std::size_t>(depth));
        for (int i = 0; i < depth; ++i)
            w.push_back(static_cast<Label>(uniform_int(0, i == 0 ? d.q() : d.q() - 1)));
        return Vertex(std::move(w));
    }

    BoundaryRay ray(Degree d, int max_prefix = 3) {
        return BoundaryRay(vertex(d, max_prefix), static_cast<Label>(uniform_int(0, d.q() - 1)));
    }

    BoundaryMeasure measure(Degree d, int max_cyl_depth = 2) {
        std::vector<Atom> atoms;
        const int na = uniform_int(1, 3);
        for (int i = 0; i < na; ++i) atoms.push_back({ray(d), unit_weight()});
        std::optional<CylinderPart> cyl;
        if (uniform_int(0, 1)) {
            const int depth = uniform_int(1, max_cyl_depth);
            const auto size = static_cast<std::size_t>(sphere_size(d, depth));
            std::vector<Complex> vals(size);
            for (auto& v : vals) v = complex_box(1.0, 1.0) / static_cast<double>(size);
            cyl = CylinderPart{depth, std::move(vals)};
        }
        return BoundaryMeasure::of(d, std::move(atoms), std::move(cyl));
    }

    PolyFunction poly_function(const EigenParam& p, int ord) {
        std::vector<BoundaryMeasure> sigmas;
        sigmas.reserve(static_cast<std::size_t>(ord));
        for (int i = 0; i < ord; ++i) sigmas.push_back(measure(p.degree()));
        return make_poly_function(p, std::move(sigmas)).fn;
    }

    /// Eigenvalue sample off the spectrum: Re z in [0.55, 1.8],
    /// Im z in [-1, 1] (clear of the branch points at Re z = 1/2).
    EigenParam eigen_param(Degree d) {
        return EigenParam::from_z(d, {uniform(0.55, 1.8), uniform(-1.0, 1.0)});
    }

private:
    std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

struct SuiteConfig {
    int q = 2;
    std::vector<Complex> z_list;      // eigenvalues by branch parameter; empty = default set
    std::vector<Complex> lambda_list; // additional eigenvalues given directly
    int radius = 6;
    std::uint64_t seed = 1;
    double tol_exact = 1e-12;
    double tol_rel = 1e-9;
    double tol_fd = 1e-5;
    int radius_cap = kDefaultRadiusCap;
};

inline std::vector<Complex> default_z_list() {
    return {Complex(0.6, 0.0), Complex(1.0, 0.0), Complex(1.5, 0.3)};
}

struct CaseResult {
    std::string id;
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    int q = 2;
    std::vector<CaseResult> cases;
    std::optional<SignResolution> sign;

    bool passed() const {
        for (const auto& c : cases)
            if (!c.pass) return false;
        return true;
    }
};

inline std::vector<EigenParam> suite_params(const SuiteConfig& cfg) {
    const Degree d(cfg.q);
    std::vector<EigenParam> out;
    for (const auto& z : (cfg.z_list.empty() && cfg.lambda_list.empty()) ? default_z_list()
                                                                         : cfg.z_list)
        out.push_back(EigenParam::from_z(d, z));
    for (const auto& la : cfg.lambda_list) out.push_back(EigenParam::from_lambda(d, la));
    return out;
}

SuiteReport run_suite(const std::string& name, const SuiteConfig& cfg);

} // namespace treeharm

#include "treeharm/verify_suites.hpp"
