#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "treeharm/verify.hpp"

namespace treeharm {
namespace detail {

class CaseBuilder {
public:
    CaseBuilder(std::string id, double tol) {
        c_.id = std::move(id);
        c_.tolerance = tol;
    }
    void record(double abs_err, double rel_err) {
        c_.max_abs_err = std::max(c_.max_abs_err, abs_err);
        c_.max_rel_err = std::max(c_.max_rel_err, rel_err);
    }
    void force_fail() { forced_ = true; }
    CaseResult finish() {
        c_.pass = !forced_ && c_.max_rel_err <= c_.tolerance;
        return c_;
    }

private:
    CaseResult c_;
    bool forced_ = false;
};

inline double coordinate_tv_sum(const PolyFunction& f) {
    double s = 0.0;
    for (const auto& m : f.sigmas) s += tv_norm(m);
    return s;
}

/// Magnitude of the terms double precision actually sums when evaluating f
/// at depth m (hor up to min(m+1, radius)): the honest scale for relative
/// residuals of evaluation and stencil identities. Plain q^{|x| Re z}
/// underestimates it badly for high derivative orders near the branch
/// points, where |K^{(r)}| carries an extra factor ~ r! / (lambda - rho)^r.
inline std::vector<double> integrand_scales(const PolyFunction& f, int radius) {
    std::vector<double> rowmax; // rowmax[r * (radius+1) + m]
    const int n = order(f);
    rowmax.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(radius + 1), 0.0);
    for (int r = 0; r < n; ++r) {
        const auto row = kernel_derivative_row(f.param, r, radius);
        for (int m = 0; m <= radius; ++m) {
            double mx = 0.0;
            for (int h = -m; h <= m; ++h)
                mx = std::max(mx, std::abs(row[static_cast<std::size_t>(h + radius)]));
            rowmax[static_cast<std::size_t>(r) * static_cast<std::size_t>(radius + 1) +
                   static_cast<std::size_t>(m)] = mx;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(radius) + 1, 0.0);
    for (int m = 0; m <= radius; ++m) {
        double s = 0.0;
        for (int r = 0; r < n; ++r)
            s += tv_norm(f.sigmas[static_cast<std::size_t>(r)]) *
                 rowmax[static_cast<std::size_t>(r) * static_cast<std::size_t>(radius + 1) +
                        static_cast<std::size_t>(m)];
        out[static_cast<std::size_t>(m)] = s;
    }
    return out;
}

/// Step for kernel finite differences: shrinks with both the distance to
/// the spectrum and the local derivative scale |hor| ln q |z_1|.
inline double kernel_fd_step(const EigenParam& p, int h) {
    const double R = spectrum_distance(p.lambda(), p.degree());
    const Complex diff = q_pow(p.degree(), p.z()) - q_pow(p.degree(), Complex(1.0) - p.z());
    const double z1 = std::abs(Complex(p.degree().q() + 1) / (p.degree().log_q() * diff));
    const double M = 1.0 / std::min(1.0, R) + std::abs(h) * p.degree().log_q() * z1;
    return std::min(9e-3, std::max(2e-7, 0.004 / M));
}

// ---------------------------------------------------------------------------

inline void suite_identities(SuiteReport& rep, const SuiteConfig& cfg,
                             const std::vector<EigenParam>& params) {
    const Degree d(cfg.q);
    Sampler smp(cfg.seed);
    const int R = std::min(cfg.radius, 6);
    const auto R_ball = ball(d, R, cfg.radius_cap);
    const auto R1_ball = ball(d, R - 1, cfg.radius_cap);

    {
        CaseBuilder cb("kernel_eigenfunction", 1e-10);
        for (const auto& p : params)
            for (int t = 0; t < 20; ++t) {
                const BoundaryRay xi = smp.ray(d, 6);
                for (const auto& x : R_ball) {
                    Complex pk{};
                    for (const auto& y : neighbors(d, x)) pk += poisson_kernel(y, xi, p);
                    pk /= static_cast<double>(d.q() + 1);
                    const Complex lk = p.lambda() * poisson_kernel(x, xi, p);
                    cb.record(std::abs(pk - lk), std::abs(pk - lk) / (std::abs(lk) + 1.0));
                }
            }
        rep.cases.push_back(cb.finish());
    }
    {
        CaseBuilder cb("sign_resolution", 1e-8);
        for (const auto& p : params) {
            const SignResolution sr = resolve_sign_constant(p, 12, cfg.seed + 1);
            cb.record(sr.winning_max, sr.winning_max);
            if (sr.chosen != kLadderSign || sr.losing_min_odd <= 1e-1) cb.force_fail();
            if (!rep.sign || sr.winning_max > rep.sign->winning_max) rep.sign = sr;
        }
        rep.cases.push_back(cb.finish());
    }
    {
        CaseBuilder cb("derivative_ladder", 1e-8);
        for (const auto& p : params)
            for (int t = 0; t < 3; ++t) {
                const BoundaryRay xi = smp.ray(d, 4);
                for (int r = 1; r <= 5; ++r) {
                    const auto row_r = kernel_derivative_row(p, r, R);
                    const auto row_prev = kernel_derivative_row(p, r - 1, R);
                    BallValues kr(d, R);
                    for (std::size_t i = 0; i < kr.size(); ++i) {
                        const Vertex x = kr.vertex_at(i);
                        kr[i] = row_r[static_cast<std::size_t>(hor(x, xi) + R)];
                    }
                    const BallValues lhs = apply_stencil(kr, p);
                    // K^{(r)} magnitudes reachable from depth m (stencil inputs)
                    std::vector<double> scale(static_cast<std::size_t>(R), 0.0);
                    for (int m = 0; m < R; ++m)
                        for (int h = -(m + 1); h <= m + 1; ++h)
                            scale[static_cast<std::size_t>(m)] =
                                std::max(scale[static_cast<std::size_t>(m)],
                                         std::abs(row_r[static_cast<std::size_t>(h + R)]));
                    for (const auto& x : R1_ball) {
                        const Complex rhs = ladder_factor(r) *
                                            row_prev[static_cast<std::size_t>(hor(x, xi) + R)];
                        const Complex got = lhs.at(x);
                        const double denom =
                            std::abs(rhs) + q_growth(p, x.depth()) +
                            1e-3 * scale[static_cast<std::size_t>(x.depth())];
                        cb.record(std::abs(got - rhs), std::abs(got - rhs) / denom);
                    }
                }
            }
        rep.cases.push_back(cb.finish());
    }
    {
        CaseBuilder cb("coordinate_stencil_commutation", cfg.tol_rel);
        for (const auto& p : params)
            for (int t = 0; t < 6; ++t) {
                const PolyFunction f = smp.poly_function(p, smp.uniform_int(1, 5));
                const auto scales = integrand_scales(f, R);
                const BallValues lhs = apply_stencil(evaluate_ball(f, R, cfg.radius_cap), p);
                const BallValues rhs = evaluate_ball(apply_shifted_laplacian(f), R - 1, cfg.radius_cap);
                for (std::size_t i = 0; i < rhs.size(); ++i) {
                    const int depth = rhs.vertex_at(i).depth();
                    const double denom = std::abs(lhs[i]) + std::abs(rhs[i]) +
                                         1e-3 * scales[static_cast<std::size_t>(std::min(depth + 1, R))];
                    cb.record(std::abs(lhs[i] - rhs[i]), std::abs(lhs[i] - rhs[i]) / denom);
                }
            }
        rep.cases.push_back(cb.finish());
    }
    {
        CaseBuilder radial("spherical_radial", 1e-12);
        CaseBuilder eigen("spherical_eigen", 1e-10);
        for (const auto& p : params) {
            const PolyFunction phi{p, {nu_o(1, d)}};
            const BallValues v = evaluate_ball(phi, R, cfg.radius_cap);
            const double vmax = v.max_abs();
            for (int n = 1; n <= R; ++n) {
                const Complex first = v.at(sphere_vertex(d, n, 0));
                for (std::int64_t k = 1; k < sphere_size(d, n); ++k) {
                    const double spread = std::abs(v.at(sphere_vertex(d, n, k)) - first);
                    radial.record(spread, spread / (1.0 + vmax));
                }
            }
            const BallValues res = apply_stencil(v, p);
            for (std::size_t i = 0; i < res.size(); ++i) {
                const double denom =
                    std::abs(p.lambda() * v[i]) + 1e-12 * (1.0 + vmax);
                eigen.record(std::abs(res[i]), std::abs(res[i]) / denom);
            }
        }
        rep.cases.push_back(radial.finish());
        rep.cases.push_back(eigen.finish());
    }
    {
        CaseBuilder cb("kernel_jet_vs_fd", cfg.tol_fd);
        for (const auto& p : params) {
            std::vector<std::pair<Vertex, BoundaryRay>> samples;
            const BoundaryRay axis(root(), 0);
            for (int k = 1; k <= 4; ++k)
                samples.emplace_back(Vertex(std::vector<Label>(static_cast<std::size_t>(k), 0)), axis);
            for (int t = 0; t < 6; ++t) samples.emplace_back(smp.vertex(d, 4), smp.ray(d, 3));
            for (const auto& [x, xi] : samples) {
                const int h = hor(x, xi);
                if (h == 0) continue; // kernel constant in lambda; nothing to compare
                const double step = kernel_fd_step(p, h);
                for (int r = 1; r <= 4; ++r) {
                    const Complex jet = kernel_derivative(x, xi, p, r);
                    // skip samples the fd oracle cannot resolve (6-digit headroom rule)
                    const double noise_floor =
                        1e-15 * q_growth(p, std::max(h, 0)) * std::pow(2.0 / step, r);
                    if (std::abs(jet) < 1e6 * noise_floor) continue;
                    const Complex fd = fd_kernel_derivative(x, xi, p, r, step);
                    const double rel = std::abs(jet - fd) / (std::abs(jet) + std::abs(fd));
                    cb.record(std::abs(jet - fd), rel);
                }
            }
        }
        rep.cases.push_back(cb.finish());
    }
}

// ---------------------------------------------------------------------------

inline void suite_representations(SuiteReport& rep, const SuiteConfig& cfg,
                                  const std::vector<EigenParam>& params) {
    const Degree d(cfg.q);
    Sampler smp(cfg.seed);
    const int R = std::min(cfg.radius, 5);
    const auto R_ball = ball(d, R, cfg.radius_cap);

    {
        CaseBuilder cb("derivative_vs_horpower", cfg.tol_rel);
        CaseBuilder ineq("coefficient_norm_bound", 1e-12);
        for (const auto& p : params)
            for (int t = 0; t < 8; ++t) {
                const PolyFunction f = smp.poly_function(p, smp.uniform_int(1, 5));
                const auto bars = to_hor_representation(f);
                const auto scales = integrand_scales(f, R);
                for (const auto& x : R_ball) {
                    const Complex a = evaluate(f, x);
                    const Complex b = evaluate_hor_representation(p, bars, x);
                    const double denom = std::abs(a) + std::abs(b) +
                                         1e-3 * scales[static_cast<std::size_t>(x.depth())];
                    cb.record(std::abs(a - b), std::abs(a - b) / denom);
                }
                const int n = order(f);
                if (n >= 2) {
                    const double A = coeff_matrix(p, n).frobenius;
                    for (int k = 1; k <= n - 1; ++k) {
                        double sq = 0.0;
                        for (int r = k; r <= n - 1; ++r) {
                            const double tv = tv_norm(f.sigmas[static_cast<std::size_t>(r)]);
                            sq += tv * tv;
                        }
                        const double lhs = tv_norm(bars[static_cast<std::size_t>(k)]);
                        const double rhs = A * std::sqrt(sq);
                        const double viol = std::max(0.0, lhs - rhs);
                        ineq.record(viol, viol / (1.0 + rhs));
                    }
                }
            }
        rep.cases.push_back(cb.finish());
        rep.cases.push_back(ineq.finish());
    }
    {
        CaseBuilder cb("horpower_reconstruction", 1e-9);
        for (const auto& p : params) {
            const CoeffMatrix A = coeff_matrix(p, 5);
            for (int t = 0; t < 10; ++t) {
                const Vertex x = smp.vertex(d, 5);
                const BoundaryRay xi = smp.ray(d, 4);
                const int h = hor(x, xi);
                const Complex k0 = poisson_kernel(x, xi, p);
                for (int r = 1; r <= 4; ++r) {
                    Complex sum{};
                    double hp = 1.0;
                    for (int k = 1; k <= r; ++k) {
                        hp *= h;
                        sum += hp * A.at(k, r);
                    }
                    const Complex lhs = kernel_derivative(x, xi, p, r);
                    const Complex rhs = k0 * sum;
                    const double denom =
                        std::abs(lhs) + std::abs(rhs) + q_growth(p, x.depth());
                    cb.record(std::abs(lhs - rhs), std::abs(lhs - rhs) / denom);
                }
            }
        }
        rep.cases.push_back(cb.finish());
    }
    {
        CaseBuilder cb("gamma_z_roundtrip", 1e-11);
        CaseBuilder branch("principal_branch", 0.0);
        for (int t = 0; t < 100; ++t) {
            const EigenParam p = smp.eigen_param(d);
            const Complex la = p.lambda();
            const Complex back = treeharm::gamma(z_from_lambda(la, d), d);
            cb.record(std::abs(back - la), std::abs(back - la) / std::abs(la));
            if (z_from_lambda(la, d).real() <= 0.5) branch.force_fail();
        }
        rep.cases.push_back(cb.finish());
        rep.cases.push_back(branch.finish());
    }
    {
        CaseBuilder cb("sector_constancy", 1e-12);
        for (const auto& p : params)
            for (int t = 0; t < 4; ++t) {
                const Vertex x = smp.vertex(d, 4);
                Vertex u = x; // deepen to |u| >= |x|
                for (int i = 0; i < 2; ++i)
                    u = child(u, static_cast<Label>(smp.uniform_int(0, d.q() - 1)));
                for (int r = 0; r <= 4; ++r) {
                    const Complex ref =
                        kernel_derivative(x, BoundaryRay(u, static_cast<Label>(0)), p, r);
                    const double scale = q_growth(p, x.depth()) + std::abs(ref);
                    for (int s = 0; s < 50; ++s) {
                        Vertex w = u;
                        for (int i = 0; i < smp.uniform_int(0, 3); ++i)
                            w = child(w, static_cast<Label>(smp.uniform_int(0, d.q() - 1)));
                        const BoundaryRay through(w, static_cast<Label>(smp.uniform_int(0, d.q() - 1)));
                        const double dev = std::abs(kernel_derivative(x, through, p, r) - ref);
                        cb.record(dev, dev / scale);
                    }
                }
            }
        rep.cases.push_back(cb.finish());
    }
    {
        CaseBuilder cb("refinement_invariance", 1e-12);
        for (const auto& p : params)
            for (int t = 0; t < 10; ++t) {
                const BoundaryMeasure m = smp.measure(d);
                const int target = (m.cylinder() ? m.cylinder()->depth : 1) + 2;
                const BoundaryMeasure r2 = refine(m, m.cylinder() ? target : 1);
                const double tva = tv_norm(m), tvb = tv_norm(r2);
                cb.record(std::abs(tva - tvb), std::abs(tva - tvb) / (1.0 + tva));
                for (int s = 0; s < 4; ++s) {
                    const Vertex x = smp.vertex(d, 5);
                    for (int r = 0; r <= 2; ++r) {
                        const auto row = kernel_derivative_row(p, r, x.depth());
                        double rowmax = 0.0;
                        for (const auto& v : row) rowmax = std::max(rowmax, std::abs(v));
                        const Complex a = integrate_with_kernel_row(m, x, row, x.depth());
                        const Complex b = integrate_with_kernel_row(r2, x, row, x.depth());
                        const double denom =
                            std::abs(a) + std::abs(b) + 1e-3 * (1.0 + tva) * rowmax;
                        cb.record(std::abs(a - b), std::abs(a - b) / denom);
                    }
                }
            }
        rep.cases.push_back(cb.finish());
    }
}

// ---------------------------------------------------------------------------

inline void suite_norms(SuiteReport& rep, const SuiteConfig& cfg,
                        const std::vector<EigenParam>& params) {
    const Degree d(cfg.q);
    Sampler smp(cfg.seed);

    {
        CaseBuilder cb("contraction", 0.0);
        for (const auto& p : params)
            for (int t = 0; t < 70; ++t) {
                const PolyFunction f = smp.poly_function(p, smp.uniform_int(1, 6));
                const double before = poly_norm(f);
                const double after = poly_norm(apply_shifted_laplacian(f));
                const double excess = std::max(0.0, after - before);
                cb.record(excess, excess);
            }
        rep.cases.push_back(cb.finish());
    }
    {
        CaseBuilder cb("right_inverse_isometry", 1e-12);
        for (const auto& p : params)
            for (int t = 0; t < 20; ++t) {
                const PolyFunction h = smp.poly_function(p, smp.uniform_int(1, 5));
                const PolyFunction fh = right_inverse(h);
                const double nh = poly_norm(h), nf = poly_norm(fh);
                cb.record(std::abs(nf - nh), std::abs(nf - nh) / (1.0 + nh));
                const PolyFunction back = apply_shifted_laplacian(fh);
                if (order(back) != order(h)) cb.force_fail();
                for (int j = 0; j < order(h); ++j)
                    if (!exactly_equal(back.sigmas[static_cast<std::size_t>(j)],
                                       h.sigmas[static_cast<std::size_t>(j)]))
                        cb.force_fail();
            }
        rep.cases.push_back(cb.finish());
    }
    {
        // Truncations of a coordinate list with rapidly decreasing tails
        // converge pointwise, monotonically in the truncation index.
        CaseBuilder cb("cauchy_coherence", 0.0);
        for (const auto& p : params) {
            // Coordinates shrinking fast enough (beta^k / k!) that each
            // truncation error is dominated by its first missing term, for
            // every eigenvalue in the default set including the near-branch
            // one, where |K^{(k)}| grows like k! (lambda - rho)^{-k}.
            const BoundaryRay xi0(root(), 0);
            std::vector<BoundaryMeasure> sigmas;
            double w = 1.0, fact = 1.0;
            for (int k = 0; k < 4; ++k) {
                if (k > 0) {
                    fact *= k;
                    w = std::pow(3e-4, k) / fact;
                }
                sigmas.push_back(BoundaryMeasure::atomic(d, {{xi0, Complex(w)}}));
            }
            const PolyFunction f{p, sigmas};
            const BallValues full = evaluate_ball(f, 4, cfg.radius_cap);
            std::vector<double> errs;
            for (int N = 1; N <= 3; ++N) {
                const PolyFunction fn{
                    p, std::vector<BoundaryMeasure>(sigmas.begin(), sigmas.begin() + N)};
                const BallValues part = evaluate_ball(fn, 4, cfg.radius_cap);
                double e = 0.0;
                for (std::size_t i = 0; i < full.size(); ++i)
                    e = std::max(e, std::abs(part[i] - full[i]));
                errs.push_back(e);
            }
            for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
                const double viol = std::max(0.0, errs[i + 1] - errs[i]);
                cb.record(viol, viol);
            }
        }
        rep.cases.push_back(cb.finish());
    }
    {
        CaseBuilder cb("tv_dominates_mass", 1e-12);
        for (int t = 0; t < 50; ++t) {
            const BoundaryMeasure m = smp.measure(d);
            const double viol = std::max(0.0, std::abs(total_mass(m)) - tv_norm(m));
            cb.record(viol, viol / (1.0 + tv_norm(m)));
        }
        rep.cases.push_back(cb.finish());
    }
}

// ---------------------------------------------------------------------------

inline void suite_semigroup(SuiteReport& rep, const SuiteConfig& cfg,
                            const std::vector<EigenParam>& params) {
    const Degree d(cfg.q);
    Sampler smp(cfg.seed);

    {
        CaseBuilder cb("heat_vs_stencil_exponential", cfg.tol_rel);
        const int R = std::min(8, cfg.radius_cap);
        for (const auto& p : params)
            for (double t : {0.7, -0.4}) {
                const int ord = smp.uniform_int(1, 4);
                const PolyFunction f = smp.poly_function(p, ord);
                const auto scales = integrand_scales(f, R);
                const BallValues v = evaluate_ball(f, R, cfg.radius_cap);
                const BallValues lhs = stencil_exponential(v, p, t, ord);
                const BallValues rhs = evaluate_ball(heat_apply(f, t), R - ord, cfg.radius_cap);
                for (std::size_t i = 0; i < rhs.size(); ++i) {
                    const int reach = std::min(rhs.vertex_at(i).depth() + ord, R);
                    const double denom = std::abs(lhs[i]) + std::abs(rhs[i]) +
                                         1e-3 * scales[static_cast<std::size_t>(reach)];
                    cb.record(std::abs(lhs[i] - rhs[i]), std::abs(lhs[i] - rhs[i]) / denom);
                }
            }
        rep.cases.push_back(cb.finish());
    }
    {
        CaseBuilder cb("semigroup_law", 1e-11);
        for (const auto& p : params)
            for (double s : {-0.5, 0.5, 1.0})
                for (double t : {-0.5, 1.0}) {
                    const PolyFunction f = smp.poly_function(p, smp.uniform_int(1, 5));
                    const PolyFunction one = heat_apply(f, s + t);
                    const PolyFunction two = heat_apply(heat_apply(f, s), t);
                    for (int j = 0; j < order(f); ++j) {
                        const double scale =
                            1.0 + tv_norm(one.sigmas[static_cast<std::size_t>(j)]);
                        const double dv = diff_tv(one.sigmas[static_cast<std::size_t>(j)],
                                                  two.sigmas[static_cast<std::size_t>(j)]);
                        cb.record(dv, dv / scale);
                    }
                }
        rep.cases.push_back(cb.finish());
    }
    {
        CaseBuilder cb("nilpotency_decay", 1e-9);
        const int R = std::min(cfg.radius, 6);
        for (const auto& p : params)
            for (int ord = 2; ord <= 5; ++ord) {
                const PolyFunction f = smp.poly_function(p, ord);
                // exact vanishing in coordinates at step = order
                PolyFunction g = f;
                for (int m = 0; m < ord; ++m) g = apply_shifted_laplacian(g);
                if (poly_norm(g) != 0.0) cb.force_fail();
                // ... but not one step earlier
                PolyFunction h = f;
                for (int m = 0; m + 1 < ord; ++m) h = apply_shifted_laplacian(h);
                if (poly_norm(h) <= 0.0) cb.force_fail();
                // stencil version within rounding of zero
                if (ord <= R) {
                    const BallValues v = evaluate_ball(f, R, cfg.radius_cap);
                    const BallValues zero = stencil_power(v, p, ord);
                    const double scale = v.max_abs();
                    cb.record(zero.max_abs(), zero.max_abs() / (scale > 0 ? scale : 1.0));
                }
                // orbit norms reach exactly zero at step = order
                const auto rows = orbit(f, 1.0, ord + 2, OrbitOperator::shifted_laplacian);
                for (int m = ord; m <= ord + 2; ++m)
                    if (rows[static_cast<std::size_t>(m)].total_norm != 0.0) cb.force_fail();
                for (int m = 1; m < ord; ++m)
                    if (rows[static_cast<std::size_t>(m)].total_norm <= 0.0) cb.force_fail();
            }
        rep.cases.push_back(cb.finish());
    }
    {
        CaseBuilder cb("heat_identity_and_fixed_points", 0.0);
        for (const auto& p : params) {
            const PolyFunction f = smp.poly_function(p, smp.uniform_int(2, 5));
            const PolyFunction g = heat_apply(f, 0.0);
            if (order(g) != order(f)) cb.force_fail();
            for (int j = 0; j < order(f); ++j)
                if (!exactly_equal(g.sigmas[static_cast<std::size_t>(j)],
                                   f.sigmas[static_cast<std::size_t>(j)]))
                    cb.force_fail();
            const PolyFunction h1 = smp.poly_function(p, 1);
            const PolyFunction h2 = heat_apply(h1, 1.7);
            if (order(h2) != 1 || !exactly_equal(h2.sigmas[0], materialized(h1.sigmas[0])))
                cb.force_fail();
        }
        rep.cases.push_back(cb.finish());
    }
}

// ---------------------------------------------------------------------------

inline void suite_bounds(SuiteReport& rep, const SuiteConfig& cfg,
                         const std::vector<EigenParam>& params) {
    const Degree d(cfg.q);
    Sampler smp(cfg.seed);
    const int R = std::min(cfg.radius, 5);
    const auto R_ball = ball(d, R, cfg.radius_cap);

    {
        CaseBuilder cb("hor_range", 0.0);
        for (int t = 0; t < 30; ++t) {
            const BoundaryRay xi = smp.ray(d, 5);
            for (const auto& x : ball(d, std::min(R, 4), cfg.radius_cap)) {
                const int h = hor(x, xi);
                if (h < -x.depth() || h > x.depth()) cb.force_fail();
                const bool on_ray = sector_contains(x, xi);
                if ((h == x.depth()) != on_ray) cb.force_fail();
            }
        }
        rep.cases.push_back(cb.finish());
    }
    {
        CaseBuilder cb("kernel_derivative_upper_bound", 1e-12);
        for (const auto& p : params) {
            const CoeffMatrix A = coeff_matrix(p, 6);
            for (const auto& x : R_ball)
                for (int r = 1; r <= 5; ++r) {
                    double sq = 0.0, xp = 1.0;
                    for (int k = 1; k <= r; ++k) {
                        xp *= static_cast<double>(x.depth() * x.depth());
                        sq += xp;
                    }
                    const double rhs = q_growth(p, x.depth()) * A.frobenius * std::sqrt(sq);
                    for (int t = 0; t < 12; ++t) {
                        const double lhs = std::abs(kernel_derivative(x, smp.ray(d, 5), p, r));
                        const double viol = std::max(0.0, lhs - rhs);
                        cb.record(viol, viol / (1.0 + rhs));
                    }
                }
        }
        rep.cases.push_back(cb.finish());
    }
    {
        // The growth constant A(lambda) q^{|x| Re z} sqrt(m) |x|^m, taken
        // literally as a pointwise bound. It vanishes at the root while
        // f(o) = sigma_0(boundary) does not, so this check fails there by
        // construction of the constant; kept verbatim, with the provable
        // envelope below as the sound counterpart.
        CaseBuilder cb("pointwise_bound_constant", 1e-12);
        CaseBuilder env("pointwise_envelope", 1e-12);
        int counter = 0;
        for (const auto& p : params)
            for (int t = 0; t < 12; ++t) {
                const int m = 1 + (counter++ % 5);
                const PolyFunction f = smp.poly_function(p, m);
                const double tvsum = coordinate_tv_sum(f);
                const int n = order(f);
                const double A = coeff_matrix(p, n + 1).frobenius;
                for (const auto& x : R_ball) {
                    const double val = std::abs(evaluate(f, x));
                    const double cm = bound_constant(x, p, n) * tvsum;
                    const double viol = std::max(0.0, val - cm);
                    cb.record(viol, viol / (1.0 + cm));

                    double sq = 0.0, xp = 1.0;
                    for (int k = 1; k <= n - 1; ++k) {
                        xp *= static_cast<double>(x.depth() * x.depth());
                        sq += xp;
                    }
                    double tail = 0.0;
                    for (int j = 1; j < n; ++j)
                        tail += tv_norm(f.sigmas[static_cast<std::size_t>(j)]);
                    const double envelope =
                        q_growth(p, x.depth()) *
                        (tv_norm(f.sigmas[0]) + A * std::sqrt(sq) * tail);
                    const double eviol = std::max(0.0, val - envelope);
                    env.record(eviol, eviol / (1.0 + envelope));
                }
            }
        rep.cases.push_back(cb.finish());
        rep.cases.push_back(env.finish());
    }
}

} // namespace detail

inline SuiteReport run_suite(const std::string& name, const SuiteConfig& cfg) {
    if (cfg.q < 2) throw suite_error("suite config: q must be >= 2");
    if (cfg.radius < 1) throw suite_error("suite config: radius must be >= 1 (stencils need room)");
    if (cfg.radius > cfg.radius_cap) throw suite_error("suite config: radius above the cap");

    SuiteReport rep;
    rep.suite = name;
    rep.seed = cfg.seed;
    rep.q = cfg.q;
    const auto params = suite_params(cfg);

    if (name == "identities")
        detail::suite_identities(rep, cfg, params);
    else if (name == "representations")
        detail::suite_representations(rep, cfg, params);
    else if (name == "norms")
        detail::suite_norms(rep, cfg, params);
    else if (name == "semigroup")
        detail::suite_semigroup(rep, cfg, params);
    else if (name == "bounds")
        detail::suite_bounds(rep, cfg, params);
    else
        throw suite_error("unknown suite '" + name +
                          "' (expected identities, representations, norms, semigroup, bounds)");
    return rep;
}

} // namespace treeharm
