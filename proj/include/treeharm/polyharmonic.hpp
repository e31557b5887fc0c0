#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "treeharm/errors.hpp"
#include "treeharm/kernels.hpp"
#include "treeharm/measures.hpp"
#include "treeharm/spectral.hpp"
#include "treeharm/tree.hpp"

namespace treeharm {

/// Below this total variation a top coordinate counts as zero and the
/// order is demoted; the representation is unique, so silently carrying a
/// numerically-zero top coordinate would misreport the order.
inline constexpr double kZeroCoordinateTolerance = 1e-14;

/// A lambda-polyharmonic function of order n, stored through its unique
/// boundary representation f(x) = sum_{r=0}^{n-1} int K^{(r)}(x, .) d sigma_r.
struct PolyFunction {
    EigenParam param;
    std::vector<BoundaryMeasure> sigmas; // sigma_0 .. sigma_{n-1}
};

inline int order(const PolyFunction& f) { return static_cast<int>(f.sigmas.size()); }

/// The zero function, canonically order 1 with an empty coordinate.
inline PolyFunction zero_function(const EigenParam& p) {
    return PolyFunction{p, {BoundaryMeasure(p.degree())}};
}

struct PolyMakeResult {
    PolyFunction fn;
    bool order_demoted = false;
    int dropped_coordinates = 0;
};

/// Validates and canonicalizes the coordinate list: trailing coordinates
/// with tv below kZeroCoordinateTolerance are dropped (order demotion).
inline PolyMakeResult make_poly_function(const EigenParam& p, std::vector<BoundaryMeasure> sigmas) {
    if (sigmas.empty())
        throw precondition_error("a polyharmonic function needs at least one coordinate (order >= 1)");
    for (const auto& s : sigmas)
        if (!(s.degree() == p.degree()))
            throw precondition_error("coordinate measure degree differs from the eigenparameter degree");
    int dropped = 0;
    while (sigmas.size() > 1 && tv_norm(sigmas.back()) <= kZeroCoordinateTolerance) {
        sigmas.pop_back();
        ++dropped;
    }
    return PolyMakeResult{PolyFunction{p, std::move(sigmas)}, dropped > 0, dropped};
}

inline std::vector<double> coordinate_tv_norms(const PolyFunction& f) {
    std::vector<double> out;
    out.reserve(f.sigmas.size());
    for (const auto& s : f.sigmas) out.push_back(tv_norm(s));
    return out;
}

/// The norm |||f||| = sum_j j! ||sigma_j||. It makes P - lambda I a
/// contraction and its chosen right inverse an isometry.
inline double poly_norm(const PolyFunction& f) {
    double acc = 0.0;
    double fact = 1.0;
    for (std::size_t j = 0; j < f.sigmas.size(); ++j) {
        if (j > 0) fact *= static_cast<double>(j);
        acc += fact * tv_norm(f.sigmas[j]);
    }
    return acc;
}

inline Complex evaluate(const PolyFunction& f, const Vertex& x) {
    Complex acc{};
    for (std::size_t r = 0; r < f.sigmas.size(); ++r)
        acc += integrate_kernel(f.sigmas[r], x, f.param, static_cast<int>(r));
    return acc;
}

// ---------------------------------------------------------------------------
// Ball samples
// ---------------------------------------------------------------------------

/// Function values on the complete ball of a given radius, stored flat in
/// canonical (length, word) order.
class BallValues {
public:
    BallValues(Degree d, int radius, int cap = kDefaultRadiusCap)
        : deg_(d), radius_(radius) {
        if (radius < 0) throw precondition_error("ball radius must be nonnegative");
        check_radius_cap(radius, cap);
        values_.assign(static_cast<std::size_t>(ball_size(d, radius)), Complex{});
    }

    Degree degree() const { return deg_; }
    int radius() const { return radius_; }
    std::size_t size() const { return values_.size(); }

    Complex at(const Vertex& x) const { return values_[index_of(x)]; }
    Complex& at(const Vertex& x) { return values_[index_of(x)]; }
    Complex operator[](std::size_t i) const { return values_[i]; }
    Complex& operator[](std::size_t i) { return values_[i]; }

    std::size_t index_of(const Vertex& x) const {
        if (x.depth() > radius_) throw precondition_error("vertex outside the stored ball");
        return static_cast<std::size_t>(ball_index(deg_, x));
    }

    Vertex vertex_at(std::size_t i) const {
        std::int64_t idx = static_cast<std::int64_t>(i);
        for (int n = 0; n <= radius_; ++n) {
            const std::int64_t s = sphere_size(deg_, n);
            if (idx < s) return sphere_vertex(deg_, n, idx);
            idx -= s;
        }
        throw precondition_error("flat index outside the stored ball");
    }

    const std::vector<Complex>& data() const { return values_; }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : values_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    Degree deg_;
    int radius_;
    std::vector<Complex> values_;
};

inline BallValues evaluate_ball(const PolyFunction& f, int radius, int cap = kDefaultRadiusCap) {
    BallValues out(f.param.degree(), radius, cap);
    const int n = order(f);
    std::vector<std::vector<Complex>> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) rows.push_back(kernel_derivative_row(f.param, r, radius));
    const auto verts = ball(f.param.degree(), radius, cap);
    for (std::size_t i = 0; i < verts.size(); ++i) {
        Complex acc{};
        for (int r = 0; r < n; ++r)
            acc += integrate_with_kernel_row(f.sigmas[static_cast<std::size_t>(r)], verts[i],
                                             rows[static_cast<std::size_t>(r)], radius);
        out[i] = acc;
    }
    return out;
}

/// (P - lambda I) as a nearest-neighbor stencil on sampled values:
/// out(x) = (1/(q+1)) sum_{y ~ x} v(y) - lambda v(x). The operator has
/// range 1, so the output radius shrinks by one.
inline BallValues apply_stencil(const BallValues& v, const EigenParam& p) {
    if (v.radius() < 1)
        throw radius_error("stencil needs ball radius >= 1");
    const Degree d = v.degree();
    const double invq1 = 1.0 / static_cast<double>(d.q() + 1);
    BallValues out(d, v.radius() - 1);
    const auto verts = ball(d, v.radius() - 1);
    for (std::size_t i = 0; i < verts.size(); ++i) {
        Complex acc{};
        for (const auto& y : neighbors(d, verts[i])) acc += v.at(y);
        out[i] = invq1 * acc - p.lambda() * v.at(verts[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// The shifted Laplacian, its right inverse, and the heat semigroup, all in
// measure coordinates. (P - lambda I) P^{(j)}(sigma) = s_j P^{(j-1)}(sigma)
// with s_j = ladder_factor(j), so the coordinates just shift down.
// ---------------------------------------------------------------------------

inline PolyFunction apply_shifted_laplacian(const PolyFunction& f) {
    const int n = order(f);
    if (n == 1) return zero_function(f.param);
    std::vector<BoundaryMeasure> out;
    out.reserve(static_cast<std::size_t>(n) - 1);
    for (int j = 0; j + 1 < n; ++j) {
        const auto s = static_cast<std::int64_t>(std::llround(ladder_factor(j + 1)));
        out.push_back(scaled_rational(f.sigmas[static_cast<std::size_t>(j + 1)], s, 1));
    }
    return PolyFunction{f.param, std::move(out)};
}

/// The norm-preserving right inverse: sigma'_{j+1} = sigma_j / s_{j+1},
/// sigma'_0 = 0. Applying the shifted Laplacian returns h exactly, and
/// |||f_h||| = |||h||| coordinate by coordinate.
inline PolyFunction right_inverse(const PolyFunction& h) {
    const int n = order(h);
    std::vector<BoundaryMeasure> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    out.push_back(BoundaryMeasure(h.param.degree()));
    for (int j = 0; j < n; ++j) {
        const auto s = static_cast<std::int64_t>(std::llround(ladder_factor(j + 1)));
        out.push_back(scaled_rational(h.sigmas[static_cast<std::size_t>(j)], 1, s));
    }
    return PolyFunction{h.param, std::move(out)};
}

/// Change of representation from kernel derivatives to hor-powers:
/// returns sigma-bar_0 .. sigma-bar_{n-1} with sigma-bar_0 = sigma_0 and
/// sigma-bar_k = sum_{r=k}^{n-1} a_{k,r}(lambda) sigma_r, so that
/// f(x) = sum_k int K(x, .) hor(x, .)^k d sigma-bar_k.
inline std::vector<BoundaryMeasure> to_hor_representation(const PolyFunction& f) {
    const int n = order(f);
    std::vector<BoundaryMeasure> bars;
    bars.reserve(static_cast<std::size_t>(n));
    bars.push_back(materialized(f.sigmas[0]));
    if (n == 1) return bars;
    const CoeffMatrix A = coeff_matrix(f.param, n);
    for (int k = 1; k <= n - 1; ++k) {
        BoundaryMeasure acc = scaled(f.sigmas[static_cast<std::size_t>(k)], A.at(k, k));
        for (int r = k + 1; r <= n - 1; ++r)
            acc = add(acc, scaled(f.sigmas[static_cast<std::size_t>(r)], A.at(k, r)));
        bars.push_back(std::move(acc));
    }
    return bars;
}

inline Complex evaluate_hor_representation(const EigenParam& p,
                                           const std::vector<BoundaryMeasure>& bars,
                                           const Vertex& x) {
    Complex acc{};
    for (std::size_t k = 0; k < bars.size(); ++k)
        acc += integrate_kernel_hor_power(bars[k], x, p, static_cast<int>(k));
    return acc;
}

/// e^{t(P - lambda I)} f. On an order-n function the exponential series
/// terminates at k = n-1, so this is an exact finite sum in coordinates:
/// g_j = sum_k (t^k / k!) (prod_{i=1}^{k} s_{j+i}) sigma_{j+k}.
inline PolyFunction heat_apply(const PolyFunction& f, double t) {
    const int n = order(f);
    std::vector<BoundaryMeasure> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        BoundaryMeasure acc = materialized(f.sigmas[static_cast<std::size_t>(j)]);
        double c = 1.0; // t^k / k! * s_{j+1} ... s_{j+k}
        for (int k = 1; j + k < n; ++k) {
            c *= t * ladder_factor(j + k) / static_cast<double>(k);
            if (c == 0.0) continue;
            acc = add(acc, scaled(f.sigmas[static_cast<std::size_t>(j + k)], Complex(c)));
        }
        out.push_back(std::move(acc));
    }
    return PolyFunction{f.param, std::move(out)};
}

// ---------------------------------------------------------------------------
// Orbits
// ---------------------------------------------------------------------------

enum class OrbitOperator { heat, shifted_laplacian };

struct OrbitRow {
    int step = 0;
    double total_norm = 0.0;
    std::vector<double> sigma_norms; // per-coordinate tv, padded to the initial order
    double contrast_norm = 0.0;      // |||(P - lambda I)^step f|||
};

/// Finite orbit segment. For the heat operator each step multiplies by
/// e^{t(P - lambda I)}; the iterated and the closed-form (m t) results are
/// checked against each other. The contrast column tracks the plain
/// shifted-Laplacian powers, which hit exactly zero at step = order.
inline std::vector<OrbitRow> orbit(const PolyFunction& f, double t, int steps, OrbitOperator op) {
    if (steps < 1) throw precondition_error("orbit needs steps >= 1");
    if (op == OrbitOperator::heat && t == 0.0)
        throw precondition_error("heat orbit needs t != 0");

    const int n0 = order(f);
    auto make_row = [&](int step, const PolyFunction& g, double contrast) {
        OrbitRow row;
        row.step = step;
        row.total_norm = poly_norm(g);
        row.sigma_norms.assign(static_cast<std::size_t>(n0), 0.0);
        const auto tvs = coordinate_tv_norms(g);
        for (std::size_t j = 0; j < tvs.size() && j < row.sigma_norms.size(); ++j)
            row.sigma_norms[j] = tvs[j];
        row.contrast_norm = contrast;
        return row;
    };

    std::vector<OrbitRow> rows;
    rows.reserve(static_cast<std::size_t>(steps) + 1);
    rows.push_back(make_row(0, f, poly_norm(f)));

    PolyFunction iter = f;      // heat iterate or laplacian power
    PolyFunction lpow = f;      // contrast sequence
    for (int m = 1; m <= steps; ++m) {
        lpow = apply_shifted_laplacian(lpow);
        if (op == OrbitOperator::heat) {
            iter = heat_apply(iter, t);
            const PolyFunction closed = heat_apply(f, static_cast<double>(m) * t);
            for (int j = 0; j < order(iter); ++j) {
                const double scale = 1.0 + tv_norm(closed.sigmas[static_cast<std::size_t>(j)]);
                if (diff_tv(iter.sigmas[static_cast<std::size_t>(j)],
                            closed.sigmas[static_cast<std::size_t>(j)]) > 1e-9 * scale)
                    throw error("heat orbit: iterated and closed-form coordinates diverged");
            }
            rows.push_back(make_row(m, iter, poly_norm(lpow)));
        } else {
            iter = apply_shifted_laplacian(iter);
            rows.push_back(make_row(m, iter, poly_norm(iter)));
        }
    }
    return rows;
}

} // namespace treeharm
