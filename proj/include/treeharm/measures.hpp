#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "treeharm/errors.hpp"
#include "treeharm/kernels.hpp"
#include "treeharm/spectral.hpp"
#include "treeharm/tree.hpp"

namespace treeharm {

struct Atom {
    BoundaryRay ray;
    Complex weight;
};

/// Values on the complete depth-d sector partition of the boundary, in
/// sphere rank order. A cylinder measure is, by convention, the measure
/// whose conditional on each sector is uniform (nu_o-proportional); that
/// convention is what makes refinement and kernel integration exact.
struct CylinderPart {
    int depth = 1;
    std::vector<Complex> values;
};

/// A complex measure on the boundary: finitely many weighted rays plus an
/// optional cylinder part. Atoms are kept canonical (sorted, distinct rays,
/// no exact zeros). A lazy rational scalar multiplies the whole measure;
/// integer rescalings (the shifted Laplacian and its right inverse) stay
/// exact and cancel symbolically.
class BoundaryMeasure {
public:
    explicit BoundaryMeasure(Degree d) : deg_(d) {}

    static BoundaryMeasure atomic(Degree d, std::vector<Atom> atoms) {
        BoundaryMeasure m(d);
        m.atoms_ = std::move(atoms);
        m.canonicalize_atoms();
        return m;
    }

    static BoundaryMeasure cylinder_measure(Degree d, int depth, std::vector<Complex> values) {
        BoundaryMeasure m(d);
        m.set_cylinder(depth, std::move(values));
        return m;
    }

    static BoundaryMeasure of(Degree d, std::vector<Atom> atoms,
                              std::optional<CylinderPart> cyl) {
        BoundaryMeasure m(d);
        m.atoms_ = std::move(atoms);
        m.canonicalize_atoms();
        if (cyl) m.set_cylinder(cyl->depth, std::move(cyl->values));
        return m;
    }

    Degree degree() const { return deg_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::optional<CylinderPart>& cylinder() const { return cyl_; }
    std::int64_t scale_num() const { return num_; }
    std::int64_t scale_den() const { return den_; }
    double scale_factor() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    bool is_zero() const { return atoms_.empty() && !cyl_; }

    friend BoundaryMeasure scaled_rational(BoundaryMeasure m, std::int64_t num, std::int64_t den) {
        if (den == 0) throw precondition_error("rational scale with zero denominator");
        if (den < 0) { den = -den; num = -num; }
        // keep the factors small; fall back to materializing on overflow risk
        const std::int64_t limit = std::int64_t(1) << 40;
        auto g1 = std::gcd(num < 0 ? -num : num, m.den_);
        if (g1 > 1) { num /= g1; m.den_ /= g1; }
        auto g2 = std::gcd(m.num_ < 0 ? -m.num_ : m.num_, den);
        if (g2 > 1) { m.num_ /= g2; den /= g2; }
        if (std::abs(num) > limit / std::max<std::int64_t>(1, std::abs(m.num_)) ||
            den > limit / m.den_) {
            m.fold_scale();
            m.num_ = 1;
            m.den_ = 1;
        }
        m.num_ *= num;
        m.den_ *= den;
        const auto g = std::gcd(m.num_ < 0 ? -m.num_ : m.num_, m.den_);
        if (g > 1) { m.num_ /= g; m.den_ /= g; }
        if (m.num_ == 0) return BoundaryMeasure(m.deg_); // exact zero
        return m;
    }

    /// Scale folded into the stored weights; the canonical materialized form.
    friend BoundaryMeasure materialized(BoundaryMeasure m) {
        m.fold_scale();
        return m;
    }

    friend BoundaryMeasure scaled(BoundaryMeasure m, Complex c) {
        m.fold_scale();
        for (auto& a : m.atoms_) a.weight *= c;
        if (m.cyl_)
            for (auto& v : m.cyl_->values) v *= c;
        m.canonicalize_atoms();
        return m;
    }

    friend BoundaryMeasure add(const BoundaryMeasure& a, const BoundaryMeasure& b) {
        if (!(a.deg_ == b.deg_)) throw precondition_error("measure degree mismatch");
        BoundaryMeasure am = materialized(a);
        const BoundaryMeasure bm = materialized(b);
        am.atoms_.insert(am.atoms_.end(), bm.atoms_.begin(), bm.atoms_.end());
        am.canonicalize_atoms();
        if (bm.cyl_) {
            if (!am.cyl_) {
                am.cyl_ = bm.cyl_;
            } else {
                const int d = std::max(am.cyl_->depth, bm.cyl_->depth);
                BoundaryMeasure ar = refine(am, d);
                const BoundaryMeasure br = refine(bm, d);
                for (std::size_t i = 0; i < ar.cyl_->values.size(); ++i)
                    ar.cyl_->values[i] += br.cyl_->values[i];
                return ar;
            }
        }
        return am;
    }

    /// Splits every sector value equally among its q^{d_new - d} depth-d_new
    /// subsectors; atoms and total variation are unchanged.
    friend BoundaryMeasure refine(BoundaryMeasure m, int d_new) {
        if (!m.cyl_) return m;
        const int d = m.cyl_->depth;
        if (d_new < d) throw precondition_error("refine target depth below current depth");
        if (d_new == d) return m;
        std::int64_t split = 1;
        for (int i = d; i < d_new; ++i) split *= m.deg_.q();
        const double inv = 1.0 / static_cast<double>(split);
        std::vector<Complex> out(m.cyl_->values.size() * static_cast<std::size_t>(split));
        for (std::size_t i = 0; i < m.cyl_->values.size(); ++i) {
            const Complex v = m.cyl_->values[i] * inv;
            for (std::int64_t j = 0; j < split; ++j)
                out[i * static_cast<std::size_t>(split) + static_cast<std::size_t>(j)] = v;
        }
        m.cyl_ = CylinderPart{d_new, std::move(out)};
        return m;
    }

private:
    void canonicalize_atoms() {
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& a, const Atom& b) { return a.ray < b.ray; });
        std::vector<Atom> out;
        out.reserve(atoms_.size());
        for (auto& a : atoms_) {
            if (!out.empty() && out.back().ray == a.ray)
                out.back().weight += a.weight;
            else
                out.push_back(a);
        }
        out.erase(std::remove_if(out.begin(), out.end(),
                                 [](const Atom& a) { return a.weight == Complex{}; }),
                  out.end());
        atoms_ = std::move(out);
    }

    void set_cylinder(int depth, std::vector<Complex> values) {
        if (depth < 1) throw precondition_error("cylinder depth must be >= 1");
        if (static_cast<std::int64_t>(values.size()) != sphere_size(deg_, depth))
            throw precondition_error("cylinder values must cover the complete depth-" +
                                     std::to_string(depth) + " sphere");
        cyl_ = CylinderPart{depth, std::move(values)};
    }

    void fold_scale() {
        if (num_ == 1 && den_ == 1) return;
        const double f = static_cast<double>(num_) / static_cast<double>(den_);
        for (auto& a : atoms_) a.weight *= f;
        if (cyl_)
            for (auto& v : cyl_->values) v *= f;
        num_ = 1;
        den_ = 1;
        canonicalize_atoms();
    }

    Degree deg_;
    std::vector<Atom> atoms_;
    std::optional<CylinderPart> cyl_;
    std::int64_t num_ = 1;
    std::int64_t den_ = 1;
};

/// Total variation: sum of |atom weights| plus |sector values|, times the
/// scale. Exact for these classes since atoms and sectors are mutually
/// singular.
inline double tv_norm(const BoundaryMeasure& m) {
    double s = 0.0;
    for (const auto& a : m.atoms()) s += std::abs(a.weight);
    if (m.cylinder())
        for (const auto& v : m.cylinder()->values) s += std::abs(v);
    return std::abs(m.scale_factor()) * s;
}

inline Complex total_mass(const BoundaryMeasure& m) {
    Complex s{};
    for (const auto& a : m.atoms()) s += a.weight;
    if (m.cylinder())
        for (const auto& v : m.cylinder()->values) s += v;
    return m.scale_factor() * s;
}

inline double diff_tv(const BoundaryMeasure& a, const BoundaryMeasure& b) {
    return tv_norm(add(a, scaled(b, Complex(-1.0))));
}

/// Bit-for-bit equality of the canonical (materialized) forms.
inline bool exactly_equal(const BoundaryMeasure& a, const BoundaryMeasure& b) {
    const BoundaryMeasure am = materialized(a);
    const BoundaryMeasure bm = materialized(b);
    if (am.atoms().size() != bm.atoms().size()) return false;
    for (std::size_t i = 0; i < am.atoms().size(); ++i)
        if (!(am.atoms()[i].ray == bm.atoms()[i].ray) ||
            am.atoms()[i].weight != bm.atoms()[i].weight)
            return false;
    if (am.cylinder().has_value() != bm.cylinder().has_value()) return false;
    if (am.cylinder()) {
        if (am.cylinder()->depth != bm.cylinder()->depth) return false;
        if (am.cylinder()->values != bm.cylinder()->values) return false;
    }
    return true;
}

/// The canonical probability measure nu_o at resolution d: every depth-d
/// sector gets mass 1/#sphere(d).
inline BoundaryMeasure nu_o(int depth, Degree d) {
    if (depth < 1) throw precondition_error("nu_o needs depth >= 1");
    const std::int64_t size = sphere_size(d, depth);
    return BoundaryMeasure::cylinder_measure(
        d, depth, std::vector<Complex>(static_cast<std::size_t>(size),
                                       Complex(1.0 / static_cast<double>(size))));
}

// ---------------------------------------------------------------------------
// Exact integration of kernel(-derivative) columns against a measure.
//
// K^{(r)}(x, . ) depends on the ray only through hor(x, .), and hor is
// constant on every sector that is at least as deep as |x|. Summing the
// uniformly-refined sector values therefore collapses to a histogram of
// measure mass over the confluent depth c = |x ^ xi| in 0..|x|, read off
// along the geodesic from o to x. This computes exactly the value that
// refining to depth max(d, |x|) and summing sector by sector would give.
// ---------------------------------------------------------------------------

/// Measure mass of the confluent-depth histogram: entry c is the mass of
/// {xi : |x ^ xi| = c} for c = 0..|x| (atoms excluded; cylinder only).
inline std::vector<Complex> cylinder_confluent_masses(const BoundaryMeasure& m, const Vertex& x) {
    const int n = x.depth();
    std::vector<Complex> masses(static_cast<std::size_t>(n) + 1, Complex{});
    if (!m.cylinder()) return masses;
    const auto& cyl = *m.cylinder();
    const int d = cyl.depth;
    const int q = m.degree().q();

    std::vector<Complex> prefix(cyl.values.size() + 1, Complex{});
    for (std::size_t i = 0; i < cyl.values.size(); ++i) prefix[i + 1] = prefix[i] + cyl.values[i];
    const Complex total = prefix.back();

    // mass of all rays through the depth-c ancestor of x
    auto through = [&](int c) -> Complex {
        if (c == 0) return total;
        std::int64_t rank = x.word[0];
        for (int i = 1; i < c; ++i) rank = rank * q + x.word[static_cast<std::size_t>(i)];
        if (c <= d) {
            std::int64_t span = 1;
            for (int i = c; i < d; ++i) span *= q;
            return prefix[static_cast<std::size_t>((rank + 1) * span)] -
                   prefix[static_cast<std::size_t>(rank * span)];
        }
        std::int64_t shrink = 1;
        for (int i = d; i < c; ++i) { rank /= q; shrink *= q; }
        return cyl.values[static_cast<std::size_t>(rank)] / static_cast<double>(shrink);
    };

    Complex upper = through(n);
    masses[static_cast<std::size_t>(n)] = upper;
    for (int c = n - 1; c >= 0; --c) {
        const Complex t = through(c);
        masses[static_cast<std::size_t>(c)] = t - upper;
        upper = t;
    }
    return masses;
}

/// Integrates a per-hor kernel row (index h + hmax, h in [-hmax, hmax],
/// hmax >= |x|) against the measure.
inline Complex integrate_with_kernel_row(const BoundaryMeasure& m, const Vertex& x,
                                         const std::vector<Complex>& row, int hmax) {
    const int n = x.depth();
    if (hmax < n) throw precondition_error("kernel row too short for this vertex");
    Complex acc{};
    for (const auto& a : m.atoms())
        acc += a.weight * row[static_cast<std::size_t>(hor(x, a.ray) + hmax)];
    if (m.cylinder()) {
        const auto masses = cylinder_confluent_masses(m, x);
        for (int c = 0; c <= n; ++c)
            acc += masses[static_cast<std::size_t>(c)] * row[static_cast<std::size_t>(2 * c - n + hmax)];
    }
    return m.scale_factor() * acc;
}

/// Integral of K^{(r)}(x, . | lambda) against the measure; exact for both
/// measure classes.
inline Complex integrate_kernel(const BoundaryMeasure& m, const Vertex& x,
                                const EigenParam& p, int r) {
    return integrate_with_kernel_row(m, x, kernel_derivative_row(p, r, x.depth()), x.depth());
}

/// Per-hor row of K(x, .) hor(x, .)^k, for the hor-power representation.
inline std::vector<Complex> kernel_hor_power_row(const EigenParam& p, int k, int hmax) {
    std::vector<Complex> row(static_cast<std::size_t>(2 * hmax + 1));
    for (int h = -hmax; h <= hmax; ++h) {
        double hp = 1.0;
        for (int i = 0; i < k; ++i) hp *= h;
        row[static_cast<std::size_t>(h + hmax)] = kernel_at_hor(p, h) * hp;
    }
    return row;
}

/// Integral of K(x, . | lambda) hor(x, .)^k against the measure.
inline Complex integrate_kernel_hor_power(const BoundaryMeasure& m, const Vertex& x,
                                          const EigenParam& p, int k) {
    return integrate_with_kernel_row(m, x, kernel_hor_power_row(p, k, x.depth()), x.depth());
}

} // namespace treeharm
