#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "treeharm/errors.hpp"

namespace treeharm {

using Label = std::uint8_t;

/// Enumeration guard: ball(R) has 1 + (q+1)(q^R - 1)/(q - 1) vertices,
/// so radii beyond this cap are rejected unless the caller raises it.
inline constexpr int kDefaultRadiusCap = 16;

/// Degree of the homogeneous tree T_q: every vertex has q+1 neighbors.
class Degree {
public:
    explicit Degree(int q) : q_(q) {
        if (q < 2)
            throw precondition_error("tree degree must be at least 2, got " + std::to_string(q));
    }
    int q() const { return q_; }
    double log_q() const { return std::log(static_cast<double>(q_)); }

    friend bool operator==(Degree a, Degree b) { return a.q_ == b.q_; }

private:
    int q_;
};

/// A vertex is a word over edge labels, read from the root o (empty word).
/// The first label is in {0..q}, every later label in {0..q-1}: each vertex
/// has q children plus its parent, the root has q+1 children, so every
/// vertex has exactly q+1 neighbors and |word| = dist(vertex, o).
struct Vertex {
    std::vector<Label> word;

    Vertex() = default;
    explicit Vertex(std::vector<Label> w) : word(std::move(w)) {}
    Vertex(std::initializer_list<int> labels) {
        word.reserve(labels.size());
        for (int l : labels) word.push_back(static_cast<Label>(l));
    }

    bool is_root() const { return word.empty(); }
    int depth() const { return static_cast<int>(word.size()); }

    bool operator==(const Vertex&) const = default;

    // Canonical (length, word) order; used for every deterministic export.
    std::strong_ordering operator<=>(const Vertex& other) const {
        if (word.size() != other.word.size())
            return word.size() <=> other.word.size();
        return std::lexicographical_compare_three_way(word.begin(), word.end(),
                                                      other.word.begin(), other.word.end());
    }
};

inline const Vertex& root() {
    static const Vertex o{};
    return o;
}

inline void validate_vertex(Degree d, const Vertex& x) {
    for (std::size_t i = 0; i < x.word.size(); ++i) {
        const int bound = (i == 0) ? d.q() : d.q() - 1;
        if (x.word[i] > bound)
            throw precondition_error("vertex label " + std::to_string(int(x.word[i])) +
                                     " at position " + std::to_string(i) +
                                     " out of range for degree q=" + std::to_string(d.q()));
    }
}

inline Vertex parent(const Vertex& x) {
    if (x.is_root()) throw precondition_error("root vertex has no parent");
    Vertex p = x;
    p.word.pop_back();
    return p;
}

inline Vertex child(const Vertex& x, Label c) {
    Vertex y = x;
    y.word.push_back(c);
    return y;
}

/// The q+1 neighbors: parent + q children (q+1 children for the root).
inline std::vector<Vertex> neighbors(Degree d, const Vertex& x) {
    std::vector<Vertex> out;
    out.reserve(static_cast<std::size_t>(d.q()) + 1);
    if (x.is_root()) {
        for (int c = 0; c <= d.q(); ++c) out.push_back(child(x, static_cast<Label>(c)));
    } else {
        out.push_back(parent(x));
        for (int c = 0; c < d.q(); ++c) out.push_back(child(x, static_cast<Label>(c)));
    }
    return out;
}

/// Last common vertex of the geodesics from o to x and from o to y:
/// the longest common prefix of the two words.
inline Vertex confluent(const Vertex& x, const Vertex& y) {
    std::size_t n = 0;
    const std::size_t m = std::min(x.word.size(), y.word.size());
    while (n < m && x.word[n] == y.word[n]) ++n;
    return Vertex(std::vector<Label>(x.word.begin(), x.word.begin() + n));
}

inline int dist(const Vertex& x, const Vertex& y) {
    const Vertex c = confluent(x, y);
    return x.depth() + y.depth() - 2 * c.depth();
}

/// A boundary point: an infinite geodesic from o, stored as a finite prefix
/// followed by one repeating child label. Canonical form absorbs any
/// trailing copies of the repeat label into the repetition, so equal rays
/// compare equal.
class BoundaryRay {
public:
    BoundaryRay(Vertex prefix, Label repeat) : prefix_(std::move(prefix)), repeat_(repeat) {
        while (!prefix_.word.empty() && prefix_.word.back() == repeat_)
            prefix_.word.pop_back();
    }

    const Vertex& prefix() const { return prefix_; }
    Label repeat() const { return repeat_; }

    /// i-th label of the infinite word, 0-based.
    Label at(std::size_t i) const {
        return i < prefix_.word.size() ? prefix_.word[i] : repeat_;
    }

    bool operator==(const BoundaryRay&) const = default;

    std::strong_ordering operator<=>(const BoundaryRay& other) const {
        if (auto c = prefix_ <=> other.prefix_; c != 0) return c;
        return repeat_ <=> other.repeat_;
    }

private:
    Vertex prefix_;
    Label repeat_;
};

inline void validate_ray(Degree d, const BoundaryRay& xi) {
    validate_vertex(d, xi.prefix());
    if (xi.repeat() > d.q() - 1)
        throw precondition_error("ray repeat label " + std::to_string(int(xi.repeat())) +
                                 " out of range for degree q=" + std::to_string(d.q()));
}

/// Some ray passing through u (prefix u, then the 0 child forever; for
/// u = o this is the ray 0,0,0,...).
inline BoundaryRay ray_through(const Vertex& u) { return BoundaryRay(u, 0); }

/// Depth of x ^ xi, the confluent of x with the ray.
inline int confluent_depth(const Vertex& x, const BoundaryRay& xi) {
    std::size_t n = 0;
    while (n < x.word.size() && x.word[n] == xi.at(n)) ++n;
    return static_cast<int>(n);
}

/// Horospherical index hor(x, xi) = 2|x ^ xi| - |x|, in [-|x|, |x|];
/// the maximum |x| is attained exactly when x lies on the ray.
inline int hor(const Vertex& x, const BoundaryRay& xi) {
    return 2 * confluent_depth(x, xi) - x.depth();
}

/// Sector membership: S_u contains everything whose geodesic from o
/// passes through u.
inline bool sector_contains(const Vertex& u, const Vertex& v) {
    if (u.word.size() > v.word.size()) return false;
    return std::equal(u.word.begin(), u.word.end(), v.word.begin());
}

inline bool sector_contains(const Vertex& u, const BoundaryRay& xi) {
    for (std::size_t i = 0; i < u.word.size(); ++i)
        if (u.word[i] != xi.at(i)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Sphere and ball enumeration, in canonical (length, word) order, together
// with the rank arithmetic that lets ball values live in flat arrays.
// ---------------------------------------------------------------------------

inline std::int64_t sphere_size(Degree d, int n) {
    if (n < 0) throw precondition_error("sphere radius must be nonnegative");
    if (n == 0) return 1;
    std::int64_t s = d.q() + 1;
    for (int i = 1; i < n; ++i) s *= d.q();
    return s;
}

inline std::int64_t ball_size(Degree d, int R) {
    if (R < 0) throw precondition_error("ball radius must be nonnegative");
    std::int64_t total = 1;
    for (int n = 1; n <= R; ++n) total += sphere_size(d, n);
    return total;
}

inline void check_radius_cap(int radius, int cap) {
    if (radius > cap)
        throw radius_error("radius " + std::to_string(radius) +
                           " exceeds the configured cap " + std::to_string(cap));
}

/// Rank of x within its own sphere, counting in (length, word) order.
inline std::int64_t sphere_rank(Degree d, const Vertex& x) {
    if (x.is_root()) return 0;
    std::int64_t r = x.word[0];
    for (std::size_t i = 1; i < x.word.size(); ++i) r = r * d.q() + x.word[i];
    return r;
}

/// Inverse of sphere_rank at depth n.
inline Vertex sphere_vertex(Degree d, int n, std::int64_t rank) {
    if (n == 0) return root();
    std::vector<Label> w(static_cast<std::size_t>(n));
    for (int i = n - 1; i >= 1; --i) {
        w[static_cast<std::size_t>(i)] = static_cast<Label>(rank % d.q());
        rank /= d.q();
    }
    w[0] = static_cast<Label>(rank);
    return Vertex(std::move(w));
}

/// Flat index within ball(R) enumeration (independent of R).
inline std::int64_t ball_index(Degree d, const Vertex& x) {
    if (x.is_root()) return 0;
    return ball_size(d, x.depth() - 1) + sphere_rank(d, x);
}

inline std::vector<Vertex> sphere(Degree d, int n, int cap = kDefaultRadiusCap) {
    if (n < 0) throw precondition_error("sphere radius must be nonnegative");
    check_radius_cap(n, cap);
    const std::int64_t size = sphere_size(d, n);
    std::vector<Vertex> out;
    out.reserve(static_cast<std::size_t>(size));
    for (std::int64_t r = 0; r < size; ++r) out.push_back(sphere_vertex(d, n, r));
    return out;
}

inline std::vector<Vertex> ball(Degree d, int R, int cap = kDefaultRadiusCap) {
    if (R < 0) throw precondition_error("ball radius must be nonnegative");
    check_radius_cap(R, cap);
    std::vector<Vertex> out;
    out.reserve(static_cast<std::size_t>(ball_size(d, R)));
    for (int n = 0; n <= R; ++n)
        for (std::int64_t r = 0, s = sphere_size(d, n); r < s; ++r)
            out.push_back(sphere_vertex(d, n, r));
    return out;
}

// ---------------------------------------------------------------------------
// String form: labels joined by '.', root is the empty string.
// ---------------------------------------------------------------------------

inline std::string to_string(const Vertex& x) {
    std::string s;
    for (std::size_t i = 0; i < x.word.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(int(x.word[i]));
    }
    return s;
}

inline Vertex vertex_from_string(const std::string& s) {
    if (s.empty()) return root();
    std::vector<Label> w;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t dot = s.find('.', pos);
        const std::string tok = s.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
            throw parse_error("bad vertex string '" + s + "': token '" + tok + "'");
        const long v = std::stol(tok);
        if (v < 0 || v > 255) throw parse_error("vertex label out of range in '" + s + "'");
        w.push_back(static_cast<Label>(v));
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    return Vertex(std::move(w));
}

} // namespace treeharm
