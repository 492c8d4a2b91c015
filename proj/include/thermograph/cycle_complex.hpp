#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "thermograph/graph.hpp"
#include "thermograph/spectral.hpp"
#include "thermograph/util.hpp"

namespace thermograph {

namespace detail {

/// The transition digraph D_G (full) or its quotient, as a multigraph:
/// arc(i,j) is the number of parallel arcs, vert_pair maps each vertex to the
/// undirected edge whose length it contributes once per traversal.
struct TransitionDigraph {
    int n = 0;
    std::vector<int> arc;        // n*n multiplicities
    std::vector<int> vert_pair;  // E+ pair per vertex

    int at(int i, int j) const { return arc[static_cast<size_t>(i) * n + j]; }
    int& at(int i, int j) { return arc[static_cast<size_t>(i) * n + j]; }
};

inline TransitionDigraph transition_digraph(const Graph& g, MatrixKind kind) {
    std::vector<double> ones(g.num_edges(), 1.0);
    TransitionMatrix m = kind == MatrixKind::full ? full_matrix(g, ones) : quotient_matrix(g, ones);
    TransitionDigraph d;
    d.n = m.n;
    d.arc.resize(static_cast<size_t>(m.n) * m.n);
    for (size_t i = 0; i < d.arc.size(); ++i) d.arc[i] = static_cast<int>(m.a[i] + 0.5);
    d.vert_pair = m.row_pair;
    return d;
}

}  // namespace detail

/**
 * A simple cycle of the transition digraph, stored as its canonical rotation
 * (smallest vertex first).  Parallel arcs in the quotient multigraph give
 * several cycles with the same vertex sequence and weight profile; these are
 * stored once with a multiplicity, and all counts below include it.
 */
struct SimpleCycle {
    std::vector<int> verts;
    long long mult = 1;
    std::uint64_t vmask = 0;        // bitmask of digraph vertices
    std::uint64_t profile = 0;      // packed 2-bit multiplicities over E+
};

/// One monomial of the alternating simplex sum: coeff * prod_e u_e^{mult_e}.
struct ComplexTerm {
    std::uint64_t profile = 0;
    long long coeff = 0;
};

namespace detail {
inline int profile_get(std::uint64_t prof, int p) { return static_cast<int>((prof >> (2 * p)) & 3u); }
inline std::uint64_t profile_add(std::uint64_t a, std::uint64_t b) { return a + b; }
}  // namespace detail

/**
 * The cycle complex: all simple cycles of D_G (or its quotient) together
 * with the alternating sum over collections of pairwise vertex-disjoint
 * cycles, aggregated by weight profile.  F_G, its derivatives and the two
 * inner products are all evaluated from `terms`; a simplex containing an
 * infinite-length edge with positive multiplicity contributes 0.
 */
struct CycleComplex {
    MatrixKind kind = MatrixKind::full;
    int num_pairs = 0;
    std::vector<SimpleCycle> cycles;
    long long cycle_count = 0;                  // with multiplicity
    std::vector<long long> simplices_by_size;   // index s = collections of s cycles
    long long simplex_total = 0;                // with multiplicity, empty included
    std::vector<ComplexTerm> terms;             // sorted by profile

    std::string dump() const {
        std::ostringstream os;
        os << "kind " << (kind == MatrixKind::full ? "full" : "quotient") << "\n";
        os << "cycles " << cycle_count << "\n";
        for (const auto& c : cycles) {
            os << "cycle";
            for (int v : c.verts) os << " " << v;
            os << " x" << c.mult << "\n";
        }
        os << "simplices " << simplex_total << "\n";
        for (size_t s = 0; s < simplices_by_size.size(); ++s)
            os << "size " << s << " count " << simplices_by_size[s] << "\n";
        return os.str();
    }
};

namespace detail {

inline void enumerate_simple_cycles(const TransitionDigraph& d, std::vector<SimpleCycle>& out) {
    // Cycles whose minimal vertex is `root`, found by DFS over vertices > root.
    int n = d.n;
    std::vector<int> path;
    std::vector<char> onpath(n, 0);
    std::function<void(int, int, long long)> dfs = [&](int root, int v, long long mult) {
        // close up?
        if (!path.empty() && d.at(v, root) > 0) {
            SimpleCycle c;
            c.verts = path;
            c.mult = mult * d.at(v, root);
            out.push_back(std::move(c));
        }
        for (int w = root + 1; w < n; ++w) {
            if (onpath[w] || d.at(v, w) == 0) continue;
            onpath[w] = 1;
            path.push_back(w);
            dfs(root, w, mult * d.at(v, w));
            path.pop_back();
            onpath[w] = 0;
        }
    };
    for (int root = 0; root < n; ++root) {
        if (d.at(root, root) > 0)
            out.push_back(SimpleCycle{{root}, d.at(root, root), 0, 0});
        std::fill(onpath.begin(), onpath.end(), 0);
        onpath[root] = 1;
        path.assign(1, root);
        // cycles of length >= 2 through root
        for (int w = root + 1; w < n; ++w) {
            if (d.at(root, w) == 0) continue;
            onpath[w] = 1;
            path.push_back(w);
            dfs(root, w, d.at(root, w));
            path.pop_back();
            onpath[w] = 0;
        }
    }
}

}  // namespace detail

/**
 * Build the cycle complex.  `budget` caps the number of (compressed) simplex
 * enumeration steps; exceeding it aborts with the count reached so far.
 */
inline CycleComplex enumerate_cycles(const Graph& g, MatrixKind kind,
                                     long long budget = 10000000) {
    if (g.num_edges() > 32) throw ConfigError("cycle complex limited to 64 directed edges");
    detail::TransitionDigraph d = detail::transition_digraph(g, kind);

    CycleComplex cx;
    cx.kind = kind;
    cx.num_pairs = g.num_edges();
    detail::enumerate_simple_cycles(d, cx.cycles);

    for (auto& c : cx.cycles) {
        for (int v : c.verts) {
            c.vmask |= 1ull << v;
            c.profile += 1ull << (2 * d.vert_pair[v]);
        }
        cx.cycle_count += c.mult;
    }
    // Deterministic order: by length, then vertex sequence.
    std::sort(cx.cycles.begin(), cx.cycles.end(), [](const SimpleCycle& a, const SimpleCycle& b) {
        if (a.verts.size() != b.verts.size()) return a.verts.size() < b.verts.size();
        return a.verts < b.verts;
    });

    // DFS over collections of pairwise disjoint cycles (cycles added in
    // increasing index so each collection is produced exactly once).
    std::unordered_map<std::uint64_t, long long> termmap;
    long long steps = 0;
    int ncyc = static_cast<int>(cx.cycles.size());
    std::function<void(int, std::uint64_t, int, long long, std::uint64_t)> dfs =
        [&](int start, std::uint64_t mask, int size, long long mult, std::uint64_t prof) {
            if (++steps > budget)
                throw BudgetExceeded("cycle complex simplex budget exceeded", steps - 1);
            termmap[prof] += (size % 2 == 0 ? mult : -mult);
            if (static_cast<size_t>(size) >= cx.simplices_by_size.size())
                cx.simplices_by_size.resize(size + 1, 0);
            cx.simplices_by_size[size] += mult;
            cx.simplex_total += mult;
            for (int j = start; j < ncyc; ++j) {
                const SimpleCycle& c = cx.cycles[j];
                if (mask & c.vmask) continue;
                dfs(j + 1, mask | c.vmask, size + 1, mult * c.mult,
                    detail::profile_add(prof, c.profile));
            }
        };
    dfs(0, 0, 0, 1, 0);

    cx.terms.reserve(termmap.size());
    for (const auto& [prof, coeff] : termmap)
        if (coeff != 0) cx.terms.push_back(ComplexTerm{prof, coeff});
    std::sort(cx.terms.begin(), cx.terms.end(),
              [](const ComplexTerm& a, const ComplexTerm& b) { return a.profile < b.profile; });
    return cx;
}

// ---------------------------------------------------------------------------
// Evaluations over the complex (all in u-coordinates, extended-safe)
// ---------------------------------------------------------------------------

namespace detail {

/// prod_e u_e^{mult_e} with 0^0 = 1.
inline double term_value(std::uint64_t prof, const std::vector<double>& u) {
    double v = 1.0;
    while (prof) {
        int p = std::countr_zero(prof) / 2;
        int k = profile_get(prof, p);
        for (int i = 0; i < k; ++i) v *= u[p];
        prof &= ~(3ull << (2 * p));
    }
    return v;
}

}  // namespace detail

/// F = sum over simplices of (-1)^{|Delta|} exp(-l(Delta)).
inline double F_via_cycles(const CycleComplex& cx, const LengthFunction& l) {
    if (l.size() != cx.num_pairs) throw ConfigError("length function size mismatch");
    std::vector<double> u = l.u_all();
    double f = 0;
    for (const auto& t : cx.terms) f += static_cast<double>(t.coeff) * detail::term_value(t.profile, u);
    return f;
}

/// F = det(I - A_{G,l}) via pivoted elimination (full or quotient matrix).
inline double F_via_det(const Graph& g, const LengthFunction& l, MatrixKind kind) {
    if (l.size() != g.num_edges()) throw ConfigError("length function size mismatch");
    std::vector<double> factor = l.u_all();
    TransitionMatrix m = kind == MatrixKind::full ? full_matrix(g, factor)
                                                  : quotient_matrix(g, factor);
    int n = m.n;
    std::vector<double> a(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a[static_cast<size_t>(i) * n + j] = (i == j ? 1.0 : 0.0) - m.at(i, j);
    auto entry = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * n + j]; };
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int i = col + 1; i < n; ++i)
            if (std::abs(entry(i, col)) > std::abs(entry(piv, col))) piv = i;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(entry(piv, j), entry(col, j));
            det = -det;
        }
        double p = entry(col, col);
        det *= p;
        if (p == 0.0) return 0.0;
        for (int i = col + 1; i < n; ++i) {
            double f = entry(i, col) / p;
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) entry(i, j) -= f * entry(col, j);
        }
    }
    return det;
}

/// dF/dl_e = -sum (-1)^{|Delta|} Delta(e) exp(-l(Delta)).
inline std::vector<double> grad_F(const CycleComplex& cx, const LengthFunction& l) {
    std::vector<double> u = l.u_all();
    std::vector<double> grad(cx.num_pairs, 0.0);
    for (const auto& t : cx.terms) {
        double v = static_cast<double>(t.coeff) * detail::term_value(t.profile, u);
        if (v == 0.0) continue;
        std::uint64_t prof = t.profile;
        while (prof) {
            int p = std::countr_zero(prof) / 2;
            grad[p] -= detail::profile_get(t.profile, p) * v;
            prof &= ~(3ull << (2 * p));
        }
    }
    return grad;
}

/// d2F/dl_e dl_e' = +sum (-1)^{|Delta|} Delta(e) Delta(e') exp(-l(Delta)).
inline std::vector<std::vector<double>> hessian_F(const CycleComplex& cx, const LengthFunction& l) {
    std::vector<double> u = l.u_all();
    std::vector<std::vector<double>> h(cx.num_pairs, std::vector<double>(cx.num_pairs, 0.0));
    std::vector<int> touched;
    for (const auto& t : cx.terms) {
        double v = static_cast<double>(t.coeff) * detail::term_value(t.profile, u);
        if (v == 0.0) continue;
        touched.clear();
        std::uint64_t prof = t.profile;
        while (prof) {
            int p = std::countr_zero(prof) / 2;
            touched.push_back(p);
            prof &= ~(3ull << (2 * p));
        }
        for (int p : touched)
            for (int q : touched)
                h[p][q] += detail::profile_get(t.profile, p) * detail::profile_get(t.profile, q) * v;
    }
    return h;
}

/**
 * <l, grad F(l)> evaluated as the cycle sum
 * -sum (-1)^{|Delta|} l(Delta) exp(-l(Delta)), with the stratum convention
 * l(Delta)*exp(-l(Delta)) = 0 when l(Delta) is infinite.
 */
inline double pairing_volume(const CycleComplex& cx, const LengthFunction& l) {
    std::vector<double> u = l.u_all();
    double s = 0;
    for (const auto& t : cx.terms) {
        double v = detail::term_value(t.profile, u);
        if (v == 0.0) continue;  // covers the l(Delta) = inf convention
        double ld = 0;
        std::uint64_t prof = t.profile;
        while (prof) {
            int p = std::countr_zero(prof) / 2;
            ld += detail::profile_get(t.profile, p) * l[p];
            prof &= ~(3ull << (2 * p));
        }
        s -= static_cast<double>(t.coeff) * ld * v;
    }
    return s;
}

/// <v, H[F(l)] v> = sum (-1)^{|Delta|} v(Delta)^2 exp(-l(Delta)).
inline double pairing_hessian(const CycleComplex& cx, const LengthFunction& l,
                              const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != cx.num_pairs)
        throw ConfigError("tangent vector size mismatch");
    std::vector<double> u = l.u_all();
    double s = 0;
    for (const auto& t : cx.terms) {
        double val = detail::term_value(t.profile, u);
        if (val == 0.0) continue;
        double vd = 0;
        std::uint64_t prof = t.profile;
        while (prof) {
            int p = std::countr_zero(prof) / 2;
            vd += detail::profile_get(t.profile, p) * v[p];
            prof &= ~(3ull << (2 * p));
        }
        s += static_cast<double>(t.coeff) * vd * vd * val;
    }
    return s;
}

}  // namespace thermograph
