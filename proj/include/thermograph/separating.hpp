#pragma once

#include <cmath>
#include <vector>

#include "thermograph/cycle_complex.hpp"
#include "thermograph/graph.hpp"
#include "thermograph/metrics.hpp"
#include "thermograph/util.hpp"

namespace thermograph {

/**
 * A graph split by a separating (non-loop, non-parallel) edge into two sides.
 * Every simplex of the cycle complex meets the bridge pair 0 or 2 times,
 * which is what drives the factorization F_G = F_1 F_2 - exp(-2 l0) Y.
 *
 * Sides of rank 1 are admitted (they occur for the barbell) but the metric
 * experiments require both sides to have rank >= 2.
 */
struct SeparatedGraph {
    Graph graph;
    int bridge = 0;
    std::vector<int> side1, side2;  // E+ ids in `graph`
    Graph side1_graph, side2_graph;
    CycleComplex full_cx;

    bool sides_rank2() const { return side1_graph.rank() >= 2 && side2_graph.rank() >= 2; }

    std::vector<double> side_lengths(const LengthFunction& l, int which) const {
        const std::vector<int>& ids = which == 1 ? side1 : side2;
        std::vector<double> v;
        for (int p : ids) v.push_back(l[p]);
        return v;
    }
};

inline SeparatedGraph make_separated(const Graph& g, int bridge, long long budget = 10000000) {
    if (bridge < 0 || bridge >= g.num_edges()) throw ConfigError("bridge id out of range");
    if (g.is_loop(bridge)) throw ConfigError("bridge must not be a loop");
    // Vertex components with the bridge removed.
    std::vector<int> comp(g.nv, -1);
    int ncomp = 0;
    for (int s = 0; s < g.nv; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = ncomp;
        std::vector<int> st{s};
        while (!st.empty()) {
            int v = st.back();
            st.pop_back();
            for (int p = 0; p < g.num_edges(); ++p) {
                if (p == bridge) continue;
                auto [a, b] = g.edges[p];
                if (a == v && comp[b] < 0) { comp[b] = ncomp; st.push_back(b); }
                if (b == v && comp[a] < 0) { comp[a] = ncomp; st.push_back(a); }
            }
        }
        ++ncomp;
    }
    if (ncomp != 2) throw ConfigError("edge does not separate the graph into two sides");
    int c1 = comp[g.edges[bridge].first];

    SeparatedGraph sg;
    sg.graph = g;
    sg.bridge = bridge;
    for (int p = 0; p < g.num_edges(); ++p) {
        if (p == bridge) continue;
        auto [a, b] = g.edges[p];
        if (comp[a] != comp[b]) throw ConfigError("edge does not separate the graph");
        (comp[a] == c1 ? sg.side1 : sg.side2).push_back(p);
    }
    auto build_side = [&](const std::vector<int>& ids, int which) {
        std::vector<int> vmap(g.nv, -1);
        int nv = 0;
        Graph side;
        for (int p : ids) {
            auto [a, b] = g.edges[p];
            if (vmap[a] < 0) vmap[a] = nv++;
            if (vmap[b] < 0) vmap[b] = nv++;
            side.edges.push_back({vmap[a], vmap[b]});
        }
        side.nv = nv;
        side.name = g.name + "_side" + std::to_string(which);
        side.validate(false);
        return side;
    };
    sg.side1_graph = build_side(sg.side1, 1);
    sg.side2_graph = build_side(sg.side2, 2);
    sg.full_cx = enumerate_cycles(g, MatrixKind::full, budget);
    return sg;
}

/// F of one side, as a standalone graph (full determinant).
inline double F_side(const SeparatedGraph& sg, int which, const std::vector<double>& lside) {
    const Graph& side = which == 1 ? sg.side1_graph : sg.side2_graph;
    if (static_cast<int>(lside.size()) != side.num_edges())
        throw ConfigError("side length vector size mismatch");
    bool ext = false;
    for (double x : lside)
        if (!(x > 0) || std::isinf(x)) ext = true;
    LengthFunction l = ext ? LengthFunction::make_extended(lside) : LengthFunction::strict(lside);
    return F_via_det(side, l, MatrixKind::full);
}

/**
 * Y(l) = -sum over simplices with Delta(e0) = 2 of
 * (-1)^{|Delta|} exp(-l(Delta) + 2 l0); constant in the bridge length.
 */
inline double Y_separating(const SeparatedGraph& sg, const LengthFunction& l) {
    if (l.size() != sg.graph.num_edges()) throw ConfigError("length function size mismatch");
    std::vector<double> u = l.u_all();
    double y = 0;
    for (const auto& t : sg.full_cx.terms) {
        if (detail::profile_get(t.profile, sg.bridge) != 2) continue;
        std::uint64_t rest = t.profile & ~(3ull << (2 * sg.bridge));
        y -= static_cast<double>(t.coeff) * detail::term_value(rest, u);
    }
    return y;
}

/// |F_G(l) - (F_1 F_2 - exp(-2 l0) Y)|; the factorization residual.
inline double factorization_check(const SeparatedGraph& sg, const LengthFunction& l) {
    double f = F_via_det(sg.graph, l, MatrixKind::full);
    double f1 = F_side(sg, 1, sg.side_lengths(l, 1));
    double f2 = F_side(sg, 2, sg.side_lengths(l, 2));
    double u0 = l.u(sg.bridge);
    double y = Y_separating(sg, l);
    return std::abs(f - (f1 * f2 - u0 * u0 * y));
}

/**
 * The unit-entropy bridge length l0 = (1/2) log(Y / (F_1 F_2)) for given side
 * lengths.  Requires both sides to have entropy < 1 (F_1 F_2 > 0); verified
 * by evaluating F_G at the completed point.
 */
inline double solve_bridge(const SeparatedGraph& sg, const std::vector<double>& l1,
                           const std::vector<double>& l2) {
    double f1 = F_side(sg, 1, l1), f2 = F_side(sg, 2, l2);
    // F vanishes on the unit-entropy locus, so values at roundoff scale mean
    // the side carries no margin for a finite bridge.
    if (!(f1 > 1e-13) || !(f2 > 1e-13))
        throw NumericError("no finite bridge: a side is at or over unit entropy");
    // Assemble lengths with an arbitrary bridge value; Y does not depend on it.
    std::vector<double> vals(sg.graph.num_edges(), 1.0);
    for (size_t k = 0; k < sg.side1.size(); ++k) vals[sg.side1[k]] = l1[k];
    for (size_t k = 0; k < sg.side2.size(); ++k) vals[sg.side2[k]] = l2[k];
    double y = Y_separating(sg, LengthFunction::make_extended(vals));
    if (!(y > 0)) throw NumericError("no circuits cross the bridge (Y <= 0)");
    double l0 = 0.5 * std::log(y / (f1 * f2));
    if (!(l0 > 0)) throw NumericError("completion would need a nonpositive bridge length");
    vals[sg.bridge] = l0;
    double res = std::abs(F_via_det(sg.graph, LengthFunction::strict(vals), MatrixKind::full));
    if (res > 1e-10) throw NumericError("bridge solve residual too large: " + fmt17(res));
    return l0;
}

/**
 * The finite-length escape path toward a unit-entropy metric on side 1:
 * l_t(e^1_i) = log(x_i + 1 - t) with target l'(e^1_i) = log(x_i), side-2
 * lengths constant, bridge solved.  The bridge length tends to infinity as
 * t -> 1.
 */
inline MetricPath escape_path_separating(const SeparatedGraph& sg,
                                         const std::vector<double>& target_l1,
                                         const std::vector<double>& l2,
                                         double t1 = 1.0 - 1e-8) {
    if (!sg.sides_rank2())
        throw ConfigError("escape path requires both sides to have rank >= 2");
    if (std::abs(F_side(sg, 1, target_l1)) > 1e-8)
        throw ConfigError("target side-1 lengths must have unit entropy");
    if (!(F_side(sg, 2, l2) > 1e-13))
        throw ConfigError("side-2 lengths must have entropy < 1");
    MetricPath p;
    p.graph = sg.graph;
    p.kind = MatrixKind::quotient;
    p.profiles.assign(sg.graph.num_edges(), Profile::constant(0));
    for (size_t k = 0; k < sg.side1.size(); ++k) {
        double x = std::exp(target_l1[k]);
        p.profiles[sg.side1[k]] = Profile::log_affine(x + 1.0, -1.0);
    }
    for (size_t k = 0; k < sg.side2.size(); ++k)
        p.profiles[sg.side2[k]] = Profile::constant(l2[k]);
    p.dependent = sg.bridge;
    p.t0 = 0;
    p.t1 = t1;
    p.singular_end = true;
    return p;
}

// ---------------------------------------------------------------------------
// The zero-length-shortcut experiment
// ---------------------------------------------------------------------------

struct ShortcutRow {
    double delta = 0;
    double t_cap = 0;       // side-2 extent reached before the bridge floor
    double len_grow = 0;    // side-2 out to the cap
    double len_change = 0;  // side-2 profile change at the cap
    double len_return = 0;  // back to the start configuration
    double total = 0;
};

/**
 * Desk-scale witness of the zero-diameter collapse: side-1 loops are pinned
 * at their symmetric unit-entropy value inflated by delta (entropy slightly
 * below 1), and a closed side-2 loop is traversed with the bridge solved
 * from the constraint.  The side-2 extent is capped where the solved bridge
 * reaches a small floor; the reachable cap grows as delta shrinks, which is
 * how the boundary stratum is approached.  Total loop length must decrease
 * toward 0 with delta.
 */
inline std::vector<ShortcutRow> shortcut_experiment(const SeparatedGraph& sg,
                                                    const std::vector<double>& deltas) {
    if (!sg.sides_rank2())
        throw ConfigError("shortcut experiment requires both sides of rank >= 2");
    if (sg.side1_graph.nv != 1 || sg.side2_graph.nv != 1)
        throw ConfigError("shortcut experiment expects rose sides (loops only)");
    int n1 = static_cast<int>(sg.side1.size());
    int n2 = static_cast<int>(sg.side2.size());
    double base1 = std::log(2.0 * n1 - 1.0);
    double start2 = std::log(2.0 * n2 - 1.0) + 0.5;

    CycleComplex cx = enumerate_cycles(sg.graph, MatrixKind::quotient);
    int dep = sg.bridge;
    int m = sg.graph.num_edges();

    std::vector<ShortcutRow> rows;
    for (double delta : deltas) {
        if (!(delta > 0)) throw ConfigError("shortcut experiment requires delta > 0");
        double a_val = base1 + delta;

        auto point_at = [&](const std::vector<double>& side2_vals) {
            std::vector<double> vals(m, 0.0);
            for (int p : sg.side1) vals[p] = a_val;
            for (size_t k = 0; k < sg.side2.size(); ++k) vals[sg.side2[k]] = side2_vals[k];
            return solve_dependent(cx, vals, dep);
        };
        auto bridge_at = [&](double T) -> double {
            std::vector<double> s2(static_cast<size_t>(n2), T);
            return point_at(s2)[dep];  // throws when unsolvable
        };

        // Largest symmetric side-2 extent with bridge length above the floor.
        const double floor = 0.25, hard_cap = 40.0;
        double lo = start2, hi = hard_cap;
        if (!(bridge_at(lo) > floor))
            throw NumericError("shortcut: start configuration already at the bridge floor");
        bool hi_ok;
        try {
            hi_ok = bridge_at(hi) > floor;
        } catch (const NumericError&) {
            hi_ok = false;
        }
        double t_cap = hard_cap;
        if (!hi_ok) {
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                bool ok;
                try {
                    ok = bridge_at(mid) > floor;
                } catch (const NumericError&) {
                    ok = false;
                }
                (ok ? lo : hi) = mid;
            }
            t_cap = lo;
        }

        std::vector<double> s2_start(static_cast<size_t>(n2), start2);
        std::vector<double> s2_far(static_cast<size_t>(n2), t_cap);
        std::vector<double> s2_changed = s2_far;
        s2_changed[0] = t_cap - 1.0;  // profile change at the cap

        QuadratureOptions qopt{1e-8, 1e-9, 20, 6};
        auto seg = [&](const std::vector<double>& from, const std::vector<double>& to) {
            auto eval = [&](double t, std::vector<double>& vals, std::vector<double>& d1) {
                for (int p = 0; p < m; ++p) { vals[p] = 0; d1[p] = 0; }
                for (int p : sg.side1) vals[p] = a_val;
                for (size_t k = 0; k < sg.side2.size(); ++k) {
                    vals[sg.side2[k]] = (1 - t) * from[k] + t * to[k];
                    d1[sg.side2[k]] = to[k] - from[k];
                }
            };
            return path_length_fn(cx, dep, eval, 0.0, 1.0, MetricChoice::entropy, qopt);
        };

        ShortcutRow row;
        row.delta = delta;
        row.t_cap = t_cap;
        row.len_grow = seg(s2_start, s2_far);
        row.len_change = seg(s2_far, s2_changed);
        row.len_return = seg(s2_changed, s2_start);
        row.total = row.len_grow + row.len_change + row.len_return;
        rows.push_back(row);
    }
    return rows;
}

/// Aitken extrapolation of a decreasing sequence toward its limit.
inline double aitken_limit(const std::vector<double>& t) {
    if (t.size() < 3) return t.empty() ? 0.0 : t.back();
    double t1 = t[t.size() - 3], t2 = t[t.size() - 2], t3 = t[t.size() - 1];
    double den = t1 + t3 - 2 * t2;
    if (std::abs(den) < 1e-300) return t3;
    double a = (t1 * t3 - t2 * t2) / den;
    return std::isfinite(a) ? a : t3;
}

}  // namespace thermograph
