#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "thermograph/cycle_complex.hpp"
#include "thermograph/graph.hpp"
#include "thermograph/metrics.hpp"
#include "thermograph/rose.hpp"
#include "thermograph/separating.hpp"
#include "thermograph/spectral.hpp"
#include "thermograph/util.hpp"

namespace thermograph {

// ---------------------------------------------------------------------------
// Sampling helpers
// ---------------------------------------------------------------------------

inline LengthFunction random_strict_lengths(const Graph& g, Rng& rng, double lo = 0.3,
                                            double hi = 2.5) {
    std::vector<double> v(static_cast<size_t>(g.num_edges()));
    for (double& x : v) x = rng.uniform(lo, hi);
    return LengthFunction::strict(std::move(v));
}

inline LengthFunction random_unit_entropy(const Graph& g, Rng& rng) {
    return normalize_unit_entropy(g, random_strict_lengths(g, rng));
}

// ---------------------------------------------------------------------------
// Rank-2 lower-bound paths.  The m-function counts the separating edge of
// the barbell twice; monotone-m paths with m_0 >= 4 satisfy
// length >= coeff * (sqrt(m_1) - sqrt(m_0)) with coeff 1, 1/sqrt(2),
// 1/sqrt(5) for the rose, barbell and theta.
// ---------------------------------------------------------------------------

enum class Rank2Family { rose, barbell, theta };

inline const char* rank2_name(Rank2Family f) {
    switch (f) {
        case Rank2Family::rose: return "rose2";
        case Rank2Family::barbell: return "barbell";
        case Rank2Family::theta: return "theta2";
    }
    return "?";
}

inline double rank2_coefficient(Rank2Family f) {
    switch (f) {
        case Rank2Family::rose: return 1.0;
        case Rank2Family::barbell: return 1.0 / std::sqrt(2.0);
        case Rank2Family::theta: return 1.0 / std::sqrt(5.0);
    }
    return 0;
}

struct Rank2PathResult {
    double m0 = 0, m1 = 0;
    double bound = 0;
    double measured = 0;
};

namespace detail {

struct Rank2Setup {
    Graph graph;
    CycleComplex cx;
    int dep;
    std::vector<double> mweights;  // m = sum mweights[p] * l[p]
};

inline Rank2Setup rank2_setup(Rank2Family f) {
    Rank2Setup s;
    switch (f) {
        case Rank2Family::rose:
            s.graph = rose_graph(2);
            s.dep = 1;
            s.mweights = {1, 1};
            break;
        case Rank2Family::barbell:
            s.graph = barbell_graph();
            s.dep = 2;
            s.mweights = {1, 1, 2};
            break;
        case Rank2Family::theta:
            s.graph = theta_graph(2);
            s.dep = 2;
            s.mweights = {1, 1, 1};
            break;
    }
    s.cx = enumerate_cycles(s.graph, MatrixKind::quotient);
    return s;
}

inline double rank2_m_at(const Rank2Setup& s, double alpha, double beta, double sigma) {
    std::vector<double> vals(static_cast<size_t>(s.graph.num_edges()), 0.0);
    vals[0] = sigma * alpha;
    if (s.graph.num_edges() > 2) vals[1] = sigma * beta;
    LengthFunction l = solve_dependent(s.cx, vals, s.dep);
    double m = 0;
    for (int p = 0; p < l.size(); ++p) m += s.mweights[p] * l[p];
    return m;
}

/// Largest sigma admitting a unit-entropy completion (thin-direction
/// families keep the free part strictly inside the chart below it).
inline double rank2_sigma_sup(const Rank2Setup& s, double alpha, double beta) {
    auto ok = [&](double sigma) {
        try {
            rank2_m_at(s, alpha, beta, sigma);
            return true;
        } catch (const NumericError&) {
            return false;
        }
    };
    double lo = 0.05, hi = 4.0;
    if (!ok(lo)) throw NumericError("rank2 sampler: no chart at small sigma");
    if (ok(hi)) return hi;
    for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

/// sigma with m(sigma) = target; m is monotone along each family's thin
/// direction (increasing for the rose, decreasing for barbell and theta).
inline double rank2_sigma_for_m(const Rank2Setup& s, Rank2Family f, double alpha, double beta,
                                double target) {
    double lo, hi;
    bool increasing = f == Rank2Family::rose;
    if (increasing) {
        lo = 3.0;
        hi = 30.0;  // far enough for every target; the chart stays solvable
    } else {
        lo = 1e-5;
        hi = rank2_sigma_sup(s, alpha, beta) * 0.999;
    }
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        double m;
        try {
            m = rank2_m_at(s, alpha, beta, mid);
        } catch (const NumericError&) {
            // unsolvable configurations sit on the small-m side
            m = -kInf;
        }
        bool go_up = increasing ? (m < target) : (m > target);
        (go_up ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/**
 * Sample `count` random monotone paths (dm/dt > 0, m_0 >= 4) for the given
 * rank-2 graph and measure their entropy lengths; paths whose sampled m
 * fails to be strictly monotone are redrawn.
 */
inline std::vector<Rank2PathResult> rank2_lower_bound_paths(Rank2Family family, int count,
                                                            std::uint64_t seed) {
    detail::Rank2Setup s = detail::rank2_setup(family);
    double coeff = rank2_coefficient(family);
    std::vector<Rank2PathResult> out;
    Rng root(seed);
    int attempts = 0, cap = 40 * count + 100;
    while (static_cast<int>(out.size()) < count && attempts < cap) {
        Rng rng = root.derive(static_cast<std::uint64_t>(attempts));
        ++attempts;
        double alpha = 1.0, beta = 1.0;
        if (family != Rank2Family::rose) {
            alpha = rng.uniform(0.6, 1.4);
            beta = rng.uniform(0.6, 1.4);
        }
        double m0 = rng.uniform(4.05, 5.5);
        double m1 = m0 + rng.uniform(1.0, 6.0);
        double s0, s1;
        try {
            s0 = detail::rank2_sigma_for_m(s, family, alpha, beta, m0);
            s1 = detail::rank2_sigma_for_m(s, family, alpha, beta, m1);
        } catch (const NumericError&) {
            continue;
        }
        int m = s.graph.num_edges();
        auto eval = [&](double t, std::vector<double>& vals, std::vector<double>& d1) {
            double sigma = s0 + (s1 - s0) * t;
            for (int p = 0; p < m; ++p) { vals[p] = 0; d1[p] = 0; }
            vals[0] = sigma * alpha;
            d1[0] = (s1 - s0) * alpha;
            if (m > 2) {
                vals[1] = sigma * beta;
                d1[1] = (s1 - s0) * beta;
            }
        };
        // verify monotone m along the path (hypothesis of the estimates)
        bool monotone = true;
        double m_prev = -kInf, m_first = 0, m_last = 0;
        std::vector<double> vals(static_cast<size_t>(m)), d1(static_cast<size_t>(m));
        for (int k = 0; k <= 128 && monotone; ++k) {
            double t = static_cast<double>(k) / 128;
            eval(t, vals, d1);
            LengthFunction l = solve_dependent(s.cx, vals, s.dep);
            double mt = 0;
            for (int p = 0; p < m; ++p) mt += s.mweights[p] * l[p];
            if (!(mt > m_prev)) monotone = false;
            m_prev = mt;
            if (k == 0) m_first = mt;
            m_last = mt;
        }
        if (!monotone || !(m_first >= 4.0)) continue;
        Rank2PathResult r;
        r.m0 = m_first;
        r.m1 = m_last;
        r.bound = coeff * (std::sqrt(r.m1) - std::sqrt(r.m0));
        r.measured = path_length_fn(s.cx, s.dep, eval, 0.0, 1.0);
        out.push_back(r);
    }
    if (static_cast<int>(out.size()) < count)
        throw NumericError("rank2 sampler failed to produce enough monotone paths");
    return out;
}

// ---------------------------------------------------------------------------
// Square-root bound paths for the 4-rose
// ---------------------------------------------------------------------------

struct SqrtBoundPathResult {
    double l1_start = 0, l1_end = 0;
    double bound = 0;
    double measured = 0;
};

/**
 * Paths on M^1(R_r) satisfying the square-root bound hypotheses: the first
 * edge is the minimum of the first r-1 and increases from at least L_r; the
 * last edge is solved.  Offsets of the middle edges are constant, so the
 * minimality is preserved along the path.
 */
inline std::vector<SqrtBoundPathResult> sqrt_bound_paths(int r, int count, std::uint64_t seed) {
    Graph g = rose_graph(r);
    CycleComplex cx = enumerate_cycles(g, MatrixKind::quotient);
    int dep = r - 1;
    double Lr = L_r_constant(r);
    std::vector<SqrtBoundPathResult> out;
    Rng root(seed);
    for (int i = 0; i < count; ++i) {
        Rng rng = root.derive(static_cast<std::uint64_t>(i));
        double s0 = Lr + rng.uniform(0.0, 2.0);
        double s1 = s0 + rng.uniform(2.0, 20.0);
        std::vector<double> off(static_cast<size_t>(r - 1), 0.0);
        for (int k = 1; k < r - 1; ++k) off[k] = rng.uniform(0.0, 2.0);
        auto eval = [&](double t, std::vector<double>& vals, std::vector<double>& d1) {
            double base = s0 + (s1 - s0) * t;
            for (int p = 0; p < r; ++p) { vals[p] = 0; d1[p] = 0; }
            for (int p = 0; p < r - 1; ++p) {
                vals[p] = base + off[p];
                d1[p] = s1 - s0;
            }
        };
        SqrtBoundPathResult res;
        res.l1_start = s0;
        res.l1_end = s1;
        res.bound = square_root_lower_bound(r, s0, s1);
        res.measured = path_length_fn(cx, dep, eval, 0.0, 1.0);
        out.push_back(res);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Escape experiments
// ---------------------------------------------------------------------------

struct EscapeCheckpoint {
    double t = 0;
    double dependent_length = 0;
    double cumulative = 0;
};

struct EscapeRoseResult {
    std::vector<EscapeCheckpoint> checkpoints;
    double total = 0;
    double envelope = 0;  // 2 sqrt(C), the analytic upper envelope
    double closed_form_residual = 0;
};

inline EscapeRoseResult escape_rose_experiment(int r, double tmax = 1.0 - 1e-8,
                                               int checkpoints = 16) {
    Graph g = rose_graph(r);
    CycleComplex cx = enumerate_cycles(g, MatrixKind::quotient);
    EscapeRoseResult res;
    res.envelope = 2.0 * std::sqrt(escape_envelope_constant(r));
    MetricPath path = escape_path(r, tmax);
    double resid = 0;
    for (int k = 0; k <= 32; ++k) {
        // measured on [0, 1-1e-5], where the dependent solve is well
        // conditioned; nearer the chart edge the sensitivity to the free
        // coordinates grows like exp(l^r)
        double t = std::min(tmax, 1.0 - 1e-5) * k / 32;
        LengthFunction l = path.point(cx, t);
        resid = std::max(resid, std::abs(l[r - 1] - escape_closed_form(r, t)));
    }
    res.closed_form_residual = resid;
    for (int k = 1; k <= checkpoints; ++k) {
        double tk = tmax * k / checkpoints;
        MetricPath sub = path;
        sub.t1 = tk;
        sub.singular_end = (k == checkpoints);
        EscapeCheckpoint cp;
        cp.t = tk;
        cp.dependent_length = path.point(cx, tk)[r - 1];
        cp.cumulative = path_length(cx, sub);
        res.checkpoints.push_back(cp);
    }
    res.total = res.checkpoints.back().cumulative;
    return res;
}

struct EscapeSeparatingResult {
    std::vector<EscapeCheckpoint> checkpoints;  // dependent_length = bridge
    double total = 0;
    double total_refined = 0;  // with doubled quadrature depth
};

inline EscapeSeparatingResult escape_separating_experiment(const SeparatedGraph& sg,
                                                           const std::vector<double>& target_l1,
                                                           const std::vector<double>& l2,
                                                           double tmax = 1.0 - 1e-8,
                                                           int checkpoints = 8) {
    CycleComplex cx = enumerate_cycles(sg.graph, MatrixKind::quotient);
    MetricPath path = escape_path_separating(sg, target_l1, l2, tmax);
    EscapeSeparatingResult res;
    for (int k = 1; k <= checkpoints; ++k) {
        double tk = tmax * k / checkpoints;
        MetricPath sub = path;
        sub.t1 = tk;
        sub.singular_end = (k == checkpoints);
        EscapeCheckpoint cp;
        cp.t = tk;
        cp.dependent_length = path.point(cx, tk)[sg.bridge];
        cp.cumulative = path_length(cx, sub);
        res.checkpoints.push_back(cp);
    }
    res.total = res.checkpoints.back().cumulative;
    QuadratureOptions fine{1e-9, 1e-10, 24, 16};
    res.total_refined = path_length(cx, path, MetricChoice::entropy, fine);
    return res;
}

// ---------------------------------------------------------------------------
// Thin part
// ---------------------------------------------------------------------------

struct ThinPartRow {
    double eps = 0;
    double diameter_upper = 0;
    double neg_log = 0;  // -log(exp(eps) - 1)
    int samples = 0;
    int failures = 0;
};

struct ThinPartResult {
    std::vector<ThinPartRow> rows;
    double fitted_C = 0;       // geometric-mean fit of diam * neg_log
    double max_fit_ratio = 1;  // worst |diam / (C/neg_log)| deviation factor
};

inline ThinPartResult thin_part_experiment(int r, int edge, const std::vector<double>& eps_list,
                                           int samples, std::uint64_t seed) {
    ThinPartResult res;
    std::vector<double> cs;
    for (double eps : eps_list) {
        SliceDiameterResult s = slice_diameter(r, edge, eps, samples, Rng(seed));
        ThinPartRow row;
        row.eps = eps;
        row.diameter_upper = s.diameter_upper;
        row.neg_log = -std::log(std::expm1(eps));
        row.samples = s.samples;
        row.failures = s.failures;
        res.rows.push_back(row);
        if (s.diameter_upper > 0) cs.push_back(s.diameter_upper * row.neg_log);
    }
    if (!cs.empty()) {
        double logsum = 0;
        for (double c : cs) logsum += std::log(c);
        res.fitted_C = std::exp(logsum / cs.size());
        for (double c : cs)
            res.max_fit_ratio = std::max(res.max_fit_ratio,
                                         std::max(c / res.fitted_C, res.fitted_C / c));
    }
    return res;
}

// ---------------------------------------------------------------------------
// Infinite-length witness: paths into the thin part from log(2r-1)*One
// ---------------------------------------------------------------------------

struct InfiniteLengthResult {
    double epsilon = 0;       // produced from the lemma constants for target D
    double min_measured = 0;  // over sampled admissible paths reaching the thin part
    double target = 0;
    int paths = 0;
};

/**
 * For target distance D, compute the epsilon from the square-root-bound
 * constants and measure sampled admissible paths from log(2r-1)*One to
 * points with min edge length <= epsilon.  Every measured length must be at
 * least D (up to 1e-3).  Paths shrink one edge geometrically while the other
 * free edges grow linearly; the first edge is solved in closed form, which
 * stays accurate in the extreme thin part.
 */
inline InfiniteLengthResult infinite_length_experiment(int r, double D, int paths,
                                                       std::uint64_t seed) {
    if (r != 3) throw ConfigError("infinite-length experiment is implemented for r = 3");
    Graph g = rose_graph(r);
    CycleComplex cx = enumerate_cycles(g, MatrixKind::quotient);
    InfiniteLengthResult res;
    res.epsilon = epsilon_for_distance(r, D);
    res.target = D;
    res.paths = paths;
    res.min_measured = kInf;
    double l_sym = std::log(2.0 * r - 1.0);
    Rng root(seed);
    for (int i = 0; i < paths; ++i) {
        Rng rng = root.derive(static_cast<std::uint64_t>(i));
        double b3 = rng.uniform(0.9, 1.1);            // decay rate of edge 3
        double a2 = b3 * rng.uniform(1.05, 1.3);      // edge 2 must outrun the decay
        double eps_target = res.epsilon * rng.uniform(0.3, 1.0);
        double S = std::log(l_sym / eps_target) / b3;
        // Edge 3 shrinks below 1e-16, where u3 = exp(-l3) rounds to 1; the
        // solve is written in w3 = 1 - u3 = -expm1(-l3) to stay accurate.
        auto point = [&](double s, std::vector<double>& l, std::vector<double>& ld) {
            l[2] = l_sym * std::exp(-b3 * s);
            ld[2] = -b3 * l[2];
            l[1] = l_sym + a2 * s;
            ld[1] = a2;
            double u2 = std::exp(-l[1]);
            double w3 = -std::expm1(-l[2]);
            double x1 = w3 * (1 + 3 * u2) - 4 * u2;       // X_1 in stable form
            double y1 = 4 + 8 * u2 - w3 * (3 + 5 * u2);   // Y_1 in stable form
            if (!(x1 > 0)) throw NumericError("thin-part path left the chart");
            l[0] = std::log(y1) - std::log(x1);
            double u1 = x1 / y1;  // = exp(-l[0]) without the log round trip
            double g0 = x1;       // dF/dl_1 = u1 Y_1 = X_1 on the surface
            double g1 = u2 * (4 + 8 * u1 - w3 * (3 + 5 * u1));
            double g2 = (1 - w3) * (1 + 3 * (u1 + u2) + 5 * u1 * u2);
            ld[0] = -(ld[1] * g1 + ld[2] * g2) / g0;
        };
        std::vector<double> l(3), ld(3);
        auto speed = [&](double s) {
            point(s, l, ld);
            return entropy_norm(cx, LengthFunction::strict(l), ld);
        };
        double len = integrate_speed(speed, 0.0, S, QuadratureOptions{1e-7, 1e-8, 18, 8});
        res.min_measured = std::min(res.min_measured, len);
    }
    return res;
}

}  // namespace thermograph
