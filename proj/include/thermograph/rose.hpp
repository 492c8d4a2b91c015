#pragma once

#include <cmath>
#include <vector>

#include "thermograph/cycle_complex.hpp"
#include "thermograph/graph.hpp"
#include "thermograph/metrics.hpp"
#include "thermograph/spectral.hpp"
#include "thermograph/util.hpp"

namespace thermograph {

// ---------------------------------------------------------------------------
// Closed-form machinery for the moduli space of the r-rose.  All functions
// work in u-coordinates through subset sums over [r]; subsets containing an
// infinite-length edge contribute 0, so extended inputs are handled by
// restricting to the support.  Division-free DFS keeps the incremental
// products exact.
// ---------------------------------------------------------------------------

namespace detail {

/// sum over subsets S of `idx` of weight(|S|) * prod_{k in S} u_k.
inline double subset_sum(const std::vector<double>& u, const std::vector<int>& idx,
                         const std::vector<double>& weight) {
    double total = 0;
    int n = static_cast<int>(idx.size());
    std::function<void(int, int, double)> rec = [&](int pos, int size, double prod) {
        if (pos == n) {
            total += weight[size] * prod;
            return;
        }
        rec(pos + 1, size, prod);
        double up = u[idx[pos]];
        if (up != 0.0) rec(pos + 1, size + 1, prod * up);
    };
    rec(0, 0, 1.0);
    return total;
}

inline std::vector<double> weights(int n, double base, double slope) {
    std::vector<double> w(n + 1);
    for (int k = 0; k <= n; ++k) w[k] = base + slope * k;
    return w;
}

inline std::vector<int> indices_excluding(int r, int i, int j = -1) {
    std::vector<int> idx;
    for (int k = 0; k < r; ++k)
        if (k != i && k != j) idx.push_back(k);
    return idx;
}

inline void check_rose_args(int r, const std::vector<double>& l) {
    if (r < 2 || r > 20) throw ConfigError("rose rank must be in [2, 20]");
    if (static_cast<int>(l.size()) != r) throw ConfigError("rose length vector size mismatch");
}

inline std::vector<double> u_of(const std::vector<double>& l) {
    std::vector<double> u(l.size());
    for (size_t k = 0; k < l.size(); ++k) u[k] = std::exp(-l[k]);
    return u;
}

}  // namespace detail

/// F_r(l) = sum_{S subset [r]} (1 - 2|S|) exp(-l^S).
inline double F_rose(int r, const std::vector<double>& l) {
    detail::check_rose_args(r, l);
    std::vector<int> all;
    for (int k = 0; k < r; ++k) all.push_back(k);
    return detail::subset_sum(detail::u_of(l), all, detail::weights(r, 1, -2));
}

/// X_i: subsets avoiding i, weights 1 - 2|S|.
inline double X_i(int r, const std::vector<double>& l, int i) {
    detail::check_rose_args(r, l);
    return detail::subset_sum(detail::u_of(l), detail::indices_excluding(r, i),
                              detail::weights(r, 1, -2));
}

/// Y_i: subsets avoiding i, weights 1 + 2|S|.
inline double Y_i(int r, const std::vector<double>& l, int i) {
    detail::check_rose_args(r, l);
    return detail::subset_sum(detail::u_of(l), detail::indices_excluding(r, i),
                              detail::weights(r, 1, 2));
}

/// X_ij: subsets avoiding i and j, weights 1 + 2|S|.
inline double X_ij(int r, const std::vector<double>& l, int i, int j) {
    detail::check_rose_args(r, l);
    return detail::subset_sum(detail::u_of(l), detail::indices_excluding(r, i, j),
                              detail::weights(r, 1, 2));
}

/// Y_ij: subsets avoiding i and j, weights 3 + 2|S|.
inline double Y_ij(int r, const std::vector<double>& l, int i, int j) {
    detail::check_rose_args(r, l);
    return detail::subset_sum(detail::u_of(l), detail::indices_excluding(r, i, j),
                              detail::weights(r, 3, 2));
}

/**
 * The unique unit-entropy completion of edge i: l^i = log(Y_i / X_i).
 * Fails when X_i <= 0, i.e. the free subrose already has entropy >= 1.
 * The entry l[i] is ignored.  Computed as log1p(Y_i - 1) - log(X_i) with
 * 1 - X_i accumulated directly, so completions deep in the thin part
 * (l^i near 0, partners huge) keep full relative accuracy.
 */
inline double solve_edge(int r, const std::vector<double>& l, int i) {
    std::vector<double> work = l;
    work[i] = kInf;  // keep i out of the subset sums
    std::vector<double> u = detail::u_of(work);
    std::vector<int> idx = detail::indices_excluding(r, i);
    // one_minus_x = sum over nonempty S of (2|S| - 1) u^S; all terms positive.
    std::vector<double> wx = detail::weights(r, -1, 2);
    wx[0] = 0;
    double one_minus_x = detail::subset_sum(u, idx, wx);
    std::vector<double> wy = detail::weights(r, 1, 2);
    wy[0] = 0;
    double y_minus_one = detail::subset_sum(u, idx, wy);
    if (!(one_minus_x < 1.0))
        throw NumericError("solve_edge: free subrose has entropy >= 1");
    return std::log1p(y_minus_one) - std::log1p(-one_minus_x);
}

/// l^r when l^i = log(L) for all i < r: log((L + (2r-1)) / (L - (2r-3))).
inline double symmetric_completion(int r, double L) {
    if (r < 2) throw ConfigError("symmetric_completion: r >= 2 required");
    if (!(L > 2.0 * r - 3.0))
        throw NumericError("symmetric_completion requires L > 2r - 3");
    return std::log((L + (2.0 * r - 1.0)) / (L - (2.0 * r - 3.0)));
}

// ---------------------------------------------------------------------------
// Escape paths (finite length, leaving every compact set)
// ---------------------------------------------------------------------------

/// Dependent-edge value of the escape path in closed form.
inline double escape_closed_form(int r, double t) {
    return std::log((2.0 * r - 1.0 - t) / (1.0 - t));
}

/// Pointwise norm envelope constant: ||.||^2 <= C / (1-t).
inline double escape_envelope_constant(int r) {
    return 2.0 * (2.0 * r - 1.0) / ((r - 1.0) * (r - 1.0) * std::log(2.0 * r - 3.0));
}

/**
 * The path l^i_t = log(2(r-t) - 1) for i < r with the last edge solved from
 * the unit-entropy constraint; it starts at log(2r-1)*One and sends l^r to
 * infinity as t -> 1.
 */
inline MetricPath escape_path(int r, double t1 = 1.0 - 1e-8) {
    if (r < 3) throw ConfigError("escape_path requires r >= 3");
    MetricPath p;
    p.graph = rose_graph(r);
    p.kind = MatrixKind::quotient;
    p.profiles.assign(r, Profile::constant(0));
    for (int i = 0; i < r - 1; ++i) p.profiles[i] = Profile::log_affine(2.0 * r - 1.0, -2.0);
    p.dependent = r - 1;
    p.t0 = 0;
    p.t1 = t1;
    p.singular_end = true;
    return p;
}

// ---------------------------------------------------------------------------
// Square-root lower bound and its constants
// ---------------------------------------------------------------------------

/// Smallest L with max{2^r (2r-3) e^{-L}, 288 r e^{-L}} <= 1, rounded up at 1e-6.
inline double L_r_constant(int r) {
    double L = std::log(std::max(std::pow(2.0, r) * (2.0 * r - 3.0), 288.0 * r));
    return std::ceil(L * 1e6) / 1e6;
}

inline double B1_constant(int r) { return 4.0 * (r - 1.0); }
inline double B2_constant(int r) { return std::pow(2.0, r + 3) * (2.0 * r - 1.0); }

/**
 * Lower bound for the length of a path whose smallest non-r edge grows from
 * l1_start to l1_end under the hypotheses of the square-root estimate:
 * (1 / (2 sqrt(2) B1)) (sqrt(B1 l_end + B2) - sqrt(B1 l_start + B2)).
 */
inline double square_root_lower_bound(int r, double l1_start, double l1_end) {
    if (l1_end < l1_start) throw ConfigError("lower_bound: end < start");
    double b1 = B1_constant(r), b2 = B2_constant(r);
    return (std::sqrt(b1 * l1_end + b2) - std::sqrt(b1 * l1_start + b2)) /
           (2.0 * std::sqrt(2.0) * b1);
}

/**
 * An epsilon such that every unit-entropy point with some edge shorter than
 * epsilon is at distance >= D from the symmetric point log(2r-1)*One.
 */
inline double epsilon_for_distance(int r, double D) {
    double b1 = B1_constant(r), b2 = B2_constant(r);
    double L0 = std::max(std::log(4.0 * r - 5.0), L_r_constant(r));
    double R = 2.0 * std::sqrt(2.0) * b1 * D + std::sqrt(b1 * L0 + b2);
    double neg_log = (R * R - b2) / b1;  // required -log(exp(eps) - 1)
    return std::log1p(std::exp(-neg_log));
}

// ---------------------------------------------------------------------------
// Extended strata model
// ---------------------------------------------------------------------------

/// A point of the extended moduli space [0,inf]^r with F_r = 0.
struct RosePoint {
    int r = 0;
    std::vector<double> lengths;  // inf allowed
    std::vector<int> support() const {
        std::vector<int> s;
        for (int k = 0; k < r; ++k)
            if (std::isfinite(lengths[k])) s.push_back(k);
        return s;
    }
};

/**
 * Embed a unit-entropy point of M^1(R_{|S|}) as the stratum point of
 * M^1(R_r) with infinite coordinates off S.
 */
inline RosePoint strata_embed(int r, const std::vector<int>& S, const std::vector<double>& lS) {
    if (static_cast<int>(S.size()) < 2) throw ConfigError("strata require |S| >= 2");
    if (S.size() != lS.size()) throw ConfigError("strata_embed: size mismatch");
    RosePoint p;
    p.r = r;
    p.lengths.assign(r, kInf);
    for (size_t k = 0; k < S.size(); ++k) {
        if (S[k] < 0 || S[k] >= r) throw ConfigError("strata_embed: index out of range");
        p.lengths[S[k]] = lS[k];
    }
    return p;
}

/**
 * Entropy of an extended rose point: the entropy of the supported subrose
 * (components at infinite length do not contribute).  Supports of size < 2
 * carry no unit-entropy metric; their entropy is 0.
 */
inline double rose_entropy_extended(const RosePoint& p) {
    std::vector<int> s = p.support();
    if (s.size() < 2) return 0.0;
    Graph sub = rose_graph(static_cast<int>(s.size()));
    std::vector<double> l;
    for (int k : s) l.push_back(p.lengths[k]);
    return entropy(sub, LengthFunction::strict(l));
}

// ---------------------------------------------------------------------------
// Thin-part slices
// ---------------------------------------------------------------------------

struct SliceDiameterResult {
    double diameter_upper = 0;  // max measured pairwise path length
    double bound_shape = 0;     // 1 / (-log(exp(eps) - 1))
    int samples = 0;
    int failures = 0;  // rejected draws (no unit-entropy completion)
};

/**
 * Empirical diameter upper bound for the slice S^i_eps = { l in M^1(R_r) :
 * l^i = eps }.  Points are sampled with the non-fixed free coordinates
 * log-uniform in [log(2r-3) + 1e-3, 20] and one edge solved.  Each sample is
 * then sent outward along the slice path family l^k_t = l^k + t with the
 * *shortest* non-pinned edge as the solved coordinate (the estimates behind
 * the thin-part decay need the dependent edge to stay minimal).  Pairs are
 * joined out at t = T through the symmetric slice point, whose outward legs
 * exist for every choice of dependent edge; a short far-region connector
 * closes each junction.
 */
inline SliceDiameterResult slice_diameter(int r, int i, double eps, int samples, Rng rng,
                                          double T = 30.0) {
    if (!(eps > 0) || !(eps < std::log(2.0)))
        throw ConfigError("slice_diameter requires 0 < eps < log 2");
    if (i < 0 || i >= r) throw ConfigError("slice_diameter: edge index out of range");
    SliceDiameterResult res;
    res.bound_shape = 1.0 / (-std::log(std::expm1(eps)));

    Graph g = rose_graph(r);
    CycleComplex cx = enumerate_cycles(g, MatrixKind::quotient);

    if (r == 2) {  // one-point slice
        std::vector<double> vals(2, 0.0);
        vals[i] = eps;
        solve_dependent(cx, vals, i == 0 ? 1 : 0);
        res.samples = 1;
        return res;
    }

    const double lo = std::log(2.0 * r - 3.0) + 1e-3, hi = 20.0;

    // The symmetric slice point: all non-pinned coordinates equal, located by
    // bisection on F along the symmetric ray.
    std::vector<double> sym(static_cast<size_t>(r), 0.0);
    {
        double a = lo, b = 40.0;
        auto f_at = [&](double L) {
            std::vector<double> vals(static_cast<size_t>(r), L);
            vals[i] = eps;
            return F_rose(r, vals);
        };
        if (!(f_at(a) < 0 && f_at(b) > 0))
            throw NumericError("slice_diameter: no symmetric slice point");
        for (int it = 0; it < 100; ++it) {
            double mid = 0.5 * (a + b);
            (f_at(mid) < 0 ? a : b) = mid;
        }
        for (int k = 0; k < r; ++k) sym[k] = (k == i) ? eps : 0.5 * (a + b);
    }

    int dep0 = (i == r - 1) ? r - 2 : r - 1;
    std::vector<std::vector<double>> pts{sym};
    // Deterministic anchors near every stratum edge of the slice: one point
    // per j != i with the other free coordinates pushed far out and edge j
    // solved.  Pairs across different stratum edges realize the largest
    // costs, so the maximum must always see them.
    for (int j = 0; j < r; ++j) {
        if (j == i) continue;
        std::vector<double> vals(static_cast<size_t>(r), 15.0);
        vals[i] = eps;
        LengthFunction sol = solve_dependent(cx, vals, j);
        pts.push_back(sol.values);
    }
    // Per-slot resampling: slot k keeps its first admissible draw.  A draw
    // admissible at some eps stays admissible at every larger eps, so the
    // sampled set varies smoothly as the slice moves out.
    for (int slot = 1; slot < samples; ++slot) {
        for (int attempt = 0; attempt < 400; ++attempt) {
            Rng draw = rng.derive(static_cast<std::uint64_t>(slot) * 1024 + attempt);
            std::vector<double> vals(static_cast<size_t>(r), 0.0);
            for (int k = 0; k < r; ++k) {
                if (k == i) vals[k] = eps;
                else if (k != dep0) vals[k] = draw.log_uniform(lo, hi);
            }
            try {
                LengthFunction sol = solve_dependent(cx, vals, dep0);
                pts.push_back(sol.values);
                break;
            } catch (const NumericError&) {
                ++res.failures;
            }
        }
    }
    res.samples = static_cast<int>(pts.size());
    if (pts.size() < 2) throw NumericError("slice_diameter: sampling failed");

    QuadratureOptions qopt{1e-7, 1e-8, 18, 4};
    auto slice_leg = [&](const std::vector<double>& base, int dep) {
        auto eval = [&](double t, std::vector<double>& vals, std::vector<double>& d1) {
            for (int k = 0; k < r; ++k) {
                if (k == i) { vals[k] = eps; d1[k] = 0; }
                else if (k == dep) { vals[k] = 0; d1[k] = 0; }
                else { vals[k] = base[k] + t; d1[k] = 1; }
            }
        };
        return path_length_fn(cx, dep, eval, 0.0, T, MetricChoice::entropy, qopt);
    };
    auto connector = [&](const std::vector<double>& pa, const std::vector<double>& pb, int dep) {
        auto eval = [&](double t, std::vector<double>& vals, std::vector<double>& d1) {
            for (int k = 0; k < r; ++k) {
                if (k == i) { vals[k] = eps; d1[k] = 0; }
                else if (k == dep) { vals[k] = 0; d1[k] = 0; }
                else {
                    double a = pa[k] + T, b = pb[k] + T;
                    vals[k] = (1 - t) * a + t * b;
                    d1[k] = b - a;
                }
            }
        };
        return path_length_fn(cx, dep, eval, 0.0, 1.0, MetricChoice::entropy, qopt);
    };
    // In-slice segment: linear interpolation inside the slice, no outward
    // excursion; the efficient route for nearby sample pairs.
    auto in_slice = [&](const std::vector<double>& pa, const std::vector<double>& pb, int dep) {
        auto eval = [&](double t, std::vector<double>& vals, std::vector<double>& d1) {
            for (int k = 0; k < r; ++k) {
                if (k == i) { vals[k] = eps; d1[k] = 0; }
                else if (k == dep) { vals[k] = 0; d1[k] = 0; }
                else {
                    vals[k] = (1 - t) * pa[k] + t * pb[k];
                    d1[k] = pb[k] - pa[k];
                }
            }
        };
        return path_length_fn(cx, dep, eval, 0.0, 1.0, MetricChoice::entropy, qopt);
    };

    // Outward legs use the argmin dependent edge (the choice behind the
    // decay estimates; the solved coordinate then only drifts to its limit,
    // so the integrand stays resolved).  In-slice segments pick the
    // dependent edge whose endpoint values stay smallest, which keeps the
    // implicit coordinate from racing across the chart.
    size_t n = pts.size();
    auto argmin_edge = [&](const std::vector<double>& p) {
        int j = -1;
        for (int k = 0; k < r; ++k)
            if (k != i && (j < 0 || p[k] < p[j])) j = k;
        return j;
    };
    auto slice_dep = [&](const std::vector<double>& pa, const std::vector<double>& pb) {
        int best = -1;
        double best_val = kInf;
        for (int j = 0; j < r; ++j) {
            if (j == i) continue;
            double v = std::max(pa[j], pb[j]);
            if (v < best_val) { best_val = v; best = j; }
        }
        return best;
    };

    std::vector<int> dep_of(n);
    std::vector<double> leg(n);
    for (size_t a = 0; a < n; ++a) {
        dep_of[a] = argmin_edge(pts[a]);
        leg[a] = slice_leg(pts[a], dep_of[a]);
    }
    std::vector<double> sym_leg(static_cast<size_t>(r), kInf);
    for (int j = 0; j < r; ++j)
        if (j != i) sym_leg[j] = slice_leg(sym, j);

    std::vector<double> junc(n);
    for (size_t a = 0; a < n; ++a) {
        junc[a] = leg[a] + connector(pts[a], sym, dep_of[a]) + sym_leg[dep_of[a]];
        try {  // sliding to the symmetric point first can be cheaper
            int j = slice_dep(pts[a], sym);
            double alt = in_slice(pts[a], sym, j) + sym_leg[argmin_edge(sym)];
            junc[a] = std::min(junc[a], alt);
        } catch (const NumericError&) {
        }
    }

    std::vector<std::vector<double>> dist(n, std::vector<double>(n, kInf));
    for (size_t a = 0; a < n; ++a) dist[a][a] = 0;
    for (size_t a = 0; a < n; ++a)
        for (size_t b = a + 1; b < n; ++b) {
            double len = junc[a] + junc[b];
            if (dep_of[a] == dep_of[b])
                len = std::min(len, leg[a] + connector(pts[a], pts[b], dep_of[a]) + leg[b]);
            try {
                len = std::min(len, in_slice(pts[a], pts[b], slice_dep(pts[a], pts[b])));
            } catch (const NumericError&) {
            }
            dist[a][b] = dist[b][a] = len;
        }
    // Concatenations of admissible paths are admissible, so the shortest
    // composite route is still a certified upper bound.
    for (size_t k = 0; k < n; ++k)
        for (size_t a = 0; a < n; ++a)
            for (size_t b = 0; b < n; ++b)
                dist[a][b] = std::min(dist[a][b], dist[a][k] + dist[k][b]);
    for (size_t a = 0; a < n; ++a)
        for (size_t b = a + 1; b < n; ++b)
            res.diameter_upper = std::max(res.diameter_upper, dist[a][b]);
    return res;
}

}  // namespace thermograph
