#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "thermograph/cycle_complex.hpp"
#include "thermograph/graph.hpp"
#include "thermograph/spectral.hpp"
#include "thermograph/util.hpp"

namespace thermograph {

/// Tangent vector at a unit-entropy point: <components, grad F(base)> = 0.
struct TangentVector {
    LengthFunction base;
    std::vector<double> components;
};

inline double l1_norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += std::abs(x);
    return s;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Remove the grad-F component of w; the result satisfies the tangency
/// invariant at any point where grad F does not vanish (it cannot on M^1).
inline TangentVector tangent_project(const CycleComplex& cx, const LengthFunction& l,
                                     const std::vector<double>& w) {
    std::vector<double> g = grad_F(cx, l);
    double gg = dot(g, g);
    if (!(gg > 1e-28)) throw NumericError("grad F vanishes; base point is off the surface");
    double c = dot(w, g) / gg;
    TangentVector t{l, w};
    for (size_t i = 0; i < t.components.size(); ++i) t.components[i] -= c * g[i];
    return t;
}

namespace detail {
/// Radicands within [-1e-10, 0) are clamped to 0 (roundoff near null
/// directions on strata); anything more negative indicates a non-tangent
/// vector or an off-surface base point.
inline double clamp_radicand(double r, long long* diagnostics) {
    if (r >= 0) return r;
    if (r >= -1e-10) {
        if (diagnostics) ++*diagnostics;
        return 0.0;
    }
    throw NumericError("negative metric radicand " + fmt17(r) +
                       " (non-tangent vector or off-surface point?)");
}
}  // namespace detail

/// ||v||_{h,G} = sqrt(-<v,H[F]v> / <l, grad F>).
inline double entropy_norm(const CycleComplex& cx, const LengthFunction& l,
                           const std::vector<double>& v, long long* diagnostics = nullptr) {
    double num = -pairing_hessian(cx, l, v);
    double den = pairing_volume(cx, l);
    if (!(den != 0)) throw NumericError("entropy norm: <l, grad F> vanishes");
    return std::sqrt(detail::clamp_radicand(num / den, diagnostics));
}

/// ||v||_{P,G} = sqrt(-<v,H[F]v> / ||grad F||_1).
inline double pressure_norm(const CycleComplex& cx, const LengthFunction& l,
                            const std::vector<double>& v, long long* diagnostics = nullptr) {
    double num = -pairing_hessian(cx, l, v);
    double den = l1_norm(grad_F(cx, l));
    if (!(den > 0)) throw NumericError("pressure norm: grad F vanishes");
    return std::sqrt(detail::clamp_radicand(num / den, diagnostics));
}

enum class MetricChoice { entropy, pressure };

// ---------------------------------------------------------------------------
// Dependent-coordinate solve.  Since Delta(e) <= 2 for every edge, F is a
// polynomial of degree at most 2 in any single u-coordinate; the solve is an
// exact quadratic root pick (smallest root in (0,1), the first Perron
// crossing coming from u = 0).
// ---------------------------------------------------------------------------

namespace detail {

struct DepPoly {
    double c0 = 0, c1 = 0, c2 = 0;  // F = c0 + c1*u + c2*u^2 in the dependent u
    double eval(double u) const { return c0 + u * (c1 + u * c2); }
    double deriv(double u) const { return c1 + 2 * c2 * u; }
};

inline DepPoly dependent_poly(const CycleComplex& cx, const std::vector<double>& u, int dep) {
    DepPoly p;
    for (const auto& t : cx.terms) {
        int k = profile_get(t.profile, dep);
        std::uint64_t rest = t.profile & ~(3ull << (2 * dep));
        double v = static_cast<double>(t.coeff) * term_value(rest, u);
        (k == 0 ? p.c0 : k == 1 ? p.c1 : p.c2) += v;
    }
    return p;
}

}  // namespace detail

/**
 * Complete a length function to unit entropy by solving F = 0 for the
 * dependent edge.  `values` supplies all coordinates except `dep` (which is
 * ignored).  Fails when the free part already has entropy >= 1 (F at
 * u_dep = 0 is nonpositive) or when the completion would need a nonpositive
 * length (no root with u in (0,1)).
 */
inline LengthFunction solve_dependent(const CycleComplex& cx, const std::vector<double>& values,
                                      int dep) {
    if (static_cast<int>(values.size()) != cx.num_pairs)
        throw ConfigError("solve_dependent: coordinate count mismatch");
    std::vector<double> u(values.size());
    for (size_t i = 0; i < values.size(); ++i) u[i] = std::exp(-values[i]);
    u[dep] = 0.0;
    detail::DepPoly p = detail::dependent_poly(cx, u, dep);
    if (!(p.c0 > 0))
        throw NumericError("no completion: free part already has entropy >= 1");
    double root = kInf;
    if (p.c2 == 0.0) {
        if (p.c1 < 0) root = -p.c0 / p.c1;
    } else {
        double disc = p.c1 * p.c1 - 4 * p.c2 * p.c0;
        if (disc >= 0) {
            double sq = std::sqrt(disc);
            double q = -0.5 * (p.c1 + (p.c1 >= 0 ? sq : -sq));
            double r1 = q / p.c2, r2 = (q != 0.0) ? p.c0 / q : kInf;
            for (double r : {r1, r2})
                if (r > 0 && r < root) root = r;
        }
    }
    if (!(root > 0) || !(root < 1.0))
        throw NumericError("no completion: dependent length would leave (0,inf)");
    // One Newton step to absorb roundoff from the root formula.
    double f = p.eval(root), d = p.deriv(root);
    if (d != 0.0) root -= f / d;
    std::vector<double> out = values;
    out[dep] = -std::log(root);
    bool ext = false;
    for (size_t i = 0; i < out.size(); ++i)
        if (!(out[i] > 0) || std::isinf(out[i])) ext = true;
    return ext ? LengthFunction::make_extended(std::move(out))
               : LengthFunction::strict(std::move(out));
}

// ---------------------------------------------------------------------------
// Paths on the unit-entropy hypersurface
// ---------------------------------------------------------------------------

/// Per-edge parametric form for the free coordinates of a path.
struct Profile {
    enum class Kind { constant, linear, log_affine } kind = Kind::constant;
    double a = 0, b = 0;

    static Profile constant(double c) { return {Kind::constant, c, 0}; }
    static Profile linear(double a, double b) { return {Kind::linear, a, b}; }
    static Profile log_affine(double a, double b) { return {Kind::log_affine, a, b}; }

    double value(double t) const {
        switch (kind) {
            case Kind::constant: return a;
            case Kind::linear: return a + b * t;
            case Kind::log_affine: return std::log(a + b * t);
        }
        return 0;
    }
    double d1(double t) const {
        switch (kind) {
            case Kind::constant: return 0;
            case Kind::linear: return b;
            case Kind::log_affine: return b / (a + b * t);
        }
        return 0;
    }
    double d2(double t) const {
        if (kind != Kind::log_affine) return 0;
        double d = a + b * t;
        return -b * b / (d * d);
    }
};

/**
 * A path t -> l_t on M^1(G): analytic profiles for the free edges, one
 * dependent edge solved from F = 0 at every t.  The dependent entry of
 * `profiles` is ignored.
 */
struct MetricPath {
    Graph graph;
    MatrixKind kind = MatrixKind::quotient;
    std::vector<Profile> profiles;
    int dependent = 0;
    double t0 = 0, t1 = 1;
    bool singular_end = false;  // integrable 1/sqrt(t1 - t) endpoint behavior

    LengthFunction point(const CycleComplex& cx, double t) const {
        std::vector<double> vals(profiles.size(), 0.0);
        for (size_t p = 0; p < profiles.size(); ++p)
            if (static_cast<int>(p) != dependent) vals[p] = profiles[p].value(t);
        return solve_dependent(cx, vals, dependent);
    }
};

struct QuadratureOptions {
    double rel_tol = 1e-8;
    double panel_tol = 1e-9;
    int max_depth = 20;
    int init_panels = 8;
};

namespace detail {

// 16-point Gauss-Legendre on [-1,1].
inline const std::array<double, 8>& gl16_x() {
    static const std::array<double, 8> x = {
        0.09501250983763744019, 0.28160355077925891323, 0.45801677765722738634,
        0.61787624440264374845, 0.75540440835500303390, 0.86563120238783174388,
        0.94457502307323257608, 0.98940093499164993260};
    return x;
}
inline const std::array<double, 8>& gl16_w() {
    static const std::array<double, 8> w = {
        0.18945061045506849629, 0.18260341504492358887, 0.16915651939500253819,
        0.14959598881657673208, 0.12462897125553387205, 0.09515851168249278481,
        0.06225352393864789286, 0.02715245941175409485};
    return w;
}

inline double gl16(const std::function<double(double)>& f, double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < 8; ++i) {
        double dx = half * gl16_x()[i];
        s += gl16_w()[i] * (f(mid + dx) + f(mid - dx));
    }
    return s * half;
}

inline double adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                       int depth, int max_depth) {
    double whole = gl16(f, a, b);
    double mid = 0.5 * (a + b);
    double left = gl16(f, a, mid), right = gl16(f, mid, b);
    // The floor stops refinement once the disagreement is at the roundoff
    // noise of the panel values themselves.
    double floor_tol = 1e-14 * (std::abs(left) + std::abs(right));
    if (std::abs(left + right - whole) <= std::max(tol, floor_tol) || depth >= max_depth)
        return left + right;
    return adaptive(f, a, mid, 0.5 * tol, depth + 1, max_depth) +
           adaptive(f, mid, b, 0.5 * tol, depth + 1, max_depth);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opt) {
    if (!(b > a)) return 0.0;
    double coarse = 0;
    double h = (b - a) / opt.init_panels;
    for (int k = 0; k < opt.init_panels; ++k) coarse += gl16(f, a + k * h, a + (k + 1) * h);
    double tol = std::max(opt.panel_tol, opt.rel_tol * std::abs(coarse));
    double total = 0;
    for (int k = 0; k < opt.init_panels; ++k)
        total += adaptive(f, a + k * h, a + (k + 1) * h, tol / opt.init_panels, 0, opt.max_depth);
    return total;
}

}  // namespace detail

/**
 * Norm of the path velocity at parameter t.  Free derivatives come from the
 * profiles; the dependent one from the implicit-function relation
 * ldot_dep = -<ldot_free, grad_free F> / (dF/dl_dep).
 */
inline double path_speed(const CycleComplex& cx, const MetricPath& path, double t,
                         MetricChoice metric, long long* diagnostics = nullptr) {
    LengthFunction l = path.point(cx, t);
    std::vector<double> g = grad_F(cx, l);
    std::vector<double> v(l.size(), 0.0);
    double num = 0;
    for (int p = 0; p < l.size(); ++p) {
        if (p == path.dependent) continue;
        v[p] = path.profiles[p].d1(t);
        num += v[p] * g[p];
    }
    if (!(std::abs(g[path.dependent]) > 0))
        throw NumericError("dependent edge has vanishing F-gradient");
    v[path.dependent] = -num / g[path.dependent];
    return metric == MetricChoice::entropy ? entropy_norm(cx, l, v, diagnostics)
                                           : pressure_norm(cx, l, v, diagnostics);
}

/**
 * Riemannian length of a path.  When `singular_end` is set the substitution
 * t = t1 - s^2 removes the integrable endpoint singularity of escape paths.
 */
inline double path_length(const CycleComplex& cx, const MetricPath& path,
                          MetricChoice metric = MetricChoice::entropy,
                          const QuadratureOptions& opt = {}, long long* diagnostics = nullptr) {
    auto speed = [&](double t) { return path_speed(cx, path, t, metric, diagnostics); };
    if (path.singular_end) {
        double span = path.t1 - path.t0;
        auto g = [&](double s) { return 2.0 * s * speed(path.t1 - s * s); };
        return detail::integrate(g, 0.0, std::sqrt(span), opt);
    }
    return detail::integrate(speed, path.t0, path.t1, opt);
}

/// Integrate an arbitrary speed function; for experiment paths whose point
/// and velocity are produced by closed-form machinery rather than a solve.
inline double integrate_speed(const std::function<double(double)>& speed, double t0, double t1,
                              const QuadratureOptions& opt = {}) {
    return detail::integrate(speed, t0, t1, opt);
}

/// Length of a path given by an arbitrary callable t -> (free values, free
/// derivatives); used for reparametrization checks and custom experiment legs.
inline double path_length_fn(
    const CycleComplex& cx, int dependent,
    const std::function<void(double, std::vector<double>&, std::vector<double>&)>& eval, double t0,
    double t1, MetricChoice metric = MetricChoice::entropy, const QuadratureOptions& opt = {},
    long long* diagnostics = nullptr) {
    std::vector<double> vals(cx.num_pairs), d1(cx.num_pairs);
    auto speed = [&](double t) {
        eval(t, vals, d1);
        LengthFunction l = solve_dependent(cx, vals, dependent);
        std::vector<double> g = grad_F(cx, l);
        std::vector<double> v(l.size(), 0.0);
        double num = 0;
        for (int p = 0; p < l.size(); ++p) {
            if (p == dependent) continue;
            v[p] = d1[p];
            num += v[p] * g[p];
        }
        v[dependent] = -num / g[dependent];
        return metric == MetricChoice::entropy ? entropy_norm(cx, l, v, diagnostics)
                                               : pressure_norm(cx, l, v, diagnostics);
    };
    return detail::integrate(speed, t0, t1, opt);
}

// ---------------------------------------------------------------------------
// Distance upper bounds by polyline search
// ---------------------------------------------------------------------------

struct DistanceSearchOptions {
    int interior_nodes = 7;
    int sweeps = 6;        // refinement budget: coordinate-descent passes
    double step0 = 0.2;    // initial per-coordinate step
    QuadratureOptions quad{1e-7, 1e-8, 20, 4};
};

struct DistanceResult {
    double length = 0;
    bool fallback_used = false;
};

namespace detail {

inline double leg_length(const CycleComplex& cx, int dep, const std::vector<double>& a,
                         const std::vector<double>& b, MetricChoice metric,
                         const QuadratureOptions& opt) {
    auto eval = [&](double t, std::vector<double>& vals, std::vector<double>& d1) {
        for (size_t p = 0; p < a.size(); ++p) {
            vals[p] = (1 - t) * a[p] + t * b[p];
            d1[p] = b[p] - a[p];
        }
    };
    return path_length_fn(cx, dep, eval, 0.0, 1.0, metric, opt);
}

}  // namespace detail

/**
 * Length of the best polyline found between two unit-entropy points: nodes
 * seeded on the straight u-coordinate segment, re-solved onto the surface
 * through a dependent edge, then improved by coordinate descent on interior
 * nodes.  The result is the length of an explicit admissible path, hence a
 * certified upper bound for the distance.
 */
inline DistanceResult distance_upper_bound(const Graph& g, const CycleComplex& cx,
                                           const LengthFunction& la, const LengthFunction& lb,
                                           const DistanceSearchOptions& opt = {},
                                           MetricChoice metric = MetricChoice::entropy) {
    if (la.values == lb.values) return {0.0, false};
    int m = cx.num_pairs;
    int nodes = opt.interior_nodes;

    // Dependent edge candidates, strongest average gradient first.
    std::vector<double> ga = grad_F(cx, la), gb = grad_F(cx, lb);
    std::vector<int> cand(m);
    for (int p = 0; p < m; ++p) cand[p] = p;
    std::sort(cand.begin(), cand.end(), [&](int p, int q) {
        double sp = std::min(ga[p], gb[p]), sq = std::min(ga[q], gb[q]);
        if (sp != sq) return sp > sq;
        return p < q;
    });

    std::vector<double> ua = la.u_all(), ub = lb.u_all();
    auto build_nodes = [&](int dep, std::vector<std::vector<double>>& pts) {
        pts.clear();
        pts.push_back(la.values);
        for (int k = 1; k <= nodes; ++k) {
            double s = static_cast<double>(k) / (nodes + 1);
            std::vector<double> vals(m);
            for (int p = 0; p < m; ++p) vals[p] = -std::log((1 - s) * ua[p] + s * ub[p]);
            LengthFunction sol = solve_dependent(cx, vals, dep);
            pts.push_back(sol.values);
        }
        pts.push_back(lb.values);
    };

    std::vector<std::vector<double>> pts;
    int dep = -1;
    bool fallback = false;
    for (int c : cand) {
        try {
            build_nodes(c, pts);
            dep = c;
            break;
        } catch (const NumericError&) {
            continue;
        }
    }
    if (dep < 0) {
        // Two-leg fallback through the unit-entropy normalization of the
        // coordinate midpoint.
        fallback = true;
        std::vector<double> mid(m);
        for (int p = 0; p < m; ++p) mid[p] = 0.5 * (la[p] + lb[p]);
        LengthFunction bc = normalize_unit_entropy(g, LengthFunction::strict(mid));
        dep = cand[0];
        pts = {la.values, bc.values, lb.values};
        nodes = 1;
    }

    auto leg = [&](int i) {
        return detail::leg_length(cx, dep, pts[i], pts[i + 1], metric, opt.quad);
    };
    std::vector<double> legs(pts.size() - 1);
    for (size_t i = 0; i + 1 < pts.size(); ++i) legs[i] = leg(static_cast<int>(i));

    double step = opt.step0;
    for (int sweep = 0; sweep < opt.sweeps; ++sweep) {
        for (int k = 1; k <= static_cast<int>(pts.size()) - 2; ++k) {
            for (int p = 0; p < m; ++p) {
                if (p == dep) continue;
                for (double dir : {+1.0, -1.0}) {
                    std::vector<double> saved = pts[k];
                    std::vector<double> trial = pts[k];
                    trial[p] += dir * step;
                    LengthFunction sol;
                    try {
                        sol = solve_dependent(cx, trial, dep);
                    } catch (const NumericError&) {
                        continue;
                    }
                    pts[k] = sol.values;
                    double l0, l1;
                    try {
                        l0 = leg(k - 1);
                        l1 = leg(k);
                    } catch (const NumericError&) {
                        pts[k] = saved;
                        continue;
                    }
                    if (l0 + l1 < legs[k - 1] + legs[k] - 1e-14) {
                        legs[k - 1] = l0;
                        legs[k] = l1;
                    } else {
                        pts[k] = saved;
                    }
                }
            }
        }
        step *= 0.5;
    }
    double total = 0;
    for (double l : legs) total += l;
    return {total, fallback};
}

}  // namespace thermograph
