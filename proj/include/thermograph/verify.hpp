#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "thermograph/experiments.hpp"

namespace thermograph {

struct CheckResult {
    std::string suite;
    std::string name;
    enum class Status { pass, fail, skip } status = Status::pass;
    double residual = 0;
    double threshold = 0;
    std::string note;
};

namespace detail {

struct Checker {
    std::string suite;
    std::vector<CheckResult>* out;

    void metric(const std::string& name, double residual, double threshold,
                const std::string& note = "") {
        CheckResult r{suite, name,
                      residual <= threshold ? CheckResult::Status::pass : CheckResult::Status::fail,
                      residual, threshold, note};
        out->push_back(r);
    }
    void boolean(const std::string& name, bool ok, const std::string& note = "") {
        metric(name, ok ? 0.0 : 1.0, 0.5, note);
    }
    void skip(const std::string& name, const std::string& why) {
        out->push_back(CheckResult{suite, name, CheckResult::Status::skip, 0, 0, why});
    }
};

inline std::vector<Graph> standard_graph_set() {
    std::vector<Graph> gs;
    for (int r = 2; r <= 5; ++r) gs.push_back(rose_graph(r));
    for (int r = 2; r <= 4; ++r) gs.push_back(theta_graph(r));
    gs.push_back(barbell_graph());
    gs.push_back(double_rose_graph(2, 2));
    return gs;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// graph-core invariants
// ---------------------------------------------------------------------------

inline void verify_graph(std::vector<CheckResult>& out, std::uint64_t /*seed*/) {
    detail::Checker ck{"graph", &out};

    bool inv_ok = true;
    for (const Graph& g : detail::standard_graph_set())
        for (int d = 0; d < g.num_directed(); ++d) {
            if (Graph::bar(Graph::bar(d)) != d) inv_ok = false;
            if (Graph::bar(d) == d) inv_ok = false;
            if (g.origin(d) != g.terminus(Graph::bar(d))) inv_ok = false;
        }
    ck.boolean("involution-facts", inv_ok);

    bool rose_ok = true;
    for (int r = 2; r <= 6; ++r) {
        Graph g = rose_graph(r);
        if (g.num_edges() != r || g.num_vertices() != 1) rose_ok = false;
    }
    ck.boolean("rose-counts", rose_ok);

    bool supp_ok = true;
    {
        struct Case { Graph g; std::vector<int> forest; };
        std::vector<Case> cases = {{theta_graph(2), {2}},
                                   {barbell_graph(), {2}},
                                   {double_rose_graph(2, 2), {4}}};
        for (auto& c : cases) {
            CollapseMap cm = collapse(c.g, c.forest);
            LengthFunction l0 = LengthFunction::constant(cm.target.num_edges(), std::log(3.0));
            LengthFunction pb = pullback_length(cm, l0);
            std::vector<int> expect;
            for (int p = 0; p < c.g.num_edges(); ++p) {
                bool in_forest = false;
                for (int f : c.forest) in_forest |= (f == p);
                if (!in_forest) expect.push_back(p);
            }
            if (pb.support() != expect) supp_ok = false;
        }
        // empty collapse is the identity
        CollapseMap id = collapse(barbell_graph(), {});
        LengthFunction l0 = LengthFunction::strict({0.4, 0.9, 1.3});
        LengthFunction pb = pullback_length(id, l0);
        for (int p = 0; p < 3; ++p)
            if (pb[p] != l0[p]) supp_ok = false;
    }
    ck.boolean("collapse-pullback-support", supp_ok);

    bool rt_ok = true;
    {
        Graph g = double_rose_graph(2, 2);
        LengthFunction l = LengthFunction::make_extended({0.25, 1.5, kInf, 0.75, 2.0});
        std::string once = emit_graph_file(g, &l);
        ParsedGraphFile parsed = parse_graph_file(once);
        std::string twice = emit_graph_file(parsed.graph, &*parsed.lengths);
        rt_ok = (once == twice) && parsed.lengths && parsed.lengths->values == l.values;
    }
    ck.boolean("file-roundtrip", rt_ok);
}

// ---------------------------------------------------------------------------
// spectral invariants
// ---------------------------------------------------------------------------

inline void verify_spectral(std::vector<CheckResult>& out, std::uint64_t seed) {
    detail::Checker ck{"spectral", &out};
    Rng root(seed);

    double same_spec = 0;
    {
        int key = 0;
        for (const Graph& g : detail::standard_graph_set()) {
            for (int k = 0; k < 50; ++k) {
                Rng rng = root.derive(1000 + key++);
                LengthFunction l = random_strict_lengths(g, rng);
                double sf = spectral_radius(transition_matrix(g, &l));
                double sq = spectral_radius(quotient_transition_matrix(g, &l));
                same_spec = std::max(same_spec, std::abs(sf - sq));
            }
        }
    }
    ck.metric("same-spectral", same_spec, 1e-10);

    double level = 0, level_h = 0;
    double homog = 0;
    {
        int key = 0;
        for (const Graph& g : detail::standard_graph_set()) {
            for (int k = 0; k < 6; ++k) {
                Rng rng = root.derive(2000 + key++);
                LengthFunction l = random_strict_lengths(g, rng);
                double h = entropy(g, l);
                LengthFunction lhat = l.scaled(h);
                level = std::max(level, std::abs(pressure_neg_length(g, lhat)));
                level_h = std::max(level_h, std::abs(entropy(g, lhat) - 1.0));
                double a = rng.uniform(0.1, 10.0);
                homog = std::max(homog, std::abs(entropy(g, l.scaled(a)) * a - h));
            }
        }
    }
    ck.metric("pressure-zero-at-unit-entropy", level, 1e-10);
    ck.metric("entropy-one-at-pressure-zero", level_h, 1e-8);
    ck.metric("entropy-homogeneity", homog, 1e-9);

    double regval = 0;
    {
        int key = 0;
        for (const Graph& g : detail::standard_graph_set()) {
            Rng rng = root.derive(3000 + key++);
            LengthFunction l = random_strict_lengths(g, rng, 0.6, 2.0);
            double h = entropy(g, l);
            double dot_lh = 0;
            const double step = 1e-5;
            for (int p = 0; p < g.num_edges(); ++p) {
                LengthFunction lp = l, lm = l;
                lp.values[p] += step;
                lm.values[p] -= step;
                dot_lh += l[p] * (entropy(g, lp) - entropy(g, lm)) / (2 * step);
            }
            regval = std::max(regval, std::abs(dot_lh + h));
        }
    }
    ck.metric("regular-value-identity", regval, 1e-6);

    double gp_l1 = 0, gp_fd = 0;
    bool gp_pos = true;
    {
        int key = 0;
        for (const Graph& g : detail::standard_graph_set()) {
            Rng rng = root.derive(4000 + key++);
            LengthFunction l = random_strict_lengths(g, rng, 0.6, 2.0);
            std::vector<double> gp = grad_pressure(g, l);
            double l1 = 0;
            for (double x : gp) {
                if (!(x > 0)) gp_pos = false;
                l1 += std::abs(x);
            }
            gp_l1 = std::max(gp_l1, std::abs(l1 - 1.0));
            const double step = 1e-6;
            for (int p = 0; p < g.num_edges(); ++p) {
                LengthFunction lp = l, lm = l;
                lp.values[p] += step;
                lm.values[p] -= step;
                double fd = (pressure_neg_length(g, lp) - pressure_neg_length(g, lm)) / (2 * step);
                gp_fd = std::max(gp_fd, std::abs(fd + gp[p]));
            }
        }
    }
    ck.boolean("grad-pressure-positive", gp_pos);
    ck.metric("grad-pressure-l1", gp_l1, 1e-8);
    ck.metric("grad-pressure-fd", gp_fd, 1e-6);
}

// ---------------------------------------------------------------------------
// cycle-complex invariants
// ---------------------------------------------------------------------------

inline void verify_cycles(std::vector<CheckResult>& out, std::uint64_t seed, long long budget) {
    detail::Checker ck{"cycles", &out};
    Rng root(seed);

    double agree = 0;
    std::string skipped;
    {
        int key = 0;
        for (const Graph& g : detail::standard_graph_set()) {
            for (MatrixKind kind : {MatrixKind::full, MatrixKind::quotient}) {
                CycleComplex cx;
                try {
                    cx = enumerate_cycles(g, kind, budget);
                } catch (const BudgetExceeded& e) {
                    skipped += g.name + (kind == MatrixKind::full ? "/full" : "/quotient") + " (" +
                               std::to_string(e.count) + " simplices) ";
                    continue;
                }
                for (int k = 0; k < 100; ++k) {
                    Rng rng = root.derive(5000 + key * 101 + k);
                    LengthFunction l = random_strict_lengths(g, rng);
                    agree = std::max(agree, std::abs(F_via_cycles(cx, l) - F_via_det(g, l, kind)));
                }
                ++key;
            }
        }
    }
    ck.metric("cycles-vs-det", agree, 1e-12, skipped.empty() ? "" : "skipped: " + skipped);

    double coll = 0;
    {
        struct Case { Graph g; std::vector<int> forest; };
        std::vector<Case> cases = {{theta_graph(2), {2}}, {barbell_graph(), {2}}};
        int key = 0;
        for (auto& c : cases) {
            CollapseMap cm = collapse(c.g, c.forest);
            for (int k = 0; k < 50; ++k) {
                Rng rng = root.derive(6000 + key++);
                LengthFunction l0 = random_strict_lengths(cm.target, rng);
                LengthFunction pb = pullback_length(cm, l0);
                coll = std::max(coll, std::abs(F_via_det(c.g, pb, MatrixKind::full) -
                                               F_via_det(cm.target, l0, MatrixKind::full)));
            }
        }
    }
    ck.metric("collapse-identity", coll, 1e-12);

    double below_pos = kInf, unit_f = 0;
    {
        int key = 0;
        for (const Graph& g : detail::standard_graph_set()) {
            for (int k = 0; k < 10; ++k) {
                Rng rng = root.derive(7000 + key++);
                LengthFunction lu = random_unit_entropy(g, rng);
                unit_f = std::max(unit_f, std::abs(F_via_det(g, lu, MatrixKind::full)));
                LengthFunction lbig = lu.scaled(rng.uniform(1.05, 3.0));  // entropy < 1
                below_pos = std::min(below_pos, F_via_det(g, lbig, MatrixKind::full));
            }
        }
    }
    ck.boolean("F-positive-below-unit-entropy", below_pos > 0,
               "min F = " + fmt17(below_pos));
    ck.metric("F-zero-at-unit-entropy", unit_f, 1e-9);

    double fact = 0;
    {
        Graph g = barbell_graph();
        for (int k = 0; k < 100; ++k) {
            Rng rng = root.derive(8000 + k);
            LengthFunction l = random_strict_lengths(g, rng);
            double x = l.u(0), y = l.u(1), z = l.u(2);
            double golden = (1 - x) * (1 - y) * (1 - x - y + x * y - 4 * x * y * z * z);
            fact = std::max(fact, std::abs(F_via_det(g, l, MatrixKind::full) - golden));
        }
    }
    ck.metric("barbell-factorization", fact, 1e-12);

    bool ray_ok = true;
    {
        for (int r = 2; r <= 4; ++r) {
            Graph g = rose_graph(r);
            for (int k = 0; k < 20; ++k) {
                Rng rng = root.derive(9000 + r * 100 + k);
                LengthFunction l = random_strict_lengths(g, rng);
                int changes = 0;
                double prev = 0;
                for (int i = 0; i <= 2000; ++i) {
                    double t = 0.01 * std::pow(2000.0, i / 2000.0);
                    std::vector<double> tl(l.values);
                    for (double& x : tl) x *= t;
                    double f = F_rose(r, tl);
                    if (i > 0 && ((prev < 0) != (f < 0))) ++changes;
                    prev = f;
                }
                if (changes != 1) ray_ok = false;
            }
        }
    }
    ck.boolean("rose-ray-single-root", ray_ok);
}

// ---------------------------------------------------------------------------
// thermo-metrics invariants
// ---------------------------------------------------------------------------

inline void verify_metrics(std::vector<CheckResult>& out, std::uint64_t seed) {
    detail::Checker ck{"metrics", &out};
    Rng root(seed);

    // Both norm formulas along analytic paths; the second derivative of the
    // dependent coordinate comes from second differences.
    double formdiff = 0;
    {
        struct Case { Graph g; MetricPath path; };
        std::vector<Case> cases;
        {
            MetricPath p;
            p.graph = rose_graph(3);
            p.profiles = {Profile::log_affine(5.0, -1.2), Profile::linear(1.7, 0.25),
                          Profile::constant(0)};
            p.dependent = 2;
            cases.push_back({p.graph, p});
        }
        {
            MetricPath p;
            p.graph = barbell_graph();
            p.profiles = {Profile::linear(0.55, 0.08), Profile::log_affine(2.0, -0.4),
                          Profile::constant(0)};
            p.dependent = 2;
            cases.push_back({p.graph, p});
        }
        for (auto& c : cases) {
            CycleComplex cx = enumerate_cycles(c.g, MatrixKind::quotient);
            const double h = 1e-4;
            for (int k = 1; k < 20; ++k) {
                double t = 0.05 * k;
                double n1 = path_speed(cx, c.path, t, MetricChoice::entropy);
                LengthFunction l = c.path.point(cx, t);
                LengthFunction lp = c.path.point(cx, t + h), lm = c.path.point(cx, t - h);
                std::vector<double> ldd(l.size());
                for (int p = 0; p < l.size(); ++p) {
                    if (p == c.path.dependent)
                        ldd[p] = (lp[p] - 2 * l[p] + lm[p]) / (h * h);
                    else
                        ldd[p] = c.path.profiles[p].d2(t);
                }
                std::vector<double> g = grad_F(cx, l);
                double n2sq = dot(ldd, g) / pairing_volume(cx, l);
                formdiff = std::max(formdiff, std::abs(n1 * n1 - n2sq));
            }
        }
    }
    ck.metric("norm-two-formulas", formdiff, 1e-6);

    double reparam = 0;
    {
        Graph g = rose_graph(3);
        CycleComplex cx = enumerate_cycles(g, MatrixKind::quotient);
        MetricPath p;
        p.graph = g;
        p.profiles = {Profile::log_affine(5.0, -1.2), Profile::linear(1.7, 0.25),
                      Profile::constant(0)};
        p.dependent = 2;
        double len1 = path_length(cx, p);
        auto eval = [&](double s, std::vector<double>& vals, std::vector<double>& d1) {
            double t = s * s, dt = 2 * s;
            for (int e = 0; e < 3; ++e) {
                vals[e] = p.profiles[e].value(t);
                d1[e] = p.profiles[e].d1(t) * dt;
            }
        };
        double len2 = path_length_fn(cx, 2, eval, 0.0, 1.0);
        reparam = std::abs(len1 - len2);
    }
    ck.metric("reparametrization-invariance", reparam, 1e-6);

    double rank2_margin = kInf;
    for (Rank2Family fam : {Rank2Family::rose, Rank2Family::barbell, Rank2Family::theta}) {
        auto paths = rank2_lower_bound_paths(fam, 100, seed + static_cast<int>(fam));
        for (const auto& r : paths) rank2_margin = std::min(rank2_margin, r.measured - r.bound);
    }
    ck.metric("rank2-lower-bounds", std::max(0.0, -rank2_margin), 1e-6,
              "min margin = " + fmt17(rank2_margin));

    double tri = 0;
    {
        int key = 0;
        for (Graph g : {rose_graph(2), theta_graph(2)}) {
            CycleComplex cx = enumerate_cycles(g, MatrixKind::quotient);
            for (int k = 0; k < 4; ++k) {
                Rng rng = root.derive(11000 + key++);
                LengthFunction a = random_unit_entropy(g, rng);
                LengthFunction b = random_unit_entropy(g, rng);
                LengthFunction c = random_unit_entropy(g, rng);
                double dab = distance_upper_bound(g, cx, a, b).length;
                double dbc = distance_upper_bound(g, cx, b, c).length;
                double dac = distance_upper_bound(g, cx, a, c).length;
                tri = std::max(tri, dac - (dab + dbc));
            }
        }
    }
    ck.metric("triangle-inequality", std::max(0.0, tri), 1e-4);
}

// ---------------------------------------------------------------------------
// rose-moduli invariants
// ---------------------------------------------------------------------------

inline void verify_rose(std::vector<CheckResult>& out, std::uint64_t seed) {
    detail::Checker ck{"rose", &out};
    Rng root(seed);

    double agree = 0;
    for (int r = 2; r <= 5; ++r) {
        Graph g = rose_graph(r);
        CycleComplex cx = enumerate_cycles(g, MatrixKind::quotient);
        for (int k = 0; k < 100; ++k) {
            Rng rng = root.derive(12000 + r * 200 + k);
            LengthFunction l = random_strict_lengths(g, rng);
            agree = std::max(agree, std::abs(F_rose(r, l.values) - F_via_cycles(cx, l)));
        }
    }
    ck.metric("F-rose-vs-complex", agree, 1e-12);

    double partials = 0;
    for (int r = 2; r <= 4; ++r) {
        Graph g = rose_graph(r);
        CycleComplex cx = enumerate_cycles(g, MatrixKind::quotient);
        for (int k = 0; k < 20; ++k) {
            Rng rng = root.derive(13000 + r * 40 + k);
            LengthFunction l = random_strict_lengths(g, rng);
            std::vector<double> grad = grad_F(cx, l);
            auto hess = hessian_F(cx, l);
            for (int i = 0; i < r; ++i) {
                partials = std::max(partials,
                                    std::abs(grad[i] - std::exp(-l[i]) * Y_i(r, l.values, i)));
                partials = std::max(partials,
                                    std::abs(hess[i][i] + std::exp(-l[i]) * Y_i(r, l.values, i)));
                for (int j = i + 1; j < r; ++j)
                    partials = std::max(
                        partials, std::abs(hess[i][j] + std::exp(-l[i] - l[j]) *
                                                            Y_ij(r, l.values, i, j)));
            }
        }
    }
    ck.metric("partial-derivative-identities", partials, 1e-12);

    double xy_ident = 0;
    bool bounds_ok = true;
    for (int r = 2; r <= 4; ++r) {
        Graph g = rose_graph(r);
        for (int k = 0; k < 50; ++k) {
            Rng rng = root.derive(14000 + r * 60 + k);
            LengthFunction l = random_unit_entropy(g, rng);
            for (int i = 0; i < r; ++i) {
                double x = X_i(r, l.values, i), y = Y_i(r, l.values, i);
                xy_ident = std::max(xy_ident, std::abs(F_rose(r, l.values) -
                                                       (x - std::exp(-l[i]) * y)));
                if (!(0 < x && x < 1 && 1 < y && y < 4)) bounds_ok = false;
                for (int j = 0; j < r; ++j) {
                    if (j == i) continue;
                    double yij = Y_ij(r, l.values, i, j);
                    if (!(3 < yij && yij < 3 * y && 3 * y < 12)) bounds_ok = false;
                }
            }
        }
    }
    ck.metric("F-equals-X-minus-uY", xy_ident, 1e-12);
    ck.boolean("XY-bounds", bounds_ok);

    bool l45_ok = true;
    {
        for (int r : {3, 4}) {
            int found = 0;
            for (int k = 0; k < 4000 && found < 30; ++k) {
                Rng rng = root.derive(15000 + r * 4100 + k);
                std::vector<double> vals(static_cast<size_t>(r), 0.0);
                for (int i = 0; i < r - 1; ++i)
                    vals[i] = rng.log_uniform(std::log(2.0 * r - 3.0) + 1e-3, 2.2);
                double lr;
                try {
                    lr = solve_edge(r, vals, r - 1);
                } catch (const NumericError&) {
                    continue;
                }
                if (lr < std::log(3.0)) continue;
                ++found;
                double mn = kInf;
                for (int i = 0; i < r - 1; ++i) mn = std::min(mn, vals[i]);
                if (mn > std::log(4.0 * r - 5.0) + 1e-12) l45_ok = false;
            }
            if (found < 30) l45_ok = false;
        }
    }
    ck.boolean("min-edge-bound-4r-5", l45_ok);

    {
        EscapeRoseResult e3 = escape_rose_experiment(3);
        EscapeRoseResult e4 = escape_rose_experiment(4);
        ck.metric("escape-closed-form", std::max(e3.closed_form_residual, e4.closed_form_residual),
                  1e-10);
        double over = std::max(e3.total - e3.envelope, e4.total - e4.envelope);
        ck.metric("escape-below-envelope", std::max(0.0, over), 0.0,
                  "r3 " + fmt17(e3.total) + " <= " + fmt17(e3.envelope));
    }

    {
        InfiniteLengthResult res = infinite_length_experiment(3, 1.0, 12, seed + 77);
        ck.metric("infinite-length-floor", std::max(0.0, res.target - 1e-3 - res.min_measured),
                  0.0, "min measured = " + fmt17(res.min_measured));
    }

    bool deflen_ok = true;
    {
        for (double eps : {0.3, 0.05, 1e-3, 1e-6}) {
            std::vector<double> vals = {eps, 0.0};
            double l2 = solve_edge(2, vals, 1);
            if (!(l2 > -std::log(std::expm1(eps)))) deflen_ok = false;
        }
    }
    ck.boolean("definite-length", deflen_ok);

    double strata_f = 0, strata_h = 0;
    {
        RosePoint p1 = strata_embed(3, {0, 1}, {std::log(3.0), std::log(3.0)});
        RosePoint p2 = strata_embed(4, {0, 1, 2}, {std::log(5.0), std::log(5.0), std::log(5.0)});
        strata_f = std::max(std::abs(F_rose(3, p1.lengths)), std::abs(F_rose(4, p2.lengths)));
        strata_h = std::max(std::abs(rose_entropy_extended(p1) - 1.0),
                            std::abs(rose_entropy_extended(p2) - 1.0));
    }
    ck.metric("strata-F-vanishes", strata_f, 1e-12);
    ck.metric("strata-extended-entropy", strata_h, 1e-9);
}

// ---------------------------------------------------------------------------
// strata-separating invariants
// ---------------------------------------------------------------------------

inline void verify_separating(std::vector<CheckResult>& out, std::uint64_t seed,
                              long long budget) {
    detail::Checker ck{"separating", &out};
    Rng root(seed);

    SeparatedGraph barbell, g22;
    try {
        barbell = make_separated(barbell_graph(), 2, budget);
        g22 = make_separated(double_rose_graph(2, 2), 4, budget);
    } catch (const BudgetExceeded& e) {
        ck.skip("separating-suite", "cycle complex budget exceeded at " + std::to_string(e.count));
        return;
    }

    double y_indep = 0;
    {
        for (int k = 0; k < 10; ++k) {
            Rng rng = root.derive(16000 + k);
            LengthFunction l = random_strict_lengths(g22.graph, rng);
            double vals[2];
            int idx = 0;
            for (double l0 : {1.0, 5.0}) {
                LengthFunction ll = l;
                ll.values[g22.bridge] = l0;
                // definitional evaluation, bridge factor included then removed
                std::vector<double> u = ll.u_all();
                double y = 0;
                for (const auto& t : g22.full_cx.terms) {
                    if (detail::profile_get(t.profile, g22.bridge) != 2) continue;
                    y -= static_cast<double>(t.coeff) * detail::term_value(t.profile, u) *
                         std::exp(2 * l0);
                }
                vals[idx++] = y;
            }
            y_indep = std::max(y_indep, std::abs(vals[0] - vals[1]));
            y_indep = std::max(y_indep, std::abs(vals[0] - Y_separating(g22, l)));
        }
    }
    ck.metric("Y-independent-of-bridge", y_indep, 1e-12);

    double grad_sum = 0;
    {
        CycleComplex side1 = enumerate_cycles(g22.side1_graph, MatrixKind::full);
        CycleComplex side2 = enumerate_cycles(g22.side2_graph, MatrixKind::full);
        for (int k = 0; k < 10; ++k) {
            Rng rng = root.derive(17000 + k);
            LengthFunction l = random_strict_lengths(g22.graph, rng);
            l.values[g22.bridge] = kInf;
            l.extended = true;
            std::vector<double> l1 = g22.side_lengths(l, 1), l2 = g22.side_lengths(l, 2);
            double lhs = pairing_volume(g22.full_cx, l);
            double rhs = F_side(g22, 2, l2) * pairing_volume(side1, LengthFunction::strict(l1)) +
                         F_side(g22, 1, l1) * pairing_volume(side2, LengthFunction::strict(l2));
            grad_sum = std::max(grad_sum, std::abs(lhs - rhs));
        }
    }
    ck.metric("stratum-pairing-splits", grad_sum, 1e-10);

    {
        double log3 = std::log(3.0);
        std::vector<double> both = {log3, log3, log3, log3, kInf};
        double at_sing = pairing_volume(g22.full_cx, LengthFunction::make_extended(both));
        std::vector<double> one = {log3, log3, 1.9, 1.9, kInf};  // side 2 below unit entropy
        double at_reg = pairing_volume(g22.full_cx, LengthFunction::make_extended(one));
        ck.metric("pairing-vanishes-at-singular", std::abs(at_sing), 1e-9);
        ck.boolean("pairing-positive-at-regular", at_reg > 1e-6,
                   "value = " + fmt17(at_reg));
    }

    {
        CycleComplex cx = enumerate_cycles(g22.graph, MatrixKind::quotient);
        std::vector<double> target = {std::log(3.0), std::log(3.0)};
        std::vector<double> l2 = {std::log(5.0), std::log(5.0)};
        MetricPath path = escape_path_separating(g22, target, l2);
        double rmin = kInf, rmax = 0;
        for (int k = 0; k <= 40; ++k) {
            double t = 0.5 + (1.0 - 1e-6 - 0.5) * k / 40;
            LengthFunction l = path.point(cx, t);
            double ratio = std::exp(-2 * l[g22.bridge]) / (1 - t);
            rmin = std::min(rmin, ratio);
            rmax = std::max(rmax, ratio);
        }
        bool ok = std::isfinite(rmax) && rmin > 0 && rmax / rmin < 1e4;
        ck.boolean("bridge-decay-shape", ok,
                   "ratio range [" + fmt17(rmin) + ", " + fmt17(rmax) + "]");

        EscapeSeparatingResult esc = escape_separating_experiment(g22, target, l2);
        ck.metric("escape-separating-stability", std::abs(esc.total - esc.total_refined), 1e-4,
                  "total = " + fmt17(esc.total));
    }

    double fact = 0;
    {
        for (int k = 0; k < 100; ++k) {
            Rng rng = root.derive(18000 + k);
            fact = std::max(fact, factorization_check(barbell, random_strict_lengths(barbell.graph, rng)));
            fact = std::max(fact, factorization_check(g22, random_strict_lengths(g22.graph, rng)));
        }
    }
    ck.metric("separating-factorization", fact, 1e-11);

    {
        auto rows = shortcut_experiment(g22, {1e-1, 1e-2, 1e-3});
        bool dec = rows[0].total > rows[1].total && rows[1].total > rows[2].total;
        std::vector<double> totals;
        for (auto& r : rows) totals.push_back(r.total);
        double limit = std::max(0.0, aitken_limit(totals));  // lengths are nonnegative
        ck.boolean("shortcut-decreasing", dec,
                   fmt17(rows[0].total) + " > " + fmt17(rows[1].total) + " > " +
                       fmt17(rows[2].total));
        ck.metric("shortcut-extrapolation", limit, 1e-2,
                  "raw aitken " + fmt17(aitken_limit(totals)));
    }
}

// ---------------------------------------------------------------------------

inline std::vector<CheckResult> run_verify(const std::string& suite, std::uint64_t seed,
                                           long long budget = 10000000) {
    std::vector<CheckResult> out;
    bool all = suite == "all";
    if (all || suite == "graph") verify_graph(out, seed);
    if (all || suite == "spectral") verify_spectral(out, seed);
    if (all || suite == "cycles") verify_cycles(out, seed, budget);
    if (all || suite == "metrics") verify_metrics(out, seed);
    if (all || suite == "rose") verify_rose(out, seed);
    if (all || suite == "separating") verify_separating(out, seed, budget);
    if (out.empty()) throw ConfigError("unknown verify suite '" + suite + "'");
    return out;
}

}  // namespace thermograph
