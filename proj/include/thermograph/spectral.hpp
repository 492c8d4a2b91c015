#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "thermograph/graph.hpp"
#include "thermograph/util.hpp"

namespace thermograph {

enum class MatrixKind { full, quotient };

/**
 * Weighted transition matrix.  In the full kind, row/column i corresponds to
 * directed edge i and entry (e,e') is nonzero exactly when e' can follow e
 * without backtracking; every nonzero entry in row e carries the row factor
 * of e's undirected pair.  In the quotient kind rows may correspond to merged
 * pairs {e, bar e}; row_dir is -1 there.
 */
struct TransitionMatrix {
    MatrixKind kind = MatrixKind::full;
    int n = 0;
    std::vector<double> a;     // row-major n*n
    std::vector<int> row_pair; // undirected pair scaling each row
    std::vector<int> row_dir;  // directed edge id, or -1 for merged rows

    double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
    double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }

    bool irreducible() const {
        // reachability in both directions from vertex 0
        auto reach = [&](bool transpose) {
            std::vector<char> seen(n, 0);
            std::vector<int> st{0};
            seen[0] = 1;
            while (!st.empty()) {
                int v = st.back();
                st.pop_back();
                for (int w = 0; w < n; ++w) {
                    double x = transpose ? at(w, v) : at(v, w);
                    if (x != 0.0 && !seen[w]) { seen[w] = 1; st.push_back(w); }
                }
            }
            for (char s : seen)
                if (!s) return false;
            return true;
        };
        return n > 0 && reach(false) && reach(true);
    }

    std::string dump() const {
        std::string s;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (j) s += " ";
                s += fmt17(at(i, j));
            }
            s += "\n";
        }
        return s;
    }
};

namespace detail {

/// Row scale factors from an exponent vector: factor_p = exp(expnt[p]).
inline std::vector<double> row_factors(const std::vector<double>& expnt) {
    std::vector<double> f(expnt.size());
    for (size_t i = 0; i < expnt.size(); ++i) f[i] = std::exp(expnt[i]);
    return f;
}

}  // namespace detail

/// Full |E| x |E| matrix with entry (e,e') = [tau(e)=o(e'), bar(e)!=e'] * factor[pair(e)].
inline TransitionMatrix full_matrix(const Graph& g, const std::vector<double>& factor) {
    int n = g.num_directed();
    TransitionMatrix m;
    m.kind = MatrixKind::full;
    m.n = n;
    m.a.assign(static_cast<size_t>(n) * n, 0.0);
    m.row_pair.resize(n);
    m.row_dir.resize(n);
    for (int d = 0; d < n; ++d) {
        m.row_pair[d] = Graph::pair_of(d);
        m.row_dir[d] = d;
        for (int e = 0; e < n; ++e)
            if (g.terminus(d) == g.origin(e) && Graph::bar(d) != e)
                m.at(d, e) = factor[Graph::pair_of(d)];
    }
    return m;
}

/**
 * The spectrum-preserving quotient.  For the rose and theta families the
 * involution e <-> bar(e) is a graph automorphism and the quotient merges
 * every pair: rose entries factor_i * (2 - delta_ij), theta entries
 * factor_i * (1 - delta_ij).  Otherwise only loop-edge pairs merge: their two
 * columns are summed and one of the two rows is deleted.
 */
inline TransitionMatrix quotient_matrix(const Graph& g, const std::vector<double>& factor) {
    int m = g.num_edges();
    TransitionMatrix q;
    q.kind = MatrixKind::quotient;

    bool is_rose = (g.nv == 1);
    bool is_theta = true;
    if (g.nv != 2) is_theta = false;
    for (int p = 0; p < m && is_theta; ++p)
        if (g.is_loop(p)) is_theta = false;

    if (is_rose || is_theta) {
        q.n = m;
        q.a.assign(static_cast<size_t>(m) * m, 0.0);
        q.row_pair.resize(m);
        q.row_dir.assign(m, -1);
        for (int i = 0; i < m; ++i) {
            q.row_pair[i] = i;
            for (int j = 0; j < m; ++j) {
                double base = is_rose ? (i == j ? 1.0 : 2.0) : (i == j ? 0.0 : 1.0);
                q.at(i, j) = base * factor[i];
            }
        }
        return q;
    }

    TransitionMatrix full = full_matrix(g, factor);
    std::vector<int> keep;  // surviving directed-row ids (loop pairs keep the even one)
    for (int p = 0; p < m; ++p) {
        keep.push_back(2 * p);
        if (!g.is_loop(p)) keep.push_back(2 * p + 1);
    }
    int n = static_cast<int>(keep.size());
    q.n = n;
    q.a.assign(static_cast<size_t>(n) * n, 0.0);
    q.row_pair.resize(n);
    q.row_dir.resize(n);
    for (int i = 0; i < n; ++i) {
        int di = keep[i];
        q.row_pair[i] = Graph::pair_of(di);
        q.row_dir[i] = g.is_loop(Graph::pair_of(di)) ? -1 : di;
        for (int j = 0; j < n; ++j) {
            int dj = keep[j];
            double v = full.at(di, dj);
            if (g.is_loop(Graph::pair_of(dj))) v += full.at(di, Graph::bar(dj));
            q.at(i, j) = v;
        }
    }
    return q;
}

/// A_{G,f}: rows weighted by exp(-f(e)).  f = nullptr means f = 0.
inline TransitionMatrix transition_matrix(const Graph& g, const LengthFunction* f = nullptr) {
    std::vector<double> factor(g.num_edges(), 1.0);
    if (f) {
        if (f->size() != g.num_edges()) throw ConfigError("length function size mismatch");
        for (int p = 0; p < g.num_edges(); ++p) factor[p] = f->u(p);
    }
    return full_matrix(g, factor);
}

inline TransitionMatrix quotient_transition_matrix(const Graph& g,
                                                   const LengthFunction* f = nullptr) {
    std::vector<double> factor(g.num_edges(), 1.0);
    if (f) {
        if (f->size() != g.num_edges()) throw ConfigError("length function size mismatch");
        for (int p = 0; p < g.num_edges(); ++p) factor[p] = f->u(p);
    }
    return quotient_matrix(g, factor);
}

// ---------------------------------------------------------------------------
// Perron root and eigenvectors
// ---------------------------------------------------------------------------

namespace detail {

inline double max_row_sum(const TransitionMatrix& m) {
    double best = 0;
    for (int i = 0; i < m.n; ++i) {
        double s = 0;
        for (int j = 0; j < m.n; ++j) s += m.at(i, j);
        best = std::max(best, s);
    }
    return best;
}

/// Two-sided power iteration on M + sigma*I.  The shift guarantees
/// convergence for periodic transition structures (the full matrix of a
/// theta is 2-periodic, with eigenvalues in +/- pairs); the bilinear
/// Rayleigh quotient u'Mv / u'v is second-order accurate in the iterates,
/// which is needed to reach the 1e-12 target for those slow cases.
inline double power_iteration(const TransitionMatrix& m, double sigma,
                              std::vector<double>* out_right = nullptr,
                              std::vector<double>* out_left = nullptr) {
    int n = m.n;
    std::vector<double> x(n, 1.0), u(n, 1.0), y(n), w(n);
    double q_prev = -1.0;
    const long long cap = 1000000;
    for (long long it = 0; it < cap; ++it) {
        for (int i = 0; i < n; ++i) {
            double s = sigma * x[i], t = sigma * u[i];
            for (int j = 0; j < n; ++j) {
                s += m.at(i, j) * x[j];
                t += m.at(j, i) * u[j];
            }
            y[i] = s;
            w[i] = t;
        }
        double uy = 0, ux = 0;
        for (int i = 0; i < n; ++i) {
            uy += u[i] * y[i];
            ux += u[i] * x[i];
        }
        double q = uy / ux;
        double ny = 0, nw = 0;
        for (int i = 0; i < n; ++i) {
            ny += y[i] * y[i];
            nw += w[i] * w[i];
        }
        ny = std::sqrt(ny);
        nw = std::sqrt(nw);
        if (ny == 0.0 || nw == 0.0) {
            if (out_right) *out_right = x;
            if (out_left) *out_left = u;
            return 0.0;  // nilpotent
        }
        for (int i = 0; i < n; ++i) {
            x[i] = y[i] / ny;
            u[i] = w[i] / nw;
        }
        if (it > 0 && std::abs(q - q_prev) <= 1e-15 * std::max(1.0, std::abs(q))) {
            if (out_right) *out_right = x;
            if (out_left) *out_left = u;
            return q;
        }
        q_prev = q;
    }
    throw NumericError("power iteration did not converge (malformed matrix?)");
}

}  // namespace detail

/// Perron root to relative tolerance ~1e-12 (nonnegative input).
inline double spectral_radius(const TransitionMatrix& m) {
    if (m.n == 0) throw ConfigError("empty matrix");
    double rs = detail::max_row_sum(m);
    if (rs == 0.0) return 0.0;
    double sigma = rs * 1e-3;
    return detail::power_iteration(m, sigma) - sigma;
}

struct PerronPair {
    double lambda;
    std::vector<double> left;
    std::vector<double> right;
};

inline PerronPair perron_pair(const TransitionMatrix& m) {
    double rs = detail::max_row_sum(m);
    double sigma = rs == 0.0 ? 1.0 : rs * 1e-3;
    PerronPair p;
    p.lambda = detail::power_iteration(m, sigma, &p.right, &p.left) - sigma;
    return p;
}

// ---------------------------------------------------------------------------
// Pressure, entropy and the pressure gradient
// ---------------------------------------------------------------------------

/// P_G(f) = log spec(A_{G,-f}); computed on the quotient matrix, which has
/// the same spectral radius as the full one.
inline double pressure(const Graph& g, const std::vector<double>& f) {
    if (static_cast<int>(f.size()) != g.num_edges())
        throw ConfigError("pressure: edge function size mismatch");
    std::vector<double> factor = detail::row_factors(f);
    return std::log(spectral_radius(quotient_matrix(g, factor)));
}

/// P_G(-t*l) = log spec(A_{G,t*l}); the basic quantity behind entropy.
inline double pressure_neg_length(const Graph& g, const LengthFunction& l, double t = 1.0) {
    std::vector<double> factor(g.num_edges());
    for (int p = 0; p < g.num_edges(); ++p) factor[p] = std::exp(-t * l[p]);
    return std::log(spectral_radius(quotient_matrix(g, factor)));
}

/**
 * Gradient of the pressure at -l with respect to the undirected-edge
 * coordinates, computed from the left/right Perron vectors of the full
 * matrix A_{G,l}: component_p = (u_e v_e + u_eb v_eb) / <u,v>.  Every
 * component is positive and the L1 norm is 1.
 */
inline std::vector<double> grad_pressure(const Graph& g, const LengthFunction& l) {
    TransitionMatrix m = transition_matrix(g, &l);
    PerronPair pp = perron_pair(m);
    double dot = 0;
    for (int i = 0; i < m.n; ++i) dot += pp.left[i] * pp.right[i];
    if (!(dot > 0)) throw NumericError("degenerate Perron eigenvectors");
    std::vector<double> grad(g.num_edges(), 0.0);
    for (int d = 0; d < m.n; ++d)
        grad[Graph::pair_of(d)] += pp.left[d] * pp.right[d] / dot;
    return grad;
}

/**
 * Entropy as the unique t > 0 with P_G(-t*l) = 0; the map t -> P_G(-t*l) is
 * strictly decreasing.  Doubling bracket, 60 bisections, then a short Newton
 * polish using the pressure gradient.
 */
inline double entropy(const Graph& g, const LengthFunction& l) {
    if (g.euler_characteristic() >= 0)
        throw ConfigError("entropy requires negative Euler characteristic");
    l.validate();
    if (l.extended) throw ConfigError("entropy requires a strict length function");
    auto gfun = [&](double t) { return pressure_neg_length(g, l, t); };
    double lo = 1.0, hi = 1.0;
    if (gfun(1.0) > 0) {
        for (int k = 0; k < 200 && gfun(hi) > 0; ++k) hi *= 2;
        if (gfun(hi) > 0) throw NumericError("entropy bracketing failed (degenerate input?)");
        lo = hi / 2;
    } else {
        for (int k = 0; k < 200 && gfun(lo) <= 0; ++k) lo /= 2;
        if (gfun(lo) <= 0) throw NumericError("entropy bracketing failed (degenerate input?)");
        hi = 2 * lo;
    }
    for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (lo + hi);
        (gfun(mid) > 0 ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int i = 0; i < 5; ++i) {
        double val = gfun(t);
        if (std::abs(val) < 1e-14) break;
        std::vector<double> gp = grad_pressure(g, l.scaled(t));
        double deriv = 0;  // d/dt P(-t*l) = -sum l_e * gp_e
        for (int p = 0; p < g.num_edges(); ++p) deriv -= l[p] * gp[p];
        double step = val / deriv;
        double t2 = t - step;
        if (t2 > lo && t2 < hi) t = t2;
    }
    return t;
}

/// h*l, which has entropy 1 up to the solver tolerance.
inline LengthFunction normalize_unit_entropy(const Graph& g, const LengthFunction& l) {
    return l.scaled(entropy(g, l));
}

}  // namespace thermograph
