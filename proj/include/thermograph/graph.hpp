#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "thermograph/util.hpp"

namespace thermograph {

/**
 * Finite graph in the Serre convention: every undirected edge is a pair of
 * directed edges swapped by a fixed-point-free involution.
 *
 * Undirected edges (pairs) are indexed 0..num_edges()-1.  Directed edge d in
 * [0, 2*num_edges()) refers to pair d/2; even d is the positive orientation.
 * The involution is d ^ 1, so bar(bar(d)) == d and bar(d) != d hold by
 * construction.
 */
struct Graph {
    std::string name = "g";
    int nv = 0;
    std::vector<std::pair<int, int>> edges;  // (origin, terminus) for E+

    int num_vertices() const { return nv; }
    int num_edges() const { return static_cast<int>(edges.size()); }
    int num_directed() const { return 2 * num_edges(); }

    int origin(int d) const { return (d & 1) ? edges[d >> 1].second : edges[d >> 1].first; }
    int terminus(int d) const { return (d & 1) ? edges[d >> 1].first : edges[d >> 1].second; }
    static int bar(int d) { return d ^ 1; }
    static int pair_of(int d) { return d >> 1; }
    bool is_loop(int p) const { return edges[p].first == edges[p].second; }

    /// Loops count twice.
    int valence(int v) const {
        int k = 0;
        for (const auto& [a, b] : edges) {
            if (a == v) ++k;
            if (b == v) ++k;
        }
        return k;
    }

    int euler_characteristic() const { return nv - num_edges(); }
    int rank() const { return 1 - euler_characteristic(); }

    bool connected() const {
        if (nv == 0) return false;
        std::vector<char> seen(nv, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (const auto& [a, b] : edges) {
                if (a == v && !seen[b]) { seen[b] = 1; stack.push_back(b); }
                if (b == v && !seen[a]) { seen[a] = 1; stack.push_back(a); }
            }
        }
        for (char s : seen)
            if (!s) return false;
        return true;
    }

    /// Strict validation is the default everywhere; rank-1 pieces used by the
    /// strata machinery are built with strict=false.
    void validate(bool strict = true) const {
        if (nv <= 0) throw ConfigError("graph has no vertices");
        if (num_edges() > 32) throw ConfigError("graph exceeds the 64-directed-edge cap");
        for (const auto& [a, b] : edges)
            if (a < 0 || a >= nv || b < 0 || b >= nv)
                throw ConfigError("edge endpoint out of range");
        if (!connected()) throw ConfigError("graph is not connected");
        if (!strict) return;
        if (euler_characteristic() >= 0)
            throw ConfigError("graph must have negative Euler characteristic");
        for (int v = 0; v < nv; ++v)
            if (valence(v) < 3)
                throw ConfigError("vertex " + std::to_string(v) + " has valence < 3");
    }
};

inline Graph build_graph(int num_vertices, std::vector<std::pair<int, int>> undirected_edges,
                         std::string name = "g", bool strict = true) {
    Graph g;
    g.name = std::move(name);
    g.nv = num_vertices;
    g.edges = std::move(undirected_edges);
    g.validate(strict);
    return g;
}

// ---------------------------------------------------------------------------
// Standard families (canonical edge orderings are documented in the README
// and fixed so that CSV outputs and matrix indices are reproducible):
//   rose r       : vertex 0; loops 0..r-1.
//   theta r      : vertices 0,1; r+1 parallel edges 0->1, indexed 0..r.
//   barbell      : vertices 0,1; loop 0 at v0, loop 1 at v1, bridge 2 (0->1).
//   double_rose  : G(n1,n2): vertices 0,1; loops 0..n1-1 at v0, loops
//                  n1..n1+n2-1 at v1, bridge n1+n2 (0->1).
//   rose_theta r : vertices 0,1; loops 0..r-3 at v0; 3 edges r-2,r-1,r (0->1).
// ---------------------------------------------------------------------------

inline Graph rose_graph(int r, bool strict = true) {
    if (r < 1) throw ConfigError("rose requires r >= 1");
    if (strict && r < 2) throw ConfigError("rose requires r >= 2");
    std::vector<std::pair<int, int>> e(r, {0, 0});
    return build_graph(1, std::move(e), "rose" + std::to_string(r), strict);
}

inline Graph theta_graph(int r) {
    if (r < 2) throw ConfigError("theta requires r >= 2");
    std::vector<std::pair<int, int>> e(r + 1, {0, 1});
    return build_graph(2, std::move(e), "theta" + std::to_string(r));
}

inline Graph barbell_graph() {
    return build_graph(2, {{0, 0}, {1, 1}, {0, 1}}, "barbell");
}

inline Graph double_rose_graph(int n1, int n2) {
    if (n1 < 1 || n2 < 1) throw ConfigError("G(n1,n2) requires n1,n2 >= 1");
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n1; ++i) e.push_back({0, 0});
    for (int i = 0; i < n2; ++i) e.push_back({1, 1});
    e.push_back({0, 1});
    return build_graph(2, std::move(e), "g" + std::to_string(n1) + "_" + std::to_string(n2));
}

inline Graph rose_theta_graph(int r) {
    if (r <= 2) throw ConfigError("rose_theta requires r > 2");
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < r - 2; ++i) e.push_back({0, 0});
    for (int i = 0; i < 3; ++i) e.push_back({0, 1});
    return build_graph(2, std::move(e), "rose_theta" + std::to_string(r));
}

inline Graph standard_graph(const std::string& family, const std::vector<int>& params) {
    auto need = [&](size_t n) {
        if (params.size() != n)
            throw ConfigError("family '" + family + "' expects " + std::to_string(n) +
                              " parameter(s)");
    };
    if (family == "rose") { need(1); return rose_graph(params[0]); }
    if (family == "theta") { need(1); return theta_graph(params[0]); }
    if (family == "barbell") { need(0); return barbell_graph(); }
    if (family == "g" || family == "double_rose") { need(2); return double_rose_graph(params[0], params[1]); }
    if (family == "rose_theta") { need(1); return rose_theta_graph(params[0]); }
    throw ConfigError("unknown graph family '" + family + "'");
}

// ---------------------------------------------------------------------------
// Length functions
// ---------------------------------------------------------------------------

/**
 * Edge lengths, stored once per undirected pair (so l(e) = l(bar e) holds by
 * construction).  Strict mode requires every value in (0, inf); extended mode
 * admits 0 and inf, which is how degenerate/stratum configurations are
 * represented.  All F-evaluations work in the coordinate u_e = exp(-l_e),
 * so l = inf maps to u = 0 and l = 0 to u = 1 without overflow.
 */
struct LengthFunction {
    std::vector<double> values;
    bool extended = false;

    static LengthFunction strict(std::vector<double> v) {
        LengthFunction l{std::move(v), false};
        l.validate();
        return l;
    }
    static LengthFunction make_extended(std::vector<double> v) {
        LengthFunction l{std::move(v), true};
        l.validate();
        return l;
    }
    static LengthFunction constant(int n, double c) {
        return strict(std::vector<double>(static_cast<size_t>(n), c));
    }

    void validate() const {
        for (double x : values) {
            if (std::isnan(x)) throw ConfigError("length is NaN");
            if (extended) {
                if (x < 0) throw ConfigError("extended length must be >= 0");
            } else {
                if (!(x > 0) || !std::isfinite(x))
                    throw ConfigError("strict length must be finite and > 0");
            }
        }
    }

    int size() const { return static_cast<int>(values.size()); }
    double operator[](int p) const { return values[p]; }
    double u(int p) const { return std::exp(-values[p]); }
    std::vector<double> u_all() const {
        std::vector<double> r(values.size());
        for (size_t i = 0; i < values.size(); ++i) r[i] = std::exp(-values[i]);
        return r;
    }

    /// Edges with finite positive length.
    std::vector<int> support() const {
        std::vector<int> s;
        for (int i = 0; i < size(); ++i)
            if (values[i] > 0 && std::isfinite(values[i])) s.push_back(i);
        return s;
    }

    double volume() const {
        double v = 0;
        for (double x : values) v += x;
        return v;
    }

    LengthFunction scaled(double a) const {
        LengthFunction r = *this;
        for (double& x : r.values) x *= a;
        return r;
    }
};

// ---------------------------------------------------------------------------
// Collapses
// ---------------------------------------------------------------------------

/**
 * Collapse of a forest.  edge_image[p] is the target pair id for surviving
 * edges and -1 - (target vertex id) for collapsed ones.
 */
struct CollapseMap {
    Graph source;
    Graph target;
    std::vector<int> edge_image;

    bool collapsed(int p) const { return edge_image[p] < 0; }
    int image_edge(int p) const { return edge_image[p]; }
    int image_vertex(int p) const { return -1 - edge_image[p]; }
};

inline CollapseMap collapse(const Graph& g, const std::vector<int>& forest,
                            bool strict_target = true) {
    std::vector<char> in_forest(g.num_edges(), 0);
    for (int p : forest) {
        if (p < 0 || p >= g.num_edges()) throw ConfigError("forest edge out of range");
        if (in_forest[p]) throw ConfigError("forest lists an edge twice");
        in_forest[p] = 1;
    }
    // Union-find; a forest edge joining already-joined vertices closes a cycle.
    std::vector<int> parent(g.nv);
    for (int v = 0; v < g.nv; ++v) parent[v] = v;
    std::function<int(int)> find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (int p : forest) {
        int a = find(g.edges[p].first), b = find(g.edges[p].second);
        if (a == b) throw ConfigError("subset to collapse contains a cycle");
        parent[a] = b;
    }
    // Target vertices: classes indexed by order of their smallest member.
    std::vector<int> vmap(g.nv, -1);
    int nv_t = 0;
    for (int v = 0; v < g.nv; ++v) {
        int r = find(v);
        if (vmap[r] < 0) vmap[r] = nv_t++;
    }
    Graph target;
    target.name = g.name + "_collapsed";
    target.nv = nv_t;
    std::vector<int> image(g.num_edges());
    for (int p = 0; p < g.num_edges(); ++p) {
        if (in_forest[p]) {
            image[p] = -1 - vmap[find(g.edges[p].first)];
        } else {
            image[p] = static_cast<int>(target.edges.size());
            target.edges.push_back({vmap[find(g.edges[p].first)], vmap[find(g.edges[p].second)]});
        }
    }
    target.validate(strict_target);
    return CollapseMap{g, std::move(target), std::move(image)};
}

/// Pulled-back length: collapsed edges get 0, surviving edges inherit.
inline LengthFunction pullback_length(const CollapseMap& c, const LengthFunction& l0) {
    if (l0.size() != c.target.num_edges())
        throw ConfigError("length function does not match collapse target");
    std::vector<double> v(c.source.num_edges(), 0.0);
    for (int p = 0; p < c.source.num_edges(); ++p)
        if (!c.collapsed(p)) v[p] = l0[c.image_edge(p)];
    return LengthFunction::make_extended(std::move(v));
}

// ---------------------------------------------------------------------------
// Graph file format (line oriented):
//   graph <name>
//   v <id>
//   e <id> <origin> <terminus>
//   len <edge-id> <decimal|inf>        (optional)
// Emitted files use contiguous 0-based ids and round-trip bit-exactly.
// ---------------------------------------------------------------------------

inline std::string emit_graph_file(const Graph& g, const LengthFunction* len = nullptr) {
    std::ostringstream os;
    os << "graph " << g.name << "\n";
    for (int v = 0; v < g.nv; ++v) os << "v " << v << "\n";
    for (int p = 0; p < g.num_edges(); ++p)
        os << "e " << p << " " << g.edges[p].first << " " << g.edges[p].second << "\n";
    if (len) {
        for (int p = 0; p < len->size(); ++p) {
            os << "len " << p << " ";
            double x = len->values[p];
            os << (std::isinf(x) ? std::string("inf") : fmt17(x)) << "\n";
        }
    }
    return os.str();
}

struct ParsedGraphFile {
    Graph graph;
    std::optional<LengthFunction> lengths;
};

inline ParsedGraphFile parse_graph_file(const std::string& text, bool strict = true) {
    std::istringstream is(text);
    std::string line;
    std::string name = "g";
    std::vector<long long> vertex_ids;
    std::vector<std::tuple<long long, long long, long long>> edge_lines;
    std::vector<std::pair<long long, double>> len_lines;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        auto bad = [&](const std::string& why) {
            throw ConfigError("graph file line " + std::to_string(lineno) + ": " + why);
        };
        if (tag == "graph") {
            if (!(ls >> name)) bad("missing graph name");
        } else if (tag == "v") {
            long long id;
            if (!(ls >> id)) bad("malformed vertex line");
            vertex_ids.push_back(id);
        } else if (tag == "e") {
            long long id, a, b;
            if (!(ls >> id >> a >> b)) bad("malformed edge line");
            edge_lines.emplace_back(id, a, b);
        } else if (tag == "len") {
            long long id;
            std::string val;
            if (!(ls >> id >> val)) bad("malformed len line");
            double x;
            if (val == "inf") {
                x = kInf;
            } else {
                try {
                    size_t used = 0;
                    x = std::stod(val, &used);
                    if (used != val.size()) bad("malformed length value");
                } catch (const std::exception&) {
                    throw ConfigError("graph file line " + std::to_string(lineno) +
                                      ": malformed length value");
                }
            }
            len_lines.emplace_back(id, x);
        } else {
            bad("unknown tag '" + tag + "'");
        }
    }
    // Ids are remapped by order of appearance; emitted files are already
    // contiguous so the remap is the identity for them.
    std::vector<std::pair<long long, int>> vorder;
    for (size_t i = 0; i < vertex_ids.size(); ++i) vorder.push_back({vertex_ids[i], (int)i});
    auto vindex = [&](long long id) {
        for (auto& [vid, idx] : vorder)
            if (vid == id) return idx;
        throw ConfigError("graph file references unknown vertex " + std::to_string(id));
    };
    Graph g;
    g.name = name;
    g.nv = static_cast<int>(vertex_ids.size());
    std::vector<long long> edge_ids;
    for (auto& [id, a, b] : edge_lines) {
        edge_ids.push_back(id);
        g.edges.push_back({vindex(a), vindex(b)});
    }
    g.validate(strict);
    ParsedGraphFile out{std::move(g), std::nullopt};
    if (!len_lines.empty()) {
        std::vector<double> v(edge_ids.size(), kInf);
        std::vector<char> set(edge_ids.size(), 0);
        for (auto& [id, x] : len_lines) {
            int idx = -1;
            for (size_t i = 0; i < edge_ids.size(); ++i)
                if (edge_ids[i] == id) idx = static_cast<int>(i);
            if (idx < 0) throw ConfigError("len line references unknown edge " + std::to_string(id));
            v[idx] = x;
            set[idx] = 1;
        }
        for (char s : set)
            if (!s) throw ConfigError("len lines must cover all edges or none");
        bool ext = false;
        for (double x : v)
            if (!(x > 0) || std::isinf(x)) ext = true;
        out.lengths = ext ? LengthFunction::make_extended(std::move(v))
                          : LengthFunction::strict(std::move(v));
    }
    return out;
}

}  // namespace thermograph
