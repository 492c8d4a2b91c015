#include <catch_amalgamated.hpp>

#include "thermograph/experiments.hpp"
#include "thermograph/spectral.hpp"

using namespace thermograph;

namespace {

// Independent oracle: based-circuit counts via exact integer powers of the
// unweighted transition matrix (the trace counts based circuits of a fixed
// combinatorial length).
std::vector<double> circuit_counts(const Graph& g, int nmax) {
    TransitionMatrix a = transition_matrix(g);
    int n = a.n;
    std::vector<double> power(a.a), base(a.a), next(static_cast<size_t>(n) * n);
    std::vector<double> traces;
    for (int k = 1; k <= nmax; ++k) {
        double tr = 0;
        for (int i = 0; i < n; ++i) tr += power[static_cast<size_t>(i) * n + i];
        traces.push_back(tr);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0;
                for (int l = 0; l < n; ++l)
                    s += power[static_cast<size_t>(i) * n + l] * base[static_cast<size_t>(l) * n + j];
                next[static_cast<size_t>(i) * n + j] = s;
            }
        power.swap(next);
    }
    return traces;
}

}  // namespace

TEST_CASE("full transition matrices match direct enumeration") {
    SECTION("barbell: the displayed 6x6 matrix") {
        // rows/columns ordered a, abar, b, bbar, c, cbar
        const double expected[6][6] = {{1, 0, 0, 0, 1, 0}, {0, 1, 0, 0, 1, 0},
                                       {0, 0, 1, 0, 0, 1}, {0, 0, 0, 1, 0, 1},
                                       {0, 0, 1, 1, 0, 0}, {1, 1, 0, 0, 0, 0}};
        TransitionMatrix m = transition_matrix(barbell_graph());
        REQUIRE(m.n == 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) REQUIRE(m.at(i, j) == expected[i][j]);
    }
    SECTION("rose 2: 4x4 with row sums 3") {
        TransitionMatrix m = transition_matrix(rose_graph(2));
        REQUIRE(m.n == 4);
        for (int i = 0; i < 4; ++i) {
            double s = 0;
            for (int j = 0; j < 4; ++j) s += m.at(i, j);
            REQUIRE(s == 3.0);
            REQUIRE(m.at(i, Graph::bar(i)) == 0.0);
        }
    }
    SECTION("theta 2: 6x6 with row sums 2") {
        TransitionMatrix m = transition_matrix(theta_graph(2));
        REQUIRE(m.n == 6);
        for (int i = 0; i < 6; ++i) {
            double s = 0;
            for (int j = 0; j < 6; ++j) s += m.at(i, j);
            REQUIRE(s == 2.0);
        }
    }
    SECTION("weighted rows carry exp(-f) of the row edge") {
        LengthFunction l = LengthFunction::strict({0.5, 1.5, 2.5});
        TransitionMatrix m = transition_matrix(barbell_graph(), &l);
        REQUIRE(m.at(0, 0) == Catch::Approx(std::exp(-0.5)).epsilon(1e-15));
        REQUIRE(m.at(4, 2) == Catch::Approx(std::exp(-2.5)).epsilon(1e-15));
        REQUIRE(m.irreducible());
    }
}

TEST_CASE("quotient matrices follow the involution/loop-merge recipes") {
    SECTION("rose 2: [[x,2x],[2y,y]]") {
        LengthFunction l = LengthFunction::strict({0.7, 1.3});
        TransitionMatrix q = quotient_transition_matrix(rose_graph(2), &l);
        double x = std::exp(-0.7), y = std::exp(-1.3);
        REQUIRE(q.n == 2);
        REQUIRE(q.at(0, 0) == Catch::Approx(x).epsilon(1e-15));
        REQUIRE(q.at(0, 1) == Catch::Approx(2 * x).epsilon(1e-15));
        REQUIRE(q.at(1, 0) == Catch::Approx(2 * y).epsilon(1e-15));
        REQUIRE(q.at(1, 1) == Catch::Approx(y).epsilon(1e-15));
    }
    SECTION("barbell: the displayed 4x4 quotient") {
        // rows/columns ordered a-pair, b-pair, c, cbar
        const double expected[4][4] = {{1, 0, 1, 0}, {0, 1, 0, 1}, {0, 2, 0, 0}, {2, 0, 0, 0}};
        TransitionMatrix q = quotient_transition_matrix(barbell_graph());
        REQUIRE(q.n == 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) REQUIRE(q.at(i, j) == expected[i][j]);
    }
    SECTION("theta r: zero diagonal, ones elsewhere") {
        for (int r = 2; r <= 4; ++r) {
            TransitionMatrix q = quotient_transition_matrix(theta_graph(r));
            REQUIRE(q.n == r + 1);
            for (int i = 0; i < q.n; ++i)
                for (int j = 0; j < q.n; ++j) REQUIRE(q.at(i, j) == (i == j ? 0.0 : 1.0));
        }
    }
}

TEST_CASE("spectral radius of standard matrices") {
    SECTION("rose r at f = 0 gives 2r - 1") {
        for (int r = 2; r <= 6; ++r) {
            double s = spectral_radius(transition_matrix(rose_graph(r)));
            REQUIRE(s == Catch::Approx(2.0 * r - 1.0).epsilon(1e-12));
        }
    }
    SECTION("1x1 matrix") {
        TransitionMatrix m;
        m.n = 1;
        m.a = {0.37};
        m.row_pair = {0};
        m.row_dir = {0};
        REQUIRE(spectral_radius(m) == Catch::Approx(0.37).epsilon(1e-13));
    }
    SECTION("theta 2 at f = 0 gives 2, matching circuit growth") {
        // theta circuits alternate sides, so only even lengths occur
        auto traces = circuit_counts(theta_graph(2), 30);
        REQUIRE(traces[28] == 0.0);
        double growth = std::sqrt(traces[29] / traces[27]);
        REQUIRE(growth == Catch::Approx(2.0).epsilon(1e-8));
        double s = spectral_radius(transition_matrix(theta_graph(2)));
        REQUIRE(s == Catch::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("pressure values") {
    Graph r2 = rose_graph(2);
    std::vector<double> zero(2, 0.0);
    REQUIRE(pressure(r2, zero) == Catch::Approx(std::log(3.0)).epsilon(1e-12));

    std::vector<double> neg_log3(2, -std::log(3.0));
    REQUIRE(std::abs(pressure(r2, neg_log3)) < 1e-12);

    Graph th = theta_graph(2);
    std::vector<double> neg_log2(3, -std::log(2.0));
    REQUIRE(std::abs(pressure(th, neg_log2)) < 1e-12);
}

TEST_CASE("entropy values and normalization") {
    SECTION("rose r at One: log(2r - 1)") {
        for (int r = 2; r <= 6; ++r) {
            Graph g = rose_graph(r);
            double h = entropy(g, LengthFunction::constant(r, 1.0));
            REQUIRE(h == Catch::Approx(std::log(2.0 * r - 1.0)).epsilon(1e-12));
        }
    }
    SECTION("rose 2 at log3 * One has unit entropy") {
        Graph g = rose_graph(2);
        double h = entropy(g, LengthFunction::constant(2, std::log(3.0)));
        REQUIRE(h == Catch::Approx(1.0).epsilon(1e-11));
    }
    SECTION("theta 2 at log2 * One has unit entropy (circuit-count oracle)") {
        // with equal edge lengths log 2 the circuit count of combinatorial
        // length n is ~2^n (even n only), so the length-t count grows like e^t
        auto traces = circuit_counts(theta_graph(2), 30);
        REQUIRE(std::sqrt(traces[29] / traces[27]) == Catch::Approx(2.0).epsilon(1e-8));
        Graph g = theta_graph(2);
        double h = entropy(g, LengthFunction::constant(3, std::log(2.0)));
        REQUIRE(h == Catch::Approx(1.0).epsilon(1e-11));
    }
    SECTION("normalization is idempotent and kills the pressure") {
        Graph g = rose_graph(2);
        LengthFunction n1 = normalize_unit_entropy(g, LengthFunction::constant(2, 1.0));
        REQUIRE(n1[0] == Catch::Approx(std::log(3.0)).epsilon(1e-11));
        LengthFunction n2 = normalize_unit_entropy(g, n1);
        REQUIRE(n2[0] == Catch::Approx(n1[0]).epsilon(1e-9));

        Graph bb = barbell_graph();
        for (double t : {0.2, 0.7, 1.9}) {
            LengthFunction l = LengthFunction::strict({std::log(3.0), std::log(3.0), t});
            LengthFunction lhat = normalize_unit_entropy(bb, l);
            REQUIRE(std::abs(pressure_neg_length(bb, lhat)) < 1e-10);
        }
    }
    SECTION("error paths") {
        REQUIRE_THROWS_AS(entropy(rose_graph(2), LengthFunction::make_extended({1.0, kInf})),
                          ConfigError);
    }
}

TEST_CASE("pressure gradient: symmetry, positivity, norm, finite differences") {
    Graph g = rose_graph(2);
    LengthFunction l = LengthFunction::constant(2, std::log(3.0));
    std::vector<double> gp = grad_pressure(g, l);
    REQUIRE(gp[0] == Catch::Approx(0.5).epsilon(1e-10));
    REQUIRE(gp[1] == Catch::Approx(0.5).epsilon(1e-10));

    Rng rng(20240817);
    for (const Graph& gg : {rose_graph(3), theta_graph(2), barbell_graph()}) {
        LengthFunction ll = random_strict_lengths(gg, rng, 0.6, 2.0);
        std::vector<double> grad = grad_pressure(gg, ll);
        double l1 = 0;
        for (double x : grad) {
            REQUIRE(x > 0);
            l1 += x;
        }
        REQUIRE(l1 == Catch::Approx(1.0).epsilon(1e-9));
        const double step = 1e-6;
        for (int p = 0; p < gg.num_edges(); ++p) {
            LengthFunction lp = ll, lm = ll;
            lp.values[p] += step;
            lm.values[p] -= step;
            double fd = (pressure_neg_length(gg, lp) - pressure_neg_length(gg, lm)) / (2 * step);
            REQUIRE(std::abs(fd + grad[p]) < 1e-6);
        }
    }
}

TEST_CASE("quotient and full matrices share their spectral radius") {
    Rng rng(7);
    for (const Graph& g : {rose_graph(4), theta_graph(3), barbell_graph(),
                           double_rose_graph(2, 2), rose_theta_graph(4)}) {
        for (int k = 0; k < 10; ++k) {
            LengthFunction l = random_strict_lengths(g, rng);
            double sf = spectral_radius(transition_matrix(g, &l));
            double sq = spectral_radius(quotient_transition_matrix(g, &l));
            REQUIRE(std::abs(sf - sq) < 1e-10);
        }
    }
}
