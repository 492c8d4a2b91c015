#include <catch_amalgamated.hpp>

#include "thermograph/experiments.hpp"
#include "thermograph/separating.hpp"

using namespace thermograph;

namespace {
const double kLog3 = std::log(3.0);
const double kLog4 = std::log(4.0);
const double kLog5 = std::log(5.0);

SeparatedGraph barbell_sep() { return make_separated(barbell_graph(), 2); }
SeparatedGraph g22_sep() { return make_separated(double_rose_graph(2, 2), 4); }
}  // namespace

TEST_CASE("separated-graph construction") {
    SeparatedGraph sg = g22_sep();
    REQUIRE(sg.side1 == std::vector<int>{0, 1});
    REQUIRE(sg.side2 == std::vector<int>{2, 3});
    REQUIRE(sg.side1_graph.rank() == 2);
    REQUIRE(sg.sides_rank2());

    SeparatedGraph bb = barbell_sep();
    REQUIRE_FALSE(bb.sides_rank2());  // rank-1 sides, factorization-only

    // every simplex meets the bridge pair 0 or 2 times
    for (const auto& t : sg.full_cx.terms) {
        int k = detail::profile_get(t.profile, sg.bridge);
        REQUIRE((k == 0 || k == 2));
    }

    REQUIRE_THROWS_AS(make_separated(barbell_graph(), 0), ConfigError);   // loop
    REQUIRE_THROWS_AS(make_separated(theta_graph(2), 0), ConfigError);    // not separating
}

TEST_CASE("Y for the barbell is 4xy(1-x)(1-y)") {
    SeparatedGraph sg = barbell_sep();
    Rng rng(61);
    for (int k = 0; k < 200; ++k) {
        LengthFunction l = random_strict_lengths(sg.graph, rng, 0.1, 3.0);
        double x = l.u(0), y = l.u(1);
        REQUIRE(Y_separating(sg, l) ==
                Catch::Approx(4 * x * y * (1 - x) * (1 - y)).margin(1e-13));
    }
}

TEST_CASE("Y is nonnegative, vanishes when a side is at infinity, independent of the bridge") {
    SeparatedGraph sg = g22_sep();
    Rng rng(62);
    for (int k = 0; k < 50; ++k) {
        LengthFunction l = random_strict_lengths(sg.graph, rng);
        double y = Y_separating(sg, l);
        REQUIRE(y >= 0);
        LengthFunction l2 = l;
        l2.values[sg.bridge] = 9.0;
        REQUIRE(Y_separating(sg, l2) == Catch::Approx(y).margin(1e-13));
        LengthFunction lfar = l;
        lfar.extended = true;
        for (int p : sg.side1) lfar.values[p] = kInf;
        REQUIRE(Y_separating(sg, lfar) == 0.0);
    }
    LengthFunction sym = LengthFunction::constant(5, 1.2);
    REQUIRE(Y_separating(sg, sym) > 0);
}

TEST_CASE("factorization residual is at roundoff") {
    Rng rng(63);
    SECTION("barbell against the displayed polynomial") {
        SeparatedGraph sg = barbell_sep();
        for (int k = 0; k < 100; ++k) {
            LengthFunction l = random_strict_lengths(sg.graph, rng, 0.1, 3.0);
            REQUIRE(factorization_check(sg, l) < 1e-12);
            // F1, F2 are the loop factors (1-x)^2, (1-y)^2
            double x = l.u(0);
            REQUIRE(F_side(sg, 1, {l[0]}) == Catch::Approx((1 - x) * (1 - x)).margin(1e-14));
        }
    }
    SECTION("G(2,2) at 100 random points") {
        SeparatedGraph sg = g22_sep();
        for (int k = 0; k < 100; ++k)
            REQUIRE(factorization_check(sg, random_strict_lengths(sg.graph, rng)) < 1e-11);
    }
    SECTION("an infinite bridge splits F into the product") {
        SeparatedGraph sg = g22_sep();
        for (int k = 0; k < 20; ++k) {
            LengthFunction l = random_strict_lengths(sg.graph, rng);
            l.values[sg.bridge] = kInf;
            l.extended = true;
            double f = F_via_det(sg.graph, l, MatrixKind::full);
            double f1 = F_side(sg, 1, sg.side_lengths(l, 1));
            double f2 = F_side(sg, 2, sg.side_lengths(l, 2));
            REQUIRE(f == Catch::Approx(f1 * f2).margin(1e-13));
        }
    }
}

TEST_CASE("solve_bridge") {
    SeparatedGraph sg = g22_sep();
    SECTION("all loops log4: the sides have F = (3/4)^2 (5/16)") {
        double f1 = F_side(sg, 1, {kLog4, kLog4});
        REQUIRE(f1 == Catch::Approx((9.0 / 16.0) * (5.0 / 16.0)).epsilon(1e-14));
        double l0 = solve_bridge(sg, {kLog4, kLog4}, {kLog4, kLog4});
        REQUIRE(l0 > 0);
        std::vector<double> vals = {kLog4, kLog4, kLog4, kLog4, l0};
        REQUIRE(std::abs(F_via_det(sg.graph, LengthFunction::strict(vals), MatrixKind::full)) <
                1e-12);
    }
    SECTION("a side at unit entropy admits no finite bridge") {
        REQUIRE_THROWS_AS(solve_bridge(sg, {kLog3, kLog3}, {kLog4, kLog4}), NumericError);
    }
    SECTION("bridge length grows as a side approaches unit entropy") {
        double prev = -1;
        for (double d : {0.4, 0.2, 0.1, 0.05, 0.025}) {
            double l0 = solve_bridge(sg, {kLog3 + d, kLog3 + d}, {kLog4, kLog4});
            REQUIRE(l0 > prev);
            prev = l0;
        }
    }
}

TEST_CASE("escape path toward a unit-entropy side metric") {
    SeparatedGraph sg = g22_sep();
    std::vector<double> target = {kLog3, kLog3};
    std::vector<double> l2 = {kLog5, kLog5};
    CycleComplex cx = enumerate_cycles(sg.graph, MatrixKind::quotient);
    MetricPath p = escape_path_separating(sg, target, l2);

    SECTION("side-1 profile starts at log(x_i + 1)") {
        LengthFunction l0 = p.point(cx, 0.0);
        REQUIRE(l0[0] == Catch::Approx(std::log(4.0)).epsilon(1e-12));
        REQUIRE(l0[1] == Catch::Approx(std::log(4.0)).epsilon(1e-12));
        REQUIRE(l0[2] == Catch::Approx(kLog5).epsilon(1e-12));
    }
    SECTION("solved bridge matches the closed form from Y and the side F's") {
        for (double t : {0.0, 0.3, 0.6, 0.9}) {
            LengthFunction l = p.point(cx, t);
            std::vector<double> l1 = sg.side_lengths(l, 1);
            double closed = solve_bridge(sg, l1, l2);
            REQUIRE(l[sg.bridge] == Catch::Approx(closed).margin(1e-9));
        }
    }
    SECTION("bridge tends to infinity and the length stays finite") {
        EscapeSeparatingResult res = escape_separating_experiment(sg, target, l2);
        REQUIRE(res.checkpoints.back().dependent_length > 8.0);
        REQUIRE(std::isfinite(res.total));
        REQUIRE(res.total > 0);
        REQUIRE(std::abs(res.total - res.total_refined) < 1e-4);
    }
    SECTION("the bridge decay t -> exp(-2 l0) behaves like (1 - t)") {
        double rmin = kInf, rmax = 0;
        for (int k = 0; k <= 40; ++k) {
            double t = 0.5 + (1.0 - 1e-6 - 0.5) * k / 40;
            LengthFunction l = p.point(cx, t);
            double ratio = std::exp(-2 * l[sg.bridge]) / (1 - t);
            rmin = std::min(rmin, ratio);
            rmax = std::max(rmax, ratio);
        }
        REQUIRE(rmin > 0);
        REQUIRE(std::isfinite(rmax));
        REQUIRE(rmax / rmin < 1e4);
    }
    SECTION("hypothesis checks") {
        REQUIRE_THROWS_AS(escape_path_separating(sg, {kLog4, kLog4}, l2), ConfigError);
        REQUIRE_THROWS_AS(escape_path_separating(sg, target, {kLog3, kLog3}), ConfigError);
        SeparatedGraph bb = barbell_sep();
        REQUIRE_THROWS_AS(escape_path_separating(bb, {kLog3}, {kLog3}), ConfigError);
    }
}

TEST_CASE("stratum pairing identities") {
    SeparatedGraph sg = g22_sep();
    CycleComplex side1 = enumerate_cycles(sg.side1_graph, MatrixKind::full);
    CycleComplex side2 = enumerate_cycles(sg.side2_graph, MatrixKind::full);
    Rng rng(64);
    SECTION("pairing splits over the sides at bridge = infinity") {
        for (int k = 0; k < 20; ++k) {
            LengthFunction l = random_strict_lengths(sg.graph, rng);
            l.values[sg.bridge] = kInf;
            l.extended = true;
            std::vector<double> l1 = sg.side_lengths(l, 1), l2 = sg.side_lengths(l, 2);
            double lhs = pairing_volume(sg.full_cx, l);
            double rhs = F_side(sg, 2, l2) * pairing_volume(side1, LengthFunction::strict(l1)) +
                         F_side(sg, 1, l1) * pairing_volume(side2, LengthFunction::strict(l2));
            REQUIRE(lhs == Catch::Approx(rhs).margin(1e-10));
        }
    }
    SECTION("pairing is nonnegative on the unit-entropy model space") {
        // side 1 at unit entropy, side 2 at entropy <= 1
        Graph r2 = rose_graph(2);
        for (int k = 0; k < 20; ++k) {
            LengthFunction s1 = random_unit_entropy(r2, rng);
            LengthFunction s2 = random_unit_entropy(r2, rng).scaled(rng.uniform(1.0, 2.5));
            LengthFunction l = LengthFunction::make_extended(
                {s1[0], s1[1], s2[0], s2[1], kInf});
            REQUIRE(pairing_volume(sg.full_cx, l) >= -1e-10);
        }
    }
    SECTION("pairing vanishes exactly when both sides have unit entropy") {
        LengthFunction both = LengthFunction::make_extended({kLog3, kLog3, kLog3, kLog3, kInf});
        REQUIRE(std::abs(pairing_volume(sg.full_cx, both)) < 1e-9);
        LengthFunction one = LengthFunction::make_extended({kLog3, kLog3, 1.9, 1.9, kInf});
        REQUIRE(pairing_volume(sg.full_cx, one) > 1e-6);
    }
}

TEST_CASE("shortcut loop shrinks with delta") {
    SeparatedGraph sg = g22_sep();
    auto rows = shortcut_experiment(sg, {1e-1, 1e-2});
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0].total > rows[1].total);
    REQUIRE(rows[1].total > 0);
    // the reachable side-2 cap grows as delta shrinks
    REQUIRE(rows[1].t_cap > rows[0].t_cap);
    // per-segment diagnostic: linear side-2 motion is cheap near unit entropy
    for (const auto& r : rows) {
        REQUIRE(r.len_grow < 1.0);
        REQUIRE(r.total == Catch::Approx(r.len_grow + r.len_change + r.len_return));
    }
    REQUIRE_THROWS_AS(shortcut_experiment(sg, {0.0}), ConfigError);
    SeparatedGraph bb = barbell_sep();
    REQUIRE_THROWS_AS(shortcut_experiment(bb, {0.1}), ConfigError);
}
