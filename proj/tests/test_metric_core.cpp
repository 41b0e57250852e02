#include "doctest.h"

#include <cmath>
#include <functional>

#include "coarsekit/json_io.hpp"
#include "coarsekit/metric_core.hpp"
#include "helpers.hpp"

using namespace coarsekit;

namespace {

FiniteMetricSpace line(std::vector<double> coords) {
    return FiniteMetricSpace::from_line("line", std::move(coords));
}

}  // namespace

TEST_CASE("c_components on a line with a gap") {
    const auto space = line({0, 1, 2, 10});
    auto blocks = c_components(space, 1.0);
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0] == std::vector<int>{0, 1, 2});
    CHECK(blocks[1] == std::vector<int>{3});

    CHECK(c_components(space, 0.5).size() == 4);
    CHECK(c_components(space, 8.0).size() == 1);
}

TEST_CASE("c_components refine as the scale grows") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto space = testing::random_rational_space(rng, 3 + static_cast<int>(rng() % 8));
        const double c1 = 0.3 + 0.1 * static_cast<double>(rng() % 30);
        const double c2 = c1 + 0.1 * static_cast<double>(rng() % 20);
        const auto fine = c_components(space, c1);
        const auto coarse = c_components(space, c2);
        std::vector<int> coarse_of(space.size());
        for (std::size_t b = 0; b < coarse.size(); ++b)
            for (int v : coarse[b]) coarse_of[v] = static_cast<int>(b);
        for (const auto& block : fine)
            for (int v : block) CHECK(coarse_of[v] == coarse_of[block[0]]);
    }
}

TEST_CASE("is_c_geodesic") {
    CHECK(is_c_geodesic(line({0, 1, 2, 3}), 1.0));
    CHECK_FALSE(is_c_geodesic(line({0, 2}), 1.0));
    CHECK(is_c_geodesic(line({0, 1, 3}), 2.0));
}

TEST_CASE("ultrametrize on small examples") {
    // d(a,b)=1, d(b,c)=1, d(a,c)=2.
    FiniteMetricSpace space("abc", {"a", "b", "c"},
                            {0, 1, 2, 1, 0, 1, 2, 1, 0});
    const auto u = ultrametrize(space);
    CHECK(u.dist(0, 2) == doctest::Approx(1.0));

    // Already ultrametric: fixed point.
    FiniteMetricSpace um("um", {"a", "b", "c"}, {0, 1, 2, 1, 0, 2, 2, 2, 0});
    const auto v = ultrametrize(um);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(v.dist(i, j) == um.dist(i, j));
}

TEST_CASE("ultrametrize equals the brute-force minimax oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 6);
        const auto space = testing::random_rational_space(rng, n);
        const auto u = ultrametrize(space);
        const auto oracle = testing::brute_minimax(space);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                CHECK(u.exact_dist(i, j) == oracle[static_cast<std::size_t>(i) * n + j]);
            }
        // Idempotent, pointwise below, and exactly ultrametric.
        const auto uu = ultrametrize(u);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                CHECK(uu.exact_dist(i, j) == u.exact_dist(i, j));
                CHECK(u.exact_dist(i, j) <= space.exact_dist(i, j));
                for (int k = 0; k < n; ++k)
                    CHECK(u.exact_dist(i, k) <=
                          std::max(u.exact_dist(i, j), u.exact_dist(j, k)));
            }
    }
}

TEST_CASE("chain diameter profile") {
    const auto space = line({0, 1, 2, 10});
    CHECK(chain_diameter_profile(space, 1.0) == doctest::Approx(2.0));
    CHECK(chain_diameter_profile(space, 0.5) == doctest::Approx(0.0));

    FiniteMetricSpace um("um", {"a", "b", "c"}, {0, 1, 2, 1, 0, 2, 2, 2, 0});
    CHECK(chain_diameter_profile(um, 1.0) <= 1.0);
}

TEST_CASE("scale_graph") {
    const auto space = line({0, 0.6, 1.2});
    const auto res = scale_graph(space, 1.0);
    const int q0 = res.quotient[0];
    const int q2 = res.quotient[2];
    CHECK(res.graph.dist(q0, q2) == doctest::Approx(2.0));

    // Hausdorff collapse of a distance-zero pair.
    FiniteMetricSpace pseudo("pseudo", {"a", "b"}, {0, 0, 0, 0});
    const auto collapsed = scale_graph(pseudo, 1.0);
    CHECK(collapsed.graph.size() == 1);

    // Complete admissibility: all hop distances are one edge.
    FiniteMetricSpace tri("tri", {"a", "b", "c"}, {0, 1, 1, 1, 0, 1, 1, 1, 0});
    const auto k3 = scale_graph(tri, 1.0);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != j) CHECK(k3.graph.dist(i, j) == doctest::Approx(1.0));

    CHECK_THROWS_AS(scale_graph(line({0, 10}), 1.0), NotCoarselyConnected);

    // d_c dominates the original metric.
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rnd = testing::random_rational_space(rng, 5);
        const double c = rnd.diameter();
        const auto sg = scale_graph(rnd, c);
        for (std::size_t i = 0; i < rnd.size(); ++i)
            for (std::size_t j = 0; j < rnd.size(); ++j)
                CHECK(sg.graph.dist(sg.quotient[i], sg.quotient[j]) >= rnd.dist(i, j) - kTol);
    }
}

TEST_CASE("empirical controls") {
    auto domain = std::make_shared<FiniteMetricSpace>(line({-3, -2, -1, 0, 1, 2, 3}));
    std::vector<double> doubled;
    for (double x : {-3, -2, -1, 0, 1, 2, 3}) doubled.push_back(2 * x);
    auto codomain = std::make_shared<FiniteMetricSpace>(line(doubled));

    MapSample dbl{domain, codomain, {0, 1, 2, 3, 4, 5, 6}};
    const auto controls = empirical_controls(dbl);
    // n -> 2n: the upper control sits at 2t on every breakpoint.
    for (const auto& [t, v] : controls.upper.breakpoints) CHECK(v == doctest::Approx(2 * t));
    for (const auto& [t, v] : controls.lower.breakpoints) CHECK(v == doctest::Approx(2 * t));
    // Values are nondecreasing along the breakpoints.
    for (std::size_t i = 1; i < controls.upper.breakpoints.size(); ++i) {
        CHECK(controls.upper.breakpoints[i].second + kTol >=
              controls.upper.breakpoints[i - 1].second);
        CHECK(controls.lower.breakpoints[i].second + kTol >=
              controls.lower.breakpoints[i - 1].second);
    }

    // Identity on any space.
    MapSample id{domain, domain, {0, 1, 2, 3, 4, 5, 6}};
    const auto idc = empirical_controls(id);
    CHECK(idc.upper.breakpoints.back().second == doctest::Approx(domain->diameter()));

    // Constant map: upper identically zero.
    MapSample constant{domain, codomain, {3, 3, 3, 3, 3, 3, 3}};
    const auto cc = empirical_controls(constant);
    for (const auto& [t, v] : cc.upper.breakpoints) CHECK(v == doctest::Approx(0.0));

    // Envelope property on random maps.
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto dom = std::make_shared<FiniteMetricSpace>(testing::random_rational_space(rng, 6));
        auto cod = std::make_shared<FiniteMetricSpace>(testing::random_rational_space(rng, 5));
        MapSample f{dom, cod, {}};
        f.image.resize(dom->size());
        for (auto& v : f.image) v = static_cast<int>(rng() % cod->size());
        const auto ctl = empirical_controls(f);
        for (std::size_t i = 0; i < dom->size(); ++i)
            for (std::size_t j = 0; j < dom->size(); ++j) {
                const double dx = dom->dist(i, j);
                const double dy = cod->dist(f.image[i], f.image[j]);
                CHECK(ctl.lower.eval(dx) <= dy + kTol);
                CHECK(ctl.upper.eval(dx) + kTol >= dy);
            }
    }
}

TEST_CASE("map closeness") {
    auto domain = std::make_shared<FiniteMetricSpace>(line({0, 1, 2, 3, 4}));
    MapSample f{domain, domain, {0, 1, 2, 3, 4}};
    CHECK(map_closeness(f, f) == doctest::Approx(0.0));

    MapSample shift{domain, domain, {1, 2, 3, 4, 4}};
    CHECK(map_closeness(f, shift) == doctest::Approx(1.0));

    auto other = std::make_shared<FiniteMetricSpace>(line({0, 1}));
    MapSample g{other, other, {0, 1}};
    CHECK_THROWS_AS(map_closeness(f, g), DomainMismatch);

    // Brute-force agreement on random pairs.
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        auto dom = std::make_shared<FiniteMetricSpace>(testing::random_rational_space(rng, 6));
        auto cod = std::make_shared<FiniteMetricSpace>(testing::random_rational_space(rng, 6));
        MapSample a{dom, cod, {}};
        MapSample b{dom, cod, {}};
        a.image.resize(6);
        b.image.resize(6);
        for (int i = 0; i < 6; ++i) {
            a.image[i] = static_cast<int>(rng() % 6);
            b.image[i] = static_cast<int>(rng() % 6);
        }
        double expected = 0;
        for (int i = 0; i < 6; ++i)
            expected = std::max(expected, cod->dist(a.image[i], b.image[i]));
        CHECK(map_closeness(a, b) == doctest::Approx(expected));
    }
}

TEST_CASE("asymptotic dimension witnesses") {
    const auto space = line({0, 1, 2, 3});

    AsdimWitness whole;
    whole.r = 100.0;
    whole.families = {{{0, 1, 2, 3}}};
    CHECK(verify_asdim_witness(space, whole).ok);

    AsdimWitness split;
    split.r = 2.0;
    split.families = {{{0, 1}, {2, 3}}};
    const auto check = verify_asdim_witness(space, split);
    CHECK_FALSE(check.ok);  // the pieces are only 1 apart

    AsdimWitness bad;
    bad.r = 1.0;
    bad.families = {{{0, 1}, {1, 2, 3}}};
    CHECK_THROWS_AS(verify_asdim_witness(space, bad), NotAPartition);

    // Ultrametric balls form a valid one-family witness at any separation
    // below the gap.
    FiniteMetricSpace um("um", {"a", "b", "c", "d"},
                         {0, 1, 3, 3, 1, 0, 3, 3, 3, 3, 0, 2, 3, 3, 2, 0});
    AsdimWitness balls;
    balls.r = 2.0;
    balls.families = {{{0, 1}, {2, 3}}};
    const auto ub = verify_asdim_witness(um, balls);
    CHECK(ub.ok);
    CHECK(ub.max_piece_diameter == doctest::Approx(2.0));
}

TEST_CASE("space files preserve exact tables") {
    std::mt19937_64 rng(71);
    const auto space = testing::random_rational_space(rng, 6);
    const auto j = space_to_json(space);
    const auto back = space_from_json(j);
    REQUIRE(back.has_exact());
    for (std::size_t a = 0; a < space.size(); ++a)
        for (std::size_t b = 0; b < space.size(); ++b)
            CHECK(back.exact_dist(a, b) == space.exact_dist(a, b));

    // Graph metrics resolve shortest paths exactly.
    const auto graph = space_from_json(json::parse(R"({
        "label": "tri",
        "points": ["a", "b", "c"],
        "metric": {"kind": "graph", "edges": [[0, 1, 1], [1, 2, "1/2"], [0, 2, 4]]}
    })"));
    CHECK(graph.exact_dist(0, 2) == Rational(3, 2));
}

TEST_CASE("empty space conventions") {
    FiniteMetricSpace empty("empty", {}, {});
    CHECK(c_components(empty, 1.0).empty());
    auto e = std::make_shared<FiniteMetricSpace>(empty);
    MapSample f{e, e, {}};
    CHECK(map_closeness(f, f) == 0.0);
    const auto ctl = empirical_controls(f);
    CHECK(std::isinf(ctl.lower.eval(5.0)));
}
