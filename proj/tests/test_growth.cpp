#include "doctest.h"

#include <random>

#include "coarsekit/growth.hpp"
#include "coarsekit/json_io.hpp"
#include "helpers.hpp"

using namespace coarsekit;

namespace {

GrowthSeries series_of(std::function<std::uint64_t(int)> f, int r_lo, int r_hi,
                       std::string name) {
    GrowthSeries s;
    s.source = std::move(name);
    for (int r = r_lo; r <= r_hi; ++r) s.samples.emplace_back(r, f(r));
    s.validate();
    return s;
}

bool witness_checks(const GrowthSeries& a, const GrowthSeries& b, const GrowthWitness& w) {
    for (const auto& [r, count] : a.samples) {
        if (r < w.r_lo - kTol || r > w.r_hi + kTol) continue;
        const double t = to_double(w.mu) * r + to_double(w.c);
        if (Rational(count) > w.lambda * Rational(b.eval(t))) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("growth series counts") {
    Budget budget(1000000);
    auto z2ball = word_ball(make_oracle("zn:2"), 2, budget);
    const auto z2 = growth_series(z2ball, 2);
    CHECK(z2.samples[0].second == 1);
    CHECK(z2.samples[1].second == 5);
    CHECK(z2.samples[2].second == 13);

    auto f2ball = word_ball(make_oracle("free:2"), 2, budget);
    const auto f2 = growth_series(f2ball, 2);
    CHECK(f2.samples[0].second == 1);
    CHECK(f2.samples[1].second == 5);
    CHECK(f2.samples[2].second == 17);

    FiniteMetricSpace point("pt", {"a"}, {0});
    const auto constant = growth_series(point, 0, 10.0);
    for (const auto& [r, c] : constant.samples) CHECK(c == 1);
}

TEST_CASE("growth comparison witnesses") {
    const auto quad = series_of([](int r) { return static_cast<std::uint64_t>(r) * r; }, 1, 20,
                                "r^2");
    const auto cube = series_of(
        [](int r) { return static_cast<std::uint64_t>(r) * r * r; }, 1, 20, "r^3");
    const auto cmp = compare_growth(quad, cube);
    REQUIRE(cmp.found());
    CHECK(witness_checks(quad, cube, *cmp.witness));
    // The example witness (1,1,1) is valid as well: r^2 <= (r+1)^3.
    GrowthWitness shift{Rational(1), Rational(1), Rational(1), 1.0, 19.0};
    CHECK(witness_checks(quad, cube, shift));

    auto pow2 = series_of([](int r) { return std::uint64_t(1) << r; }, 0, 20, "2^r");
    auto pow3 = series_of(
        [](int r) {
            std::uint64_t v = 1;
            for (int i = 0; i < r; ++i) v *= 3;
            return v;
        },
        0, 20, "3^r");
    const auto up = compare_growth(pow2, pow3);
    REQUIRE(up.found());
    CHECK(up.witness->lambda == Rational(1));
    CHECK(up.witness->mu == Rational(1));
    CHECK(up.witness->c == Rational(0));

    const auto down = compare_growth(pow3, pow2);
    REQUIRE(down.found());
    CHECK(down.witness->lambda == Rational(1));
    CHECK(down.witness->mu == Rational(2));
    CHECK(down.witness->c == Rational(0));
}

TEST_CASE("growth comparison is reflexive and witnesses compose") {
    Budget budget(1000000);
    auto ball = word_ball(make_oracle("zn:2"), 8, budget);
    const auto beta = growth_series(ball, 8);
    const auto self = compare_growth(beta, beta);
    REQUIRE(self.found());
    CHECK(self.witness->lambda == Rational(1));
    CHECK(self.witness->mu == Rational(1));
    CHECK(self.witness->c == Rational(0));

    // Compose r^2 <= .. r^3 <= .. r^4 witnesses and revalidate.
    const auto quad = series_of([](int r) { return static_cast<std::uint64_t>(r) * r; }, 1, 40,
                                "r^2");
    const auto cube = series_of(
        [](int r) { return static_cast<std::uint64_t>(r) * r * r; }, 1, 40, "r^3");
    const auto quart = series_of(
        [](int r) { return static_cast<std::uint64_t>(r) * r * r * r; }, 1, 40, "r^4");
    const auto ab = compare_growth(quad, cube);
    const auto bc = compare_growth(cube, quart);
    REQUIRE(ab.found());
    REQUIRE(bc.found());
    GrowthWitness composite = compose_witnesses(*ab.witness, *bc.witness);
    composite.r_hi = 10.0;  // stay inside the sampled range of r^4
    CHECK(witness_checks(quad, quart, composite));
}

TEST_CASE("growth series CSV round trip and recheck hashes") {
    Budget budget(1000000);
    auto ball = word_ball(make_oracle("free:2"), 6, budget);
    const auto series = growth_series(ball, 6);
    const auto back = growth_series_from_csv(growth_series_to_csv(series), series.source);
    CHECK(back.samples == series.samples);

    const auto self = compare_growth(series, series);
    REQUIRE(self.found());
    const auto h1 = witness_recheck_hash(series, series, *self.witness);
    const auto h2 = witness_recheck_hash(series, series, *self.witness);
    CHECK(h1 == h2);
    CHECK(h1.size() == 16);
    GrowthWitness bogus{Rational(1, 100), Rational(1), Rational(0), 0.0, 6.0};
    CHECK_THROWS_AS(witness_recheck_hash(series, series, bogus), InvalidInput);
}

TEST_CASE("polynomial degree estimates") {
    Budget budget(2000000);
    auto z2ball = word_ball(make_oracle("zn:2"), 16, budget);
    const auto z2 = growth_series(z2ball, 16);
    const auto est = poldeg_estimate(z2);
    CHECK(est.exponent > 1.7);
    CHECK(est.exponent < 2.3);

    const auto constant = series_of([](int) { return std::uint64_t(7); }, 1, 12, "const");
    CHECK(poldeg_estimate(constant).exponent == doctest::Approx(0.0).epsilon(1e-9));

    auto f2ball = word_ball(make_oracle("free:2"), 10, budget);
    const auto f2 = growth_series(f2ball, 10);
    const auto exp_est = poldeg_estimate(f2);
    CHECK(exp_est.exponent > 4.0);
    CHECK(exp_est.residual > 0.01);  // exponential data fits a power law badly

    GrowthSeries tiny = series_of([](int r) { return static_cast<std::uint64_t>(r); }, 2, 4,
                                  "short");
    CHECK_THROWS_AS(poldeg_estimate(tiny), TooFewSamples);
}

TEST_CASE("greedy lattices") {
    std::vector<double> coords;
    for (int i = 0; i <= 10; ++i) coords.push_back(i);
    const auto space = FiniteMetricSpace::from_line("line", std::move(coords));
    CHECK(greedy_lattice(space, 3.0, 0) == std::vector<int>{0, 3, 6, 9});
    CHECK(greedy_lattice(space, 100.0, 4) == std::vector<int>{4});

    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 15; ++trial) {
        const auto rnd = testing::random_rational_space(rng, 4 + static_cast<int>(rng() % 10));
        const double c = 0.2 + 0.05 * static_cast<double>(rng() % 40);
        const auto lat = greedy_lattice(rnd, c, static_cast<int>(rng() % rnd.size()));
        for (std::size_t a = 0; a < lat.size(); ++a)
            for (std::size_t b = a + 1; b < lat.size(); ++b)
                CHECK(rnd.dist(lat[a], lat[b]) >= c - kTol);
        for (std::size_t p = 0; p < rnd.size(); ++p) {
            double best = 1e18;
            for (int q : lat) best = std::min(best, rnd.dist(p, q));
            CHECK(best <= 2 * c + kTol);
        }
    }
}

TEST_CASE("greedy lattices in a shared space have equivalent growth") {
    Budget budget(2000000);
    auto z2 = make_oracle("zn:2");
    const auto ballspace = ball_metric_space(z2, 6, budget);
    const auto lat1 = greedy_lattice(ballspace, 2.0, 0);
    const auto lat2 = greedy_lattice(ballspace, 2.0, static_cast<int>(ballspace.size()) / 2);

    auto restrict_space = [&](const std::vector<int>& pts, int seed) {
        std::vector<std::string> ids;
        std::vector<double> table(pts.size() * pts.size());
        for (int p : pts) ids.push_back(ballspace.point(p));
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = 0; b < pts.size(); ++b)
                table[a * pts.size() + b] = ballspace.dist(pts[a], pts[b]);
        FiniteMetricSpace sub("lattice", std::move(ids), std::move(table));
        return growth_series(sub, seed, 20.0);
    };
    const auto beta1 = restrict_space(lat1, 0);
    const auto beta2 = restrict_space(lat2, 0);
    CHECK(compare_growth(beta1, beta2).found());
    CHECK(compare_growth(beta2, beta1).found());
}

TEST_CASE("Folner search on Z finds the interval of length four") {
    Budget budget(1000000);
    auto z = make_oracle("zn:1");
    BallTable ball(z, z->generators());
    const auto res = folner_search(ball, 1, Rational(1, 2), FolnerStrategy::Greedy, budget);
    REQUIRE(res.found());
    CHECK(res.witness->members.size() == 4);
    CHECK(res.witness->ratio == Rational(3, 2));
    // Witnesses recheck exactly. The greedy set may extend past the enumerated
    // radius, so grow the table before resolving keys.
    Budget grow(1000000);
    ball.extend_to(8, grow);
    std::vector<Elem> members;
    for (const auto& k : res.witness->members) {
        const int at = ball.find(k);
        REQUIRE(at >= 0);
        members.push_back(ball.elem_at(at));
    }
    Budget recheck(1000000);
    CHECK(folner_ratio(ball, members, 1, recheck) == res.witness->ratio);
}

TEST_CASE("Folner search on the free group finds nothing small") {
    Budget budget(10000000);
    auto f2 = make_oracle("free:2");
    BallTable ball(f2, f2->generators());
    const auto res =
        folner_search(ball, 1, Rational(1, 10), FolnerStrategy::Exhaustive, budget, 6);
    CHECK_FALSE(res.found());
}

TEST_CASE("Folner ball strategy on the lamplighter") {
    Budget budget(4000000);
    auto lamp = make_oracle("lamp:2");
    BallTable ball(lamp, lamp->generators());
    const auto res = folner_search(ball, 1, Rational(1), FolnerStrategy::Balls, budget);
    REQUIRE(res.found());
    CHECK(res.witness->ratio <= Rational(2));
}

TEST_CASE("exhaustive enumeration agrees with a brute-force subset scan") {
    // Count connected interior subsets directly over the power set.
    const auto tree = build_regular_tree(3, 3);
    std::vector<int> interior;
    for (std::size_t v = 0; v < tree.size(); ++v)
        if (tree.interior[v]) interior.push_back(static_cast<int>(v));
    REQUIRE(interior.size() <= 16);

    std::uint64_t brute = 0;
    bool brute_all_hold = true;
    for (std::uint32_t mask = 1; mask < (1u << interior.size()); ++mask) {
        std::vector<int> subset;
        for (std::size_t b = 0; b < interior.size(); ++b)
            if (mask & (1u << b)) subset.push_back(interior[b]);
        // connectivity inside the subset
        std::vector<int> stack{subset[0]};
        std::vector<bool> seen(tree.size(), false);
        seen[subset[0]] = true;
        std::size_t reached = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w : tree.adj[v])
                if (!seen[w] && std::find(subset.begin(), subset.end(), w) != subset.end()) {
                    seen[w] = true;
                    ++reached;
                    stack.push_back(w);
                }
        }
        if (reached != subset.size()) continue;
        ++brute;
        const auto check = tree_boundary_check(tree, subset);
        brute_all_hold = brute_all_hold && check.holds;
    }

    Budget budget(10000000);
    const auto report = exhaustive_tree_check(tree, static_cast<int>(interior.size()), budget);
    CHECK(report.subsets == brute);
    CHECK(report.all_hold == brute_all_hold);
}

TEST_CASE("tree boundary checks") {
    const auto tree = build_regular_tree(3, 8);
    const auto single = tree_boundary_check(tree, {0});
    CHECK(single.boundary_size == 1);
    CHECK(single.holds);

    // A path of three vertices keeps every vertex on the boundary.
    const int child = tree.adj[0][0];
    const int grandchild = tree.adj[child][1];
    const auto path = tree_boundary_check(tree, {0, child, grandchild});
    CHECK(path.boundary_size == 3);
    CHECK(path.holds);

    std::vector<int> frontier_vertex{static_cast<int>(tree.size()) - 1};
    CHECK_THROWS_AS(tree_boundary_check(tree, frontier_vertex), DegreeTooSmall);

    TreeGraph cyclic;
    cyclic.adj = {{1, 2}, {0, 2}, {0, 1}};
    cyclic.interior = {true, true, true};
    CHECK_THROWS_AS(tree_boundary_check(cyclic, {0}), NotATree);

    Budget budget(100000000);
    const auto report = exhaustive_tree_check(build_regular_tree(3, 8), 6, budget);
    CHECK(report.all_hold);
    CHECK(report.subsets > 1000);
}
