#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "coarsekit/group_oracles.hpp"
#include "helpers.hpp"

using namespace coarsekit;

namespace {

// Independent count of the free-group ball: enumerate reduced words directly.
std::uint64_t reduced_word_count(int rank, int radius) {
    std::uint64_t total = 1;
    std::uint64_t level = 1;
    for (int r = 1; r <= radius; ++r) {
        level *= (r == 1) ? 2 * rank : 2 * rank - 1;
        total += level;
    }
    return total;
}

// Independent lattice-point count |{x in Z^2 : |x|_1 <= r}|.
std::uint64_t diamond_count(int r) {
    std::uint64_t c = 0;
    for (int x = -r; x <= r; ++x)
        for (int y = -r; y <= r; ++y)
            if (std::abs(x) + std::abs(y) <= r) ++c;
    return c;
}

}  // namespace

TEST_CASE("free group ball sizes match reduced-word enumeration") {
    Budget budget(100000);
    auto f2 = make_oracle("free:2");
    auto ball = word_ball(f2, 4, budget);
    CHECK(ball.ball_size(0) == 1);
    CHECK(ball.ball_size(2) == 17);
    for (int r = 0; r <= 4; ++r) CHECK(ball.ball_size(r) == reduced_word_count(2, r));
}

TEST_CASE("free abelian ball sizes match the lattice count") {
    Budget budget(100000);
    auto z2 = make_oracle("zn:2");
    auto ball = word_ball(z2, 5, budget);
    CHECK(ball.ball_size(2) == 13);
    for (int r = 0; r <= 5; ++r) CHECK(ball.ball_size(r) == diamond_count(r));
}

TEST_CASE("radius zero ball") {
    Budget budget(10);
    for (const char* family : {"free:2", "zn:3", "heis", "bs1:2", "lamp:2"}) {
        auto ball = word_ball(make_oracle(family), 0, budget);
        CHECK(ball.size() == 1);
    }
}

TEST_CASE("oracle group laws") {
    std::mt19937_64 rng(23);
    for (const char* family : {"free:2", "zn:2", "heis", "bs1:2", "bs1:3", "lamp:2", "lamp:3",
                               "slnz:3"}) {
        auto oracle = make_oracle(family);
        const auto& gens = oracle->generators();
        for (int trial = 0; trial < 40; ++trial) {
            Elem g = oracle->identity();
            Elem h = oracle->identity();
            Elem k = oracle->identity();
            for (int step = 0; step < 6; ++step) {
                g = oracle->multiply(g, gens[rng() % gens.size()].elem);
                h = oracle->multiply(h, gens[rng() % gens.size()].elem);
                k = oracle->multiply(k, gens[rng() % gens.size()].elem);
            }
            // inverses land on the identity key
            CHECK(oracle->key(oracle->multiply(g, oracle->inverse(g))) ==
                  oracle->key(oracle->identity()));
            // associativity
            CHECK(oracle->key(oracle->multiply(oracle->multiply(g, h), k)) ==
                  oracle->key(oracle->multiply(g, oracle->multiply(h, k))));
        }
    }
}

TEST_CASE("Heisenberg word lengths") {
    auto heis = make_oracle("heis");
    Budget budget(1000000);
    BallTable cache(heis, heis->generators());
    const Elem s = heis->generators()[0].elem;
    const Elem t = heis->generators()[2].elem;
    const Elem u = heis->generators()[4].elem;
    for (int k = 1; k <= 6; ++k) {
        CHECK(word_length(cache, heis->power(s, k), 10, budget) == k);
        CHECK(word_length(cache, heis->power(t, k), 10, budget) == k);
    }
    for (int k = 1; k <= 3; ++k)
        CHECK(word_length(cache, heis->power(u, k * k), 16, budget) <= 4 * k);
    CHECK(word_length(cache, heis->identity(), 10, budget) == 0);

    // u = s't'st as claimed by the commutator relation.
    CHECK(heis->key(heis->evaluate_word("s' t' s t")) == heis->key(u));
}

TEST_CASE("ball metric spaces") {
    Budget budget(1000000);
    auto z = make_oracle("zn:1");
    const auto lineball = ball_metric_space(z, 3, budget);
    CHECK(lineball.size() == 7);
    // d(-3, 3) = 6
    double best = 0;
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 7; ++j) best = std::max(best, lineball.dist(i, j));
    CHECK(best == doctest::Approx(6.0));

    auto f2 = make_oracle("free:2");
    const auto tree = ball_metric_space(f2, 2, budget);
    CHECK(tree.size() == 17);  // constructor re-validates the triangle inequality

    auto heis = make_oracle("heis");
    const auto hball = ball_metric_space(heis, 2, budget);
    const int origin = hball.index_of(heis->key(heis->identity()));
    const int up = hball.index_of(heis->key(heis->generators()[4].elem));
    REQUIRE(origin >= 0);
    REQUIRE(up >= 0);
    CHECK(hball.dist(origin, up) == doctest::Approx(1.0));
}

TEST_CASE("ball tables nest and stay deterministic") {
    Budget b1(100000), b2(100000);
    auto heis = make_oracle("heis");
    auto small = word_ball(heis, 3, b1);
    auto large = word_ball(heis, 4, b2);
    REQUIRE(small.size() == large.ball_size(3));
    for (std::size_t i = 0; i < small.size(); ++i) {
        CHECK(small.key_at(i) == large.key_at(i));
        CHECK(small.entry_at(i).len == large.entry_at(i).len);
        CHECK(small.entry_at(i).parent == large.entry_at(i).parent);
        CHECK(small.entry_at(i).letter == large.entry_at(i).letter);
    }
    // Derived lengths are symmetric and subadditive.
    std::mt19937_64 rng(2);
    Budget b3(1000000);
    BallTable cache(heis, heis->generators());
    for (int trial = 0; trial < 20; ++trial) {
        Elem g = heis->identity(), h = heis->identity();
        for (int i = 0; i < 3; ++i) {
            g = heis->multiply(g, heis->generators()[rng() % 6].elem);
            h = heis->multiply(h, heis->generators()[rng() % 6].elem);
        }
        const int lg = word_length(cache, g, 12, b3);
        const int lgi = word_length(cache, heis->inverse(g), 12, b3);
        const int lh = word_length(cache, h, 12, b3);
        const int lgh = word_length(cache, heis->multiply(g, h), 12, b3);
        CHECK(lg == lgi);
        CHECK(lgh <= lg + lh);
    }
}

TEST_CASE("budget exhaustion and missing elements") {
    auto f2 = make_oracle("free:2");
    Budget tiny(10);
    CHECK_THROWS_AS(word_ball(f2, 3, tiny), BudgetExceeded);

    Budget big(100000);
    BallTable cache(f2, f2->generators());
    Elem far{1, 2, 1, 2, 1, 2};  // length 6
    CHECK_THROWS_AS(word_length(cache, far, 3, big), NotFoundWithinRadius);
    CHECK(word_length(cache, far, 6, big) == 6);
}

TEST_CASE("Baumslag-Solitar distortion of the normal generator") {
    auto bs = make_oracle("bs1:2");
    // t s t' = s^2 in the matrix model.
    const Elem s = bs->generators()[0].elem;
    CHECK(bs->key(bs->evaluate_word("t s t'")) == bs->key(bs->power(s, 2)));

    Budget budget(2000000);
    const auto profile = distortion_profile(bs, s, 8, 9, budget);
    // l(s^(2^k)) <= 2k + 1 via the conjugate t^k s t^-k.
    REQUIRE(profile[2].length.has_value());
    CHECK(*profile[2].length <= 3);
    REQUIRE(profile[4].length.has_value());
    CHECK(*profile[4].length <= 5);
    REQUIRE(profile[8].length.has_value());
    CHECK(*profile[8].length <= 7);
    CHECK(profile[0].length.value() == 0);
}

TEST_CASE("bilipschitz constants between generating sets") {
    Budget budget(1000000);
    auto z = make_oracle("zn:1");
    std::vector<Generator> s1 = z->generators();
    std::vector<Generator> s2 = s1;
    s2.push_back({"y", Elem{2}});
    s2.push_back({"y'", Elem{-2}});
    const auto [lo, hi] = bilipschitz_constants(z, s1, s2, 8, budget);
    CHECK(lo == Rational(1, 2));
    CHECK(hi == Rational(1));

    const auto [same_lo, same_hi] = bilipschitz_constants(z, s1, s1, 6, budget);
    CHECK(same_lo == Rational(1));
    CHECK(same_hi == Rational(1));

    auto z2 = make_oracle("zn:2");
    std::vector<Generator> t1 = z2->generators();
    std::vector<Generator> t2 = t1;
    t2.push_back({"d", Elem{1, 1}});
    t2.push_back({"d'", Elem{-1, -1}});
    const auto [dlo, dhi] = bilipschitz_constants(z2, t1, t2, 6, budget);
    CHECK(dhi == Rational(1));
    CHECK(dlo == Rational(1, 2));
}

TEST_CASE("nu and delta path metrics") {
    auto base = std::make_shared<FiniteMetricSpace>(
        FiniteMetricSpace::from_line_exact("line", {Rational(0), Rational(1), Rational(2),
                                                    Rational(3)}));
    StepRelation rel;
    rel.base = base;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (base->exact_dist(i, j) <= 1) rel.pairs.emplace_back(i, j);

    const auto nu = nu_metric(rel);
    const auto delta = delta_metric(rel);
    CHECK(nu.exact_dist(0, 3) == Rational(3));
    CHECK(delta.exact_dist(0, 3) == Rational(3));

    StepRelation complete;
    complete.base = base;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) complete.pairs.emplace_back(i, j);
    const auto nu_c = nu_metric(complete);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(nu_c.exact_dist(i, j) == (i == j ? Rational(0) : Rational(1)));

    StepRelation disconnected;
    disconnected.base = base;
    disconnected.pairs = {{0, 1}};
    CHECK_THROWS_AS(nu_metric(disconnected), NotConnected);
}

TEST_CASE("controlled step relations satisfy the path-metric inequalities") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 9);
        auto base = std::make_shared<FiniteMetricSpace>(testing::random_rational_space(rng, n));
        // c: the connectivity threshold (largest minimax distance); C: diameter.
        const auto um = ultrametrize(*base);
        Rational c(0), C(0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                c = std::max(c, um.exact_dist(i, j));
                C = std::max(C, base->exact_dist(i, j));
            }
        REQUIRE(c > 0);
        StepRelation rel;
        rel.base = base;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const Rational& d = base->exact_dist(i, j);
                if (d <= c || (rng() % 2 == 0)) rel.pairs.emplace_back(i, j);
            }
        const auto nu = nu_metric(rel);
        const auto delta = delta_metric(rel);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const Rational& dl = delta.exact_dist(i, j);
                const Rational& nv = nu.exact_dist(i, j);
                CHECK(dl <= C * nv);
                CHECK(2 * dl >= c * (nv - 1));
                CHECK(base->exact_dist(i, j) <= dl);
                if (base->exact_dist(i, j) < c) CHECK(dl == base->exact_dist(i, j));
            }
    }
}

TEST_CASE("controlled relations over a word-ball space") {
    std::mt19937_64 rng(67);
    Budget budget(1000000);
    auto base = std::make_shared<FiniteMetricSpace>(
        ball_metric_space(make_oracle("zn:2"), 3, budget));
    const int n = static_cast<int>(base->size());
    const Rational c(1), C(2);
    StepRelation rel;
    rel.base = base;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Rational& d = base->exact_dist(i, j);
            if (d <= c || (d <= C && rng() % 2 == 0)) rel.pairs.emplace_back(i, j);
        }
    const auto nu = nu_metric(rel);
    const auto delta = delta_metric(rel);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            CHECK(delta.exact_dist(i, j) <= C * nu.exact_dist(i, j));
            CHECK(2 * delta.exact_dist(i, j) >= c * (nu.exact_dist(i, j) - 1));
        }
}

TEST_CASE("ball cache files round-trip bitwise") {
    Budget budget(100000);
    auto heis = make_oracle("heis");
    auto ball = word_ball(heis, 3, budget);
    const std::string path = "coarsekit_test_cache.jsonl";
    save_ball_cache(ball, path);
    auto loaded = load_ball_cache(path);
    const std::string again = ball_cache_to_jsonl(loaded);
    std::ifstream f(path, std::ios::binary);
    std::stringstream buf;
    buf << f.rdbuf();
    CHECK(buf.str() == again);
    std::remove(path.c_str());
}

TEST_CASE("word balls serialize reproducibly") {
    Budget b1(100000), b2(100000);
    const auto ball1 = word_ball(make_oracle("bs1:2"), 5, b1);
    const auto ball2 = word_ball(make_oracle("bs1:2"), 5, b2);
    CHECK(ball_cache_to_jsonl(ball1) == ball_cache_to_jsonl(ball2));
    // Ball sizes strictly increase on an infinite group in the explored range.
    for (int r = 1; r <= 5; ++r) CHECK(ball1.ball_size(r) > ball1.ball_size(r - 1));
}

TEST_CASE("lamplighter sanity") {
    auto lamp = make_oracle("lamp:2");
    // The lamp generator is an involution for n = 2.
    const Elem a = lamp->generators()[2].elem;
    CHECK(lamp->key(lamp->multiply(a, a)) == lamp->key(lamp->identity()));
    // Walking right then lighting a lamp commutes back correctly.
    const Elem w = lamp->evaluate_word("t a t' a");
    CHECK(lamp->key(lamp->multiply(w, lamp->inverse(w))) == lamp->key(lamp->identity()));
    Budget budget(100000);
    auto ball = word_ball(lamp, 4, budget);
    CHECK(ball.ball_size(1) == 4);  // t, t', a and the identity
}
