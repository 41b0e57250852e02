#ifndef COARSEKIT_TEST_HELPERS_HPP
#define COARSEKIT_TEST_HELPERS_HPP

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include "coarsekit/metric_core.hpp"
#include "coarsekit/rational.hpp"

namespace coarsekit::testing {

// Random pseudo-metric with exact rational entries: a random symmetric matrix
// of fractions k/q repaired into a metric by min-plus closure.
inline FiniteMetricSpace random_rational_space(std::mt19937_64& rng, int n,
                                               int numer_max = 16, int denom_max = 4) {
    std::vector<Rational> d(static_cast<std::size_t>(n) * n, Rational(0));
    auto at = [&](int i, int j) -> Rational& { return d[static_cast<std::size_t>(i) * n + j]; };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const long long num = 1 + static_cast<long long>(rng() % numer_max);
            const long long den = 1 + static_cast<long long>(rng() % denom_max);
            at(i, j) = at(j, i) = Rational(num, den);
        }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const Rational through = at(i, k) + at(k, j);
                if (through < at(i, j)) at(i, j) = through;
            }
    std::vector<double> table(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) table[i] = to_double(d[i]);
    std::vector<std::string> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = std::to_string(i);
    return FiniteMetricSpace("random", std::move(ids), std::move(table), std::move(d));
}

// Independent minimax oracle: exhaustive minimum over all simple paths of the
// largest step. Exponential; intended for spaces of at most ~8 points.
inline std::vector<Rational> brute_minimax(const FiniteMetricSpace& space) {
    const int n = static_cast<int>(space.size());
    std::vector<Rational> best(static_cast<std::size_t>(n) * n);
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) {
            if (s == t) continue;
            Rational cur(-1);
            std::vector<int> path{s};
            std::vector<bool> used(n, false);
            used[s] = true;
            // DFS over all simple paths from s to t.
            std::function<void(int, Rational)> dfs = [&](int v, Rational maxstep) {
                if (v == t) {
                    if (cur < 0 || maxstep < cur) cur = maxstep;
                    return;
                }
                for (int w = 0; w < n; ++w) {
                    if (used[w]) continue;
                    used[w] = true;
                    const Rational step = space.exact_dist(v, w);
                    dfs(w, std::max(maxstep, step));
                    used[w] = false;
                }
            };
            dfs(s, Rational(0));
            best[static_cast<std::size_t>(s) * n + t] = cur;
        }
    return best;
}

}  // namespace coarsekit::testing

#endif
