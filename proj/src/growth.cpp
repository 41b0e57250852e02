#include "coarsekit/growth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <queue>
#include <unordered_set>

namespace coarsekit {

void GrowthSeries::validate() const {
    if (samples.empty()) throw InvalidInput("empty growth series");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i > 0 && !(samples[i - 1].first < samples[i].first))
            throw InvalidInput("radii must be strictly increasing");
        if (i > 0 && samples[i].second < samples[i - 1].second)
            throw InvalidInput("counts must be nondecreasing");
    }
    if (samples.front().first <= kTol && samples.front().second < 1)
        throw InvalidInput("count at r = 0 must be >= 1");
}

std::uint64_t GrowthSeries::eval(double t) const {
    std::uint64_t v = 0;
    for (const auto& [r, count] : samples) {
        if (r <= t + kTol)
            v = count;
        else
            break;
    }
    return v;
}

GrowthSeries growth_series(const BallTable& ball, int r_max) {
    if (r_max < 0) throw BadParams("r_max must be >= 0");
    if (ball.radius() < r_max) throw BadParams("ball table radius is smaller than r_max");
    GrowthSeries out;
    out.source = ball.oracle().family();
    for (int r = 0; r <= r_max; ++r)
        out.samples.emplace_back(static_cast<double>(r), ball.ball_size(r));
    out.validate();
    return out;
}

GrowthSeries growth_series(const FiniteMetricSpace& space, int base, double r_max) {
    if (base < 0 || static_cast<std::size_t>(base) >= space.size())
        throw BadParams("base point not in space");
    std::vector<double> radii;
    for (std::size_t j = 0; j < space.size(); ++j) {
        const double d = space.dist(base, j);
        if (d <= r_max + kTol) radii.push_back(d);
    }
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end(),
                            [](double a, double b) { return std::abs(a - b) <= kTol; }),
                radii.end());
    GrowthSeries out;
    out.source = space.label();
    for (double r : radii) {
        std::uint64_t count = 0;
        for (std::size_t j = 0; j < space.size(); ++j)
            if (space.dist(base, j) <= r + kTol) ++count;
        out.samples.emplace_back(r, count);
    }
    out.validate();
    return out;
}

GrowthComparison compare_growth(const GrowthSeries& beta, const GrowthSeries& beta_prime,
                                const ComparisonGrid& grid) {
    beta.validate();
    beta_prime.validate();
    const double lo = std::max(beta.samples.front().first, beta_prime.samples.front().first);
    for (const Rational& lambda : grid.lambdas)
        for (const Rational& mu : grid.mus)
            for (const Rational& c : grid.cs) {
                // Keep mu*r + c inside the sampled range of beta'.
                const double hi =
                    std::min(beta.max_radius(),
                             to_double((Rational(beta_prime.max_radius()) - c) / mu));
                if (hi < lo - kTol) continue;
                bool ok = true;
                bool any_point = false;
                for (const auto& [r, count] : beta.samples) {
                    if (r < lo - kTol || r > hi + kTol) continue;
                    any_point = true;
                    const double t = to_double(mu) * r + to_double(c);
                    const std::uint64_t rhs = beta_prime.eval(t);
                    if (Rational(count) > lambda * Rational(rhs)) {
                        ok = false;
                        break;
                    }
                }
                if (ok && any_point)
                    return GrowthComparison{GrowthWitness{lambda, mu, c, lo, hi}};
            }
    return GrowthComparison{};
}

GrowthWitness compose_witnesses(const GrowthWitness& first, const GrowthWitness& second) {
    // beta <= l1 b'(m1 r + c1) and b' <= l2 b''(m2 r + c2)
    //   give beta <= l1 l2 b''(m1 m2 r + m2 c1 + c2).
    GrowthWitness out;
    out.lambda = first.lambda * second.lambda;
    out.mu = first.mu * second.mu;
    out.c = second.mu * first.c + second.c;
    out.r_lo = first.r_lo;
    out.r_hi = first.r_hi;
    return out;
}

std::string witness_recheck_hash(const GrowthSeries& beta, const GrowthSeries& beta_prime,
                                 const GrowthWitness& witness) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a offset basis
    auto mix = [&h](const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ull;
        }
    };
    for (const auto& [r, count] : beta.samples) {
        if (r < witness.r_lo - kTol || r > witness.r_hi + kTol) continue;
        const double t = to_double(witness.mu) * r + to_double(witness.c);
        const std::uint64_t rhs = beta_prime.eval(t);
        if (Rational(count) > witness.lambda * Rational(rhs))
            throw InvalidInput("witness fails to recheck");
        mix(std::to_string(r));
        mix(":" + std::to_string(count) + ":" + std::to_string(rhs) + ";");
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

PoldegEstimate poldeg_estimate(const GrowthSeries& beta, double tail_fraction) {
    beta.validate();
    std::vector<std::pair<double, double>> pts;
    for (const auto& [r, count] : beta.samples)
        if (r >= 2.0 - kTol && count >= 1)
            pts.emplace_back(std::log(r), std::log(static_cast<double>(count)));
    if (pts.size() < 4) throw TooFewSamples("need >= 4 samples with r >= 2");

    const std::size_t keep = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::ceil(tail_fraction * pts.size())));
    const std::size_t from = pts.size() > keep ? pts.size() - keep : 0;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(pts.size() - from);
    for (std::size_t i = from; i < pts.size(); ++i) {
        sx += pts[i].first;
        sy += pts[i].second;
        sxx += pts[i].first * pts[i].first;
        sxy += pts[i].first * pts[i].second;
    }
    const double denom = m * sxx - sx * sx;
    if (std::abs(denom) < 1e-12) throw TooFewSamples("degenerate radii for the fit");
    PoldegEstimate est;
    est.exponent = (m * sxy - sx * sy) / denom;
    est.points_used = pts.size() - from;
    const double intercept = (sy - est.exponent * sx) / m;
    double ss = 0;
    for (std::size_t i = from; i < pts.size(); ++i) {
        const double e = pts[i].second - (est.exponent * pts[i].first + intercept);
        ss += e * e;
    }
    est.residual = std::sqrt(ss / m);
    return est;
}

std::vector<int> greedy_lattice(const FiniteMetricSpace& space, double c, int seed) {
    if (!(c > 0)) throw BadParams("c must be positive");
    if (seed < 0 || static_cast<std::size_t>(seed) >= space.size())
        throw BadParams("seed point not in space");
    std::vector<int> chosen{seed};
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (static_cast<int>(i) == seed) continue;
        bool far = true;
        for (int p : chosen)
            if (space.dist(i, p) < c - kTol) {
                far = false;
                break;
            }
        if (far) chosen.push_back(static_cast<int>(i));
    }
    return chosen;
}

Rational folner_ratio(const BallTable& ball, const std::vector<Elem>& members, int r,
                      Budget& budget) {
    if (members.empty()) throw BadParams("Folner set must be nonempty");
    if (ball.radius() < r) throw BadParams("ball table too small for radius r");
    const GroupOracle& oracle = ball.oracle();
    std::unordered_set<std::string> covered;
    for (const Elem& f : members)
        for (std::size_t i = 0; i < ball.size(); ++i) {
            if (ball.entry_at(i).len > r) continue;
            budget.charge(1);
            covered.insert(oracle.key(oracle.multiply(f, ball.elem_at(i))));
        }
    return Rational(static_cast<long long>(covered.size()),
                    static_cast<long long>(members.size()));
}

namespace {

// Enumerates every connected subset that contains `anchor` and stays inside
// `allowed`, visiting each exactly once. The classic include/ban scheme: a
// candidate is explored with the vertex included, then banned for the rest of
// its frame. `on_add`/`on_remove` maintain incremental state; `visit` decides
// whether to stop early (return true to abort the walk).
class ConnectedEnumerator {
public:
    ConnectedEnumerator(const std::vector<std::vector<int>>& adj, std::vector<bool> allowed)
        : adj_(adj), allowed_(std::move(allowed)), in_set_(adj.size(), false),
          banned_(adj.size(), false) {}

    template <typename Add, typename Remove, typename Visit>
    bool run(int anchor, int max_size, Add&& on_add, Remove&& on_remove, Visit&& visit) {
        struct Frame {
            std::vector<int> cands;
            std::size_t next = 0;
            std::vector<int> banned_here;
            int vertex = -1;  // vertex added when this frame was pushed
        };

        if (!allowed_[anchor]) return false;
        in_set_[anchor] = true;
        on_add(anchor);
        bool stop = visit();

        std::vector<Frame> stack;
        if (!stop && max_size > 1) {
            Frame root;
            root.vertex = anchor;
            for (int w : adj_[anchor])
                if (allowed_[w] && !in_set_[w]) root.cands.push_back(w);
            std::sort(root.cands.begin(), root.cands.end());
            root.cands.erase(std::unique(root.cands.begin(), root.cands.end()),
                             root.cands.end());
            stack.push_back(std::move(root));
        }

        int size = 1;
        while (!stack.empty()) {
            Frame& frame = stack.back();
            if (stop || size >= max_size || frame.next >= frame.cands.size()) {
                for (int v : frame.banned_here) banned_[v] = false;
                if (stack.size() > 1) {
                    const int v = frame.vertex;
                    on_remove(v);
                    in_set_[v] = false;
                    --size;
                    // Ban for the remaining candidates of the parent frame.
                    stack[stack.size() - 2].banned_here.push_back(v);
                    banned_[v] = true;
                }
                stack.pop_back();
                continue;
            }
            const int v = frame.cands[frame.next++];
            if (banned_[v] || in_set_[v]) continue;
            in_set_[v] = true;
            ++size;
            on_add(v);
            stop = visit();

            Frame child;
            child.vertex = v;
            if (!stop && size < max_size) {
                for (std::size_t cj = frame.next; cj < frame.cands.size(); ++cj) {
                    const int u = frame.cands[cj];
                    if (!in_set_[u] && !banned_[u]) child.cands.push_back(u);
                }
                for (int w : adj_[v])
                    if (allowed_[w] && !in_set_[w] && !banned_[w]) child.cands.push_back(w);
                std::sort(child.cands.begin(), child.cands.end());
                child.cands.erase(std::unique(child.cands.begin(), child.cands.end()),
                                  child.cands.end());
            }
            stack.push_back(std::move(child));
        }
        on_remove(anchor);
        in_set_[anchor] = false;
        return stop;
    }

    std::vector<bool>& allowed() { return allowed_; }

private:
    const std::vector<std::vector<int>>& adj_;
    std::vector<bool> allowed_;
    std::vector<bool> in_set_;
    std::vector<bool> banned_;
};

FolnerResult folner_balls(BallTable& ball, int r, const Rational& eps, Budget& budget) {
    const Rational bound = Rational(1) + eps;
    for (int k = 0;; ++k) {
        try {
            ball.extend_to(k + r, budget);
        } catch (const BudgetExceeded&) {
            return FolnerResult{};
        }
        const Rational ratio(static_cast<long long>(ball.ball_size(k + r)),
                             static_cast<long long>(ball.ball_size(k)));
        if (ratio <= bound) {
            FolnerWitness w;
            w.r = r;
            w.ratio = ratio;
            for (std::size_t i = 0; i < ball.size(); ++i)
                if (ball.entry_at(i).len <= k) w.members.push_back(ball.key_at(i));
            std::sort(w.members.begin(), w.members.end());
            return FolnerResult{std::move(w)};
        }
        if (ball.closed() && ball.ball_size(k) == ball.size()) return FolnerResult{};
    }
}

FolnerResult folner_greedy(BallTable& ball, int r, const Rational& eps, Budget& budget) {
    const Rational bound = Rational(1) + eps;
    const GroupOracle& oracle = ball.oracle();
    std::vector<Elem> members{oracle.identity()};
    std::unordered_set<std::string> member_keys{oracle.key(oracle.identity())};
    try {
        ball.extend_to(r, budget);
        for (;;) {
            const Rational ratio = folner_ratio(ball, members, r, budget);
            if (ratio <= bound) {
                FolnerWitness w;
                w.r = r;
                w.ratio = ratio;
                for (const Elem& f : members) w.members.push_back(oracle.key(f));
                std::sort(w.members.begin(), w.members.end());
                return FolnerResult{std::move(w)};
            }
            // Candidates: one generator step away from the current set.
            std::vector<std::pair<std::string, Elem>> candidates;
            std::unordered_set<std::string> cand_keys;
            for (const Elem& f : members)
                for (const auto& g : oracle.generators()) {
                    Elem x = oracle.multiply(f, g.elem);
                    std::string k = oracle.key(x);
                    if (member_keys.count(k) || cand_keys.count(k)) continue;
                    cand_keys.insert(k);
                    candidates.emplace_back(std::move(k), std::move(x));
                }
            std::sort(candidates.begin(), candidates.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (candidates.empty()) return FolnerResult{};
            bool have_best = false;
            Rational best_ratio;
            std::size_t best = 0;
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                members.push_back(candidates[i].second);
                const Rational rr = folner_ratio(ball, members, r, budget);
                members.pop_back();
                if (!have_best || rr < best_ratio) {
                    have_best = true;
                    best_ratio = rr;
                    best = i;
                }
            }
            member_keys.insert(candidates[best].first);
            members.push_back(candidates[best].second);
        }
    } catch (const BudgetExceeded&) {
        return FolnerResult{};
    }
}

FolnerResult folner_exhaustive(BallTable& ball, int r, const Rational& eps, Budget& budget,
                               int max_size) {
    if (max_size < 1) throw BadParams("exhaustive strategy needs a positive size bound");
    const GroupOracle& oracle = ball.oracle();
    const int inner = max_size - 1;  // members stay within B(inner)
    try {
        ball.extend_to(inner + r, budget);
    } catch (const BudgetExceeded&) {
        return FolnerResult{};
    }

    // Cayley adjacency restricted to the enumerated ball.
    const std::size_t n = ball.size();
    std::vector<std::vector<int>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& g : oracle.generators()) {
            const int j = ball.find(oracle.key(oracle.multiply(ball.elem_at(i), g.elem)));
            if (j >= 0 && j != static_cast<int>(i)) adj[i].push_back(j);
        }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }

    std::vector<bool> allowed(n, false);
    for (std::size_t i = 0; i < n; ++i) allowed[i] = ball.entry_at(i).len <= inner;

    // For r = 1 the covered count |B^F(1)| = |F| + #(outside vertices with a
    // neighbor in F) is maintained incrementally; larger radii recompute.
    std::vector<int> nbrs_in_set(n, 0);
    long long outside = 0;
    long long size = 0;
    std::vector<int> current;
    auto on_add = [&](int v) {
        current.push_back(v);
        ++size;
        if (nbrs_in_set[v] > 0) --outside;
        for (int w : adj[v]) {
            const bool was_outside_counted = nbrs_in_set[w] == 0;
            ++nbrs_in_set[w];
            if (was_outside_counted && std::find(current.begin(), current.end(), w) ==
                                           current.end())
                ++outside;
        }
    };
    auto on_remove = [&](int v) {
        current.pop_back();
        --size;
        for (int w : adj[v]) {
            --nbrs_in_set[w];
            if (nbrs_in_set[w] == 0 &&
                std::find(current.begin(), current.end(), w) == current.end())
                --outside;
        }
        if (nbrs_in_set[v] > 0) ++outside;
    };

    const BigInt p = boost::multiprecision::numerator(eps);
    const BigInt q = boost::multiprecision::denominator(eps);
    std::optional<FolnerWitness> found;
    auto visit = [&]() -> bool {
        budget.charge(1);
        bool good;
        if (r == 1) {
            // q * outside <= p * size  <=>  (size + outside)/size <= 1 + p/q
            good = q * outside <= p * size;
        } else {
            std::vector<Elem> members;
            members.reserve(current.size());
            for (int v : current) members.push_back(ball.elem_at(v));
            const Rational ratio = folner_ratio(ball, members, r, budget);
            good = ratio <= Rational(1) + eps;
        }
        if (good) {
            std::vector<Elem> members;
            members.reserve(current.size());
            for (int v : current) members.push_back(ball.elem_at(v));
            Budget recheck(UINT64_MAX);
            FolnerWitness w;
            w.r = r;
            w.ratio = folner_ratio(ball, members, r, recheck);
            for (int v : current) w.members.push_back(ball.key_at(v));
            std::sort(w.members.begin(), w.members.end());
            found = std::move(w);
            return true;
        }
        return false;
    };

    try {
        ConnectedEnumerator en(adj, std::move(allowed));
        en.run(0, max_size, on_add, on_remove, visit);
    } catch (const BudgetExceeded&) {
        return FolnerResult{};
    }
    if (found) return FolnerResult{std::move(found)};
    return FolnerResult{};
}

}  // namespace

FolnerResult folner_search(BallTable& ball, int r, const Rational& epsilon,
                           FolnerStrategy strategy, Budget& budget, int exhaustive_max_size) {
    if (r < 1) throw BadParams("r must be >= 1");
    if (!(epsilon > 0)) throw BadParams("epsilon must be positive");
    switch (strategy) {
        case FolnerStrategy::Balls:
            return folner_balls(ball, r, epsilon, budget);
        case FolnerStrategy::Greedy:
            return folner_greedy(ball, r, epsilon, budget);
        case FolnerStrategy::Exhaustive:
            return folner_exhaustive(ball, r, epsilon, budget, exhaustive_max_size);
    }
    throw BadParams("unknown strategy");
}

TreeGraph build_regular_tree(int degree, int depth) {
    if (degree < 3) throw BadParams("tree degree must be >= 3");
    if (depth < 1) throw BadParams("tree depth must be >= 1");
    TreeGraph tree;
    tree.adj.emplace_back();
    std::vector<int> level{0};
    std::vector<int> depths{0};
    for (int d = 1; d <= depth; ++d) {
        std::vector<int> next;
        for (int v : level) {
            const int children = (v == 0) ? degree : degree - 1;
            for (int c = 0; c < children; ++c) {
                const int w = static_cast<int>(tree.adj.size());
                tree.adj.emplace_back();
                tree.adj[v].push_back(w);
                tree.adj[w].push_back(v);
                depths.push_back(d);
                next.push_back(w);
            }
        }
        level = std::move(next);
    }
    tree.interior.assign(tree.size(), false);
    for (std::size_t v = 0; v < tree.size(); ++v) tree.interior[v] = depths[v] < depth;
    return tree;
}

namespace {

void validate_tree(const TreeGraph& tree) {
    const std::size_t n = tree.size();
    if (n == 0) throw NotATree("empty graph");
    std::vector<int> parent(n, -2);
    std::queue<int> q;
    q.push(0);
    parent[0] = -1;
    std::size_t seen = 1;
    std::size_t edge_half_count = 0;
    for (std::size_t v = 0; v < n; ++v) edge_half_count += tree.adj[v].size();
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (int w : tree.adj[v]) {
            if (parent[w] == -2) {
                parent[w] = v;
                ++seen;
                q.push(w);
            } else if (w != parent[v]) {
                throw NotATree("cycle detected");
            }
        }
    }
    if (seen != n || edge_half_count != 2 * (n - 1)) throw NotATree("graph is not a tree");
}

}  // namespace

TreeBoundaryCheck tree_boundary_check(const TreeGraph& tree, const std::vector<int>& subset) {
    validate_tree(tree);
    if (subset.empty()) throw BadParams("subset must be nonempty");
    std::vector<bool> in(tree.size(), false);
    for (int v : subset) {
        if (v < 0 || static_cast<std::size_t>(v) >= tree.size())
            throw BadParams("subset vertex out of range");
        if (!tree.interior[v]) throw DegreeTooSmall("subset touches the truncation frontier");
        in[v] = true;
    }
    TreeBoundaryCheck check;
    for (int v : subset) {
        bool has_outside = false;
        for (int w : tree.adj[v])
            if (!in[w]) has_outside = true;
        if (has_outside) ++check.boundary_size;
    }
    check.holds = 2 * check.boundary_size >= subset.size();
    return check;
}

ExhaustiveTreeReport exhaustive_tree_check(const TreeGraph& tree, int max_size, Budget& budget) {
    validate_tree(tree);
    ExhaustiveTreeReport report;
    const std::size_t n = tree.size();

    // |dU| maintained incrementally: a member vertex is in the boundary while
    // it still has a neighbor outside the set.
    std::vector<int> outside_nbrs(n, 0);
    std::vector<bool> in_set(n, false);
    long long boundary = 0;
    long long size = 0;
    const std::vector<std::vector<int>>& adj = tree.adj;

    auto on_add = [&](int v) {
        in_set[v] = true;
        ++size;
        int out = 0;
        for (int w : adj[v]) {
            if (in_set[w]) {
                if (--outside_nbrs[w] == 0) --boundary;
            } else {
                ++out;
            }
        }
        outside_nbrs[v] = out;
        if (out > 0) ++boundary;
    };
    auto on_remove = [&](int v) {
        if (outside_nbrs[v] > 0) --boundary;
        outside_nbrs[v] = 0;
        for (int w : adj[v])
            if (in_set[w] && w != v) {
                if (outside_nbrs[w]++ == 0) ++boundary;
            }
        in_set[v] = false;
        --size;
    };
    auto visit = [&]() -> bool {
        budget.charge(1);
        ++report.subsets;
        if (2 * boundary < size) report.all_hold = false;
        return false;
    };

    // Anchor at each interior vertex; restrict extensions to larger indices so
    // each subset is enumerated from its minimum vertex only.
    for (std::size_t anchor = 0; anchor < n; ++anchor) {
        if (!tree.interior[anchor]) continue;
        std::vector<bool> allowed(n, false);
        for (std::size_t v = anchor; v < n; ++v) allowed[v] = tree.interior[v];
        ConnectedEnumerator en(adj, std::move(allowed));
        en.run(static_cast<int>(anchor), max_size, on_add, on_remove, visit);
    }
    return report;
}

}  // namespace coarsekit
