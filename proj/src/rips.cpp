#include "coarsekit/rips.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "coarsekit/parallel.hpp"

namespace coarsekit {

namespace {

long long ll_checked_mul(long long a, long long b) {
    __int128 r = static_cast<__int128>(a) * b;
    if (r > INT64_MAX || r < INT64_MIN) throw InvalidInput("overflow in lattice reduction");
    return static_cast<long long>(r);
}

long long ll_checked_add(long long a, long long b) {
    __int128 r = static_cast<__int128>(a) + b;
    if (r > INT64_MAX || r < INT64_MIN) throw InvalidInput("overflow in lattice reduction");
    return static_cast<long long>(r);
}

}  // namespace

bool Rips2Complex::has_edge(int i, int j) const {
    if (i == j) return false;
    if (i > j) std::swap(i, j);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
}

bool Rips2Complex::has_triangle(int i, int j, int k) const {
    std::array<int, 3> t{i, j, k};
    std::sort(t.begin(), t.end());
    if (t[0] == t[1] || t[1] == t[2]) return false;
    return std::binary_search(triangles.begin(), triangles.end(), t);
}

Rips2Complex build_rips(SpacePtr space, double c) {
    if (!space) throw BadParams("null space");
    if (!(c > 0)) throw BadParams("scale must be positive");
    Rips2Complex cx;
    cx.scale = c;
    cx.space = space;
    const int n = static_cast<int>(space->size());
    cx.nbrs.resize(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (space->dist(i, j) <= c + kTol) {
                cx.edges.emplace_back(i, j);
                cx.nbrs[i].push_back(j);
                cx.nbrs[j].push_back(i);
            }
    for (auto& a : cx.nbrs) std::sort(a.begin(), a.end());
    // Flag condition: every pairwise-admissible triple is a triangle. The
    // per-edge scans are independent; results merge in edge order.
    std::vector<std::vector<std::array<int, 3>>> per_edge(cx.edges.size());
    parallel_chunks(cx.edges.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t e = lo; e < hi; ++e) {
            const auto [i, j] = cx.edges[e];
            const auto& ni = cx.nbrs[i];
            const auto& nj = cx.nbrs[j];
            std::size_t a = 0, b = 0;
            while (a < ni.size() && b < nj.size()) {
                if (ni[a] < nj[b]) {
                    ++a;
                } else if (ni[a] > nj[b]) {
                    ++b;
                } else {
                    if (ni[a] > j) per_edge[e].push_back({i, j, ni[a]});
                    ++a;
                    ++b;
                }
            }
        }
    });
    for (const auto& chunk : per_edge)
        cx.triangles.insert(cx.triangles.end(), chunk.begin(), chunk.end());
    std::sort(cx.triangles.begin(), cx.triangles.end());
    return cx;
}

void validate_loop(const Rips2Complex& complex, const Loop& loop) {
    if (loop.empty()) throw LoopInvalid("empty loop");
    const int n = static_cast<int>(complex.space->size());
    for (int v : loop)
        if (v < 0 || v >= n) throw LoopInvalid("vertex out of range");
    if (loop.size() == 1) return;
    if (loop.front() != loop.back()) throw LoopInvalid("loop is not closed");
    for (std::size_t i = 0; i + 1 < loop.size(); ++i)
        if (!complex.has_edge(loop[i], loop[i + 1]))
            throw LoopInvalid("consecutive vertices are not an edge at this scale");
}

// ---- Pi1Data -------------------------------------------------------------------

Pi1Data::Pi1Data(const Rips2Complex& complex) {
    const int n = static_cast<int>(complex.space->size());
    parent_.assign(n, -1);
    depth_.assign(n, 0);
    comp_.assign(n, -1);
    std::vector<bool> visited(n, false);
    int comp_count = 0;
    std::vector<std::pair<int, int>> tree_edges;
    for (int root = 0; root < n; ++root) {
        if (visited[root]) continue;
        visited[root] = true;
        comp_[root] = comp_count;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int w : complex.nbrs[v])
                if (!visited[w]) {
                    visited[w] = true;
                    comp_[w] = comp_count;
                    parent_[w] = v;
                    depth_[w] = depth_[v] + 1;
                    tree_edges.emplace_back(std::min(v, w), std::max(v, w));
                    q.push(w);
                }
        }
        ++comp_count;
    }
    std::sort(tree_edges.begin(), tree_edges.end());
    for (const auto& e : complex.edges)
        if (!std::binary_search(tree_edges.begin(), tree_edges.end(), e)) {
            const int idx = static_cast<int>(nontree_index_.size());
            nontree_index_.emplace(e, idx);
        }

    // Triangle boundaries expressed over the non-tree edges.
    auto edge_coord = [&](int a, int b) -> std::pair<int, long long> {
        const bool fwd = a < b;
        auto it = nontree_index_.find(fwd ? std::make_pair(a, b) : std::make_pair(b, a));
        if (it == nontree_index_.end()) return {-1, 0};
        return {it->second, fwd ? 1 : -1};
    };
    for (const auto& t : complex.triangles) {
        std::map<int, long long> row;
        for (auto [a, b] : {std::make_pair(t[0], t[1]), std::make_pair(t[1], t[2]),
                            std::make_pair(t[2], t[0])}) {
            auto [idx, sign] = edge_coord(a, b);
            if (idx >= 0) row[idx] += sign;
        }
        std::vector<std::pair<int, long long>> sparse;
        for (auto [idx, val] : row)
            if (val != 0) sparse.emplace_back(idx, val);
        if (sparse.empty()) continue;
        // Fold the row into the echelon basis.
        std::vector<std::pair<int, long long>> r = std::move(sparse);
        for (std::size_t bi = 0; bi < basis_.size() && !r.empty();) {
            auto& b = basis_[bi];
            if (b.front().first < r.front().first) {
                ++bi;
                continue;
            }
            if (b.front().first > r.front().first) break;
            // Same pivot: combine with the extended gcd.
            long long x0 = b.front().second, y0 = r.front().second;
            long long g = std::gcd(std::abs(x0), std::abs(y0));
            // Find u, v with u x0 + v y0 = g.
            long long u = 1, v = 0, s = 0, t = 1, a0 = x0, b0 = y0;
            while (b0 != 0) {
                long long qq = a0 / b0;
                long long tmp = a0 - qq * b0;
                a0 = b0;
                b0 = tmp;
                tmp = u - qq * s;
                u = s;
                s = tmp;
                tmp = v - qq * t;
                v = t;
                t = tmp;
            }
            if (a0 < 0) {
                a0 = -a0;
                u = -u;
                v = -v;
            }
            (void)g;
            // new basis row: u*b + v*r ; new remainder: (x0/a0)*r - (y0/a0)*b
            auto combine = [](const std::vector<std::pair<int, long long>>& p, long long cp,
                              const std::vector<std::pair<int, long long>>& q, long long cq) {
                std::vector<std::pair<int, long long>> out;
                std::size_t i = 0, j = 0;
                while (i < p.size() || j < q.size()) {
                    if (j >= q.size() || (i < p.size() && p[i].first < q[j].first)) {
                        long long val = ll_checked_mul(cp, p[i].second);
                        if (val != 0) out.emplace_back(p[i].first, val);
                        ++i;
                    } else if (i >= p.size() || q[j].first < p[i].first) {
                        long long val = ll_checked_mul(cq, q[j].second);
                        if (val != 0) out.emplace_back(q[j].first, val);
                        ++j;
                    } else {
                        long long val = ll_checked_add(ll_checked_mul(cp, p[i].second),
                                                       ll_checked_mul(cq, q[j].second));
                        if (val != 0) out.emplace_back(p[i].first, val);
                        ++i;
                        ++j;
                    }
                }
                return out;
            };
            auto new_b = combine(b, u, r, v);
            auto new_r = combine(r, x0 / a0, b, -y0 / a0);
            b = std::move(new_b);
            r = std::move(new_r);
            if (r.empty()) break;
            if (r.front().first > b.front().first) ++bi;
        }
        if (!r.empty()) {
            if (r.front().second < 0)
                for (auto& [i2, v2] : r) v2 = -v2;
            basis_.push_back(std::move(r));
            std::sort(basis_.begin(), basis_.end(), [](const auto& a, const auto& b) {
                return a.front().first < b.front().first;
            });
        }
    }
}

std::vector<int> Pi1Data::tree_path(int from, int to) const {
    if (comp_[from] != comp_[to]) throw NotConnected("vertices in different components");
    std::vector<int> up_from{from}, up_to{to};
    int a = from, b = to;
    while (depth_[a] > depth_[b]) {
        a = parent_[a];
        up_from.push_back(a);
    }
    while (depth_[b] > depth_[a]) {
        b = parent_[b];
        up_to.push_back(b);
    }
    while (a != b) {
        a = parent_[a];
        up_from.push_back(a);
        b = parent_[b];
        up_to.push_back(b);
    }
    up_from.insert(up_from.end(), up_to.rbegin() + 1, up_to.rend());
    return up_from;
}

std::vector<long long> Pi1Data::loop_vector(const Rips2Complex& complex, const Loop& loop) const {
    validate_loop(complex, loop);
    std::vector<long long> v(nontree_index_.size(), 0);
    for (std::size_t i = 0; i + 1 < loop.size(); ++i) {
        const int a = loop[i], b = loop[i + 1];
        const bool fwd = a < b;
        auto it = nontree_index_.find(fwd ? std::make_pair(a, b) : std::make_pair(b, a));
        if (it != nontree_index_.end()) v[it->second] += fwd ? 1 : -1;
    }
    return v;
}

std::vector<long long> Pi1Data::reduce(std::vector<long long> v) const {
    for (const auto& row : basis_) {
        const int p = row.front().first;
        if (v[p] == 0) continue;
        const long long lead = row.front().second;
        // Floor division keeps the residue canonical in [0, lead).
        long long q = v[p] / lead;
        if (v[p] % lead != 0 && ((v[p] < 0) != (lead < 0))) --q;
        if (q == 0) continue;
        for (const auto& [col, val] : row)
            v[col] = ll_checked_add(v[col], -ll_checked_mul(q, val));
    }
    return v;
}

bool Pi1Data::in_lattice(const std::vector<long long>& v) const {
    const auto residue = reduce(v);
    return std::all_of(residue.begin(), residue.end(), [](long long x) { return x == 0; });
}

H1Class h1_class(const Rips2Complex& complex, const Pi1Data& pi1, const Loop& loop) {
    const auto v = pi1.loop_vector(complex, loop);
    const auto residue = pi1.reduce(v);
    H1Class cls;
    cls.zero = true;
    for (std::size_t i = 0; i < residue.size(); ++i)
        if (residue[i] != 0) {
            cls.zero = false;
            cls.coords.emplace_back(static_cast<int>(i), residue[i]);
        }
    return cls;
}

// ---- loop moves and contraction -------------------------------------------------

std::vector<Loop> loop_moves(const Rips2Complex& complex, const Loop& loop, int max_len) {
    std::vector<Loop> out;
    const int steps = static_cast<int>(loop.size()) - 1;

    // Backtrack removal: ... v, u, v ... -> ... v ...
    for (int i = 0; i + 2 <= steps; ++i)
        if (loop[i] == loop[i + 2]) {
            Loop next(loop.begin(), loop.begin() + i + 1);
            next.insert(next.end(), loop.begin() + i + 3, loop.end());
            out.push_back(std::move(next));
        }
    // Triangle shortcuts: ... a, u, b ... -> ... a, b ... over a filled triangle.
    for (int i = 0; i + 2 <= steps; ++i)
        if (complex.has_triangle(loop[i], loop[i + 1], loop[i + 2])) {
            Loop next(loop.begin(), loop.begin() + i + 1);
            next.insert(next.end(), loop.begin() + i + 2, loop.end());
            out.push_back(std::move(next));
        }
    if (static_cast<int>(loop.size()) + 1 <= max_len + 1) {
        // Triangle insertions: ... a, b ... -> ... a, u, b ...
        for (int i = 0; i < steps; ++i)
            for (int u : complex.nbrs[loop[i]])
                if (complex.has_triangle(loop[i], u, loop[i + 1])) {
                    Loop next(loop.begin(), loop.begin() + i + 1);
                    next.push_back(u);
                    next.insert(next.end(), loop.begin() + i + 1, loop.end());
                    out.push_back(std::move(next));
                }
    }
    if (static_cast<int>(loop.size()) + 2 <= max_len + 1) {
        // Backtrack insertions: ... v ... -> ... v, u, v ...
        for (int i = 0; i <= steps; ++i)
            for (int u : complex.nbrs[loop[i]]) {
                Loop next(loop.begin(), loop.begin() + i + 1);
                next.push_back(u);
                next.push_back(loop[i]);
                next.insert(next.end(), loop.begin() + i + 1, loop.end());
                out.push_back(std::move(next));
            }
    }
    return out;
}

namespace {

std::string loop_key(const Loop& loop) {
    std::string k;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        if (i) k.push_back('|');
        k += std::to_string(loop[i]);
    }
    return k;
}

}  // namespace

ContractionVerdict contract_loop(const Rips2Complex& complex, const Loop& loop,
                                 std::uint64_t move_budget, int length_slack) {
    validate_loop(complex, loop);
    ContractionVerdict verdict;

    Pi1Data pi1(complex);
    verdict.certificate = h1_class(complex, pi1, loop);
    if (!verdict.certificate.zero) {
        verdict.status = ContractionStatus::NontrivialH1;
        return verdict;
    }

    // Greedy phase: apply shrinking moves while any exist. When it reaches the
    // constant loop this already yields a replayable trace; otherwise the
    // breadth-first search below takes over from the original loop.
    {
        std::vector<Loop> trace{loop};
        while (trace.back().size() > 1) {
            const Loop& cur = trace.back();
            auto moves = loop_moves(complex, cur, 0);  // deletions only
            bool advanced = false;
            for (auto& next : moves)
                if (next.size() < cur.size()) {
                    trace.push_back(std::move(next));
                    advanced = true;
                    break;
                }
            if (!advanced) break;
        }
        if (trace.back().size() == 1) {
            verdict.status = ContractionStatus::Contracted;
            verdict.states_explored = trace.size();
            verdict.trace = std::move(trace);
            return verdict;
        }
    }

    const int max_len = static_cast<int>(loop.size()) - 1 + length_slack;
    std::vector<Loop> states{loop};
    std::vector<int> parents{-1};
    std::unordered_map<std::string, int> seen{{loop_key(loop), 0}};
    std::size_t head = 0;
    auto finish = [&](int idx) {
        std::vector<Loop> trace;
        for (int at = idx; at >= 0; at = parents[at]) trace.push_back(states[at]);
        std::reverse(trace.begin(), trace.end());
        verdict.status = ContractionStatus::Contracted;
        verdict.trace = std::move(trace);
        verdict.states_explored = states.size();
    };
    if (loop.size() == 1) {
        finish(0);
        return verdict;
    }
    while (head < states.size()) {
        if (states.size() > move_budget) {
            verdict.status = ContractionStatus::Unknown;
            verdict.states_explored = states.size();
            return verdict;
        }
        const Loop current = states[head];
        for (Loop& next : loop_moves(complex, current, max_len)) {
            std::string k = loop_key(next);
            if (seen.count(k)) continue;
            const int idx = static_cast<int>(states.size());
            seen.emplace(std::move(k), idx);
            states.push_back(std::move(next));
            parents.push_back(static_cast<int>(head));
            if (states.back().size() == 1) {
                finish(idx);
                return verdict;
            }
        }
        ++head;
    }
    verdict.status = ContractionStatus::Unknown;
    verdict.states_explored = states.size();
    return verdict;
}

// ---- interleaving ladder ----------------------------------------------------------

namespace {

void require_c_path(const FiniteMetricSpace& space, const std::vector<int>& path, double c,
                    const char* name) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (space.dist(path[i], path[i + 1]) > c + kTol)
            throw HypothesisViolated(std::string(name) + " is not a c-path at step " +
                                     std::to_string(i + 1));
}

bool single_insertion_apart(const std::vector<int>& shorter, const std::vector<int>& longer) {
    if (shorter.size() + 1 != longer.size()) return false;
    for (std::size_t skip = 0; skip < longer.size(); ++skip) {
        bool match = true;
        for (std::size_t i = 0, j = 0; j < longer.size(); ++j) {
            if (j == skip) continue;
            if (i >= shorter.size() || shorter[i] != longer[j]) {
                match = false;
                break;
            }
            ++i;
        }
        if (match) return true;
    }
    return false;
}

}  // namespace

std::vector<std::vector<int>> interleave_homotopy(const FiniteMetricSpace& space,
                                                  const std::vector<int>& xi,
                                                  const std::vector<int>& eta, double c) {
    if (xi.empty() || eta.empty()) throw HypothesisViolated("empty path");
    if (xi.size() != eta.size())
        throw HypothesisViolated("paths must have the same number of steps");
    if (xi.front() != eta.front() || xi.back() != eta.back())
        throw HypothesisViolated("paths must share endpoints");
    require_c_path(space, xi, c, "first path");
    require_c_path(space, eta, c, "second path");
    const int n = static_cast<int>(xi.size()) - 1;
    for (int i = 1; i <= n - 1; ++i)
        if (space.dist(xi[i], eta[i]) > c + kTol)
            throw HypothesisViolated("paths drift more than c apart at index " +
                                     std::to_string(i));
    std::vector<std::vector<int>> ladder;
    if (n <= 1) return ladder;

    // Row 2j-1 inserts y_j before x_j; row 2j then removes x_j.
    for (int j = 1; j <= n - 1; ++j) {
        std::vector<int> odd(eta.begin(), eta.begin() + j + 1);
        odd.insert(odd.end(), xi.begin() + j, xi.end());
        ladder.push_back(std::move(odd));
        std::vector<int> even(eta.begin(), eta.begin() + j + 1);
        even.insert(even.end(), xi.begin() + j + 1, xi.end());
        ladder.push_back(std::move(even));
    }

    // Replay check: every row is a 2c-path, one elementary move from its
    // predecessor.
    const double cc = 2 * c;
    std::vector<int> prev = xi;
    for (const auto& row : ladder) {
        require_c_path(space, row, cc, "ladder row");
        const bool ok = row.size() > prev.size() ? single_insertion_apart(prev, row)
                                                 : single_insertion_apart(row, prev);
        if (!ok) throw HypothesisViolated("ladder rows are not elementarily homotopic");
        prev = row;
    }
    return ladder;
}

// ---- SC probe -----------------------------------------------------------------------

ScProbeReport sc_probe(SpacePtr space, int x0, double c_prime, double c_second,
                       int loop_sample_size, std::uint64_t move_budget, std::uint64_t seed) {
    if (!(c_second >= c_prime) || !(c_prime > 0)) throw BadParams("need c'' >= c' > 0");
    if (x0 < 0 || static_cast<std::size_t>(x0) >= space->size())
        throw BadParams("base point out of range");
    const Rips2Complex small = build_rips(space, c_prime);
    const Rips2Complex large = build_rips(space, c_second);
    Pi1Data pi1_small(small);
    Pi1Data pi1_large(large);

    ScProbeReport report;

    // H1 functoriality test: non-tree edges of the small complex generate its
    // H1; a nonzero image in the large complex certifies failure of SC.
    {
        // Fundamental loops: tree path closed by the non-tree edge.
        for (const auto& edge : small.edges) {
            // Re-derive non-tree membership through the loop vector: a tree
            // edge contributes the zero vector.
            Loop probe = pi1_small.tree_path(edge.second, edge.first);
            probe.push_back(edge.second);
            const auto vec = pi1_small.loop_vector(small, probe);
            const bool nontree = std::any_of(vec.begin(), vec.end(),
                                             [](long long x) { return x != 0; });
            if (!nontree) continue;
            const H1Class image = h1_class(large, pi1_large, probe);
            if (!image.zero) report.h1_map_zero = false;
        }
        report.sc_failure_certified = !report.h1_map_zero;
    }

    // Seeded loop sampling: a random walk on the small-scale edge graph,
    // closed by a tree path back to the base point, contracted at the large
    // scale.
    std::mt19937_64 rng(seed);
    const int walk_steps = 8;
    for (int s = 0; s < loop_sample_size; ++s) {
        Loop loop{x0};
        int at = x0;
        for (int step = 0; step < walk_steps; ++step) {
            const auto& nb = small.nbrs[at];
            if (nb.empty()) break;
            at = nb[static_cast<std::size_t>(rng() % nb.size())];
            loop.push_back(at);
        }
        if (at != x0) {
            const auto back = pi1_small.tree_path(at, x0);
            loop.insert(loop.end(), back.begin() + 1, back.end());
        }
        if (loop.size() == 1) loop = Loop{x0};
        LoopProbe probe;
        probe.loop = loop;
        const auto verdict = contract_loop(large, loop, move_budget);
        probe.status = verdict.status;
        report.states_explored += verdict.states_explored;
        report.loops.push_back(std::move(probe));
    }
    return report;
}

// ---- rotation numbers -----------------------------------------------------------------

namespace {

Rational normalize_turn(Rational t) {
    const BigInt num = boost::multiprecision::numerator(t);
    const BigInt den = boost::multiprecision::denominator(t);
    BigInt q = num / den;
    if (num < 0 && num % den != 0) --q;
    return t - Rational(q);
}

int arc_index(const Rational& turn) {
    const Rational t3 = turn * 3;
    const BigInt num = boost::multiprecision::numerator(t3);
    const BigInt den = boost::multiprecision::denominator(t3);
    BigInt q = num / den;
    if (num < 0 && num % den != 0) --q;
    const long long idx = q.convert_to<long long>();
    return static_cast<int>(((idx % 3) + 3) % 3);
}

}  // namespace

double chord(double radius, const Rational& a, const Rational& b) {
    const double pi = std::acos(-1.0);
    const double delta = to_double(a - b);
    return 2.0 * radius * std::abs(std::sin(pi * delta));
}

RotationCertificate rotation_number(const CircleLoop& loop) {
    if (loop.turns.empty()) throw BadParams("empty loop");
    RotationCertificate cert;
    cert.radius = loop.radius;
    const std::size_t n = loop.turns.size();
    cert.arcs.reserve(n);
    for (const auto& t : loop.turns) cert.arcs.push_back(arc_index(normalize_turn(t)));
    for (std::size_t j = 0; j < n; ++j) {
        const int a = cert.arcs[j];
        const int b = cert.arcs[(j + 1) % n];
        ++cert.counts[a][b];
    }
    for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3;
        cert.rho += cert.counts[a][b] - cert.counts[b][a];
    }
    return cert;
}

CircleLoop circle_loop_from_xy(const std::vector<std::pair<double, double>>& pts, double R) {
    if (!(R > 0)) throw BadParams("radius must be positive");
    CircleLoop loop;
    loop.radius = R;
    const double pi = std::acos(-1.0);
    for (const auto& [x, y] : pts) {
        const double r = std::hypot(x, y);
        if (std::abs(r - R) > 1e-6 * std::max(1.0, R))
            throw PointOffCircle("point does not lie on the circle");
        double t = std::atan2(y, x) / (2 * pi);
        if (t < 0) t += 1.0;
        // Snap to exact thirds so the half-open arcs behave on clean input.
        for (int k = 0; k <= 3; ++k)
            if (std::abs(t - k / 3.0) < 1e-12) t = k / 3.0;
        loop.turns.push_back(Rational(t));
    }
    return loop;
}

// ---- fixtures ----------------------------------------------------------------------------

FiniteMetricSpace circle_fixture(double R, int m) {
    if (!(R > 0) || m < 3) throw BadParams("need R > 0 and m >= 3");
    const double pi = std::acos(-1.0);
    std::vector<std::string> ids(m);
    std::vector<double> table(static_cast<std::size_t>(m) * m, 0.0);
    for (int j = 0; j < m; ++j) ids[j] = "p" + std::to_string(j);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            const int diff = std::abs(j - k);
            table[static_cast<std::size_t>(j) * m + k] = 2.0 * R * std::sin(pi * diff / m);
        }
    return FiniteMetricSpace("circle(" + std::to_string(R) + "," + std::to_string(m) + ")",
                             std::move(ids), std::move(table));
}

FiniteMetricSpace highway_fixture(int n_max) {
    if (n_max < 2) throw BadParams("n_max must be >= 2");
    if (n_max > 3) throw BadParams("n_max > 3 exceeds desk scale");
    std::int64_t N = 3LL * n_max;
    std::int64_t p = 1;
    for (int i = 0; i < n_max; ++i) p *= 10;
    N += p;
    const int ray = static_cast<int>(N) + 1;  // vertices u_0..u_N

    // Ambient graph: the ray plus a detour of n edges from u_{10^n} to
    // u_{10^n + 3n}.
    std::vector<std::vector<int>> adj(ray);
    auto add_edge = [&](int a, int b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    };
    for (int i = 0; i + 1 < ray; ++i) add_edge(i, i + 1);
    std::int64_t pw = 10;
    for (int n = 1; n <= n_max; ++n) {
        const int from = static_cast<int>(pw);
        const int to = static_cast<int>(pw + 3LL * n);
        int prev = from;
        for (int k = 1; k < n; ++k) {
            const int v = static_cast<int>(adj.size());
            adj.emplace_back();
            add_edge(prev, v);
            prev = v;
        }
        add_edge(prev, to);
        pw *= 10;
    }

    // One BFS per ray vertex; rows of the table are disjoint, so the sources
    // can be sharded.
    std::vector<double> table(static_cast<std::size_t>(ray) * ray, 0.0);
    parallel_chunks(static_cast<std::size_t>(ray), [&](std::size_t lo, std::size_t hi) {
        std::vector<int> dist(adj.size());
        std::queue<int> q;
        for (std::size_t s = lo; s < hi; ++s) {
            std::fill(dist.begin(), dist.end(), -1);
            q.push(static_cast<int>(s));
            dist[s] = 0;
            while (!q.empty()) {
                const int v = q.front();
                q.pop();
                for (int w : adj[v])
                    if (dist[w] < 0) {
                        dist[w] = dist[v] + 1;
                        q.push(w);
                    }
            }
            for (int t = 0; t < ray; ++t) table[s * ray + t] = dist[t];
        }
    });
    std::vector<std::string> ids(ray);
    for (int i = 0; i < ray; ++i) ids[i] = "u" + std::to_string(i);
    return FiniteMetricSpace("highway(" + std::to_string(n_max) + ")", std::move(ids),
                             std::move(table));
}

}  // namespace coarsekit
