#include "coarsekit/metric_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <tuple>

#include "coarsekit/parallel.hpp"

namespace coarsekit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Union-find over point indices.
struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

std::vector<std::vector<int>> blocks_in_first_point_order(DisjointSets& ds, std::size_t n) {
    std::vector<std::vector<int>> blocks;
    std::vector<int> block_of(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        int root = ds.find(static_cast<int>(i));
        if (block_of[root] < 0) {
            block_of[root] = static_cast<int>(blocks.size());
            blocks.emplace_back();
        }
        blocks[block_of[root]].push_back(static_cast<int>(i));
    }
    return blocks;
}

}  // namespace

FiniteMetricSpace::FiniteMetricSpace(std::string label, std::vector<std::string> points,
                                     std::vector<double> table,
                                     std::optional<std::vector<Rational>> exact_table)
    : label_(std::move(label)),
      points_(std::move(points)),
      table_(std::move(table)),
      exact_(std::move(exact_table)) {
    validate();
}

void FiniteMetricSpace::validate() const {
    const std::size_t n = points_.size();
    if (table_.size() != n * n) throw InvalidInput("distance table has wrong shape");
    if (exact_ && exact_->size() != n * n) throw InvalidInput("exact table has wrong shape");
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(dist(i, i)) > kTol) throw InvalidInput("nonzero self-distance");
        for (std::size_t j = 0; j < n; ++j) {
            const double d = dist(i, j);
            if (!(d >= 0.0) || !std::isfinite(d)) throw InvalidInput("bad distance value");
            if (std::abs(d - dist(j, i)) > kTol) throw InvalidInput("asymmetric table");
            if (exact_ && exact_dist(i, j) != exact_dist(j, i))
                throw InvalidInput("asymmetric exact table");
        }
    }
    // All-pairs scan; safe to shard because every violation throws the same
    // error.
    parallel_chunks(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    if (dist(i, k) > dist(i, j) + dist(j, k) + kTol)
                        throw InvalidInput("triangle inequality violated");
    });
}

int FiniteMetricSpace::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < points_.size(); ++i)
        if (points_[i] == id) return static_cast<int>(i);
    return -1;
}

double FiniteMetricSpace::diameter() const {
    double d = 0.0;
    for (double v : table_) d = std::max(d, v);
    return d;
}

FiniteMetricSpace FiniteMetricSpace::from_line(std::string label, std::vector<double> coords) {
    const std::size_t n = coords.size();
    std::vector<std::string> ids(n);
    std::vector<double> table(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = std::to_string(i);
        for (std::size_t j = 0; j < n; ++j) table[i * n + j] = std::abs(coords[i] - coords[j]);
    }
    return FiniteMetricSpace(std::move(label), std::move(ids), std::move(table));
}

FiniteMetricSpace FiniteMetricSpace::from_line_exact(std::string label,
                                                     std::vector<Rational> coords) {
    const std::size_t n = coords.size();
    std::vector<std::string> ids(n);
    std::vector<double> table(n * n, 0.0);
    std::vector<Rational> exact(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = std::to_string(i);
        for (std::size_t j = 0; j < n; ++j) {
            Rational d = coords[i] - coords[j];
            if (d < 0) d = -d;
            exact[i * n + j] = d;
            table[i * n + j] = to_double(d);
        }
    }
    return FiniteMetricSpace(std::move(label), std::move(ids), std::move(table), std::move(exact));
}

FiniteMetricSpace FiniteMetricSpace::from_graph(
    std::string label, std::size_t n_points,
    const std::vector<std::tuple<int, int, Rational>>& edges, std::vector<std::string> point_ids) {
    if (point_ids.empty()) {
        point_ids.resize(n_points);
        for (std::size_t i = 0; i < n_points; ++i) point_ids[i] = std::to_string(i);
    }
    if (point_ids.size() != n_points) throw InvalidInput("point id list has wrong length");

    // All-pairs shortest paths over exact weights (Floyd-Warshall).
    const Rational inf(-1);  // marker: negative means unreachable
    std::vector<Rational> d(n_points * n_points, inf);
    auto at = [&](std::size_t i, std::size_t j) -> Rational& { return d[i * n_points + j]; };
    for (std::size_t i = 0; i < n_points; ++i) at(i, i) = 0;
    for (const auto& [a, b, w] : edges) {
        if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n_points ||
            static_cast<std::size_t>(b) >= n_points)
            throw InvalidInput("edge endpoint out of range");
        if (w < 0) throw InvalidInput("negative edge weight");
        if (at(a, b) < 0 || w < at(a, b)) at(a, b) = at(b, a) = w;
    }
    for (std::size_t k = 0; k < n_points; ++k)
        for (std::size_t i = 0; i < n_points; ++i) {
            if (at(i, k) < 0) continue;
            for (std::size_t j = 0; j < n_points; ++j) {
                if (at(k, j) < 0) continue;
                Rational through = at(i, k) + at(k, j);
                if (at(i, j) < 0 || through < at(i, j)) at(i, j) = through;
            }
        }
    for (const auto& v : d)
        if (v < 0) throw NotConnected("graph metric requires a connected graph");

    std::vector<double> table(n_points * n_points);
    for (std::size_t i = 0; i < d.size(); ++i) table[i] = to_double(d[i]);
    return FiniteMetricSpace(std::move(label), std::move(point_ids), std::move(table),
                             std::move(d));
}

double ControlFunction::eval(double t) const {
    if (kind == Kind::Upper) {
        // value at the largest breakpoint <= t
        double v = 0.0;
        bool any = false;
        for (const auto& [bt, bv] : breakpoints) {
            if (bt <= t + kTol) {
                v = bv;
                any = true;
            } else {
                break;
            }
        }
        if (!any) return breakpoints.empty() ? 0.0 : breakpoints.front().second;
        if (!breakpoints.empty() && t > breakpoints.back().first)
            v += tail_slope * (t - breakpoints.back().first);
        return v;
    }
    // lower: value at the smallest breakpoint >= t
    for (const auto& [bt, bv] : breakpoints)
        if (bt + kTol >= t) return bv;
    if (tail_infinite) return kInf;
    if (breakpoints.empty()) return 0.0;
    return breakpoints.back().second + tail_slope * (t - breakpoints.back().first);
}

void MapSample::validate() const {
    if (!domain || !codomain) throw InvalidInput("map sample missing spaces");
    if (image.size() != domain->size()) throw InvalidInput("map sample not total on domain");
    for (int v : image)
        if (v < 0 || static_cast<std::size_t>(v) >= codomain->size())
            throw InvalidInput("map sample image out of range");
}

std::vector<std::vector<int>> c_components(const FiniteMetricSpace& space, double c) {
    if (!(c > 0)) throw BadParams("c must be positive");
    const std::size_t n = space.size();
    DisjointSets ds(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (space.dist(i, j) <= c + kTol) ds.unite(static_cast<int>(i), static_cast<int>(j));
    return blocks_in_first_point_order(ds, n);
}

bool is_c_geodesic(const FiniteMetricSpace& space, double c) {
    if (!(c > 0)) throw BadParams("c must be positive");
    const std::size_t n = space.size();
    // Shortest paths in the graph of admissible steps, weighted by distance.
    std::vector<double> sp(n * n, kInf);
    for (std::size_t i = 0; i < n; ++i) sp[i * n + i] = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && space.dist(i, j) <= c + kTol) sp[i * n + j] = space.dist(i, j);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                sp[i * n + j] = std::min(sp[i * n + j], sp[i * n + k] + sp[k * n + j]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (sp[i * n + j] == kInf) return false;
            if (std::abs(sp[i * n + j] - space.dist(i, j)) > kTol) return false;
        }
    return true;
}

namespace {

// Minimax closure: result[i][j] = min over chains of the max step. Works for
// any totally ordered weight type; only copies input values, never mixes them.
template <typename T>
void minimax_closure(std::vector<T>& w, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                T through = std::max(w[i * n + k], w[k * n + j]);
                if (through < w[i * n + j]) w[i * n + j] = through;
            }
}

}  // namespace

FiniteMetricSpace ultrametrize(const FiniteMetricSpace& space) {
    const std::size_t n = space.size();
    if (space.has_exact()) {
        std::vector<Rational> w(n * n);
        for (std::size_t i = 0; i < n * n; ++i) w[i] = space.exact_dist(i / n, i % n);
        minimax_closure(w, n);
        std::vector<double> table(n * n);
        for (std::size_t i = 0; i < n * n; ++i) table[i] = to_double(w[i]);
        return FiniteMetricSpace(space.label() + "^u", space.points(), std::move(table),
                                 std::move(w));
    }
    std::vector<double> w(n * n);
    for (std::size_t i = 0; i < n * n; ++i) w[i] = space.dist(i / n, i % n);
    minimax_closure(w, n);
    return FiniteMetricSpace(space.label() + "^u", space.points(), std::move(w));
}

double chain_diameter_profile(const FiniteMetricSpace& space, double r) {
    if (!(r > 0)) throw BadParams("r must be positive");
    double best = 0.0;
    for (const auto& block : c_components(space, r))
        for (std::size_t a = 0; a < block.size(); ++a)
            for (std::size_t b = a + 1; b < block.size(); ++b)
                best = std::max(best, space.dist(block[a], block[b]));
    return best;
}

ScaleGraphResult scale_graph(const FiniteMetricSpace& space, double c) {
    if (!(c > 0)) throw BadParams("c must be positive");
    const std::size_t n = space.size();
    if (n == 0) throw BadParams("empty space has no scale graph");

    // Hausdorff collapse: identify points at distance zero.
    DisjointSets ds(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (space.dist(i, j) <= kTol) ds.unite(static_cast<int>(i), static_cast<int>(j));
    std::vector<int> vertex_of(n, -1);
    std::vector<std::string> vertex_ids;
    for (std::size_t i = 0; i < n; ++i) {
        int root = ds.find(static_cast<int>(i));
        if (vertex_of[root] < 0) {
            vertex_of[root] = static_cast<int>(vertex_ids.size());
            vertex_ids.push_back(space.point(i));
        }
        vertex_of[i] = vertex_of[root];
    }
    const std::size_t m = vertex_ids.size();

    // Hop distances over edges 0 < d <= c, then scale by c.
    std::vector<int> hops(m * m, -1);
    std::vector<std::vector<int>> adj(m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = space.dist(i, j);
            if (d > kTol && d <= c + kTol && vertex_of[i] != vertex_of[j]) {
                adj[vertex_of[i]].push_back(vertex_of[j]);
                adj[vertex_of[j]].push_back(vertex_of[i]);
            }
        }
    for (std::size_t s = 0; s < m; ++s) {
        std::queue<int> q;
        q.push(static_cast<int>(s));
        hops[s * m + s] = 0;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int w : adj[v])
                if (hops[s * m + w] < 0) {
                    hops[s * m + w] = hops[s * m + v] + 1;
                    q.push(w);
                }
        }
    }
    for (int h : hops)
        if (h < 0) throw NotCoarselyConnected("space is not c-coarsely connected at this scale");

    std::vector<double> table(m * m);
    for (std::size_t i = 0; i < m * m; ++i) table[i] = c * hops[i];
    FiniteMetricSpace graph(space.label() + "_c", std::move(vertex_ids), std::move(table));
    return ScaleGraphResult{std::move(vertex_of), std::move(graph)};
}

ControlPair empirical_controls(const MapSample& f) {
    f.validate();
    const std::size_t n = f.domain->size();
    if (n == 0) {
        // inf over the empty set: the lower control is identically infinite.
        return ControlPair{ControlFunction{ControlFunction::Kind::Lower, {}, true, 0.0},
                           ControlFunction{ControlFunction::Kind::Upper, {}, false, 0.0}};
    }

    std::vector<double> dxs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) dxs.push_back(f.domain->dist(i, j));
    std::sort(dxs.begin(), dxs.end());
    dxs.erase(std::unique(dxs.begin(), dxs.end(),
                          [](double a, double b) { return std::abs(a - b) <= kTol; }),
              dxs.end());

    ControlFunction upper{ControlFunction::Kind::Upper, {}, false, 0.0};
    ControlFunction lower{ControlFunction::Kind::Lower, {}, true, 0.0};
    for (double t : dxs) {
        double up = 0.0;
        double lo = kInf;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                const double dx = f.domain->dist(i, j);
                const double dy = f.codomain->dist(f.image[i], f.image[j]);
                if (dx <= t + kTol) up = std::max(up, dy);
                if (dx + kTol >= t) lo = std::min(lo, dy);
            }
        upper.breakpoints.emplace_back(t, up);
        lower.breakpoints.emplace_back(t, lo);
    }
    return ControlPair{std::move(lower), std::move(upper)};
}

double map_closeness(const MapSample& f, const MapSample& g) {
    f.validate();
    g.validate();
    const bool same_domain =
        f.domain.get() == g.domain.get() || f.domain->points() == g.domain->points();
    const bool same_codomain =
        f.codomain.get() == g.codomain.get() || f.codomain->points() == g.codomain->points();
    if (!same_domain || !same_codomain)
        throw DomainMismatch("maps must share domain and codomain");
    double best = 0.0;
    for (std::size_t i = 0; i < f.domain->size(); ++i)
        best = std::max(best, f.codomain->dist(f.image[i], g.image[i]));
    return best;
}

AsdimCheck verify_asdim_witness(const FiniteMetricSpace& space, const AsdimWitness& witness) {
    const std::size_t n = space.size();
    std::vector<int> seen(n, 0);
    for (const auto& family : witness.families)
        for (const auto& piece : family)
            for (int p : piece) {
                if (p < 0 || static_cast<std::size_t>(p) >= n)
                    throw NotAPartition("piece contains an unknown point");
                seen[p] += 1;
            }
    for (int s : seen)
        if (s != 1) throw NotAPartition("families must partition the point set");

    AsdimCheck check;
    check.ok = true;
    for (const auto& family : witness.families) {
        for (const auto& piece : family)
            for (std::size_t a = 0; a < piece.size(); ++a)
                for (std::size_t b = a + 1; b < piece.size(); ++b)
                    check.max_piece_diameter =
                        std::max(check.max_piece_diameter, space.dist(piece[a], piece[b]));
        for (std::size_t p = 0; p < family.size(); ++p)
            for (std::size_t q = p + 1; q < family.size(); ++q) {
                double sep = kInf;
                for (int a : family[p])
                    for (int b : family[q]) sep = std::min(sep, space.dist(a, b));
                if (sep < witness.r - kTol) check.ok = false;
            }
    }
    return check;
}

}  // namespace coarsekit
