#include "coarsekit/group_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace coarsekit {

namespace {

using json = nlohmann::json;

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    __int128 r = static_cast<__int128>(a) * b;
    if (r > INT64_MAX || r < INT64_MIN) throw InvalidInput("integer overflow in group law");
    return static_cast<std::int64_t>(r);
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    __int128 r = static_cast<__int128>(a) + b;
    if (r > INT64_MAX || r < INT64_MIN) throw InvalidInput("integer overflow in group law");
    return static_cast<std::int64_t>(r);
}

std::int64_t checked_pow(std::int64_t base, std::int64_t exp) {
    std::int64_t r = 1;
    for (std::int64_t i = 0; i < exp; ++i) r = checked_mul(r, base);
    return r;
}

// ---- free group -------------------------------------------------------------

class FreeGroupOracle final : public GroupOracle {
public:
    explicit FreeGroupOracle(int rank) {
        if (rank < 1) throw BadParams("free group rank must be >= 1");
        family_ = "free:" + std::to_string(rank);
        identity_ = {};
        for (int i = 0; i < rank; ++i) {
            std::string label = rank <= 26 ? std::string(1, static_cast<char>('a' + i))
                                           : "g" + std::to_string(i + 1);
            generators_.push_back({label, Elem{i + 1}});
            generators_.push_back({label + "'", Elem{-(i + 1)}});
        }
    }

    Elem multiply(const Elem& a, const Elem& b) const override {
        Elem out = a;
        for (std::int64_t letter : b) {
            if (!out.empty() && out.back() == -letter)
                out.pop_back();
            else
                out.push_back(letter);
        }
        return out;
    }

    Elem inverse(const Elem& a) const override {
        Elem out(a.rbegin(), a.rend());
        for (auto& l : out) l = -l;
        return out;
    }
};

// ---- free abelian -----------------------------------------------------------

class FreeAbelianOracle final : public GroupOracle {
public:
    explicit FreeAbelianOracle(int rank) : rank_(rank) {
        if (rank < 1) throw BadParams("rank must be >= 1");
        family_ = "zn:" + std::to_string(rank);
        identity_.assign(rank, 0);
        for (int i = 0; i < rank; ++i) {
            Elem e(rank, 0);
            e[i] = 1;
            std::string label = "x" + std::to_string(i + 1);
            generators_.push_back({label, e});
            e[i] = -1;
            generators_.push_back({label + "'", e});
        }
    }

    Elem multiply(const Elem& a, const Elem& b) const override {
        Elem out(rank_);
        for (int i = 0; i < rank_; ++i) out[i] = checked_add(a[i], b[i]);
        return out;
    }

    Elem inverse(const Elem& a) const override {
        Elem out = a;
        for (auto& v : out) v = -v;
        return out;
    }

private:
    int rank_;
};

// ---- Heisenberg -------------------------------------------------------------

// Integer upper-triangular 3x3 matrices encoded as (a, b, c):
//   [1 a c; 0 1 b; 0 0 1].  Generators s = (1,0,0), t = (0,1,0), u = (0,0,1).
class HeisenbergOracle final : public GroupOracle {
public:
    HeisenbergOracle() {
        family_ = "heis";
        identity_ = {0, 0, 0};
        generators_ = {
            {"s", {1, 0, 0}}, {"s'", {-1, 0, 0}}, {"t", {0, 1, 0}},
            {"t'", {0, -1, 0}}, {"u", {0, 0, 1}}, {"u'", {0, 0, -1}},
        };
    }

    Elem multiply(const Elem& x, const Elem& y) const override {
        return {checked_add(x[0], y[0]), checked_add(x[1], y[1]),
                checked_add(checked_add(x[2], y[2]), checked_mul(x[0], y[1]))};
    }

    Elem inverse(const Elem& x) const override {
        return {-x[0], -x[1], checked_add(-x[2], checked_mul(x[0], x[1]))};
    }
};

// ---- Baumslag-Solitar BS(1, m) ----------------------------------------------

// Matrix model (m^a, x; 0, 1) with x in Z[1/m], encoded as (a, num, e) where
// x = num / m^e in lowest m-adic terms. Conjugation by t multiplies the
// normal part by m: t s t' = s^m.
class BaumslagSolitarOracle final : public GroupOracle {
public:
    explicit BaumslagSolitarOracle(int m) : m_(m) {
        if (m < 2) throw BadParams("bs1 parameter must be >= 2");
        family_ = "bs1:" + std::to_string(m);
        identity_ = {0, 0, 0};
        generators_ = {
            {"s", {0, 1, 0}}, {"s'", {0, -1, 0}}, {"t", {1, 0, 0}}, {"t'", {-1, 0, 0}},
        };
    }

    Elem multiply(const Elem& x, const Elem& y) const override {
        // (a, x)(b, y) = (a + b, x + m^a y)
        std::int64_t a = x[0], xn = x[1], xe = x[2];
        std::int64_t b = y[0], yn = y[1], ye = y[2];
        std::int64_t e2 = ye - a;  // exponent of y after scaling by m^a
        if (e2 < 0) {
            yn = checked_mul(yn, checked_pow(m_, -e2));
            e2 = 0;
        }
        std::int64_t e = std::max(xe, e2);
        std::int64_t num = checked_add(checked_mul(xn, checked_pow(m_, e - xe)),
                                       checked_mul(yn, checked_pow(m_, e - e2)));
        return normalize(checked_add(a, b), num, e);
    }

    Elem inverse(const Elem& x) const override {
        // (a, x)^-1 = (-a, -m^-a x): the exponent shifts by a.
        std::int64_t num = -x[1];
        std::int64_t e = x[2] + x[0];
        if (e < 0) {
            num = checked_mul(num, checked_pow(m_, -e));
            e = 0;
        }
        return normalize(-x[0], num, e);
    }

private:
    Elem normalize(std::int64_t a, std::int64_t num, std::int64_t e) const {
        if (num == 0) return {a, 0, 0};
        while (e > 0 && num % m_ == 0) {
            num /= m_;
            --e;
        }
        return {a, num, e};
    }

    int m_;
};

// ---- lamplighter ------------------------------------------------------------

// Wreath product (Z/nZ) wr Z: a finitely supported lamp configuration and a
// cursor. Encoded as [cursor, p1, v1, p2, v2, ...] with positions sorted and
// values in 1..n-1.
class LamplighterOracle final : public GroupOracle {
public:
    explicit LamplighterOracle(int n) : n_(n) {
        if (n < 2) throw BadParams("lamp parameter must be >= 2");
        family_ = "lamp:" + std::to_string(n);
        identity_ = {0};
        generators_.push_back({"t", {1}});
        generators_.push_back({"t'", {-1}});
        generators_.push_back({"a", {0, 0, 1}});
        if (n > 2) generators_.push_back({"a'", {0, 0, n - 1}});
    }

    Elem multiply(const Elem& x, const Elem& y) const override {
        std::map<std::int64_t, std::int64_t> lamps;
        for (std::size_t i = 1; i + 1 < x.size(); i += 2) lamps[x[i]] = x[i + 1];
        for (std::size_t i = 1; i + 1 < y.size(); i += 2) {
            std::int64_t pos = checked_add(y[i], x[0]);
            lamps[pos] = (lamps[pos] + y[i + 1]) % n_;
            if (lamps[pos] == 0) lamps.erase(pos);
        }
        Elem out{checked_add(x[0], y[0])};
        for (const auto& [p, v] : lamps) {
            out.push_back(p);
            out.push_back(v);
        }
        return out;
    }

    Elem inverse(const Elem& x) const override {
        Elem out{-x[0]};
        std::map<std::int64_t, std::int64_t> lamps;
        for (std::size_t i = 1; i + 1 < x.size(); i += 2) lamps[x[i] - x[0]] = n_ - x[i + 1];
        for (const auto& [p, v] : lamps) {
            out.push_back(p);
            out.push_back(v);
        }
        return out;
    }

private:
    int n_;
};

// ---- SL_n(Z) ----------------------------------------------------------------

class SpecialLinearOracle final : public GroupOracle {
public:
    explicit SpecialLinearOracle(int n) : n_(n) {
        if (n < 2 || n > 6) throw BadParams("slnz supports 2 <= n <= 6");
        family_ = "slnz:" + std::to_string(n);
        identity_.assign(n * n, 0);
        for (int i = 0; i < n; ++i) identity_[i * n + i] = 1;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                std::string label = "e" + std::to_string(i + 1) + std::to_string(j + 1);
                Elem e = identity_;
                e[i * n + j] = 1;
                generators_.push_back({label, e});
                e[i * n + j] = -1;
                generators_.push_back({label + "'", e});
            }
    }

    Elem multiply(const Elem& a, const Elem& b) const override {
        Elem out(n_ * n_, 0);
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < n_; ++k) {
                const std::int64_t aik = a[i * n_ + k];
                if (aik == 0) continue;
                for (int j = 0; j < n_; ++j)
                    out[i * n_ + j] =
                        checked_add(out[i * n_ + j], checked_mul(aik, b[k * n_ + j]));
            }
        return out;
    }

    Elem inverse(const Elem& a) const override {
        // Adjugate; valid because det = 1.
        Elem out(n_ * n_, 0);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                const std::int64_t cof = cofactor(a, j, i);
                out[i * n_ + j] = ((i + j) % 2 == 0) ? cof : -cof;
            }
        return out;
    }

private:
    std::int64_t cofactor(const Elem& a, int row, int col) const {
        std::vector<std::int64_t> minor;
        minor.reserve((n_ - 1) * (n_ - 1));
        for (int i = 0; i < n_; ++i) {
            if (i == row) continue;
            for (int j = 0; j < n_; ++j) {
                if (j == col) continue;
                minor.push_back(a[i * n_ + j]);
            }
        }
        return det(minor, n_ - 1);
    }

    static std::int64_t det(const std::vector<std::int64_t>& m, int n) {
        if (n == 1) return m[0];
        if (n == 2) return checked_add(checked_mul(m[0], m[3]), -checked_mul(m[1], m[2]));
        std::int64_t acc = 0;
        for (int j = 0; j < n; ++j) {
            if (m[j] == 0) continue;
            std::vector<std::int64_t> minor;
            minor.reserve((n - 1) * (n - 1));
            for (int i = 1; i < n; ++i)
                for (int k = 0; k < n; ++k)
                    if (k != j) minor.push_back(m[i * n + k]);
            std::int64_t term = checked_mul(m[j], det(minor, n - 1));
            acc = checked_add(acc, (j % 2 == 0) ? term : -term);
        }
        return acc;
    }

    int n_;
};

// ---- finite table -----------------------------------------------------------

class FiniteTableOracle final : public GroupOracle {
public:
    FiniteTableOracle(std::string name, std::vector<std::vector<int>> table,
                      std::vector<std::pair<std::string, int>> gens)
        : table_(std::move(table)) {
        const int n = static_cast<int>(table_.size());
        if (n == 0) throw BadParams("empty multiplication table");
        for (const auto& row : table_) {
            if (static_cast<int>(row.size()) != n) throw BadParams("ragged multiplication table");
            for (int v : row)
                if (v < 0 || v >= n) throw BadParams("table entry out of range");
        }
        for (int x = 0; x < n; ++x)
            if (table_[0][x] != x || table_[x][0] != x)
                throw BadParams("element 0 must be the identity");
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
                        throw BadParams("multiplication table is not associative");
        inv_.assign(n, -1);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (table_[a][b] == 0) inv_[a] = b;
        for (int v : inv_)
            if (v < 0) throw BadParams("table has a non-invertible element");

        family_ = "table:" + name;
        identity_ = {0};
        for (auto& [label, idx] : gens) {
            if (idx < 0 || idx >= n) throw BadParams("generator index out of range");
            generators_.push_back({label, Elem{idx}});
            if (inv_[idx] != idx) generators_.push_back({label + "'", Elem{inv_[idx]}});
        }
    }

    Elem multiply(const Elem& a, const Elem& b) const override {
        return {table_[a[0]][b[0]]};
    }
    Elem inverse(const Elem& a) const override { return {inv_[a[0]]}; }

    std::size_t order() const { return table_.size(); }

private:
    std::vector<std::vector<int>> table_;
    std::vector<int> inv_;
};

}  // namespace

// ---- GroupOracle common members ---------------------------------------------

std::string GroupOracle::key(const Elem& a) const {
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out.push_back(',');
        out += std::to_string(a[i]);
    }
    return out;
}

Elem GroupOracle::power(const Elem& a, std::int64_t n) const {
    if (n < 0) return power(inverse(a), -n);
    Elem acc = identity_;
    Elem base = a;
    while (n > 0) {
        if (n & 1) acc = multiply(acc, base);
        n >>= 1;
        if (n) base = multiply(base, base);
    }
    return acc;
}

int GroupOracle::generator_index(const std::string& label) const {
    for (std::size_t i = 0; i < generators_.size(); ++i)
        if (generators_[i].label == label) return static_cast<int>(i);
    return -1;
}

Elem GroupOracle::evaluate_word(const std::string& word) const {
    Elem acc = identity_;
    std::istringstream in(word);
    std::string token;
    while (in >> token) {
        std::int64_t exp = 1;
        std::string label = token;
        const auto caret = token.find('^');
        if (caret != std::string::npos) {
            label = token.substr(0, caret);
            exp = std::strtoll(token.c_str() + caret + 1, nullptr, 10);
        }
        const int gi = generator_index(label);
        if (gi < 0) throw InvalidInput("unknown generator '" + label + "'");
        acc = multiply(acc, power(generators_[gi].elem, exp));
    }
    return acc;
}

OraclePtr make_oracle(const std::string& family_spec) {
    std::string name = family_spec;
    int param = 0;
    const auto colon = family_spec.find(':');
    if (colon != std::string::npos) {
        name = family_spec.substr(0, colon);
        param = std::atoi(family_spec.c_str() + colon + 1);
    }
    if (name == "free") return std::make_shared<FreeGroupOracle>(param);
    if (name == "zn") return std::make_shared<FreeAbelianOracle>(param);
    if (name == "heis") return std::make_shared<HeisenbergOracle>();
    if (name == "bs1") return std::make_shared<BaumslagSolitarOracle>(param);
    if (name == "lamp") return std::make_shared<LamplighterOracle>(param);
    if (name == "slnz") return std::make_shared<SpecialLinearOracle>(param);
    throw InvalidInput("unknown oracle family '" + family_spec + "'");
}

OraclePtr make_table_oracle(std::string name, std::vector<std::vector<int>> table,
                            std::vector<std::pair<std::string, int>> generators) {
    return std::make_shared<FiniteTableOracle>(std::move(name), std::move(table),
                                               std::move(generators));
}

OraclePtr dihedral_oracle(int n) {
    if (n < 1) throw BadParams("dihedral parameter must be >= 1");
    const int order = 2 * n;
    // 0..n-1: rotations r^i; n..2n-1: reflections r^i f.
    std::vector<std::vector<int>> table(order, std::vector<int>(order));
    auto mod = [n](int x) { return ((x % n) + n) % n; };
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) {
            const int a = i % n;
            const bool fi = i >= n;
            const int b = j % n;
            const bool fj = j >= n;
            // (r^a f^fi)(r^b f^fj): reflections conjugate rotations to inverses.
            const int rot = fi ? mod(a - b) : mod(a + b);
            const bool refl = fi != fj;
            table[i][j] = rot + (refl ? n : 0);
        }
    std::vector<std::pair<std::string, int>> gens;
    if (n > 1) gens.emplace_back("r", 1);
    gens.emplace_back("f", n);
    return make_table_oracle("dihedral" + std::to_string(order), std::move(table),
                             std::move(gens));
}

std::optional<std::size_t> table_order(const GroupOracle& oracle) {
    if (const auto* t = dynamic_cast<const FiniteTableOracle*>(&oracle)) return t->order();
    return std::nullopt;
}

// ---- BallTable ---------------------------------------------------------------

BallTable::BallTable(OraclePtr oracle, std::vector<Generator> gens)
    : oracle_(std::move(oracle)), gens_(std::move(gens)) {
    if (gens_.empty()) throw BadParams("generator list must be nonempty");
    // The generating list must be symmetric.
    for (const auto& g : gens_) {
        const std::string inv_key = oracle_->key(oracle_->inverse(g.elem));
        bool found = false;
        for (const auto& h : gens_)
            if (oracle_->key(h.elem) == inv_key) found = true;
        if (!found) throw BadParams("generator list is not closed under inverses");
    }
    const std::string k = oracle_->key(oracle_->identity());
    order_.push_back(k);
    elems_.push_back(oracle_->identity());
    entries_.push_back(BallEntry{0, -1, -1});
    index_.emplace(k, 0);
    level_sizes_.push_back(1);
}

int BallTable::find(const std::string& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? -1 : it->second;
}

std::uint64_t BallTable::ball_size(int r) const {
    std::uint64_t total = 0;
    for (int i = 0; i <= r && i < static_cast<int>(level_sizes_.size()); ++i)
        total += level_sizes_[i];
    return total;
}

void BallTable::expand_one_level(Budget& budget) {
    if (closed_) {
        ++radius_;
        level_sizes_.push_back(0);
        return;
    }
    // Frontier: all entries of the current radius, already in key order.
    std::vector<int> frontier;
    for (std::size_t i = 0; i < order_.size(); ++i)
        if (entries_[i].len == radius_) frontier.push_back(static_cast<int>(i));

    struct Pending {
        std::string key;
        Elem elem;
        std::int32_t parent;
        std::int32_t letter;
    };
    std::vector<Pending> fresh;
    std::unordered_map<std::string, int> seen_now;
    for (int idx : frontier) {
        for (std::size_t gi = 0; gi < gens_.size(); ++gi) {
            Elem next = oracle_->multiply(elems_[idx], gens_[gi].elem);
            std::string k = oracle_->key(next);
            if (index_.count(k) || seen_now.count(k)) continue;
            budget.charge(1);
            seen_now.emplace(k, static_cast<int>(fresh.size()));
            fresh.push_back(Pending{std::move(k), std::move(next), idx,
                                    static_cast<std::int32_t>(gi)});
        }
    }
    std::sort(fresh.begin(), fresh.end(),
              [](const Pending& a, const Pending& b) { return a.key < b.key; });
    ++radius_;
    level_sizes_.push_back(fresh.size());
    if (fresh.empty()) closed_ = true;
    for (auto& p : fresh) {
        index_.emplace(p.key, static_cast<int>(order_.size()));
        order_.push_back(std::move(p.key));
        elems_.push_back(std::move(p.elem));
        entries_.push_back(BallEntry{radius_, p.parent, p.letter});
    }
}

void BallTable::extend_to(int r, Budget& budget) {
    while (radius_ < r) expand_one_level(budget);
}

int BallTable::grow_until_found(const std::string& key, int max_radius, Budget& budget) {
    int idx = find(key);
    while (idx < 0 && radius_ < max_radius && !closed_) {
        expand_one_level(budget);
        idx = find(key);
    }
    if (idx < 0)
        throw NotFoundWithinRadius("element not found within radius " +
                                   std::to_string(max_radius));
    return entries_[idx].len;
}

BallTable word_ball(OraclePtr oracle, int radius, Budget& budget) {
    auto gens = oracle->generators();
    return word_ball(std::move(oracle), std::move(gens), radius, budget);
}

BallTable word_ball(OraclePtr oracle, std::vector<Generator> gens, int radius, Budget& budget) {
    if (radius < 0) throw BadParams("radius must be >= 0");
    budget.charge(1);  // the identity
    BallTable table(std::move(oracle), std::move(gens));
    table.extend_to(radius, budget);
    return table;
}

int word_length(BallTable& cache, const Elem& g, int max_radius, Budget& budget) {
    return cache.grow_until_found(cache.oracle().key(g), max_radius, budget);
}

int word_length(OraclePtr oracle, const Elem& g, int max_radius, Budget& budget) {
    BallTable cache(oracle, oracle->generators());
    return word_length(cache, g, max_radius, budget);
}

FiniteMetricSpace ball_metric_space(OraclePtr oracle, int radius, Budget& budget) {
    BallTable table = word_ball(oracle, 2 * radius, budget);
    std::vector<int> pts;
    for (std::size_t i = 0; i < table.size(); ++i)
        if (table.entry_at(i).len <= radius) pts.push_back(static_cast<int>(i));

    const std::size_t n = pts.size();
    std::vector<std::string> ids(n);
    std::vector<double> dist(n * n, 0.0);
    std::vector<Rational> exact(n * n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = table.key_at(pts[i]);
    for (std::size_t i = 0; i < n; ++i) {
        const Elem gi_inv = oracle->inverse(table.elem_at(pts[i]));
        for (std::size_t j = i + 1; j < n; ++j) {
            const Elem q = oracle->multiply(gi_inv, table.elem_at(pts[j]));
            const int at = table.find(oracle->key(q));
            if (at < 0) throw NotFoundWithinRadius("quotient escaped the doubled ball");
            const int len = table.entry_at(at).len;
            dist[i * n + j] = dist[j * n + i] = static_cast<double>(len);
            exact[i * n + j] = exact[j * n + i] = len;
        }
    }
    return FiniteMetricSpace(oracle->family() + "-ball" + std::to_string(radius), std::move(ids),
                             std::move(dist), std::move(exact));
}

std::vector<DistortionEntry> distortion_profile(OraclePtr oracle, const Elem& z,
                                                std::int64_t n_max, int max_radius,
                                                Budget& budget) {
    std::vector<DistortionEntry> out;
    out.push_back({0, 0});
    std::vector<std::string> targets;
    Elem p = oracle->identity();
    for (std::int64_t n = 1; n <= n_max; ++n) {
        p = oracle->multiply(p, z);
        targets.push_back(oracle->key(p));
        out.push_back({n, std::nullopt});
    }

    BallTable table(oracle, oracle->generators());
    try {
        bool all_found = false;
        while (!all_found) {
            all_found = true;
            for (std::size_t i = 0; i < targets.size(); ++i) {
                if (out[i + 1].length) continue;
                const int at = table.find(targets[i]);
                if (at >= 0)
                    out[i + 1].length = table.entry_at(at).len;
                else
                    all_found = false;
            }
            if (all_found || table.radius() >= max_radius || table.closed()) break;
            table.extend_to(table.radius() + 1, budget);
        }
    } catch (const BudgetExceeded&) {
        // remaining entries stay unknown
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (out[i + 1].length) continue;
        const int at = table.find(targets[i]);
        if (at >= 0) out[i + 1].length = table.entry_at(at).len;
    }
    return out;
}

double distortion_exponent(const std::vector<DistortionEntry>& profile, double tail_fraction) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& e : profile)
        if (e.n >= 1 && e.length && *e.length >= 1)
            pts.emplace_back(std::log(static_cast<double>(e.n)),
                             std::log(static_cast<double>(*e.length)));
    if (pts.size() < 4) throw TooFewSamples("need at least 4 found entries");
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
    if (std::abs(denom) < 1e-12) throw TooFewSamples("degenerate abscissae");
    return (m * sxy - sx * sy) / denom;
}

std::pair<Rational, Rational> bilipschitz_constants(OraclePtr oracle,
                                                    const std::vector<Generator>& gens1,
                                                    const std::vector<Generator>& gens2,
                                                    int radius, Budget& budget) {
    if (radius < 1) throw BadParams("radius must be >= 1");
    const int cap = 8 * radius + 8;
    BallTable b1(oracle, gens1);
    BallTable b2(oracle, gens2);
    b1.extend_to(radius, budget);

    // Cross-generation check on the explored balls.
    try {
        for (const auto& g : gens1) b2.grow_until_found(oracle->key(g.elem), cap, budget);
        for (const auto& g : gens2) b1.grow_until_found(oracle->key(g.elem), cap, budget);
    } catch (const NotFoundWithinRadius&) {
        throw GenerationFailure("generator sets do not generate the same group on this ball");
    }

    bool any = false;
    Rational lo, hi;
    for (std::size_t i = 0; i < b1.size(); ++i) {
        const int d1 = b1.entry_at(i).len;
        if (d1 == 0 || d1 > radius) continue;
        int d2;
        try {
            d2 = b2.grow_until_found(b1.key_at(i), cap, budget);
        } catch (const NotFoundWithinRadius&) {
            throw GenerationFailure("ball element unreachable with second generator set");
        }
        const Rational ratio(d2, d1);
        if (!any) {
            lo = hi = ratio;
            any = true;
        } else {
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    }
    if (!any) throw BadParams("ball contains no nontrivial elements");
    return {lo, hi};
}

// ---- step relations ----------------------------------------------------------

void StepRelation::validate() const {
    if (!base) throw InvalidInput("step relation missing base space");
    const int n = static_cast<int>(base->size());
    for (auto [i, j] : pairs) {
        if (i < 0 || j < 0 || i >= n || j >= n) throw InvalidInput("pair out of range");
        if (i == j) throw InvalidInput("self-pairs are implicit and must not be listed");
        if (i > j) throw InvalidInput("pairs must be stored as (i, j) with i < j");
    }
}

std::vector<std::vector<int>> StepRelation::adjacency() const {
    std::vector<std::vector<int>> adj(base->size());
    for (auto [i, j] : pairs) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    return adj;
}

FiniteMetricSpace nu_metric(const StepRelation& rel) {
    rel.validate();
    const std::size_t n = rel.base->size();
    const auto adj = rel.adjacency();
    std::vector<std::int64_t> hops(n * n, -1);
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<int> queue{static_cast<int>(s)};
        hops[s * n + s] = 0;
        for (std::size_t h = 0; h < queue.size(); ++h) {
            const int v = queue[h];
            for (int w : adj[v])
                if (hops[s * n + w] < 0) {
                    hops[s * n + w] = hops[s * n + v] + 1;
                    queue.push_back(w);
                }
        }
    }
    for (auto h : hops)
        if (h < 0) throw NotConnected("base space is not pairs-connected");
    std::vector<double> table(n * n);
    std::vector<Rational> exact(n * n);
    for (std::size_t i = 0; i < n * n; ++i) {
        table[i] = static_cast<double>(hops[i]);
        exact[i] = hops[i];
    }
    return FiniteMetricSpace(rel.base->label() + "-nu", rel.base->points(), std::move(table),
                             std::move(exact));
}

FiniteMetricSpace delta_metric(const StepRelation& rel) {
    rel.validate();
    const std::size_t n = rel.base->size();
    if (rel.base->has_exact()) {
        const Rational unreachable(-1);
        std::vector<Rational> d(n * n, unreachable);
        for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0;
        for (auto [i, j] : rel.pairs) {
            const Rational& w = rel.base->exact_dist(i, j);
            if (d[i * n + j] < 0 || w < d[i * n + j]) d[i * n + j] = d[j * n + i] = w;
        }
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) {
                if (d[i * n + k] < 0) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    if (d[k * n + j] < 0) continue;
                    Rational through = d[i * n + k] + d[k * n + j];
                    if (d[i * n + j] < 0 || through < d[i * n + j]) d[i * n + j] = through;
                }
            }
        for (const auto& v : d)
            if (v < 0) throw NotConnected("base space is not pairs-connected");
        std::vector<double> table(n * n);
        for (std::size_t i = 0; i < n * n; ++i) table[i] = to_double(d[i]);
        return FiniteMetricSpace(rel.base->label() + "-delta", rel.base->points(),
                                 std::move(table), std::move(d));
    }
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d(n * n, inf);
    for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
    for (auto [i, j] : rel.pairs)
        d[i * n + j] = d[j * n + i] = std::min(d[i * n + j], rel.base->dist(i, j));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
    for (double v : d)
        if (v == inf) throw NotConnected("base space is not pairs-connected");
    return FiniteMetricSpace(rel.base->label() + "-delta", rel.base->points(), std::move(d));
}

// ---- cache files --------------------------------------------------------------

std::string ball_cache_to_jsonl(const BallTable& table) {
    std::ostringstream out;
    json header;
    header["format"] = "coarsekit-ball";
    header["family"] = table.oracle().family();
    json gens = json::array();
    for (const auto& g : table.generators()) gens.push_back(g.label);
    header["generators"] = gens;
    header["radius"] = table.radius();
    out << header.dump() << "\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& e = table.entry_at(i);
        json rec;
        rec["key"] = table.key_at(i);
        rec["len"] = e.len;
        rec["parent"] = e.parent < 0 ? json(nullptr) : json(table.key_at(e.parent));
        rec["letter"] =
            e.letter < 0 ? json(nullptr) : json(table.generators()[e.letter].label);
        out << rec.dump() << "\n";
    }
    return out.str();
}

void save_ball_cache(const BallTable& table, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot write cache file " + path);
    f << ball_cache_to_jsonl(table);
}

BallTable load_ball_cache(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot read cache file " + path);
    std::string line;
    if (!std::getline(f, line)) throw InvalidInput("empty cache file");
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || header.value("format", "") != "coarsekit-ball")
        throw InvalidInput("not a ball cache file");
    OraclePtr oracle = make_oracle(header.at("family").get<std::string>());

    std::vector<Generator> gens;
    for (const auto& lbl : header.at("generators")) {
        const int gi = oracle->generator_index(lbl.get<std::string>());
        if (gi < 0) throw InvalidInput("cache references unknown generator");
        gens.push_back(oracle->generators()[gi]);
    }

    BallTable table(oracle, gens);
    const int radius = header.at("radius").get<int>();
    // Re-derive the ball instead of trusting record bodies, then verify.
    Budget budget(UINT64_MAX);
    table.extend_to(radius, budget);
    std::size_t i = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        json rec = json::parse(line);
        if (i >= table.size() || rec.at("key").get<std::string>() != table.key_at(i) ||
            rec.at("len").get<int>() != table.entry_at(i).len)
            throw InvalidInput("cache file disagrees with recomputed ball");
        ++i;
    }
    if (i != table.size()) throw InvalidInput("cache file is truncated");
    return table;
}

}  // namespace coarsekit
