#ifndef COARSEKIT_GROUP_ORACLES_HPP
#define COARSEKIT_GROUP_ORACLES_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coarsekit/errors.hpp"
#include "coarsekit/metric_core.hpp"
#include "coarsekit/rational.hpp"

namespace coarsekit {

/// Group elements are flat integer vectors; each oracle family fixes its own
/// encoding and keeps it canonical, so the serialized vector doubles as an
/// exact equality key.
using Elem = std::vector<std::int64_t>;

struct Generator {
    std::string label;
    Elem elem;
};

/// An evaluable group: identity, multiplication, inversion, canonical keys,
/// and a marked symmetric generating list.
class GroupOracle {
public:
    virtual ~GroupOracle() = default;

    const std::string& family() const { return family_; }
    const Elem& identity() const { return identity_; }
    const std::vector<Generator>& generators() const { return generators_; }

    virtual Elem multiply(const Elem& a, const Elem& b) const = 0;
    virtual Elem inverse(const Elem& a) const = 0;

    std::string key(const Elem& a) const;
    Elem power(const Elem& a, std::int64_t n) const;
    /// Evaluates a word over generator labels, e.g. "s t u'".
    Elem evaluate_word(const std::string& word) const;
    int generator_index(const std::string& label) const;  // -1 when absent

protected:
    std::string family_;
    Elem identity_;
    std::vector<Generator> generators_;
};

using OraclePtr = std::shared_ptr<const GroupOracle>;

/// Parses a family spec: free:k, zn:n, heis, bs1:m, lamp:n, slnz:n.
OraclePtr make_oracle(const std::string& family_spec);

/// Finite group given by an explicit multiplication table.
OraclePtr make_table_oracle(std::string name, std::vector<std::vector<int>> table,
                            std::vector<std::pair<std::string, int>> generators);

/// Dihedral group of order 2n as a table oracle with generators r (rotation)
/// and f (reflection).
OraclePtr dihedral_oracle(int n);

/// Order of a table oracle's underlying group (table oracles only).
std::optional<std::size_t> table_order(const GroupOracle& oracle);

// --- word balls -------------------------------------------------------------

struct BallEntry {
    int len = 0;
    std::int32_t parent = -1;  // index into `order`, -1 for the identity
    std::int32_t letter = -1;  // generator index used at discovery
};

/// Breadth-first closure of the identity under right multiplication,
/// deduplicated by key. Frontiers are processed in (length, key) order and
/// generators in declared order, which pins parents and letters uniquely.
class BallTable {
public:
    BallTable(OraclePtr oracle, std::vector<Generator> gens);

    const GroupOracle& oracle() const { return *oracle_; }
    const std::vector<Generator>& generators() const { return gens_; }
    int radius() const { return radius_; }

    std::size_t size() const { return order_.size(); }
    const std::string& key_at(std::size_t i) const { return order_[i]; }
    const Elem& elem_at(std::size_t i) const { return elems_[i]; }
    const BallEntry& entry_at(std::size_t i) const { return entries_[i]; }
    int find(const std::string& key) const;  // -1 when absent

    /// Number of elements of length <= r (r <= radius()).
    std::uint64_t ball_size(int r) const;

    /// Grows the table to the given radius; throws BudgetExceeded if the
    /// budget runs out before the radius is complete.
    void extend_to(int r, Budget& budget);
    /// Grows until the key appears or max_radius is exhausted; returns length.
    int grow_until_found(const std::string& key, int max_radius, Budget& budget);
    /// True once the group has been fully enumerated (frontier died out).
    bool closed() const { return closed_; }

private:
    void expand_one_level(Budget& budget);

    OraclePtr oracle_;
    std::vector<Generator> gens_;
    int radius_ = 0;
    bool closed_ = false;
    std::vector<std::string> order_;  // discovery order = (len, key) order
    std::vector<Elem> elems_;
    std::vector<BallEntry> entries_;
    std::vector<std::uint64_t> level_sizes_;  // per-length counts
    std::unordered_map<std::string, int> index_;
};

BallTable word_ball(OraclePtr oracle, int radius, Budget& budget);
BallTable word_ball(OraclePtr oracle, std::vector<Generator> gens, int radius, Budget& budget);

/// Exact word length of g, or NotFoundWithinRadius.
int word_length(OraclePtr oracle, const Elem& g, int max_radius, Budget& budget);
int word_length(BallTable& cache, const Elem& g, int max_radius, Budget& budget);

/// Materializes (B(radius), d_S) as a finite metric space; distances are
/// word lengths of quotients, computed on a shared ball of radius 2r.
FiniteMetricSpace ball_metric_space(OraclePtr oracle, int radius, Budget& budget);

struct DistortionEntry {
    std::int64_t n = 0;
    std::optional<int> length;  // empty when not found within limits
};

/// Word lengths of powers z^n for n = 1..n_max.
std::vector<DistortionEntry> distortion_profile(OraclePtr oracle, const Elem& z,
                                                std::int64_t n_max, int max_radius,
                                                Budget& budget);

/// Least-squares slope of log(length) against log(n) over the trailing
/// fraction of found entries.
double distortion_exponent(const std::vector<DistortionEntry>& profile,
                           double tail_fraction = 0.5);

/// Empirical constants with c_minus * d1 <= d2 <= c_plus * d1 on the ball of
/// the given radius (first metric's ball).
std::pair<Rational, Rational> bilipschitz_constants(OraclePtr oracle,
                                                    const std::vector<Generator>& gens1,
                                                    const std::vector<Generator>& gens2,
                                                    int radius, Budget& budget);

// --- step relations ---------------------------------------------------------

/// Symmetric relation E on a finite space (diagonal implicit, no self-pairs).
struct StepRelation {
    SpacePtr base;
    std::vector<std::pair<int, int>> pairs;  // i < j, sorted

    void validate() const;
    std::vector<std::vector<int>> adjacency() const;
};

/// Hop-count path metric over the relation.
FiniteMetricSpace nu_metric(const StepRelation& rel);
/// Distance-weighted path metric over the relation; exact when the base
/// space carries an exact table.
FiniteMetricSpace delta_metric(const StepRelation& rel);

// --- ball cache files --------------------------------------------------------

/// JSON Lines: a header record followed by one record per element, sorted by
/// (len, key). Round-trips byte-identically.
std::string ball_cache_to_jsonl(const BallTable& table);
void save_ball_cache(const BallTable& table, const std::string& path);
BallTable load_ball_cache(const std::string& path);

}  // namespace coarsekit

#endif
