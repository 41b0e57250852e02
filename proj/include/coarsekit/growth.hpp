#ifndef COARSEKIT_GROWTH_HPP
#define COARSEKIT_GROWTH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coarsekit/errors.hpp"
#include "coarsekit/group_oracles.hpp"
#include "coarsekit/metric_core.hpp"
#include "coarsekit/rational.hpp"

namespace coarsekit {

/// Sampled ball-size function r -> |B(r)|, radii strictly increasing and
/// counts nondecreasing. Between samples the function is read as a step
/// function, constant from each sampled radius to the next.
struct GrowthSeries {
    std::string source;
    std::vector<std::pair<double, std::uint64_t>> samples;

    void validate() const;
    double max_radius() const { return samples.empty() ? 0.0 : samples.back().first; }
    /// Count at the largest sampled radius <= t; 0 below the first sample.
    std::uint64_t eval(double t) const;
};

/// Certificate for beta(r) <= lambda * beta'(mu r + c) over a checked range.
struct GrowthWitness {
    Rational lambda{1};
    Rational mu{1};
    Rational c{0};
    double r_lo = 0.0;
    double r_hi = 0.0;
};

struct GrowthComparison {
    std::optional<GrowthWitness> witness;  // empty: no witness in the grid
    bool found() const { return witness.has_value(); }
};

struct ComparisonGrid {
    std::vector<Rational> lambdas{1, 2, 4, 8};
    std::vector<Rational> mus{1, 2, 4, 8};
    std::vector<Rational> cs{0, 1, 2, 4};
};

struct PoldegEstimate {
    double exponent = 0.0;
    double residual = 0.0;  // root-mean-square residual of the fit
    std::size_t points_used = 0;
};

struct FolnerWitness {
    std::vector<std::string> members;  // element keys, sorted
    int r = 1;
    Rational ratio{1};
};

struct FolnerResult {
    std::optional<FolnerWitness> witness;  // empty: no witness within budget
    bool found() const { return witness.has_value(); }
};

enum class FolnerStrategy { Balls, Greedy, Exhaustive };

/// Rooted tree truncation with explicit interior marking: boundary checks
/// only accept subsets avoiding the truncation frontier.
struct TreeGraph {
    std::vector<std::vector<int>> adj;
    std::vector<bool> interior;  // full-degree vertices

    std::size_t size() const { return adj.size(); }
};

struct TreeBoundaryCheck {
    std::size_t boundary_size = 0;
    bool holds = false;
};

// --- operations ---------------------------------------------------------------

/// Ball counts of a word ball at integer radii 0..r_max.
GrowthSeries growth_series(const BallTable& ball, int r_max);
/// Ball counts around a base point, sampled at the observed distances <= r_max.
GrowthSeries growth_series(const FiniteMetricSpace& space, int base, double r_max);

/// Searches the grid for a witness valid on the full common range. A miss is
/// not a disproof of the preorder.
GrowthComparison compare_growth(const GrowthSeries& beta, const GrowthSeries& beta_prime,
                                const ComparisonGrid& grid = {});

/// Composes two witnesses into one for the composite comparison.
GrowthWitness compose_witnesses(const GrowthWitness& first, const GrowthWitness& second);

/// Replays the witness inequality over the checked range and hashes the
/// transcript (FNV-1a); throws InvalidInput if the witness fails to recheck.
std::string witness_recheck_hash(const GrowthSeries& beta, const GrowthSeries& beta_prime,
                                 const GrowthWitness& witness);

/// Least-squares slope of ln count against ln r over the trailing fraction of
/// samples (r >= 2 only).
PoldegEstimate poldeg_estimate(const GrowthSeries& beta, double tail_fraction = 0.5);

/// Greedy c-separated net: scans points in id order starting at the seed and
/// keeps any point at distance >= c from everything already kept.
std::vector<int> greedy_lattice(const FiniteMetricSpace& space, double c, int seed);

/// For the exhaustive strategy, `exhaustive_max_size` bounds |F|; witnesses of
/// any strategy recheck exactly against the oracle.
FolnerResult folner_search(BallTable& ball, int r, const Rational& epsilon,
                           FolnerStrategy strategy, Budget& budget,
                           int exhaustive_max_size = 0);

/// |B^F(r)| / |F| computed exactly through the oracle.
Rational folner_ratio(const BallTable& ball, const std::vector<Elem>& members, int r,
                      Budget& budget);

TreeGraph build_regular_tree(int degree, int depth);

TreeBoundaryCheck tree_boundary_check(const TreeGraph& tree, const std::vector<int>& subset);

/// Runs the boundary check over every connected interior subset of size
/// <= max_size. Returns the number of subsets visited; `all_hold` reports the
/// conjunction of verdicts.
struct ExhaustiveTreeReport {
    std::uint64_t subsets = 0;
    bool all_hold = true;
};
ExhaustiveTreeReport exhaustive_tree_check(const TreeGraph& tree, int max_size, Budget& budget);

}  // namespace coarsekit

#endif
