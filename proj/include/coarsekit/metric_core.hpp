#ifndef COARSEKIT_METRIC_CORE_HPP
#define COARSEKIT_METRIC_CORE_HPP

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coarsekit/errors.hpp"
#include "coarsekit/rational.hpp"

namespace coarsekit {

/// A finite pseudo-metric space: ordered point ids plus a symmetric distance
/// table. Distinct points at distance zero are allowed. When the space is
/// built from rational data an exact table is kept alongside the double one,
/// so downstream shortest-path computations can stay exact.
class FiniteMetricSpace {
public:
    FiniteMetricSpace(std::string label, std::vector<std::string> points,
                      std::vector<double> table,
                      std::optional<std::vector<Rational>> exact_table = std::nullopt);

    static FiniteMetricSpace from_line(std::string label, std::vector<double> coords);
    static FiniteMetricSpace from_line_exact(std::string label, std::vector<Rational> coords);
    // Weighted undirected graph; the induced metric is shortest-path distance.
    static FiniteMetricSpace from_graph(std::string label, std::size_t n_points,
                                        const std::vector<std::tuple<int, int, Rational>>& edges,
                                        std::vector<std::string> point_ids = {});

    std::size_t size() const { return points_.size(); }
    const std::string& label() const { return label_; }
    const std::vector<std::string>& points() const { return points_; }
    const std::string& point(std::size_t i) const { return points_[i]; }
    int index_of(const std::string& id) const;  // -1 when absent

    double dist(std::size_t i, std::size_t j) const { return table_[i * size() + j]; }
    bool has_exact() const { return exact_.has_value(); }
    const Rational& exact_dist(std::size_t i, std::size_t j) const {
        return (*exact_)[i * size() + j];
    }
    double diameter() const;

private:
    void validate() const;

    std::string label_;
    std::vector<std::string> points_;
    std::vector<double> table_;
    std::optional<std::vector<Rational>> exact_;
};

using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

/// Piecewise-constant nondecreasing envelope with an explicit tail.
/// Upper controls evaluate as the value at the largest breakpoint <= t;
/// lower controls as the value at the smallest breakpoint >= t, diverging
/// past the last one.
struct ControlFunction {
    enum class Kind { Upper, Lower };

    Kind kind = Kind::Upper;
    std::vector<std::pair<double, double>> breakpoints;  // (t, value), t nondecreasing
    bool tail_infinite = false;                          // lower controls diverge
    double tail_slope = 0.0;

    // Returns +infinity where the control is unbounded.
    double eval(double t) const;
};

struct ControlPair {
    ControlFunction lower;
    ControlFunction upper;
};

/// A sampled map between two finite spaces, total on the domain.
struct MapSample {
    SpacePtr domain;
    SpacePtr codomain;
    std::vector<int> image;  // domain index -> codomain index

    void validate() const;
};

/// Cover of the point set by n+1 families of pieces; the asymptotic-dimension
/// shape to be verified at a given separation r.
struct AsdimWitness {
    double r = 0.0;
    std::vector<std::vector<std::vector<int>>> families;
};

struct AsdimCheck {
    bool ok = false;
    double max_piece_diameter = 0.0;
};

struct ScaleGraphResult {
    std::vector<int> quotient;  // point index -> vertex index of the graph space
    FiniteMetricSpace graph;    // vertices of X_c with the metric d_c
};

// --- operations ------------------------------------------------------------

/// Blocks of the "joined by a c-path" equivalence, in first-point order.
std::vector<std::vector<int>> c_components(const FiniteMetricSpace& space, double c);

/// True iff every pair is joined by a c-path whose step lengths sum to the
/// distance (within tolerance). False when some pair is not even c-connected.
bool is_c_geodesic(const FiniteMetricSpace& space, double c);

/// Minimax (bottleneck) chain distance d^u; the largest ultrametric below d.
FiniteMetricSpace ultrametrize(const FiniteMetricSpace& space);

/// Largest d-diameter among r-chain components.
double chain_diameter_profile(const FiniteMetricSpace& space, double r);

/// Collapses zero-distance points, connects pairs with 0 < d <= c, and
/// returns the vertex metric c * (hop count). Requires c-coarse connectivity.
ScaleGraphResult scale_graph(const FiniteMetricSpace& space, double c);

/// Empirical lower/upper controls of a sampled map, with breakpoints at the
/// observed domain distances.
ControlPair empirical_controls(const MapSample& f);

/// sup over the domain of the codomain distance between the two images.
double map_closeness(const MapSample& f, const MapSample& g);

/// Checks that pieces within each family are pairwise >= r apart, and reports
/// the largest piece diameter.
AsdimCheck verify_asdim_witness(const FiniteMetricSpace& space, const AsdimWitness& witness);

}  // namespace coarsekit

#endif
