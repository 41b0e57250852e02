#ifndef COARSEKIT_RIPS_HPP
#define COARSEKIT_RIPS_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coarsekit/errors.hpp"
#include "coarsekit/metric_core.hpp"
#include "coarsekit/rational.hpp"

namespace coarsekit {

/// Flag 2-complex at a scale: edges join distinct points within c, and every
/// pairwise-within-c triple carries a triangle.
struct Rips2Complex {
    double scale = 0.0;
    SpacePtr space;
    std::vector<std::pair<int, int>> edges;     // i < j, sorted
    std::vector<std::array<int, 3>> triangles;  // i < j < k, sorted
    std::vector<std::vector<int>> nbrs;         // sorted adjacency

    bool has_edge(int i, int j) const;
    bool has_triangle(int i, int j, int k) const;
};

Rips2Complex build_rips(SpacePtr space, double c);

/// A combinatorial loop: v0..vn with vn = v0 and consecutive vertices joined
/// by edges of the complex. The constant loop is the single vertex (v0).
using Loop = std::vector<int>;

void validate_loop(const Rips2Complex& complex, const Loop& loop);

/// Abelianized loop invariants: a spanning forest assigns an index to every
/// non-tree edge; triangle boundaries span the relator lattice, kept here as
/// an integer row-echelon basis for exact membership tests.
class Pi1Data {
public:
    explicit Pi1Data(const Rips2Complex& complex);

    int nontree_edge_count() const { return static_cast<int>(nontree_index_.size()); }
    /// Signed non-tree-edge crossing vector of a loop.
    std::vector<long long> loop_vector(const Rips2Complex& complex, const Loop& loop) const;
    /// Residue of a vector modulo the triangle-relator lattice.
    std::vector<long long> reduce(std::vector<long long> v) const;
    bool in_lattice(const std::vector<long long>& v) const;
    /// Tree path between two vertices of one component (vertex sequence).
    std::vector<int> tree_path(int from, int to) const;
    int component(int v) const { return comp_[v]; }

private:
    std::map<std::pair<int, int>, int> nontree_index_;
    std::vector<int> parent_;  // spanning forest, -1 at roots
    std::vector<int> depth_;
    std::vector<int> comp_;
    // Echelon basis of the relator row lattice: rows sorted by pivot column.
    std::vector<std::vector<std::pair<int, long long>>> basis_;
};

struct H1Class {
    std::vector<std::pair<int, long long>> coords;  // sparse residue vector
    bool zero = false;
};

H1Class h1_class(const Rips2Complex& complex, const Pi1Data& pi1, const Loop& loop);

enum class ContractionStatus { Contracted, NontrivialH1, Unknown };

struct ContractionVerdict {
    ContractionStatus status = ContractionStatus::Unknown;
    std::vector<Loop> trace;  // loop sequence ending at the constant loop
    H1Class certificate;      // populated for NontrivialH1
    std::uint64_t states_explored = 0;
};

/// Breadth-first search over single graph/triangle moves, deduplicated by the
/// vertex sequence. Loops are allowed to grow by at most `length_slack` over
/// the initial length.
ContractionVerdict contract_loop(const Rips2Complex& complex, const Loop& loop,
                                 std::uint64_t move_budget, int length_slack = 2);

/// All loops one elementary graph or triangle move away, deterministic order.
std::vector<Loop> loop_moves(const Rips2Complex& complex, const Loop& loop, int max_len);

// --- c-paths in a plain metric space -----------------------------------------

/// The interleaving ladder between two equal-length c-paths with matching
/// endpoints and d(x_i, y_i) <= c: returns 2n-2 intermediate paths, each a
/// 2c-path one insertion or deletion away from its predecessor.
std::vector<std::vector<int>> interleave_homotopy(const FiniteMetricSpace& space,
                                                  const std::vector<int>& xi,
                                                  const std::vector<int>& eta, double c);

// --- SC probe -----------------------------------------------------------------

struct LoopProbe {
    Loop loop;
    ContractionStatus status = ContractionStatus::Unknown;
};

struct ScProbeReport {
    std::vector<LoopProbe> loops;
    bool h1_map_zero = true;      // induced H1 map small-scale -> large-scale
    bool sc_failure_certified = false;  // nonzero H1 image
    std::uint64_t states_explored = 0;
};

/// Samples c'-loops at x0 by seeded random walks closed by shortest paths,
/// tests each for contraction in the c''-complex, and tests whether the
/// induced H1 map is zero.
ScProbeReport sc_probe(SpacePtr space, int x0, double c_prime, double c_second,
                       int loop_sample_size, std::uint64_t move_budget, std::uint64_t seed);

// --- rotation numbers ----------------------------------------------------------

/// A cyclic loop of points on the circle of radius R, stored as exact
/// fractions of a full turn in [0, 1).
struct CircleLoop {
    double radius = 1.0;
    std::vector<Rational> turns;
};

/// Chord length between two turns.
double chord(double radius, const Rational& a, const Rational& b);

struct RotationCertificate {
    long long counts[3][3] = {};
    long long rho = 0;
    double radius = 1.0;
    std::vector<int> arcs;  // arc index per loop vertex
};

/// Z/3 arc-crossing count: arcs are the half-open thirds of the circle.
RotationCertificate rotation_number(const CircleLoop& loop);

/// Builds a circle loop from planar points, verifying they lie on C_R.
CircleLoop circle_loop_from_xy(const std::vector<std::pair<double, double>>& pts, double R);

// --- fixtures -------------------------------------------------------------------

/// m points on the circle of radius R with the chordal metric.
FiniteMetricSpace circle_fixture(double R, int m);

/// The ray 0..10^n_max + 3*n_max with detour shortcuts; the metric is the
/// graph metric of the ambient tree restricted to the ray vertices.
FiniteMetricSpace highway_fixture(int n_max);

}  // namespace coarsekit

#endif
