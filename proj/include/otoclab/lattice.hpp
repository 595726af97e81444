#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace otoclab {

using Site = int;

/// Coupling between two lattice sites, J in rad/s.
struct Bond {
    Site i = 0;
    Site j = 0;
    double coupling = 0.0;
    /// Beyond nearest neighbour (diagonals, chain end links, ...).
    bool long_range = false;
};

enum class LatticeKind { grid2d, chain1d, custom };

/// Undirected weighted graph of lattice sites.
///
/// Sites of a grid are indexed row-major from the top-left corner, so site
/// `r * cols + c` sits at grid position (r, c). The device's "qubit k" is
/// site k - 1. A chain of n sites lies along row 0.
class LatticeGraph {
  public:
    LatticeGraph() = default;

    /// Build a custom graph. Bonds must be unique, undirected, i != j, J > 0.
    LatticeGraph(int n_sites, std::vector<Bond> bonds,
                 std::vector<std::array<int, 2>> positions,
                 LatticeKind kind = LatticeKind::custom);

    int n_sites() const { return n_sites_; }
    const std::vector<Bond> &bonds() const { return bonds_; }
    const std::vector<std::array<int, 2>> &positions() const { return positions_; }
    LatticeKind kind() const { return kind_; }

    bool has_bond(Site a, Site b) const;
    std::optional<double> coupling(Site a, Site b) const;
    /// Number of bonds touching `s`, long-range ones included.
    int degree(Site s) const;
    std::vector<Site> neighbors(Site s) const;
    std::size_t nearest_neighbor_bond_count() const;
    int manhattan_distance(Site a, Site b) const;

    /// The grid dimensions (rows, cols) for grid/chain graphs.
    std::array<int, 2> shape() const { return shape_; }

    /// Same sites, positions and shape with a different bond list.
    LatticeGraph with_bonds(std::vector<Bond> bonds) const;

  private:
    friend LatticeGraph build_grid2d(int, int, double);
    friend LatticeGraph build_chain1d(int, double);

    int n_sites_ = 0;
    std::vector<Bond> bonds_;
    std::vector<std::array<int, 2>> positions_;
    LatticeKind kind_ = LatticeKind::custom;
    std::array<int, 2> shape_{0, 0};
};

/// Nearest-neighbour rows x cols grid with uniform coupling J (rad/s).
LatticeGraph build_grid2d(int rows, int cols, double coupling);

/// Open chain of n sites with uniform nearest-neighbour coupling.
LatticeGraph build_chain1d(int n, double coupling);

struct LongRangePair {
    Site i = 0;
    Site j = 0;
    /// Coupling as a fraction of the reference J, e.g. 1/30.
    double fraction = 0.0;
};

/// Returns `g` plus the extra (long-range) bonds, J_ij = fraction * J.
LatticeGraph add_long_range(const LatticeGraph &g,
                            const std::vector<LongRangePair> &pairs,
                            double reference_coupling);

/// All diagonal next-nearest-neighbour pairs of a grid at the given fraction.
std::vector<LongRangePair> grid_diagonal_pairs(const LatticeGraph &g, double fraction);

/// Per-site rotating-frame detunings.
///
/// Raw standard-normal draws are affinely normalised so that the sample mean
/// is 0 and the root-mean-square deviation is target_std * J, exactly (up to
/// rounding), for every realisation.
struct DisorderRealization {
    std::vector<double> detunings;  // rad/s
    std::uint64_t seed = 0;
    double target_std = 0.0;        // multiple of J
    double reference_coupling = 0.0;

    /// Zero disorder for `n_sites`.
    static DisorderRealization none(int n_sites);
    DisorderRealization flipped() const;
};

DisorderRealization sample_disorder(int n_sites, double target_std, double coupling,
                                    std::uint64_t seed);

/// Sites grouped by Manhattan (norm-1 grid) distance from an origin.
struct ManhattanShells {
    Site origin = 0;
    std::map<int, std::vector<Site>> shells;

    int shell_of(Site s) const;
    std::vector<int> distances() const;
};

ManhattanShells manhattan_shells(const LatticeGraph &g, Site origin);

}  // namespace otoclab
