#include "otoclab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace otoclab {

namespace {

void check_site(int n_sites, Site s) {
    if (s < 0 || s >= n_sites) {
        throw std::invalid_argument("site " + std::to_string(s) + " outside lattice of " +
                                    std::to_string(n_sites) + " sites");
    }
}

}  // namespace

LatticeGraph::LatticeGraph(int n_sites, std::vector<Bond> bonds,
                           std::vector<std::array<int, 2>> positions, LatticeKind kind)
    : n_sites_(n_sites), bonds_(std::move(bonds)), positions_(std::move(positions)),
      kind_(kind) {
    if (n_sites_ < 1) throw std::invalid_argument("lattice needs at least one site");
    if (static_cast<int>(positions_.size()) != n_sites_) {
        throw std::invalid_argument("one grid position per site required");
    }
    std::set<std::pair<Site, Site>> seen;
    for (auto &b : bonds_) {
        check_site(n_sites_, b.i);
        check_site(n_sites_, b.j);
        if (b.i == b.j) throw std::invalid_argument("self bond");
        if (!(b.coupling > 0.0)) throw std::invalid_argument("bond coupling must be positive");
        if (b.i > b.j) std::swap(b.i, b.j);
        if (!seen.emplace(b.i, b.j).second) {
            throw std::invalid_argument("duplicate bond (" + std::to_string(b.i) + "," +
                                        std::to_string(b.j) + ")");
        }
    }
}

bool LatticeGraph::has_bond(Site a, Site b) const { return coupling(a, b).has_value(); }

std::optional<double> LatticeGraph::coupling(Site a, Site b) const {
    if (a > b) std::swap(a, b);
    for (const auto &bond : bonds_) {
        if (bond.i == a && bond.j == b) return bond.coupling;
    }
    return std::nullopt;
}

int LatticeGraph::degree(Site s) const {
    return static_cast<int>(std::count_if(bonds_.begin(), bonds_.end(), [s](const Bond &b) {
        return b.i == s || b.j == s;
    }));
}

std::vector<Site> LatticeGraph::neighbors(Site s) const {
    std::vector<Site> out;
    for (const auto &b : bonds_) {
        if (b.i == s) out.push_back(b.j);
        if (b.j == s) out.push_back(b.i);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t LatticeGraph::nearest_neighbor_bond_count() const {
    return static_cast<std::size_t>(std::count_if(
        bonds_.begin(), bonds_.end(), [](const Bond &b) { return !b.long_range; }));
}

int LatticeGraph::manhattan_distance(Site a, Site b) const {
    check_site(n_sites_, a);
    check_site(n_sites_, b);
    const auto &pa = positions_[a];
    const auto &pb = positions_[b];
    return std::abs(pa[0] - pb[0]) + std::abs(pa[1] - pb[1]);
}

LatticeGraph build_grid2d(int rows, int cols, double coupling) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("grid dimensions must be >= 1");
    std::vector<Bond> bonds;
    std::vector<std::array<int, 2>> positions;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            positions.push_back({r, c});
            const Site s = r * cols + c;
            if (c + 1 < cols) bonds.push_back({s, s + 1, coupling, false});
            if (r + 1 < rows) bonds.push_back({s, s + cols, coupling, false});
        }
    }
    LatticeGraph g(rows * cols, std::move(bonds), std::move(positions), LatticeKind::grid2d);
    g.shape_ = {rows, cols};
    return g;
}

LatticeGraph build_chain1d(int n, double coupling) {
    if (n < 1) throw std::invalid_argument("chain length must be >= 1");
    std::vector<Bond> bonds;
    std::vector<std::array<int, 2>> positions;
    for (int s = 0; s < n; ++s) {
        positions.push_back({0, s});
        if (s + 1 < n) bonds.push_back({s, s + 1, coupling, false});
    }
    LatticeGraph g(n, std::move(bonds), std::move(positions), LatticeKind::chain1d);
    g.shape_ = {1, n};
    return g;
}

LatticeGraph LatticeGraph::with_bonds(std::vector<Bond> bonds) const {
    LatticeGraph out(n_sites_, std::move(bonds), positions_, kind_);
    out.shape_ = shape_;
    return out;
}

LatticeGraph add_long_range(const LatticeGraph &g, const std::vector<LongRangePair> &pairs,
                            double reference_coupling) {
    if (pairs.empty()) return g;
    auto bonds = g.bonds();
    for (const auto &p : pairs) {
        if (g.has_bond(p.i, p.j)) {
            throw std::invalid_argument("sites " + std::to_string(p.i) + " and " +
                                        std::to_string(p.j) + " are already bonded");
        }
        bonds.push_back({p.i, p.j, p.fraction * reference_coupling, true});
    }
    // The constructor rejects duplicates within `pairs` itself.
    return g.with_bonds(std::move(bonds));
}

std::vector<LongRangePair> grid_diagonal_pairs(const LatticeGraph &g, double fraction) {
    std::vector<LongRangePair> out;
    const auto &pos = g.positions();
    for (Site a = 0; a < g.n_sites(); ++a) {
        for (Site b = a + 1; b < g.n_sites(); ++b) {
            if (std::abs(pos[a][0] - pos[b][0]) == 1 && std::abs(pos[a][1] - pos[b][1]) == 1) {
                out.push_back({a, b, fraction});
            }
        }
    }
    return out;
}

DisorderRealization DisorderRealization::none(int n_sites) {
    DisorderRealization d;
    d.detunings.assign(static_cast<std::size_t>(n_sites), 0.0);
    return d;
}

DisorderRealization DisorderRealization::flipped() const {
    DisorderRealization d = *this;
    for (auto &w : d.detunings) w = -w;
    return d;
}

DisorderRealization sample_disorder(int n_sites, double target_std, double coupling,
                                    std::uint64_t seed) {
    if (n_sites < 2) throw std::invalid_argument("disorder normalisation needs >= 2 sites");
    if (target_std < 0.0) throw std::invalid_argument("target_std must be non-negative");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> raw(static_cast<std::size_t>(n_sites));
    for (auto &x : raw) x = normal(rng);

    const double n = static_cast<double>(n_sites);
    const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / n;
    for (auto &x : raw) x -= mean;
    const double rms =
        std::sqrt(std::inner_product(raw.begin(), raw.end(), raw.begin(), 0.0) / n);

    DisorderRealization d;
    d.seed = seed;
    d.target_std = target_std;
    d.reference_coupling = coupling;
    d.detunings.resize(raw.size());
    const double scale = rms > 0.0 ? target_std * coupling / rms : 0.0;
    for (std::size_t k = 0; k < raw.size(); ++k) d.detunings[k] = raw[k] * scale;
    return d;
}

int ManhattanShells::shell_of(Site s) const {
    for (const auto &[d, sites] : shells) {
        if (std::find(sites.begin(), sites.end(), s) != sites.end()) return d;
    }
    throw std::invalid_argument("site not covered by shells");
}

std::vector<int> ManhattanShells::distances() const {
    std::vector<int> out;
    for (const auto &kv : shells) out.push_back(kv.first);
    return out;
}

ManhattanShells manhattan_shells(const LatticeGraph &g, Site origin) {
    check_site(g.n_sites(), origin);
    ManhattanShells out;
    out.origin = origin;
    for (Site s = 0; s < g.n_sites(); ++s) out.shells[g.manhattan_distance(origin, s)].push_back(s);
    return out;
}

}  // namespace otoclab
