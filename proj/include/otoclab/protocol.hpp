#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "otoclab/evolution.hpp"
#include "otoclab/hamiltonian.hpp"
#include "otoclab/lattice.hpp"
#include "otoclab/qstate.hpp"

namespace otoclab {

// ---------------------------------------------------------------- random walk

struct RandomWalkTrace {
    std::vector<double> times;
    ManhattanShells shells;
    /// Summed <n_i> per shell, one entry per time.
    std::map<int, std::vector<double>> populations;
};

/// Single particle injected at `injection_site`, evolved over `times`.
RandomWalkTrace random_walk(const Propagator &propagator, Site injection_site,
                            const std::vector<double> &times);

/// First local maximum above `level` after the series has dipped below it.
/// Returns nullopt when no such return happens on the grid.
std::optional<double> first_revival_time(const std::vector<double> &times,
                                         const std::vector<double> &values, double level = 0.5);

// ----------------------------------------------------------- Loschmidt echo

/// (|e>_a|g>_b + e^{i phi}|g>_a|e>_b)/sqrt2 with every other site in |g>.
SectoredState entangled_pair_state(std::shared_ptr<const StateSpace> space, Site a, Site b,
                                   double phi);

/// The same pair state as a two-qubit density matrix over (a, b).
DensityMatrix2Q entangled_pair_density(double phi, Site a, Site b);

struct LoschmidtPair {
    Site a = 6;  // qubit 7
    Site b = 3;  // qubit 4
};

/// Prepares the pair state, evolves forward for t and backwards for t + tau
/// through the Sigma_z construction, and returns the pair's reduced state.
/// The final Sigma_z is applied to the reduced matrix as virtual Z gates.
DensityMatrix2Q loschmidt_echo(const TimeReversal &reversal, double phi, double t, double tau,
                               LoschmidtPair pair = {});

/// Control sequence U(t) U(t) |psi> without the reversal.
DensityMatrix2Q double_forward(const Propagator &propagator, double phi, double t,
                               LoschmidtPair pair = {});

// --------------------------------------------------------------------- OTOC

enum class OtocVariant { ground_restricted, f_state, oracle };

std::string to_string(OtocVariant v);
OtocVariant otoc_variant_from_string(const std::string &s);

struct OtocPoint {
    double c_plus = std::numeric_limits<double>::quiet_NaN();
    double c_minus = std::numeric_limits<double>::quiet_NaN();
    double c = 0.0;
    /// Re <W V W V>, filled by the oracle only.
    double f_real = std::numeric_limits<double>::quiet_NaN();
};

/// Ground-state-restricted C+-: site i must start in |g>, 2-level model.
/// Returns one point per butterfly site, with C = 2 + C- - C+.
std::vector<OtocPoint> otoc_ground_restricted(const TimeReversal &reversal,
                                              const SectoredState &psi, Site i,
                                              const std::vector<Site> &butterflies, double t);

/// |f>-assisted C+- for an arbitrary qubit-manifold state, 3-level model.
std::vector<OtocPoint> otoc_f_state(const TimeReversal &reversal, const SectoredState &psi, Site i,
                                    const std::vector<Site> &butterflies, double t);

/// Direct || [W(t), V] psi ||^2 with W(t) = U(-t) Z_j U(t), V = X_i.
/// On 3-level bases both operators act as identity on |f>.
std::vector<OtocPoint> otoc_oracle(const Propagator &propagator, const SectoredState &psi, Site i,
                                   const std::vector<Site> &butterflies, double t);

/// Farthest-first placement of n_ex particles avoiding `origin`: sites sorted
/// by descending Manhattan distance from the origin, ties by lower index.
std::vector<int> farthest_first_occupations(const LatticeGraph &graph, Site origin, int n_ex);

struct ProtocolConfig {
    OtocVariant variant = OtocVariant::ground_restricted;
    Site perturbation_site = 6;
    /// Empty means every site.
    std::vector<Site> butterfly_sites;
    std::vector<double> times;
    int sigma_z_colour = 0;
};

struct OtocTrace {
    OtocVariant variant = OtocVariant::ground_restricted;
    Site perturbation_site = 0;
    int n_ex = 0;
    std::uint64_t seed = 0;
    std::vector<double> times;
    std::vector<Site> butterfly_sites;
    /// values[t][k] belongs to butterfly_sites[k].
    std::vector<std::vector<OtocPoint>> values;
    ManhattanShells shells;
    /// C summed over butterfly sites per Manhattan shell, one entry per time.
    std::map<int, std::vector<double>> shell_c;
    /// Per-shell constant removed by baseline subtraction (empty if not applied).
    std::map<int, double> baseline_offsets;

    bool has_c_pm() const { return variant != OtocVariant::oracle; }
};

/// Recomputes trace.shell_c from the per-site C values and trace.shells.
void sum_shells(OtocTrace &trace);

/// Runs the chosen variant for every butterfly site and time, then sums per
/// shell and hands the trace to `post` (e.g. baseline subtraction).
OtocTrace otoc_scan(const HamiltonianModel &model, const SectoredState &psi,
                    const ProtocolConfig &config, const ManhattanShells &shells, int workers = 1,
                    const std::function<void(OtocTrace &)> &post = {});

}  // namespace otoclab
