#pragma once

#include <limits>
#include <map>
#include <vector>

#include "otoclab/lattice.hpp"
#include "otoclab/protocol.hpp"
#include "otoclab/qstate.hpp"

namespace otoclab {

/// Removes a constant per shell so that every shell sits at its ideal t=0
/// value (4 per butterfly site equal to the perturbation site, else 0).
OtocTrace subtract_baseline(OtocTrace trace);

struct LightConeOptions {
    double threshold = 0.6;
    double sentinel = 300e-9;
    double horizon = 100e-9;
    /// Linear interpolation between the bracketing samples instead of the
    /// first sample at or above the threshold.
    bool interpolate = false;
};

struct LightCone {
    double threshold = 0.6;
    double sentinel = 300e-9;
    /// Crossing time per shell (seconds), or the sentinel.
    std::map<int, double> crossing;
    std::map<int, bool> reached;

    bool is_sentinel(int shell) const { return !reached.at(shell); }
};

LightCone extract_light_cone(const std::vector<double> &times,
                             const std::map<int, std::vector<double>> &shell_values,
                             const LightConeOptions &options = {});
LightCone extract_light_cone(const OtocTrace &trace, const LightConeOptions &options = {});

struct ShellStatistics {
    double mean = 0.0;
    double std = 0.0;
    double std_of_mean = 0.0;
    int count = 0;
    /// Fraction of all (untrimmed) realisations that hit the sentinel.
    double sentinel_fraction = 0.0;
};

struct EnsembleSummary {
    double trim = 0.0;
    int realizations = 0;
    std::map<int, ShellStatistics> shells;
};

/// Per-shell statistics over light cones. trim = 0 keeps everything;
/// otherwise only the central max(1, round(trim N)) sorted crossing times
/// of each shell enter the mean.
EnsembleSummary ensemble_average(const std::vector<LightCone> &cones, double trim = 0.0);

struct TomographyPhase {
    /// Optimal phase, wrapped to (-pi, pi].
    double phi = 0.0;
    double fidelity = 0.0;
    DensityMatrix2Q rotated;
    /// Fidelity varies by less than 1e-9 over the scan; phi is arbitrary.
    bool degenerate = false;
};

/// rho(phi) = Rz_b(-phi) rho' Rz_b(phi) on the second qubit of the pair,
/// maximising the fidelity to `reference` by a 360-point scan plus Brent
/// refinement.
DensityMatrix2Q rotate_second_qubit(const DensityMatrix2Q &rho, double phi);
TomographyPhase optimize_tomography_phase(const DensityMatrix2Q &measured,
                                          const DensityMatrix2Q &reference);

enum class ZzConvention {
    /// B C(N-2, n-2) / C(N, n): expected number of bonds with both ends excited.
    combinatorial,
    /// combinatorial times 7/9 in the proxy (T grows by 9/7), the
    /// normalisation of the published chain estimates.
    chain_table,
};

struct ZzBudget {
    double proxy = 0.0;
    /// d|Delta C|/dt bound sqrt(8C) proxy eps, in 1/s.
    double delta_c_rate = 0.0;
    /// Time where the bound reaches sqrt(C); +inf when proxy is 0.
    double t_unreliable = std::numeric_limits<double>::infinity();

    double delta_c_bound(double t) const { return delta_c_rate * t; }
};

ZzBudget zz_error_budget(const LatticeGraph &graph, int n_ex, double eps, double c_context,
                         ZzConvention convention = ZzConvention::combinatorial);

}  // namespace otoclab
