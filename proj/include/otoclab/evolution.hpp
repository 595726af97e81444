#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "otoclab/hamiltonian.hpp"
#include "otoclab/qstate.hpp"

namespace otoclab {

/// Eigendecomposition of one excitation sector, H = V diag(E) V^T.
struct SectorSpectrum {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;
};

/// Exact propagator exp(-iHt) built from per-sector eigendecompositions.
///
/// Sectors are diagonalised on first use and cached; copies share the cache
/// and concurrent use from several threads is safe.
class Propagator {
  public:
    explicit Propagator(HamiltonianModel model);

    const HamiltonianModel &model() const { return model_; }
    const SectorSpectrum &spectrum(int n_ex) const;

    /// exp(-iHt) |s>. Negative t evolves backwards.
    SectoredState evolve(const SectoredState &s, double t) const;
    Eigen::MatrixXcd block_unitary(int n_ex, double t) const;

  private:
    struct Cache {
        std::mutex mutex;
        std::map<int, std::shared_ptr<const SectorSpectrum>> spectra;
    };

    HamiltonianModel model_;
    std::shared_ptr<Cache> cache_;
};

/// Two-colouring of the nearest-neighbour bond graph. Returns the sites of
/// colour `colour` (0 holds the lowest-indexed site of each component).
/// Throws Unsupported when the nearest-neighbour graph is not bipartite.
std::vector<Site> sigma_z_checkerboard(const LatticeGraph &graph, int colour = 0);

/// True when Sigma_z H(dw) Sigma_z = -H(-dw) holds exactly for the model.
bool reversal_is_exact(const HamiltonianModel &model, int colour = 0);

struct ReversedEvolution {
    SectoredState state;
    /// || reversed - exp(+iHt)|psi> ||, filled in whenever the identity is
    /// only approximate (3-level models, ZZ terms, same-colour long-range bonds).
    std::optional<double> residual;
};

/// Backward evolution implemented as Sigma_z exp(-iH(-dw)t) Sigma_z.
class TimeReversal {
  public:
    explicit TimeReversal(const HamiltonianModel &model, int colour = 0);

    const Propagator &forward() const { return forward_; }
    const Propagator &flipped() const { return flipped_; }
    const std::vector<Site> &sigma_z_sites() const { return sigma_z_sites_; }
    bool exact() const { return exact_; }

    /// Sigma_z U_flipped(t) Sigma_z |s>; with `final_sigma_z` false the last
    /// Sigma_z is left for the caller to absorb into a measurement.
    SectoredState reverse(const SectoredState &s, double t, bool final_sigma_z = true) const;
    ReversedEvolution reverse_with_diagnostic(const SectoredState &s, double t,
                                              bool force_residual = false) const;

    /// Sigma_z applied to a state (Z on every site of the chosen colour).
    SectoredState apply_sigma_z(const SectoredState &s) const;

  private:
    Propagator forward_;
    Propagator flipped_;
    std::vector<Site> sigma_z_sites_;
    bool exact_ = true;
};

ReversedEvolution reversed_evolution(const HamiltonianModel &model, const SectoredState &s,
                                     double t, int colour = 0);

/// Dispersive level shift of a qubit parked |detuning| away from a neighbour
/// it couples to with J: (-|D| + sqrt(D^2 + 4 J^2)) / 2. Angular units.
double freeze_coupling(double detuning, double coupling);

/// Conditional phase accumulated by two coupled three-level transmons.
///
/// Site 0 sits at zero detuning and site 1 at U + offset, so offset = 0 puts
/// |ee> on resonance with |fg>. The phase is
/// arg(A_ee A_gg / (A_eg A_ge)) of the exact return amplitudes, in (-pi, pi].
double cphase_accumulation(double offset, double duration, double coupling,
                           double anharmonicity);

/// Distance of a neighbour detuning from the |ee> <-> |fg> resonance,
/// ||detuning| - |U||.
double cphase_clearance(double neighbor_detuning, double anharmonicity);

}  // namespace otoclab
