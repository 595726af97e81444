#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "otoclab/lattice.hpp"
#include "otoclab/qstate.hpp"

namespace otoclab {

enum class ModelKind {
    /// Two-level hard-core bosons: -sum J (s+_i s-_j + h.c.) + sum dw_i/2 s^z_i.
    hardcore,
    /// Three-level transmons: -sum J (a+_i a_j + h.c.) + sum [dw_i n_i + U_i/2 n_i(n_i-1)].
    transmon3,
    /// Three-level basis, but hopping only moves g/e excitations; |f> is inert.
    transmon3_f_decoupled,
};

/// The always-on ZZ correction H_ZZ = -sum_<ij> (1 + s^z_i s^z_j) / 2 over
/// nearest-neighbour bonds. It is diagonal; the caller supplies the strength.
class ZzCorrection {
  public:
    explicit ZzCorrection(LatticeGraph graph);

    /// Diagonal element for one configuration: minus the number of
    /// nearest-neighbour bonds whose ends are equally occupied.
    double value(const StateSpace &space, StateSpace::Code code) const;
    Eigen::VectorXd diagonal(const StateSpace &space, int n_ex) const;

  private:
    LatticeGraph graph_;
};

ZzCorrection build_zz_correction(const LatticeGraph &graph);

/// Excitation-conserving lattice Hamiltonian stored as per-sector blocks.
///
/// Energies are angular frequencies (rad/s) in the frame rotating at the
/// common reference frequency. All blocks are real symmetric. The diagonal
/// keeps the constant -sum dw_i / 2 of the sigma_z form in every model, so
/// the hard-core and three-level descriptions share the same zero of energy.
class HamiltonianModel {
  public:
    ModelKind kind() const { return kind_; }
    const LatticeGraph &graph() const { return graph_; }
    const std::shared_ptr<const StateSpace> &space() const { return space_; }
    LocalBasis basis() const { return {space_->levels()}; }
    const DisorderRealization &disorder() const { return disorder_; }
    const std::vector<double> &anharmonicities() const { return anharmonicities_; }
    std::optional<double> zz_strength() const { return zz_strength_; }
    bool disorder_flipped() const { return disorder_flipped_; }

    /// Sectors 0..max_excitation; all are reachable.
    std::vector<int> sectors() const;
    Eigen::MatrixXd block(int n_ex) const;
    double diagonal(StateSpace::Code code) const;

    /// Same model with dw_i -> -dw_i.
    HamiltonianModel with_flipped_disorder() const;
    /// Adds eps * H_ZZ (hard-core model only).
    HamiltonianModel with_zz(double eps) const;

  private:
    friend HamiltonianModel build_hardcore(const LatticeGraph &, const DisorderRealization &);
    friend HamiltonianModel build_transmon3(const LatticeGraph &, const DisorderRealization &,
                                            const std::vector<double> &, bool);

    ModelKind kind_ = ModelKind::hardcore;
    LatticeGraph graph_;
    std::shared_ptr<const StateSpace> space_;
    DisorderRealization disorder_;
    std::vector<double> anharmonicities_;
    std::optional<double> zz_strength_;
    bool disorder_flipped_ = false;
};

HamiltonianModel build_hardcore(const LatticeGraph &graph, const DisorderRealization &disorder);

/// Three-level transmon lattice. `anharmonicities` needs one U_i per site.
/// With `f_decoupled` the |f> level keeps its energy but does not hop.
HamiltonianModel build_transmon3(const LatticeGraph &graph, const DisorderRealization &disorder,
                                 const std::vector<double> &anharmonicities,
                                 bool f_decoupled = false);

/// Rescales each J_ij by sqrt(w_i w_j) / w_ref (couplings measured at w_ref).
LatticeGraph scale_couplings(const LatticeGraph &graph, const std::vector<double> &frequencies,
                             double reference_frequency);

/// Ascending eigenvalues of the single-excitation block.
std::vector<double> single_photon_spectrum(const HamiltonianModel &model);

}  // namespace otoclab
