#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "otoclab/lattice.hpp"

namespace otoclab {

using cplx = std::complex<double>;

/// Local transmon levels kept per site: 2 (|g>,|e>) or 3 (|g>,|e>,|f>).
///
/// Level index equals the local excitation number (g=0, e=1, f=2).
///
/// Pauli conventions, used everywhere in the library, in (g, e) ordering:
///   sigma_z = diag(-1, +1)          so n = (sigma_z + 1) / 2
///   sigma_x = [[0, 1], [1, 0]]
///   sigma_y = [[0, i], [-i, 0]]     (sigma_x sigma_y = i sigma_z)
///   sigma^+ = |e><g|
/// On a 3-level site a 2x2 gate acts on the g/e block and leaves |f> alone;
/// Pauli expectation values get no contribution from |f>.
struct LocalBasis {
    int levels = 2;
};

/// Occupation bookkeeping for n sites with a fixed local dimension.
///
/// A configuration is encoded as the base-`levels` integer
/// sum_k level_k * levels^k. Sectors group configurations by total excitation.
class StateSpace {
  public:
    using Code = std::uint32_t;

    StateSpace(int n_sites, int levels);

    static std::shared_ptr<const StateSpace> make(int n_sites, int levels);

    int n_sites() const { return n_sites_; }
    int levels() const { return levels_; }
    int max_excitation() const { return n_sites_ * (levels_ - 1); }
    std::size_t dimension() const { return index_.size(); }

    /// Configurations with `n_ex` total excitations, ascending by code.
    const std::vector<Code> &sector(int n_ex) const;
    int sector_size(int n_ex) const { return static_cast<int>(sector(n_ex).size()); }

    int index_in_sector(Code code) const { return index_[code]; }
    int level(Code code, Site site) const {
        return static_cast<int>((code / stride_[site]) % static_cast<Code>(levels_));
    }
    Code stride(Site site) const { return stride_[site]; }
    int excitation(Code code) const;

    Code encode(const std::vector<int> &occupations) const;
    std::vector<int> decode(Code code) const;

  private:
    int n_sites_;
    int levels_;
    std::vector<Code> stride_;
    std::vector<std::vector<Code>> sectors_;
    std::vector<int> index_;
};

/// Complex amplitudes over a union of fixed-excitation sectors.
class SectoredState {
  public:
    explicit SectoredState(std::shared_ptr<const StateSpace> space);

    const StateSpace &space() const { return *space_; }
    const std::shared_ptr<const StateSpace> &space_ptr() const { return space_; }
    int n_sites() const { return space_->n_sites(); }
    int levels() const { return space_->levels(); }

    const std::map<int, Eigen::VectorXcd> &sectors() const { return sectors_; }
    /// Mutable access; creates a zero block for an absent sector.
    Eigen::VectorXcd &sector(int n_ex);
    bool has_sector(int n_ex) const { return sectors_.count(n_ex) != 0; }

    cplx amplitude(const std::vector<int> &occupations) const;
    void set_amplitude(const std::vector<int> &occupations, cplx value);

    double squared_norm() const;
    double norm() const;
    void normalize();

    /// <this|other>
    cplx inner(const SectoredState &other) const;

    SectoredState &operator+=(const SectoredState &other);
    SectoredState &operator-=(const SectoredState &other);
    SectoredState &operator*=(cplx factor);

    /// Probability of each populated sector.
    std::map<int, double> sector_probabilities() const;

    /// Full-space amplitudes indexed by configuration code.
    Eigen::VectorXcd to_dense() const;
    static SectoredState from_dense(std::shared_ptr<const StateSpace> space,
                                    const Eigen::VectorXcd &dense);

  private:
    std::shared_ptr<const StateSpace> space_;
    std::map<int, Eigen::VectorXcd> sectors_;
};

SectoredState operator-(SectoredState a, const SectoredState &b);

/// Basis state with the given per-site levels.
SectoredState product_state(std::shared_ptr<const StateSpace> space,
                            const std::vector<int> &occupations);

/// Applies a unitary to one site. 2x2 gates on a 3-level basis act on g/e.
SectoredState apply_single_site_gate(const SectoredState &s, Site site,
                                     const Eigen::MatrixXcd &gate);

/// Same routing as apply_single_site_gate but for any local matrix.
SectoredState apply_local_operator(const SectoredState &s, Site site,
                                   const Eigen::MatrixXcd &op);

/// Applies the same single-site unitary to every listed site.
SectoredState apply_gate_to_sites(const SectoredState &s, const std::vector<Site> &sites,
                                  const Eigen::MatrixXcd &gate);

/// Zeroes every configuration with an |f> anywhere (P_ge).
SectoredState project_qubit_manifold(const SectoredState &s);

enum class Axis { x, y, z };

double expectation_sigma(const SectoredState &s, Site site, Axis axis);

/// <n_site>, the mean level index of the site.
double expectation_number(const SectoredState &s, Site site);

namespace gates {
Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_y();
Eigen::Matrix2cd pauli_z();
/// ry(theta)|g> = cos(theta/2)|g> + sin(theta/2)|e>.
Eigen::Matrix2cd ry(double theta);
/// exp(-i phi sigma_z / 2) = diag(e^{i phi/2}, e^{-i phi/2}).
Eigen::Matrix2cd rz(double phi);
/// Swaps |e> and |f>, leaves |g>.
Eigen::Matrix3cd ef_pi_pulse();
}  // namespace gates

/// Two-qubit density matrix in the basis |ab> = |gg>,|ge>,|eg>,|ee>.
class DensityMatrix2Q {
  public:
    static constexpr double kTraceTolerance = 1e-10;
    static constexpr double kPsdTolerance = 1e-9;

    DensityMatrix2Q() = default;
    /// Validates hermiticity, unit trace and positivity within tolerance.
    DensityMatrix2Q(const Eigen::Matrix4cd &rho, Site site_a = 0, Site site_b = 1);

    static DensityMatrix2Q pure(const Eigen::Vector4cd &psi, Site site_a = 0, Site site_b = 1);

    const Eigen::Matrix4cd &matrix() const { return rho_; }
    Site site_a() const { return a_; }
    Site site_b() const { return b_; }
    double purity() const;

  private:
    Eigen::Matrix4cd rho_ = Eigen::Matrix4cd::Identity() / 4.0;
    Site a_ = 0;
    Site b_ = 1;
};

/// Partial trace onto (site_a, site_b). Two-level basis only.
DensityMatrix2Q reduced_density_2q(const SectoredState &s, Site site_a, Site site_b);

/// Uhlmann fidelity [Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2.
double fidelity(const DensityMatrix2Q &rho, const DensityMatrix2Q &sigma);

/// Hill-Wootters concurrence.
double concurrence(const DensityMatrix2Q &rho);

double binary_entropy(double p);
double entanglement_of_formation_from_concurrence(double c);
double entanglement_of_formation(const DensityMatrix2Q &rho);

/// Hermitian PSD square root with eigenvalues below zero clipped.
Eigen::Matrix4cd psd_sqrt(const Eigen::Matrix4cd &m);

}  // namespace otoclab
