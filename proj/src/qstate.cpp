#include "otoclab/qstate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace otoclab {

namespace {

constexpr double kUnitaryTolerance = 1e-12;

void check_site(const StateSpace &sp, Site s) {
    if (s < 0 || s >= sp.n_sites()) {
        throw std::invalid_argument("site " + std::to_string(s) + " outside state space");
    }
}

Eigen::MatrixXcd embed_local(const Eigen::MatrixXcd &op, int levels, bool identity_on_f) {
    if (op.rows() != op.cols()) throw std::invalid_argument("local operator must be square");
    if (op.rows() == levels) return op;
    if (op.rows() == 2 && levels == 3) {
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(3, 3);
        out.topLeftCorner(2, 2) = op;
        out(2, 2) = identity_on_f ? 1.0 : 0.0;
        return out;
    }
    throw std::invalid_argument("local operator of dimension " + std::to_string(op.rows()) +
                                " does not fit a " + std::to_string(levels) + "-level site");
}

}  // namespace

// ---------------------------------------------------------------------------
// StateSpace

StateSpace::StateSpace(int n_sites, int levels) : n_sites_(n_sites), levels_(levels) {
    if (levels != 2 && levels != 3) throw std::invalid_argument("levels must be 2 or 3");
    if (n_sites < 1) throw std::invalid_argument("state space needs at least one site");
    double total = std::pow(static_cast<double>(levels), n_sites);
    if (total > static_cast<double>(1u << 24)) {
        throw std::invalid_argument("state space too large for the dense configuration index");
    }
    stride_.resize(static_cast<std::size_t>(n_sites));
    Code stride = 1;
    for (int k = 0; k < n_sites; ++k) {
        stride_[k] = stride;
        stride *= static_cast<Code>(levels);
    }
    const Code dim = stride;
    sectors_.resize(static_cast<std::size_t>(max_excitation() + 1));
    index_.resize(dim);
    for (Code code = 0; code < dim; ++code) {
        auto &sec = sectors_[excitation(code)];
        index_[code] = static_cast<int>(sec.size());
        sec.push_back(code);
    }
}

std::shared_ptr<const StateSpace> StateSpace::make(int n_sites, int levels) {
    return std::make_shared<const StateSpace>(n_sites, levels);
}

const std::vector<StateSpace::Code> &StateSpace::sector(int n_ex) const {
    if (n_ex < 0 || n_ex > max_excitation()) {
        throw std::invalid_argument("excitation number " + std::to_string(n_ex) +
                                    " outside [0, " + std::to_string(max_excitation()) + "]");
    }
    return sectors_[n_ex];
}

int StateSpace::excitation(Code code) const {
    int n = 0;
    for (int k = 0; k < n_sites_; ++k) {
        n += static_cast<int>(code % static_cast<Code>(levels_));
        code /= static_cast<Code>(levels_);
    }
    return n;
}

StateSpace::Code StateSpace::encode(const std::vector<int> &occupations) const {
    if (static_cast<int>(occupations.size()) != n_sites_) {
        throw std::invalid_argument("occupation list length does not match site count");
    }
    Code code = 0;
    for (int k = 0; k < n_sites_; ++k) {
        const int l = occupations[k];
        if (l < 0 || l >= levels_) {
            throw std::invalid_argument("occupation " + std::to_string(l) + " at site " +
                                        std::to_string(k) + " not in a " +
                                        std::to_string(levels_) + "-level basis");
        }
        code += static_cast<Code>(l) * stride_[k];
    }
    return code;
}

std::vector<int> StateSpace::decode(Code code) const {
    std::vector<int> occ(static_cast<std::size_t>(n_sites_));
    for (int k = 0; k < n_sites_; ++k) occ[k] = level(code, k);
    return occ;
}

// ---------------------------------------------------------------------------
// SectoredState

SectoredState::SectoredState(std::shared_ptr<const StateSpace> space) : space_(std::move(space)) {
    if (!space_) throw std::invalid_argument("null state space");
}

Eigen::VectorXcd &SectoredState::sector(int n_ex) {
    auto it = sectors_.find(n_ex);
    if (it == sectors_.end()) {
        it = sectors_.emplace(n_ex, Eigen::VectorXcd::Zero(space_->sector_size(n_ex))).first;
    }
    return it->second;
}

cplx SectoredState::amplitude(const std::vector<int> &occupations) const {
    const auto code = space_->encode(occupations);
    const auto it = sectors_.find(space_->excitation(code));
    if (it == sectors_.end()) return {0.0, 0.0};
    return it->second[space_->index_in_sector(code)];
}

void SectoredState::set_amplitude(const std::vector<int> &occupations, cplx value) {
    const auto code = space_->encode(occupations);
    sector(space_->excitation(code))[space_->index_in_sector(code)] = value;
}

double SectoredState::squared_norm() const {
    double acc = 0.0;
    for (const auto &kv : sectors_) acc += kv.second.squaredNorm();
    return acc;
}

double SectoredState::norm() const { return std::sqrt(squared_norm()); }

void SectoredState::normalize() {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("cannot normalise the zero vector");
    for (auto &kv : sectors_) kv.second /= n;
}

cplx SectoredState::inner(const SectoredState &other) const {
    if (other.space_.get() != space_.get() &&
        (other.n_sites() != n_sites() || other.levels() != levels())) {
        throw std::invalid_argument("inner product between different state spaces");
    }
    cplx acc = 0.0;
    for (const auto &[n, v] : sectors_) {
        const auto it = other.sectors_.find(n);
        if (it != other.sectors_.end()) acc += v.dot(it->second);
    }
    return acc;
}

SectoredState &SectoredState::operator+=(const SectoredState &other) {
    for (const auto &[n, v] : other.sectors_) sector(n) += v;
    return *this;
}

SectoredState &SectoredState::operator-=(const SectoredState &other) {
    for (const auto &[n, v] : other.sectors_) sector(n) -= v;
    return *this;
}

SectoredState &SectoredState::operator*=(cplx factor) {
    for (auto &kv : sectors_) kv.second *= factor;
    return *this;
}

SectoredState operator-(SectoredState a, const SectoredState &b) {
    a -= b;
    return a;
}

std::map<int, double> SectoredState::sector_probabilities() const {
    std::map<int, double> out;
    for (const auto &[n, v] : sectors_) out[n] = v.squaredNorm();
    return out;
}

Eigen::VectorXcd SectoredState::to_dense() const {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space_->dimension()));
    for (const auto &[n, v] : sectors_) {
        const auto &codes = space_->sector(n);
        for (Eigen::Index k = 0; k < v.size(); ++k) out[codes[k]] = v[k];
    }
    return out;
}

SectoredState SectoredState::from_dense(std::shared_ptr<const StateSpace> space,
                                        const Eigen::VectorXcd &dense) {
    if (dense.size() != static_cast<Eigen::Index>(space->dimension())) {
        throw std::invalid_argument("dense vector size does not match state space");
    }
    SectoredState s(space);
    for (int n = 0; n <= space->max_excitation(); ++n) {
        const auto &codes = space->sector(n);
        Eigen::VectorXcd v(static_cast<Eigen::Index>(codes.size()));
        for (std::size_t k = 0; k < codes.size(); ++k) v[k] = dense[codes[k]];
        if (v.squaredNorm() > 0.0) s.sectors_[n] = std::move(v);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Gates and local operators

SectoredState product_state(std::shared_ptr<const StateSpace> space,
                            const std::vector<int> &occupations) {
    SectoredState s(std::move(space));
    s.set_amplitude(occupations, 1.0);
    return s;
}

SectoredState apply_local_operator(const SectoredState &s, Site site, const Eigen::MatrixXcd &op) {
    const auto &sp = s.space();
    check_site(sp, site);
    const Eigen::MatrixXcd local = embed_local(op, sp.levels(), true);
    const int levels = sp.levels();
    const auto stride = sp.stride(site);

    SectoredState out(s.space_ptr());
    for (const auto &[n, v] : s.sectors()) {
        const auto &codes = sp.sector(n);
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            const cplx amp = v[k];
            if (amp == cplx{}) continue;
            const auto code = codes[k];
            const int l = sp.level(code, site);
            const auto base = code - static_cast<StateSpace::Code>(l) * stride;
            for (int l2 = 0; l2 < levels; ++l2) {
                const cplx g = local(l2, l);
                if (g == cplx{}) continue;
                const auto code2 = base + static_cast<StateSpace::Code>(l2) * stride;
                out.sector(n + l2 - l)[sp.index_in_sector(code2)] += g * amp;
            }
        }
    }
    return out;
}

SectoredState apply_single_site_gate(const SectoredState &s, Site site,
                                     const Eigen::MatrixXcd &gate) {
    if (gate.rows() != gate.cols()) throw std::invalid_argument("gate must be square");
    const Eigen::MatrixXcd defect =
        gate.adjoint() * gate - Eigen::MatrixXcd::Identity(gate.rows(), gate.cols());
    if (defect.cwiseAbs().maxCoeff() > kUnitaryTolerance) {
        throw std::invalid_argument("gate is not unitary");
    }
    return apply_local_operator(s, site, gate);
}

SectoredState apply_gate_to_sites(const SectoredState &s, const std::vector<Site> &sites,
                                  const Eigen::MatrixXcd &gate) {
    SectoredState out = s;
    for (Site site : sites) out = apply_single_site_gate(out, site, gate);
    return out;
}

SectoredState project_qubit_manifold(const SectoredState &s) {
    SectoredState out = s;
    if (s.levels() == 2) return out;
    const auto &sp = s.space();
    for (const auto &[n, v] : s.sectors()) {
        auto &w = out.sector(n);
        const auto &codes = sp.sector(n);
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            for (Site q = 0; q < sp.n_sites(); ++q) {
                if (sp.level(codes[k], q) == 2) {
                    w[k] = 0.0;
                    break;
                }
            }
        }
    }
    return out;
}

double expectation_sigma(const SectoredState &s, Site site, Axis axis) {
    Eigen::MatrixXcd pauli;
    switch (axis) {
        case Axis::x: pauli = gates::pauli_x(); break;
        case Axis::y: pauli = gates::pauli_y(); break;
        case Axis::z: pauli = gates::pauli_z(); break;
    }
    check_site(s.space(), site);
    const Eigen::MatrixXcd local = embed_local(pauli, s.levels(), false);
    return s.inner(apply_local_operator(s, site, local)).real();
}

double expectation_number(const SectoredState &s, Site site) {
    const auto &sp = s.space();
    check_site(sp, site);
    double acc = 0.0;
    for (const auto &[n, v] : s.sectors()) {
        const auto &codes = sp.sector(n);
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            acc += std::norm(v[k]) * sp.level(codes[k], site);
        }
    }
    return acc;
}

namespace gates {

Eigen::Matrix2cd pauli_x() {
    Eigen::Matrix2cd m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Eigen::Matrix2cd pauli_y() {
    const cplx i{0.0, 1.0};
    Eigen::Matrix2cd m;
    m << 0.0, i, -i, 0.0;
    return m;
}

Eigen::Matrix2cd pauli_z() {
    Eigen::Matrix2cd m;
    m << -1.0, 0.0, 0.0, 1.0;
    return m;
}

Eigen::Matrix2cd ry(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    Eigen::Matrix2cd m;
    m << c, -s, s, c;
    return m;
}

Eigen::Matrix2cd rz(double phi) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = std::polar(1.0, phi / 2.0);
    m(1, 1) = std::polar(1.0, -phi / 2.0);
    return m;
}

Eigen::Matrix3cd ef_pi_pulse() {
    Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
    m(0, 0) = 1.0;
    m(1, 2) = 1.0;
    m(2, 1) = 1.0;
    return m;
}

}  // namespace gates

// ---------------------------------------------------------------------------
// Two-qubit density matrices

Eigen::Matrix4cd psd_sqrt(const Eigen::Matrix4cd &m) {
    const Eigen::Matrix4cd h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
    Eigen::Vector4d ev = es.eigenvalues();
    // Eigenvalues at rounding level are zeros of a rank-deficient input.
    const double floor = 1e-14 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    for (int k = 0; k < 4; ++k) ev[k] = ev[k] > floor ? std::sqrt(ev[k]) : 0.0;
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

DensityMatrix2Q::DensityMatrix2Q(const Eigen::Matrix4cd &rho, Site site_a, Site site_b)
    : rho_(rho), a_(site_a), b_(site_b) {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kTraceTolerance) {
        throw std::invalid_argument("density matrix is not Hermitian");
    }
    if (std::abs(rho.trace() - cplx{1.0, 0.0}) > kTraceTolerance) {
        throw std::invalid_argument("density matrix trace differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(0.5 * (rho + rho.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTolerance) {
        throw std::invalid_argument("density matrix is not positive semidefinite");
    }
    rho_ = 0.5 * (rho + rho.adjoint());
}

DensityMatrix2Q DensityMatrix2Q::pure(const Eigen::Vector4cd &psi, Site site_a, Site site_b) {
    const Eigen::Vector4cd u = psi / psi.norm();
    return DensityMatrix2Q(u * u.adjoint(), site_a, site_b);
}

double DensityMatrix2Q::purity() const { return (rho_ * rho_).trace().real(); }

DensityMatrix2Q reduced_density_2q(const SectoredState &s, Site site_a, Site site_b) {
    const auto &sp = s.space();
    if (sp.levels() != 2) throw std::invalid_argument("reduced_density_2q needs a 2-level basis");
    check_site(sp, site_a);
    check_site(sp, site_b);
    if (site_a == site_b) throw std::invalid_argument("reduced_density_2q needs distinct sites");

    // Group amplitudes by the configuration of every other site.
    std::map<StateSpace::Code, Eigen::Vector4cd> groups;
    const auto sa = sp.stride(site_a);
    const auto sb = sp.stride(site_b);
    for (const auto &[n, v] : s.sectors()) {
        const auto &codes = sp.sector(n);
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            const auto code = codes[k];
            const int la = sp.level(code, site_a);
            const int lb = sp.level(code, site_b);
            const auto rest = code - static_cast<StateSpace::Code>(la) * sa -
                              static_cast<StateSpace::Code>(lb) * sb;
            auto [it, inserted] = groups.try_emplace(rest, Eigen::Vector4cd::Zero());
            it->second[2 * la + lb] += v[k];
        }
    }
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    for (const auto &kv : groups) rho += kv.second * kv.second.adjoint();
    const double tr = rho.trace().real();
    if (tr <= 0.0) throw std::invalid_argument("reduced density of a zero state");
    return DensityMatrix2Q(rho / tr, site_a, site_b);
}

double fidelity(const DensityMatrix2Q &rho, const DensityMatrix2Q &sigma) {
    // Tr sqrt(sqrt(rho) sigma sqrt(rho)) is the nuclear norm of sqrt(rho) sqrt(sigma).
    const Eigen::Matrix4cd x = psd_sqrt(rho.matrix()) * psd_sqrt(sigma.matrix());
    const double tr = Eigen::JacobiSVD<Eigen::Matrix4cd>(x).singularValues().sum();
    return std::clamp(tr * tr, 0.0, 1.0);
}

double concurrence(const DensityMatrix2Q &rho) {
    Eigen::Matrix4cd yy = Eigen::kroneckerProduct(gates::pauli_y(), gates::pauli_y());
    const Eigen::Matrix4cd &r = rho.matrix();
    const Eigen::Matrix4cd tilde = yy * r.conjugate() * yy;
    // Eigenvalues of R are the singular values of sqrt(rho) sqrt(rho~).
    const Eigen::Matrix4cd x = psd_sqrt(r) * psd_sqrt(tilde);
    const Eigen::Vector4d sv = Eigen::JacobiSVD<Eigen::Matrix4cd>(x).singularValues();
    std::array<double, 4> lam{sv[0], sv[1], sv[2], sv[3]};
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return std::clamp(lam[0] - lam[1] - lam[2] - lam[3], 0.0, 1.0);
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double entanglement_of_formation_from_concurrence(double c) {
    c = std::clamp(c, 0.0, 1.0);
    return binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - c * c)));
}

double entanglement_of_formation(const DensityMatrix2Q &rho) {
    return entanglement_of_formation_from_concurrence(concurrence(rho));
}

}  // namespace otoclab
