#include "otoclab/evolution.hpp"

#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

#include "otoclab/errors.hpp"

namespace otoclab {

Propagator::Propagator(HamiltonianModel model)
    : model_(std::move(model)), cache_(std::make_shared<Cache>()) {}

const SectorSpectrum &Propagator::spectrum(int n_ex) const {
    std::lock_guard lock(cache_->mutex);
    auto it = cache_->spectra.find(n_ex);
    if (it != cache_->spectra.end()) return *it->second;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model_.block(n_ex));
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("eigendecomposition failed in sector " + std::to_string(n_ex));
    }
    auto spec = std::make_shared<SectorSpectrum>(SectorSpectrum{es.eigenvalues(), es.eigenvectors()});
    return *cache_->spectra.emplace(n_ex, std::move(spec)).first->second;
}

SectoredState Propagator::evolve(const SectoredState &s, double t) const {
    const auto &sp = *model_.space();
    if (s.n_sites() != sp.n_sites() || s.levels() != sp.levels()) {
        throw std::invalid_argument("state basis does not match the Hamiltonian basis");
    }
    SectoredState out(s.space_ptr());
    for (const auto &[n, v] : s.sectors()) {
        const auto &spec = spectrum(n);
        const Eigen::MatrixXd &V = spec.vectors;
        Eigen::VectorXd re = V.transpose() * v.real();
        Eigen::VectorXd im = V.transpose() * v.imag();
        Eigen::VectorXcd c(re.size());
        for (Eigen::Index k = 0; k < re.size(); ++k) {
            c[k] = cplx(re[k], im[k]) * std::polar(1.0, -spec.energies[k] * t);
        }
        Eigen::VectorXcd &dst = out.sector(n);
        dst.real() = V * c.real();
        dst.imag() = V * c.imag();
    }
    return out;
}

Eigen::MatrixXcd Propagator::block_unitary(int n_ex, double t) const {
    const auto &spec = spectrum(n_ex);
    Eigen::VectorXcd phases(spec.energies.size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) {
        phases[k] = std::polar(1.0, -spec.energies[k] * t);
    }
    const Eigen::MatrixXcd V = spec.vectors.cast<cplx>();
    return V * phases.asDiagonal() * V.transpose();
}

namespace {

std::vector<int> two_colouring(const LatticeGraph &graph) {
    const int n = graph.n_sites();
    std::vector<std::vector<Site>> adj(static_cast<std::size_t>(n));
    for (const auto &b : graph.bonds()) {
        if (b.long_range) continue;
        adj[b.i].push_back(b.j);
        adj[b.j].push_back(b.i);
    }
    std::vector<int> colour(static_cast<std::size_t>(n), -1);
    for (Site start = 0; start < n; ++start) {
        if (colour[start] != -1) continue;
        colour[start] = 0;
        std::deque<Site> queue{start};
        while (!queue.empty()) {
            const Site a = queue.front();
            queue.pop_front();
            for (Site b : adj[a]) {
                if (colour[b] == -1) {
                    colour[b] = 1 - colour[a];
                    queue.push_back(b);
                } else if (colour[b] == colour[a]) {
                    throw Unsupported("nearest-neighbour lattice is not bipartite; "
                                      "no Sigma_z checkerboard exists");
                }
            }
        }
    }
    return colour;
}

}  // namespace

std::vector<Site> sigma_z_checkerboard(const LatticeGraph &graph, int colour) {
    if (colour != 0 && colour != 1) throw std::invalid_argument("colour must be 0 or 1");
    const auto c = two_colouring(graph);
    std::vector<Site> out;
    for (Site s = 0; s < graph.n_sites(); ++s) {
        if (c[s] == colour) out.push_back(s);
    }
    return out;
}

bool reversal_is_exact(const HamiltonianModel &model, int colour) {
    if (model.kind() != ModelKind::hardcore) return false;
    if (model.zz_strength() && *model.zz_strength() != 0.0) return false;
    const auto c = two_colouring(model.graph());
    (void)colour;
    for (const auto &b : model.graph().bonds()) {
        if (c[b.i] == c[b.j]) return false;
    }
    return true;
}

TimeReversal::TimeReversal(const HamiltonianModel &model, int colour)
    : forward_(model),
      flipped_(model.with_flipped_disorder()),
      sigma_z_sites_(sigma_z_checkerboard(model.graph(), colour)),
      exact_(reversal_is_exact(model, colour)) {}

SectoredState TimeReversal::apply_sigma_z(const SectoredState &s) const {
    return apply_gate_to_sites(s, sigma_z_sites_, gates::pauli_z());
}

SectoredState TimeReversal::reverse(const SectoredState &s, double t, bool final_sigma_z) const {
    auto out = flipped_.evolve(apply_sigma_z(s), t);
    return final_sigma_z ? apply_sigma_z(out) : out;
}

ReversedEvolution TimeReversal::reverse_with_diagnostic(const SectoredState &s, double t,
                                                        bool force_residual) const {
    ReversedEvolution r{reverse(s, t), std::nullopt};
    if (!exact_ || force_residual) {
        r.residual = (r.state - forward_.evolve(s, -t)).norm();
    }
    return r;
}

ReversedEvolution reversed_evolution(const HamiltonianModel &model, const SectoredState &s,
                                     double t, int colour) {
    return TimeReversal(model, colour).reverse_with_diagnostic(s, t);
}

double freeze_coupling(double detuning, double coupling) {
    if (!(coupling > 0.0)) throw std::invalid_argument("coupling must be > 0");
    const double d = std::abs(detuning);
    return 0.5 * (-d + std::sqrt(d * d + 4.0 * coupling * coupling));
}

double cphase_accumulation(double offset, double duration, double coupling,
                           double anharmonicity) {
    if (!(coupling > 0.0)) throw std::invalid_argument("coupling must be > 0");
    if (duration < 0.0) throw std::invalid_argument("duration must be >= 0");
    const auto pair = build_chain1d(2, coupling);
    DisorderRealization d = DisorderRealization::none(2);
    d.detunings = {0.0, anharmonicity + offset};
    const auto model = build_transmon3(pair, d, {anharmonicity, anharmonicity});
    const Propagator prop(model);
    const auto &sp = model.space();

    auto ret = [&](int l0, int l1) {
        const auto psi = product_state(sp, {l0, l1});
        return psi.inner(prop.evolve(psi, duration));
    };
    const cplx a_gg = ret(0, 0), a_ge = ret(0, 1), a_eg = ret(1, 0), a_ee = ret(1, 1);
    if (std::abs(a_ge) == 0.0 || std::abs(a_eg) == 0.0) {
        throw std::domain_error("single-excitation return amplitude vanished");
    }
    double phi = std::arg(a_ee * a_gg / (a_eg * a_ge));
    if (phi <= -std::numbers::pi) phi += 2.0 * std::numbers::pi;
    return phi;
}

double cphase_clearance(double neighbor_detuning, double anharmonicity) {
    return std::abs(std::abs(neighbor_detuning) - std::abs(anharmonicity));
}

}  // namespace otoclab
