#include "otoclab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace otoclab {

ZzCorrection::ZzCorrection(LatticeGraph graph) : graph_(std::move(graph)) {}

double ZzCorrection::value(const StateSpace &space, StateSpace::Code code) const {
    double v = 0.0;
    for (const auto &b : graph_.bonds()) {
        if (b.long_range) continue;
        if (space.level(code, b.i) == space.level(code, b.j)) v -= 1.0;
    }
    return v;
}

Eigen::VectorXd ZzCorrection::diagonal(const StateSpace &space, int n_ex) const {
    const auto &codes = space.sector(n_ex);
    Eigen::VectorXd d(static_cast<Eigen::Index>(codes.size()));
    for (std::size_t k = 0; k < codes.size(); ++k) d[k] = value(space, codes[k]);
    return d;
}

ZzCorrection build_zz_correction(const LatticeGraph &graph) { return ZzCorrection(graph); }

HamiltonianModel build_hardcore(const LatticeGraph &graph, const DisorderRealization &disorder) {
    if (static_cast<int>(disorder.detunings.size()) != graph.n_sites()) {
        throw std::invalid_argument("disorder realisation does not match lattice size");
    }
    HamiltonianModel m;
    m.kind_ = ModelKind::hardcore;
    m.graph_ = graph;
    m.space_ = StateSpace::make(graph.n_sites(), 2);
    m.disorder_ = disorder;
    return m;
}

HamiltonianModel build_transmon3(const LatticeGraph &graph, const DisorderRealization &disorder,
                                 const std::vector<double> &anharmonicities, bool f_decoupled) {
    if (static_cast<int>(disorder.detunings.size()) != graph.n_sites()) {
        throw std::invalid_argument("disorder realisation does not match lattice size");
    }
    if (static_cast<int>(anharmonicities.size()) != graph.n_sites()) {
        throw std::invalid_argument("one anharmonicity per site required, got " +
                                    std::to_string(anharmonicities.size()));
    }
    HamiltonianModel m;
    m.kind_ = f_decoupled ? ModelKind::transmon3_f_decoupled : ModelKind::transmon3;
    m.graph_ = graph;
    m.space_ = StateSpace::make(graph.n_sites(), 3);
    m.disorder_ = disorder;
    m.anharmonicities_ = anharmonicities;
    return m;
}

std::vector<int> HamiltonianModel::sectors() const {
    std::vector<int> out(static_cast<std::size_t>(space_->max_excitation() + 1));
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = static_cast<int>(n);
    return out;
}

double HamiltonianModel::diagonal(StateSpace::Code code) const {
    const auto &sp = *space_;
    double e = 0.0;
    for (Site s = 0; s < sp.n_sites(); ++s) {
        const int l = sp.level(code, s);
        e += disorder_.detunings[s] * (l - 0.5);
        if (!anharmonicities_.empty()) e += 0.5 * anharmonicities_[s] * l * (l - 1);
    }
    if (zz_strength_) e += *zz_strength_ * ZzCorrection(graph_).value(sp, code);
    return e;
}

Eigen::MatrixXd HamiltonianModel::block(int n_ex) const {
    const auto &sp = *space_;
    const auto &codes = sp.sector(n_ex);
    const auto dim = static_cast<Eigen::Index>(codes.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    const int levels = sp.levels();

    for (Eigen::Index k = 0; k < dim; ++k) {
        const auto code = codes[k];
        h(k, k) = diagonal(code);
        for (const auto &b : graph_.bonds()) {
            // a+_dst a_src in both directions along the bond.
            for (const auto &[dst, src] : {std::pair{b.i, b.j}, std::pair{b.j, b.i}}) {
                const int ld = sp.level(code, dst);
                const int ls = sp.level(code, src);
                if (ls == 0 || ld + 1 >= levels) continue;
                if (kind_ == ModelKind::transmon3_f_decoupled && (ls != 1 || ld != 0)) continue;
                const double elem = std::sqrt(static_cast<double>((ld + 1) * ls));
                const auto code2 = code + sp.stride(dst) - sp.stride(src);
                h(sp.index_in_sector(code2), k) += -b.coupling * elem;
            }
        }
    }
    return h;
}

HamiltonianModel HamiltonianModel::with_flipped_disorder() const {
    HamiltonianModel m = *this;
    m.disorder_ = disorder_.flipped();
    m.disorder_flipped_ = !disorder_flipped_;
    return m;
}

HamiltonianModel HamiltonianModel::with_zz(double eps) const {
    if (kind_ != ModelKind::hardcore) {
        throw std::invalid_argument("the ZZ correction applies to the hard-core model only");
    }
    HamiltonianModel m = *this;
    m.zz_strength_ = eps;
    return m;
}

LatticeGraph scale_couplings(const LatticeGraph &graph, const std::vector<double> &frequencies,
                             double reference_frequency) {
    if (static_cast<int>(frequencies.size()) != graph.n_sites()) {
        throw std::invalid_argument("one frequency per site required");
    }
    if (!(reference_frequency > 0.0)) throw std::invalid_argument("reference frequency must be > 0");
    for (double w : frequencies) {
        if (!(w > 0.0)) throw std::invalid_argument("qubit frequencies must be > 0");
    }
    auto bonds = graph.bonds();
    for (auto &b : bonds) {
        b.coupling *= std::sqrt(frequencies[b.i] * frequencies[b.j]) / reference_frequency;
    }
    return graph.with_bonds(std::move(bonds));
}

std::vector<double> single_photon_spectrum(const HamiltonianModel &model) {
    if (model.space()->max_excitation() < 1) {
        throw std::invalid_argument("model has no single-excitation sector");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.block(1), Eigen::EigenvaluesOnly);
    std::vector<double> out(es.eigenvalues().data(),
                            es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace otoclab
