#include "otoclab/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "otoclab/parallel.hpp"

namespace otoclab {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

double level_weight(const SectoredState &s, Site site, int level) {
    const auto &sp = s.space();
    double w = 0.0;
    for (const auto &[n, v] : s.sectors()) {
        const auto &codes = sp.sector(n);
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            if (sp.level(codes[k], site) == level) w += std::norm(v[k]);
        }
    }
    return w;
}

double f_weight(const SectoredState &s) {
    if (s.levels() < 3) return 0.0;
    return 1.0 - project_qubit_manifold(s).squared_norm() / s.squared_norm();
}

void check_site(const SectoredState &s, Site site, const char *what) {
    if (site < 0 || site >= s.n_sites()) {
        throw std::invalid_argument(std::string(what) + " site " + std::to_string(site) +
                                    " outside lattice");
    }
}

bool in_sigma_z_class(const TimeReversal &r, Site s) {
    const auto &v = r.sigma_z_sites();
    return std::binary_search(v.begin(), v.end(), s);
}

}  // namespace

RandomWalkTrace random_walk(const Propagator &propagator, Site injection_site,
                            const std::vector<double> &times) {
    const auto &model = propagator.model();
    std::vector<int> occ(static_cast<std::size_t>(model.graph().n_sites()), 0);
    if (injection_site < 0 || injection_site >= model.graph().n_sites()) {
        throw std::invalid_argument("injection site outside lattice");
    }
    occ[injection_site] = 1;
    const auto psi = product_state(model.space(), occ);

    RandomWalkTrace trace;
    trace.times = times;
    trace.shells = manhattan_shells(model.graph(), injection_site);
    for (const auto &[d, sites] : trace.shells.shells) trace.populations[d].assign(times.size(), 0.0);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto s = propagator.evolve(psi, times[k]);
        for (const auto &[d, sites] : trace.shells.shells) {
            double p = 0.0;
            for (Site q : sites) p += expectation_number(s, q);
            trace.populations[d][k] = p;
        }
    }
    return trace;
}

std::optional<double> first_revival_time(const std::vector<double> &times,
                                         const std::vector<double> &values, double level) {
    if (times.size() != values.size()) throw std::invalid_argument("times/values size mismatch");
    bool dipped = false;
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
        if (values[k] < level) dipped = true;
        if (!dipped || k == 0 || values[k] <= level) continue;
        if (values[k] >= values[k - 1] && values[k] >= values[k + 1]) return times[k];
    }
    return std::nullopt;
}

SectoredState entangled_pair_state(std::shared_ptr<const StateSpace> space, Site a, Site b,
                                   double phi) {
    if (a == b) throw std::invalid_argument("pair sites must differ");
    const int n = space->n_sites();
    if (a < 0 || b < 0 || a >= n || b >= n) throw std::invalid_argument("pair site outside lattice");
    SectoredState s(space);
    std::vector<int> occ(static_cast<std::size_t>(n), 0);
    occ[a] = 1;
    s.set_amplitude(occ, 1.0 / std::numbers::sqrt2);
    occ[a] = 0;
    occ[b] = 1;
    s.set_amplitude(occ, std::polar(1.0 / std::numbers::sqrt2, phi));
    return s;
}

DensityMatrix2Q entangled_pair_density(double phi, Site a, Site b) {
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    psi[2] = 1.0 / std::numbers::sqrt2;                      // |e>_a |g>_b
    psi[1] = std::polar(1.0 / std::numbers::sqrt2, phi);     // |g>_a |e>_b
    return DensityMatrix2Q::pure(psi, a, b);
}

DensityMatrix2Q loschmidt_echo(const TimeReversal &reversal, double phi, double t, double tau,
                               LoschmidtPair pair) {
    const auto &space = reversal.forward().model().space();
    const auto psi = entangled_pair_state(space, pair.a, pair.b, phi);
    const auto forward = reversal.forward().evolve(psi, t);
    const auto back = reversal.reverse(forward, t + tau, false);
    const auto rho = reduced_density_2q(back, pair.a, pair.b);

    const double za = in_sigma_z_class(reversal, pair.a) ? -1.0 : 1.0;
    const double zb = in_sigma_z_class(reversal, pair.b) ? -1.0 : 1.0;
    Eigen::Vector4cd d;
    for (int la = 0; la < 2; ++la) {
        for (int lb = 0; lb < 2; ++lb) {
            d[2 * la + lb] = (la == 0 ? 1.0 : za) * (lb == 0 ? 1.0 : zb);
        }
    }
    const Eigen::Matrix4cd m = d.asDiagonal() * rho.matrix() * d.asDiagonal();
    return DensityMatrix2Q(m, pair.a, pair.b);
}

DensityMatrix2Q double_forward(const Propagator &propagator, double phi, double t,
                               LoschmidtPair pair) {
    const auto psi = entangled_pair_state(propagator.model().space(), pair.a, pair.b, phi);
    const auto out = propagator.evolve(propagator.evolve(psi, t), t);
    return reduced_density_2q(out, pair.a, pair.b);
}

std::string to_string(OtocVariant v) {
    switch (v) {
        case OtocVariant::ground_restricted: return "ground_restricted";
        case OtocVariant::f_state: return "f_state";
        case OtocVariant::oracle: return "oracle";
    }
    return "?";
}

OtocVariant otoc_variant_from_string(const std::string &s) {
    if (s == "ground_restricted") return OtocVariant::ground_restricted;
    if (s == "f_state") return OtocVariant::f_state;
    if (s == "oracle") return OtocVariant::oracle;
    throw std::invalid_argument("unknown OTOC variant '" + s + "'");
}

std::vector<OtocPoint> otoc_ground_restricted(const TimeReversal &reversal,
                                              const SectoredState &psi, Site i,
                                              const std::vector<Site> &butterflies, double t) {
    if (psi.levels() != 2) {
        throw std::invalid_argument("ground-restricted protocol needs a two-level basis");
    }
    check_site(psi, i, "perturbation");
    if (level_weight(psi, i, 1) > 1e-12) {
        throw std::invalid_argument("perturbation site must start in |g>");
    }
    const double readout_sign = in_sigma_z_class(reversal, i) ? -1.0 : 1.0;
    std::vector<OtocPoint> out(butterflies.size());
    for (const double sign : {+1.0, -1.0}) {
        const auto prepared = apply_single_site_gate(psi, i, gates::ry(sign * kHalfPi));
        const auto evolved = reversal.forward().evolve(prepared, t);
        for (std::size_t k = 0; k < butterflies.size(); ++k) {
            check_site(psi, butterflies[k], "butterfly");
            const auto kicked = apply_single_site_gate(evolved, butterflies[k], gates::pauli_z());
            const auto back = reversal.reverse(kicked, t, false);
            const double value = readout_sign * expectation_sigma(back, i, Axis::x);
            (sign > 0 ? out[k].c_plus : out[k].c_minus) = value;
        }
    }
    for (auto &p : out) p.c = 2.0 + p.c_minus - p.c_plus;
    return out;
}

std::vector<OtocPoint> otoc_f_state(const TimeReversal &reversal, const SectoredState &psi, Site i,
                                    const std::vector<Site> &butterflies, double t) {
    if (psi.levels() != 3) throw std::invalid_argument("f-state protocol needs a three-level basis");
    check_site(psi, i, "perturbation");
    if (f_weight(psi) > 1e-12) {
        throw std::invalid_argument("initial state must lie in the qubit manifold");
    }
    const bool virtual_z = in_sigma_z_class(reversal, i);
    std::vector<OtocPoint> out(butterflies.size());
    for (const double sign : {+1.0, -1.0}) {
        auto prepared = apply_single_site_gate(psi, i, gates::ry(-sign * kHalfPi));
        prepared = apply_single_site_gate(prepared, i, gates::ef_pi_pulse());
        prepared = apply_single_site_gate(prepared, i, gates::ry(sign * kHalfPi));
        const auto evolved = reversal.forward().evolve(prepared, t);
        for (std::size_t k = 0; k < butterflies.size(); ++k) {
            check_site(psi, butterflies[k], "butterfly");
            const auto kicked = apply_single_site_gate(evolved, butterflies[k], gates::pauli_z());
            auto back = reversal.reverse(kicked, t, false);
            if (virtual_z) back = apply_single_site_gate(back, i, gates::pauli_z());
            const auto readout = apply_single_site_gate(back, i, gates::ry(kHalfPi));
            const double value =
                2.0 * expectation_sigma(project_qubit_manifold(readout), i, Axis::z);
            (sign > 0 ? out[k].c_plus : out[k].c_minus) = value;
        }
    }
    for (auto &p : out) p.c = 2.0 + p.c_minus - p.c_plus;
    return out;
}

std::vector<OtocPoint> otoc_oracle(const Propagator &propagator, const SectoredState &psi, Site i,
                                   const std::vector<Site> &butterflies, double t) {
    check_site(psi, i, "perturbation");
    const Eigen::MatrixXcd x = gates::pauli_x();
    const auto v_psi = apply_local_operator(psi, i, x);
    const auto a = propagator.evolve(psi, t);
    const auto b = propagator.evolve(v_psi, t);
    std::vector<OtocPoint> out(butterflies.size());
    for (std::size_t k = 0; k < butterflies.size(); ++k) {
        check_site(psi, butterflies[k], "butterfly");
        const Site j = butterflies[k];
        const auto wv = propagator.evolve(apply_single_site_gate(b, j, gates::pauli_z()), -t);
        const auto vw = apply_local_operator(
            propagator.evolve(apply_single_site_gate(a, j, gates::pauli_z()), -t), i, x);
        out[k].c = (wv - vw).squared_norm();
        out[k].f_real = vw.inner(wv).real();
    }
    return out;
}

std::vector<int> farthest_first_occupations(const LatticeGraph &graph, Site origin, int n_ex) {
    const int n = graph.n_sites();
    if (origin < 0 || origin >= n) throw std::invalid_argument("origin outside lattice");
    if (n_ex < 0 || n_ex > n - 1) {
        throw std::invalid_argument("cannot place " + std::to_string(n_ex) + " particles on " +
                                    std::to_string(n - 1) + " free sites");
    }
    std::vector<Site> order;
    for (Site s = 0; s < n; ++s) {
        if (s != origin) order.push_back(s);
    }
    std::stable_sort(order.begin(), order.end(), [&](Site a, Site b) {
        return graph.manhattan_distance(origin, a) > graph.manhattan_distance(origin, b);
    });
    std::vector<int> occ(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < n_ex; ++k) occ[order[k]] = 1;
    return occ;
}

void sum_shells(OtocTrace &trace) {
    const auto &shells = trace.shells;
    trace.shell_c.clear();
    for (const auto &[d, sites] : shells.shells) trace.shell_c[d].assign(trace.times.size(), 0.0);
    for (std::size_t t = 0; t < trace.times.size(); ++t) {
        for (std::size_t k = 0; k < trace.butterfly_sites.size(); ++k) {
            trace.shell_c[shells.shell_of(trace.butterfly_sites[k])][t] += trace.values[t][k].c;
        }
    }
}

OtocTrace otoc_scan(const HamiltonianModel &model, const SectoredState &psi,
                    const ProtocolConfig &config, const ManhattanShells &shells, int workers,
                    const std::function<void(OtocTrace &)> &post) {
    if (shells.origin != config.perturbation_site) {
        throw std::invalid_argument("shells must be centred on the perturbation site");
    }
    OtocTrace trace;
    trace.variant = config.variant;
    trace.perturbation_site = config.perturbation_site;
    trace.seed = model.disorder().seed;
    trace.times = config.times;
    trace.butterfly_sites = config.butterfly_sites;
    if (trace.butterfly_sites.empty()) {
        for (Site s = 0; s < model.graph().n_sites(); ++s) trace.butterfly_sites.push_back(s);
    }
    double n_total = 0.0;
    for (Site s = 0; s < psi.n_sites(); ++s) n_total += expectation_number(psi, s);
    trace.n_ex = static_cast<int>(std::lround(n_total));

    const Site i = config.perturbation_site;
    trace.values.resize(trace.times.size());
    if (config.variant == OtocVariant::oracle) {
        const Propagator prop(model);
        parallel_for(trace.times.size(), workers, [&](std::size_t k) {
            trace.values[k] = otoc_oracle(prop, psi, i, trace.butterfly_sites, trace.times[k]);
        });
    } else {
        const TimeReversal reversal(model, config.sigma_z_colour);
        const bool f = config.variant == OtocVariant::f_state;
        parallel_for(trace.times.size(), workers, [&](std::size_t k) {
            trace.values[k] =
                f ? otoc_f_state(reversal, psi, i, trace.butterfly_sites, trace.times[k])
                  : otoc_ground_restricted(reversal, psi, i, trace.butterfly_sites, trace.times[k]);
        });
    }
    trace.shells = shells;
    sum_shells(trace);
    if (post) post(trace);
    return trace;
}

}  // namespace otoclab
