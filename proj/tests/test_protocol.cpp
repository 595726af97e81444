#include <doctest.h>

#include <numeric>

#include "otoclab/protocol.hpp"
#include "support.hpp"

using namespace otoclab;
using testing::Gen;
using testing::mhz;

namespace {

const double kJ = mhz(8.1);

std::vector<Site> all_sites(int n) {
    std::vector<Site> v;
    for (Site s = 0; s < n; ++s) v.push_back(s);
    return v;
}

/// Random two-level product-basis superposition with site i in |g>.
SectoredState ground_at(Gen &gen, std::shared_ptr<const StateSpace> sp, Site i) {
    Eigen::VectorXcd dense = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sp->dimension()));
    for (std::size_t code = 0; code < sp->dimension(); ++code) {
        if (sp->level(static_cast<StateSpace::Code>(code), i) == 0) dense[static_cast<Eigen::Index>(code)] = gen.complex_normal();
    }
    return SectoredState::from_dense(sp, dense / dense.norm());
}

}  // namespace

TEST_CASE("random walk") {
    const Propagator prop(build_hardcore(build_grid2d(3, 3, kJ), DisorderRealization::none(9)));
    std::vector<double> times;
    for (int k = 0; k <= 150; ++k) times.push_back(k * 1e-9);
    const auto rw = random_walk(prop, 6, times);
    CHECK(rw.populations.size() == 5);
    CHECK(rw.populations.at(0)[0] == doctest::Approx(1.0));
    for (std::size_t k = 0; k < times.size(); ++k) {
        double total = 0.0;
        for (const auto &[d, p] : rw.populations) total += p[k];
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto revival = first_revival_time(times, rw.populations.at(0));
    REQUIRE(revival.has_value());
    CHECK(*revival * 1e9 == doctest::Approx(90.0).epsilon(5.0 / 90.0));
}

TEST_CASE("farthest-first particle placement") {
    const auto g = build_grid2d(3, 3, 1.0);
    const auto one = farthest_first_occupations(g, 6, 1);
    CHECK(one[2] == 1);
    CHECK(std::accumulate(one.begin(), one.end(), 0) == 1);
    const auto three = farthest_first_occupations(g, 6, 3);
    CHECK(three[2] + three[1] + three[5] == 3);
    CHECK(three[6] == 0);
    CHECK_THROWS_AS(farthest_first_occupations(g, 6, 9), std::invalid_argument);
}

TEST_CASE("Bell-pair preparation and the Loschmidt echo") {
    const auto model = build_hardcore(build_grid2d(3, 3, kJ), DisorderRealization::none(9));
    const TimeReversal rev(model);
    const auto rho0 = entangled_pair_density(0.0, 6, 3);
    CHECK(concurrence(rho0) == doctest::Approx(1.0));
    const auto psi = entangled_pair_state(model.space(), 6, 3, 0.0);
    CHECK((reduced_density_2q(psi, 6, 3).matrix() - rho0.matrix()).norm() < 1e-12);
    CHECK_THROWS_AS(entangled_pair_state(model.space(), 3, 3, 0.0), std::invalid_argument);

    Gen gen(51);
    for (int trial = 0; trial < 20; ++trial) {
        const double phi = gen.uniform(0, 2 * std::numbers::pi);
        const double t = gen.uniform(0, 100e-9);
        const auto rho = loschmidt_echo(rev, phi, t, 0.0);
        CHECK(fidelity(rho, entangled_pair_density(phi, 6, 3)) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("ground-restricted protocol basics") {
    const auto g = build_grid2d(3, 3, kJ);
    const auto model = build_hardcore(g, sample_disorder(9, 1.0, kJ, 2));
    const TimeReversal rev(model);
    std::vector<int> occ(9, 0);
    occ[2] = 1;
    const auto psi = product_state(model.space(), occ);
    const auto at0 = otoc_ground_restricted(rev, psi, 6, all_sites(9), 0.0);
    for (Site j = 0; j < 9; ++j) {
        CHECK(at0[j].c == doctest::Approx(j == 6 ? 4.0 : 0.0).epsilon(1e-12).scale(1.0));
        CHECK(at0[j].c == doctest::Approx(2.0 + at0[j].c_minus - at0[j].c_plus));
    }
    occ[6] = 1;
    CHECK_THROWS_AS(otoc_ground_restricted(rev, product_state(model.space(), occ), 6, {0}, 0.0),
                    std::invalid_argument);
}

TEST_CASE("two-site closed form") {
    const auto model = build_hardcore(build_chain1d(2, kJ), DisorderRealization::none(2));
    const TimeReversal rev(model);
    const auto psi = product_state(model.space(), {0, 0});
    for (int k = 0; k <= 100; ++k) {
        const double t = k * 1e-9;
        const auto p = otoc_ground_restricted(rev, psi, 0, {1}, t);
        CHECK(std::abs(p[0].c - 4.0 * std::pow(std::sin(kJ * t), 2)) < 1e-9);
    }
}

TEST_CASE("oracle agrees with the dense commutator") {
    Gen gen(52);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = gen.integer(2, 5);
        const auto g = build_chain1d(n, kJ);
        const auto dis = sample_disorder(n, gen.uniform(0, 3), kJ, trial);
        const auto model = build_hardcore(g, dis);
        const auto psi = gen.any_state(model.space());
        const double t = gen.uniform(0, 100e-9);
        const Site i = gen.integer(0, n - 1);
        const auto pts = otoc_oracle(Propagator(model), psi, i, all_sites(n), t);
        const auto h = testing::hardcore_hamiltonian(g, dis.detunings);
        for (Site j = 0; j < n; ++j) {
            CHECK(std::abs(pts[j].c - testing::otoc_c(h, psi.to_dense(), i, j, t, n, 2)) < 1e-10);
            CHECK(pts[j].c >= -1e-12);
            CHECK(std::abs(pts[j].c - (2.0 - 2.0 * pts[j].f_real)) < 1e-10);
        }
    }
}

TEST_CASE("oracle light cone on the clean 3x3 lattice") {
    const auto model = build_hardcore(build_grid2d(3, 3, kJ), DisorderRealization::none(9));
    const Propagator prop(model);
    std::vector<int> occ(9, 0);
    occ[2] = 1;
    const auto psi = product_state(model.space(), occ);
    double late = 0.0;
    for (int k = 0; k <= 100; k += 2) {
        const double c = otoc_oracle(prop, psi, 6, {2}, k * 1e-9)[0].c;
        if (k <= 20) CHECK(c < 0.1);
        late = std::max(late, c);
    }
    CHECK(late > 0.6);
}

TEST_CASE("property: ground-restricted protocol equals the oracle") {
    Gen gen(53);
    for (int trial = 0; trial < 12; ++trial) {
        const bool grid = trial % 3 == 0;
        const auto g = grid ? build_grid2d(3, 3, kJ) : build_chain1d(gen.integer(2, 6), kJ);
        const int n = g.n_sites();
        const double strength = trial % 2 ? gen.uniform(0.5, 3.0) : 0.0;
        const auto model = build_hardcore(g, strength > 0 ? sample_disorder(n, strength, kJ, trial)
                                                          : DisorderRealization::none(n));
        const Site i = gen.integer(0, n - 1);
        const auto psi = ground_at(gen, model.space(), i);
        const TimeReversal rev(model, gen.integer(0, 1));
        const Propagator prop(model);
        const double t = gen.uniform(0, 100e-9);
        const auto a = otoc_ground_restricted(rev, psi, i, all_sites(n), t);
        const auto b = otoc_oracle(prop, psi, i, all_sites(n), t);
        for (Site j = 0; j < n; ++j) CHECK(std::abs(a[j].c - b[j].c) < 1e-9);

        // Global phase and colouring do not matter.
        auto rotated = psi;
        rotated *= std::polar(1.0, gen.uniform(0, 6.0));
        const auto c = otoc_ground_restricted(TimeReversal(model, 1), rotated, i, all_sites(n), t);
        for (Site j = 0; j < n; ++j) CHECK(std::abs(a[j].c - c[j].c) < 1e-9);
    }
}

TEST_CASE("property: the butterfly operator conserves the excitation distribution") {
    Gen gen(54);
    const auto model = build_hardcore(build_grid2d(3, 3, kJ), sample_disorder(9, 2.7, kJ, 9));
    const Propagator prop(model);
    for (int trial = 0; trial < 10; ++trial) {
        const auto psi = gen.any_state(model.space());
        const double t = gen.uniform(0, 100e-9);
        const Site j = gen.integer(0, 8);
        const auto w = prop.evolve(apply_single_site_gate(prop.evolve(psi, t), j, gates::pauli_z()), -t);
        for (const auto &[k, p] : psi.sector_probabilities()) CHECK(std::abs(w.sector_probabilities()[k] - p) < 1e-12);
    }
}

TEST_CASE("f-state protocol") {
    Gen gen(55);
    const auto g = build_chain1d(4, kJ);
    const std::vector<double> u(4, mhz(-244.0));
    const auto dis = sample_disorder(4, 1.5, kJ, 3);
    const auto decoupled = build_transmon3(g, dis, u, true);
    const TimeReversal rev(decoupled);
    const Propagator prop(decoupled);
    for (int trial = 0; trial < 20; ++trial) {
        const auto psi = gen.qubit_state(decoupled.space());
        const Site i = gen.integer(0, 3);
        const double t = gen.uniform(0, 100e-9);
        const auto a = otoc_f_state(rev, psi, i, all_sites(4), t);
        const auto b = otoc_oracle(prop, psi, i, all_sites(4), t);
        for (Site j = 0; j < 4; ++j) CHECK(std::abs(a[j].c - b[j].c) < 1e-9);
    }

    // With site i in |g> it reduces to the ground-restricted protocol.
    const auto hard = build_hardcore(g, dis);
    const TimeReversal hrev(hard);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<int> occ{0, gen.integer(0, 1), gen.integer(0, 1), gen.integer(0, 1)};
        const double t = gen.uniform(0, 100e-9);
        const auto a = otoc_f_state(rev, product_state(decoupled.space(), occ), 0, all_sites(4), t);
        const auto b = otoc_ground_restricted(hrev, product_state(hard.space(), occ), 0, all_sites(4), t);
        for (Site j = 0; j < 4; ++j) CHECK(std::abs(a[j].c - b[j].c) < 1e-9);
    }

    CHECK_THROWS_AS(otoc_f_state(rev, product_state(decoupled.space(), {2, 0, 0, 0}), 0, {1}, 0.0),
                    std::invalid_argument);

    // Full transmon couplings break the equivalence, increasingly with time.
    const auto full = build_transmon3(g, dis, u, false);
    const TimeReversal frev(full);
    const Propagator fprop(full);
    const auto psi = product_state(full.space(), {0, 1, 0, 1});
    auto deviation = [&](double t) {
        double d = 0.0;
        const auto a = otoc_f_state(frev, psi, 0, all_sites(4), t);
        const auto b = otoc_oracle(fprop, psi, 0, all_sites(4), t);
        for (Site j = 0; j < 4; ++j) d = std::max(d, std::abs(a[j].c - b[j].c));
        return d;
    };
    CHECK(deviation(10e-9) > 1e-6);
    CHECK(deviation(80e-9) > deviation(10e-9));
}

TEST_CASE("otoc_scan bookkeeping") {
    const auto g = build_grid2d(3, 3, kJ);
    const auto model = build_hardcore(g, DisorderRealization::none(9));
    std::vector<int> occ(9, 0);
    occ[2] = 1;
    const auto psi = product_state(model.space(), occ);
    ProtocolConfig cfg;
    for (int k = 0; k <= 50; ++k) cfg.times.push_back(2e-9 * k);
    const auto shells = manhattan_shells(g, 6);
    const auto gr = otoc_scan(model, psi, cfg, shells, 2);
    cfg.variant = OtocVariant::oracle;
    const auto oracle = otoc_scan(model, psi, cfg, shells, 1);
    CHECK(gr.n_ex == 1);
    CHECK(gr.shell_c.at(0)[0] == doctest::Approx(4.0));
    for (int d = 1; d <= 4; ++d) CHECK(std::abs(gr.shell_c.at(d)[0]) < 1e-12);
    for (const auto &[d, v] : gr.shell_c) {
        const double size = static_cast<double>(shells.shells.at(d).size());
        for (std::size_t k = 0; k < v.size(); ++k) {
            CHECK(std::abs(v[k] - oracle.shell_c.at(d)[k]) < 1e-9);
            CHECK(v[k] >= -1e-9);
            CHECK(v[k] <= 4.0 * size + 1e-9);
        }
    }
    for (const auto &row : gr.values)
        for (const auto &p : row) CHECK(p.c == doctest::Approx(2.0 + p.c_minus - p.c_plus));

    CHECK_THROWS_AS(otoc_scan(model, psi, cfg, manhattan_shells(g, 0)), std::invalid_argument);
    CHECK(otoc_variant_from_string(to_string(OtocVariant::f_state)) == OtocVariant::f_state);
    CHECK_THROWS_AS(otoc_variant_from_string("bogus"), std::invalid_argument);
}
