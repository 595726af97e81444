#include <doctest.h>

#include <algorithm>

#include "otoclab/analysis.hpp"
#include "otoclab/noise.hpp"
#include "support.hpp"

using namespace otoclab;
using testing::Gen;
using testing::mhz;

namespace {

const double kJ = mhz(8.1);

OtocTrace clean_trace(double disorder = 0.0, std::uint64_t seed = 0) {
    const auto g = build_grid2d(3, 3, kJ);
    const auto model = build_hardcore(g, disorder > 0 ? sample_disorder(9, disorder, kJ, seed)
                                                      : DisorderRealization::none(9));
    std::vector<int> occ(9, 0);
    occ[2] = 1;
    ProtocolConfig cfg;
    for (int k = 0; k <= 50; ++k) cfg.times.push_back(2e-9 * k);
    return otoc_scan(model, product_state(model.space(), occ), cfg, manhattan_shells(g, 6));
}

LightCone cone_with(std::map<int, double> crossing, double sentinel = 300e-9) {
    LightCone c;
    c.sentinel = sentinel;
    for (auto [d, t] : crossing) {
        c.crossing[d] = t;
        c.reached[d] = t != sentinel;
    }
    return c;
}

}  // namespace

TEST_CASE("baseline subtraction") {
    const auto ideal = clean_trace();
    const auto same = subtract_baseline(ideal);
    for (const auto &[d, v] : same.shell_c)
        for (std::size_t k = 0; k < v.size(); ++k) CHECK(std::abs(v[k] - ideal.shell_c.at(d)[k]) < 1e-12);

    auto shifted = ideal;
    for (auto &[d, v] : shifted.shell_c)
        for (double &x : v) x += 0.1 * d - 0.05;
    const auto fixed = subtract_baseline(shifted);
    for (const auto &[d, v] : fixed.shell_c) {
        CHECK(fixed.baseline_offsets.at(d) == doctest::Approx(0.1 * d - 0.05));
        for (std::size_t k = 0; k < v.size(); ++k) CHECK(std::abs(v[k] - ideal.shell_c.at(d)[k]) < 1e-12);
    }

    auto oracle = ideal;
    oracle.variant = OtocVariant::oracle;
    apply_dephasing(oracle, 0.884e-6);
    const auto anchored = subtract_baseline(oracle);
    for (const auto &[d, v] : anchored.shell_c) {
        CHECK(v[0] == doctest::Approx(d == 0 ? 4.0 : 0.0).scale(1.0));
        const double off = oracle.shell_c.at(d)[0] - v[0];
        for (std::size_t k = 1; k < v.size(); ++k) CHECK(v[k] == doctest::Approx(oracle.shell_c.at(d)[k] - off));
    }

    auto late = ideal;
    late.times[0] = 1e-9;
    CHECK_THROWS_AS(subtract_baseline(late), std::invalid_argument);
}

TEST_CASE("light-cone extraction") {
    const auto trace = clean_trace();
    const auto cone = extract_light_cone(trace);
    CHECK(cone.crossing.at(0) == 0.0);
    CHECK(cone.reached.at(0));
    for (int d = 1; d <= 4; ++d) {
        CHECK(cone.reached.at(d));
        CHECK(cone.crossing.at(d) > cone.crossing.at(d - 1));
    }

    const std::vector<double> times{0, 1e-9, 2e-9};
    const auto flat = extract_light_cone(times, {{3, {0.0, 0.0, 0.0}}});
    CHECK(flat.crossing.at(3) == doctest::Approx(300e-9));
    CHECK(flat.is_sentinel(3));

    const auto beyond = extract_light_cone({0, 50e-9, 150e-9}, {{1, {0.0, 0.1, 1.0}}});
    CHECK(beyond.is_sentinel(1));

    LightConeOptions interp;
    interp.interpolate = true;
    const auto lin = extract_light_cone(times, {{1, {0.0, 0.3, 0.9}}}, interp);
    CHECK(lin.crossing.at(1) == doctest::Approx(1.5e-9));
    CHECK_THROWS_AS(extract_light_cone({0, 2e-9, 1e-9}, {{1, {0, 0, 0}}}), std::invalid_argument);
}

TEST_CASE("property: light cones are monotone in the threshold") {
    Gen gen(71);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> times, values;
        for (int k = 0; k < 60; ++k) {
            times.push_back(k * 2e-9);
            values.push_back(gen.uniform(0, 2));
        }
        LightConeOptions lo, hi;
        lo.threshold = gen.uniform(0, 2);
        hi.threshold = lo.threshold + gen.uniform(0, 1);
        const auto a = extract_light_cone(times, {{1, values}}, lo);
        const auto b = extract_light_cone(times, {{1, values}}, hi);
        CHECK(b.crossing.at(1) >= a.crossing.at(1));
    }
}

TEST_CASE("ensemble averages") {
    const auto single = ensemble_average({cone_with({{0, 0.0}, {1, 12e-9}})});
    CHECK(single.shells.at(1).mean == doctest::Approx(12e-9));
    CHECK(single.shells.at(1).std == 0.0);
    CHECK(single.realizations == 1);
    CHECK_THROWS_AS(ensemble_average({}), std::invalid_argument);
    CHECK_THROWS_AS(ensemble_average({cone_with({{0, 0.0}}), cone_with({{0, 0.0}, {1, 1e-9}})}),
                    std::invalid_argument);

    // 100 cones around 40 ns with ten far outliers; the central 20% excludes them.
    Gen gen(72);
    std::vector<LightCone> cones;
    for (int k = 0; k < 100; ++k) {
        const double t = k < 10 ? 300e-9 : 40e-9 + gen.uniform(-3e-9, 3e-9);
        cones.push_back(cone_with({{4, t}}));
    }
    const auto trimmed = ensemble_average(cones, 0.2);
    CHECK(trimmed.shells.at(4).count == 20);
    CHECK(trimmed.shells.at(4).mean == doctest::Approx(40e-9).epsilon(0.05));
    CHECK(trimmed.shells.at(4).sentinel_fraction == doctest::Approx(0.1));
    const auto plain = ensemble_average(cones);
    CHECK(plain.shells.at(4).mean > 60e-9);
}

TEST_CASE("property: untrimmed ensemble mean is the arithmetic mean") {
    Gen gen(73);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = gen.integer(1, 30);
        std::vector<LightCone> cones;
        double sum = 0.0, sq = 0.0;
        for (int k = 0; k < n; ++k) {
            const double t = gen.uniform(0, 300e-9);
            sum += t;
            sq += t * t;
            cones.push_back(cone_with({{2, t}}));
        }
        const auto s = ensemble_average(cones).shells.at(2);
        const double mean = sum / n;
        CHECK(s.mean == doctest::Approx(mean).epsilon(1e-12));
        if (n > 1) {
            const double sd = std::sqrt(std::max(0.0, (sq - n * mean * mean) / (n - 1)));
            CHECK(s.std == doctest::Approx(sd).epsilon(1e-6));
        }
        CHECK(s.std_of_mean == doctest::Approx(s.std / std::sqrt(static_cast<double>(n))));
    }
}

TEST_CASE("tomography phase correction") {
    const auto bell = entangled_pair_density(0.0, 6, 3);
    const auto self = optimize_tomography_phase(bell, bell);
    CHECK(std::abs(self.phi) < 1e-6);
    CHECK(self.fidelity == doctest::Approx(1.0));
    CHECK_FALSE(self.degenerate);

    for (double phi0 : {0.3, -1.2, 2.9}) {
        const auto measured = rotate_second_qubit(bell, phi0);
        const auto res = optimize_tomography_phase(measured, bell);
        CHECK(std::abs(std::remainder(res.phi + phi0, 2 * std::numbers::pi)) < 1e-6);
        CHECK(res.fidelity == doctest::Approx(1.0).epsilon(1e-9));
    }

    Eigen::Matrix4cd diag = Eigen::Matrix4cd::Zero();
    diag.diagonal() << 0.1, 0.4, 0.3, 0.2;
    const auto flat = optimize_tomography_phase(DensityMatrix2Q(diag), bell);
    CHECK(flat.degenerate);
}

TEST_CASE("ZZ error budget") {
    const auto g = build_grid2d(3, 3, kJ);
    const double eps = mhz(0.54);
    const std::vector<double> table{313, 104, 52, 31};
    CHECK(std::isinf(zz_error_budget(g, 0, eps, 1.0).t_unreliable));
    CHECK(std::isinf(zz_error_budget(g, 1, eps, 1.0).t_unreliable));
    for (int n = 2; n <= 5; ++n) {
        CHECK(std::abs(zz_error_budget(g, n, eps, 1.0).t_unreliable * 1e9 - table[n - 2]) <= 1.0);
    }
    CHECK(zz_error_budget(g, 2, eps, 1.0).proxy == doctest::Approx(1.0 / 3.0));
    const auto b = zz_error_budget(g, 3, eps, 2.0);
    CHECK(b.delta_c_bound(10e-9) == doctest::Approx(std::sqrt(16.0) * b.proxy * eps * 10e-9));

    const auto chain = build_chain1d(7, kJ);
    const auto comb = zz_error_budget(chain, 2, eps, 1.0);
    const auto tab = zz_error_budget(chain, 2, eps, 1.0, ZzConvention::chain_table);
    CHECK(tab.t_unreliable / comb.t_unreliable == doctest::Approx(9.0 / 7.0));
    CHECK(comb.t_unreliable * 1e9 == doctest::Approx(364.7).epsilon(1e-3));
    CHECK_THROWS_AS(zz_error_budget(g, 10, eps, 1.0), std::invalid_argument);
}

TEST_CASE("property: ZZ times scale inversely with eps and proxy") {
    Gen gen(74);
    const auto g = build_grid2d(3, 3, kJ);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = gen.integer(2, 9);
        const double eps = mhz(gen.uniform(0.1, 2.0));
        const double k = gen.uniform(0.5, 4.0);
        const auto a = zz_error_budget(g, n, eps, 1.0);
        const auto b = zz_error_budget(g, n, k * eps, 1.0);
        CHECK(a.t_unreliable / b.t_unreliable == doctest::Approx(k).epsilon(1e-12));
        CHECK(a.t_unreliable * a.proxy * eps == doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-12));
    }
}
