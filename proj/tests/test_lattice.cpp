#include <doctest.h>

#include <numeric>
#include <set>

#include "otoclab/lattice.hpp"
#include "support.hpp"

using namespace otoclab;
using testing::Gen;
using testing::mhz;

namespace {

double mean(const std::vector<double> &v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double rms(const std::vector<double> &v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

TEST_CASE("grid2d construction") {
    const auto g = build_grid2d(3, 3, mhz(8.1));
    CHECK(g.n_sites() == 9);
    CHECK(g.bonds().size() == 12);
    CHECK(g.kind() == LatticeKind::grid2d);
    for (const auto &b : g.bonds()) CHECK(b.coupling == doctest::Approx(mhz(8.1)));
    CHECK(g.positions()[5] == std::array<int, 2>{1, 2});

    const auto one = build_grid2d(1, 1, 1.0);
    CHECK(one.n_sites() == 1);
    CHECK(one.bonds().empty());

    const auto square = build_grid2d(2, 2, 1.0);
    CHECK(square.bonds().size() == 4);
    for (Site s = 0; s < 4; ++s) CHECK(square.degree(s) == 2);

    CHECK_THROWS_AS(build_grid2d(0, 3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_grid2d(3, 3, -1.0), std::invalid_argument);
}

TEST_CASE("chain1d construction") {
    const auto c = build_chain1d(7, 1.0);
    CHECK(c.bonds().size() == 6);
    CHECK(c.manhattan_distance(0, 6) == 6);
    CHECK_THROWS_AS(build_chain1d(0, 1.0), std::invalid_argument);
}

TEST_CASE("custom graph validation") {
    CHECK_THROWS_AS(LatticeGraph(2, {{0, 0, 1.0}}, {{0, 0}, {0, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(LatticeGraph(2, {{0, 1, 1.0}, {1, 0, 1.0}}, {{0, 0}, {0, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(LatticeGraph(2, {{0, 1, 0.0}}, {{0, 0}, {0, 1}}), std::invalid_argument);
}

TEST_CASE("add_long_range") {
    const double j = mhz(8.1);
    const auto g = build_grid2d(3, 3, j);
    const auto pairs = grid_diagonal_pairs(g, 1.0 / 30.0);
    CHECK(pairs.size() == 8);
    const auto nnn = add_long_range(g, pairs, j);
    CHECK(nnn.bonds().size() == 20);
    CHECK(*nnn.coupling(0, 4) == doctest::Approx(j / 30.0));
    CHECK(nnn.shape() == g.shape());
    CHECK(nnn.nearest_neighbor_bond_count() == 12);

    const auto same = add_long_range(g, {}, j);
    CHECK(same.bonds().size() == g.bonds().size());

    const auto chain = add_long_range(build_chain1d(7, j), {{0, 6, 1.0 / 75.0}}, j);
    CHECK(chain.bonds().size() == 7);
    CHECK(*chain.coupling(6, 0) == doctest::Approx(j / 75.0));

    CHECK_THROWS_AS(add_long_range(g, {{0, 1, 0.1}}, j), std::invalid_argument);
}

TEST_CASE("sample_disorder normalisation and determinism") {
    const double j = mhz(8.1);
    const auto d = sample_disorder(9, 2.7, j, 5);
    CHECK(std::abs(mean(d.detunings)) < 1e-12 * j);
    CHECK(rms(d.detunings) == doctest::Approx(2.7 * j).epsilon(1e-12));
    const auto c = sample_disorder(7, 2.0, j, 5);
    CHECK(rms(c.detunings) == doctest::Approx(2.0 * j).epsilon(1e-12));
    CHECK(sample_disorder(9, 2.7, j, 5).detunings == d.detunings);
    CHECK(sample_disorder(9, 2.7, j, 6).detunings != d.detunings);
    CHECK_THROWS_AS(sample_disorder(1, 1.0, j, 0), std::invalid_argument);

    const auto f = d.flipped();
    for (std::size_t k = 0; k < 9; ++k) CHECK(f.detunings[k] == -d.detunings[k]);
}

TEST_CASE("property: disorder normalisation is exact for any seed") {
    Gen gen(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = gen.integer(2, 16);
        const double target = gen.uniform(0.01, 5.0);
        const auto seed = static_cast<std::uint64_t>(gen.integer(0, 1 << 30));
        const auto d = sample_disorder(n, target, 1.0, seed);
        CHECK(std::abs(mean(d.detunings)) < 1e-12);
        CHECK(std::abs(rms(d.detunings) - target) < 1e-12 * target);
    }
}

TEST_CASE("manhattan shells") {
    const auto g = build_grid2d(3, 3, 1.0);
    const auto sh = manhattan_shells(g, 6);
    std::vector<std::size_t> sizes;
    for (const auto &[d, sites] : sh.shells) sizes.push_back(sites.size());
    CHECK(sizes == std::vector<std::size_t>{1, 2, 3, 2, 1});
    CHECK(sh.shells.at(0) == std::vector<Site>{6});
    CHECK(sh.shell_of(2) == 4);

    const auto c = manhattan_shells(build_chain1d(7, 1.0), 0);
    CHECK(c.shells.size() == 7);
    for (const auto &[d, sites] : c.shells) CHECK(sites == std::vector<Site>{d});
}

TEST_CASE("property: shells partition the lattice, bond queries are symmetric") {
    Gen gen(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int rows = gen.integer(1, 5), cols = gen.integer(1, 5);
        const auto g = build_grid2d(rows, cols, 1.0);
        const Site origin = gen.integer(0, g.n_sites() - 1);
        const auto sh = manhattan_shells(g, origin);
        std::set<Site> seen;
        for (const auto &[d, sites] : sh.shells) {
            for (Site s : sites) {
                CHECK(seen.insert(s).second);
                CHECK(g.manhattan_distance(origin, s) == d);
            }
        }
        CHECK(static_cast<int>(seen.size()) == g.n_sites());
        for (Site a = 0; a < g.n_sites(); ++a)
            for (Site b = 0; b < g.n_sites(); ++b) CHECK(g.has_bond(a, b) == g.has_bond(b, a));
    }
}
