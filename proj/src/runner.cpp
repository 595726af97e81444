#include "otoclab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "otoclab/calibration.hpp"
#include "otoclab/evolution.hpp"
#include "otoclab/noise.hpp"
#include "otoclab/parallel.hpp"
#include "otoclab/units.hpp"

namespace otoclab {

namespace fs = std::filesystem;

std::vector<double> TimeGrid::seconds() const {
    if (!(step_ns > 0.0)) throw std::invalid_argument("time step must be > 0");
    if (stop_ns < start_ns) throw std::invalid_argument("time grid stop precedes start");
    const auto n = static_cast<long>(std::floor((stop_ns - start_ns) / step_ns + 1e-9)) + 1;
    std::vector<double> out;
    for (long k = 0; k < n; ++k) out.push_back(ns_to_s(start_ns + static_cast<double>(k) * step_ns));
    return out;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

void reject_unknown(const json &obj, const std::set<std::string> &allowed, const std::string &where) {
    if (!obj.is_object()) throw std::invalid_argument(where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw std::invalid_argument("unknown key '" + it.key() + "' in " + where);
        }
    }
}

template <class T>
void read(const json &obj, const char *key, T &dst) {
    if (obj.contains(key)) dst = obj.at(key).get<T>();
}

TimeGrid read_grid(const json &obj, TimeGrid grid, const std::string &where) {
    reject_unknown(obj, {"start", "stop", "step"}, where);
    read(obj, "start", grid.start_ns);
    read(obj, "stop", grid.stop_ns);
    read(obj, "step", grid.step_ns);
    grid.seconds();
    return grid;
}

json grid_json(const TimeGrid &g) {
    return {{"start", g.start_ns}, {"stop", g.stop_ns}, {"step", g.step_ns}};
}

void validate(const RunConfig &c) {
    if (!(c.j_mhz > 0.0)) throw std::invalid_argument("J_MHz must be > 0");
    if (!(c.epsilon_mhz > 0.0)) throw std::invalid_argument("epsilon_MHz must be > 0");
    if (c.model != "hardcore" && c.model != "transmon3" && c.model != "transmon3_f_decoupled") {
        throw std::invalid_argument("unknown model '" + c.model + "'");
    }
    if (c.disorder_std < 0.0) throw std::invalid_argument("disorder std must be >= 0");
    if (c.seeds.empty()) throw std::invalid_argument("seed list is empty");
    if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size()) {
        throw std::invalid_argument("seeds must be unique");
    }
    if (c.n_ex.empty()) throw std::invalid_argument("n_ex list is empty");
    for (int n : c.n_ex) {
        if (n < 0) throw std::invalid_argument("n_ex must be >= 0");
    }
    if (c.t2_eff_us && !(*c.t2_eff_us > 0.0)) throw std::invalid_argument("T2_eff_us must be > 0");
    if (c.correct_dephasing && !c.t2_eff_us) {
        throw std::invalid_argument("correct_dephasing needs T2_eff_us");
    }
    if (!(c.trim >= 0.0 && c.trim <= 1.0)) throw std::invalid_argument("trim must lie in [0, 1]");
    if (c.sigma_z_colour != 0 && c.sigma_z_colour != 1) {
        throw std::invalid_argument("sigma_z_colour must be 0 or 1");
    }
    if (c.lattice.kind != "grid2d" && c.lattice.kind != "chain1d") {
        throw std::invalid_argument("lattice kind must be grid2d or chain1d");
    }
    if (c.lattice.long_range_fraction < 0.0) {
        throw std::invalid_argument("long_range_fraction must be >= 0");
    }
    if (c.calibration_samples < 1) throw std::invalid_argument("calibration samples must be >= 1");
    if (c.flux_noise < 0.0) throw std::invalid_argument("flux noise must be >= 0");
    if (c.workers < 1) throw std::invalid_argument("workers must be >= 1");
    if (c.pair && c.pair->size() != 2) throw std::invalid_argument("pair needs two sites");
    c.time_grid.seconds();
    c.tau_grid.seconds();
}

}  // namespace

RunConfig parse_config(const json &doc) {
    RunConfig c;
    try {
        reject_unknown(doc,
                       {"lattice", "J_MHz", "U_MHz", "epsilon_MHz", "include_zz", "model", "variant",
                        "disorder", "time_grid_ns", "n_ex", "perturbation_site", "sigma_z_colour",
                        "T2_eff_us", "correct_dephasing", "light_cone", "trim", "loschmidt",
                        "calibration", "workers"},
                       "config");
        if (doc.contains("lattice")) {
            const auto &l = doc.at("lattice");
            reject_unknown(l, {"kind", "rows", "cols", "length", "long_range_fraction"}, "lattice");
            read(l, "kind", c.lattice.kind);
            read(l, "rows", c.lattice.rows);
            read(l, "cols", c.lattice.cols);
            read(l, "length", c.lattice.length);
            read(l, "long_range_fraction", c.lattice.long_range_fraction);
        }
        read(doc, "J_MHz", c.j_mhz);
        read(doc, "U_MHz", c.u_mhz);
        read(doc, "epsilon_MHz", c.epsilon_mhz);
        read(doc, "include_zz", c.include_zz);
        read(doc, "model", c.model);
        if (doc.contains("variant")) c.variant = otoc_variant_from_string(doc.at("variant").get<std::string>());
        if (doc.contains("disorder")) {
            const auto &d = doc.at("disorder");
            reject_unknown(d, {"std", "seeds"}, "disorder");
            read(d, "std", c.disorder_std);
            if (d.contains("seeds")) {
                c.seeds = d.at("seeds").get<std::vector<std::uint64_t>>();
            } else if (c.disorder_std > 0.0) {
                c.seeds.clear();
                for (std::uint64_t s = 1; s <= 12; ++s) c.seeds.push_back(s);
            }
        }
        if (doc.contains("time_grid_ns")) c.time_grid = read_grid(doc.at("time_grid_ns"), c.time_grid, "time_grid_ns");
        if (doc.contains("n_ex")) {
            const auto &n = doc.at("n_ex");
            c.n_ex = n.is_array() ? n.get<std::vector<int>>() : std::vector<int>{n.get<int>()};
        }
        if (doc.contains("perturbation_site") && !doc.at("perturbation_site").is_null()) {
            c.perturbation_site = doc.at("perturbation_site").get<int>();
        }
        read(doc, "sigma_z_colour", c.sigma_z_colour);
        if (doc.contains("T2_eff_us") && !doc.at("T2_eff_us").is_null()) {
            c.t2_eff_us = doc.at("T2_eff_us").get<double>();
        }
        read(doc, "correct_dephasing", c.correct_dephasing);
        if (doc.contains("light_cone")) {
            const auto &lc = doc.at("light_cone");
            reject_unknown(lc, {"threshold", "sentinel_ns", "horizon_ns", "interpolate"}, "light_cone");
            read(lc, "threshold", c.light_cone.threshold);
            if (lc.contains("sentinel_ns")) c.light_cone.sentinel = ns_to_s(lc.at("sentinel_ns").get<double>());
            if (lc.contains("horizon_ns")) c.light_cone.horizon = ns_to_s(lc.at("horizon_ns").get<double>());
            read(lc, "interpolate", c.light_cone.interpolate);
        }
        read(doc, "trim", c.trim);
        if (doc.contains("loschmidt")) {
            const auto &l = doc.at("loschmidt");
            reject_unknown(l, {"phis", "pair", "echo_time_ns", "tau_grid_ns"}, "loschmidt");
            read(l, "phis", c.phis);
            if (l.contains("pair")) c.pair = l.at("pair").get<std::vector<int>>();
            read(l, "echo_time_ns", c.echo_time_ns);
            if (l.contains("tau_grid_ns")) c.tau_grid = read_grid(l.at("tau_grid_ns"), c.tau_grid, "tau_grid_ns");
        }
        if (doc.contains("calibration")) {
            const auto &cal = doc.at("calibration");
            reject_unknown(cal, {"samples", "flux_noise"}, "calibration");
            read(cal, "samples", c.calibration_samples);
            read(cal, "flux_noise", c.flux_noise);
        }
        read(doc, "workers", c.workers);
    } catch (const json::exception &e) {
        throw std::invalid_argument(std::string("bad config value: ") + e.what());
    }
    validate(c);
    return c;
}

RunConfig load_config(const fs::path &path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception &e) {
        throw std::invalid_argument("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(doc);
}

json echo_config(const RunConfig &c) {
    json lattice = {{"kind", c.lattice.kind}};
    if (c.lattice.kind == "grid2d") {
        lattice["rows"] = c.lattice.rows;
        lattice["cols"] = c.lattice.cols;
    } else {
        lattice["length"] = c.lattice.length;
    }
    lattice["long_range_fraction"] = c.lattice.long_range_fraction;
    json lc = {{"threshold", c.light_cone.threshold},
               {"sentinel_ns", s_to_ns(c.light_cone.sentinel)},
               {"horizon_ns", s_to_ns(c.light_cone.horizon)},
               {"interpolate", c.light_cone.interpolate}};
    json los = {{"phis", c.phis}, {"echo_time_ns", c.echo_time_ns}, {"tau_grid_ns", grid_json(c.tau_grid)}};
    if (c.pair) los["pair"] = *c.pair;
    return {{"lattice", lattice},
            {"J_MHz", c.j_mhz},
            {"U_MHz", c.u_mhz},
            {"epsilon_MHz", c.epsilon_mhz},
            {"include_zz", c.include_zz},
            {"model", c.model},
            {"variant", to_string(c.variant)},
            {"disorder", {{"std", c.disorder_std}, {"seeds", c.seeds}}},
            {"time_grid_ns", grid_json(c.time_grid)},
            {"n_ex", c.n_ex},
            {"perturbation_site", c.perturbation_site ? json(*c.perturbation_site) : json(nullptr)},
            {"sigma_z_colour", c.sigma_z_colour},
            {"T2_eff_us", c.t2_eff_us ? json(*c.t2_eff_us) : json(nullptr)},
            {"correct_dephasing", c.correct_dephasing},
            {"light_cone", lc},
            {"trim", c.trim},
            {"loschmidt", los},
            {"calibration", {{"samples", c.calibration_samples}, {"flux_noise", c.flux_noise}}}};
}

LatticeGraph build_lattice(const RunConfig &c) {
    const double j = mhz_to_rad_per_s(c.j_mhz);
    LatticeGraph g = c.lattice.kind == "grid2d" ? build_grid2d(c.lattice.rows, c.lattice.cols, j)
                                                : build_chain1d(c.lattice.length, j);
    const double f = c.lattice.long_range_fraction;
    if (f > 0.0) {
        if (c.lattice.kind == "grid2d") {
            g = add_long_range(g, grid_diagonal_pairs(g, f), j);
        } else if (c.lattice.length > 2) {
            g = add_long_range(g, {{0, c.lattice.length - 1, f}}, j);
        }
    }
    return g;
}

Site perturbation_site(const RunConfig &c, const LatticeGraph &g) {
    Site s = 0;
    if (c.perturbation_site) {
        s = *c.perturbation_site;
    } else if (g.kind() == LatticeKind::grid2d) {
        s = (g.shape()[0] - 1) * g.shape()[1];  // bottom-left corner; qubit 7 on 3x3
    } else if (g.kind() == LatticeKind::chain1d) {
        s = g.n_sites() - 1;
    }
    if (s < 0 || s >= g.n_sites()) {
        throw std::invalid_argument("perturbation site " + std::to_string(s) + " outside lattice");
    }
    return s;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

DisorderRealization disorder_for(const RunConfig &c, int n_sites, std::uint64_t seed) {
    if (c.disorder_std == 0.0 || n_sites < 2) {
        auto d = DisorderRealization::none(n_sites);
        d.seed = seed;
        return d;
    }
    return sample_disorder(n_sites, c.disorder_std, mhz_to_rad_per_s(c.j_mhz), seed);
}

HamiltonianModel build_model(const RunConfig &c, const LatticeGraph &g, const DisorderRealization &d) {
    if (c.model == "hardcore") {
        auto m = build_hardcore(g, d);
        if (c.include_zz) m = m.with_zz(mhz_to_rad_per_s(c.epsilon_mhz));
        return m;
    }
    if (c.include_zz) throw std::invalid_argument("include_zz applies to the hardcore model only");
    std::vector<double> u(static_cast<std::size_t>(g.n_sites()), mhz_to_rad_per_s(c.u_mhz));
    return build_transmon3(g, d, u, c.model == "transmon3_f_decoupled");
}

void check_variant(const RunConfig &c) {
    if (c.variant == OtocVariant::ground_restricted && c.model != "hardcore") {
        throw std::invalid_argument("ground_restricted variant needs the hardcore model");
    }
    if (c.variant == OtocVariant::f_state && c.model == "hardcore") {
        throw std::invalid_argument("f_state variant needs a three-level model");
    }
}

}  // namespace

void cmd_random_walk(const RunConfig &c, const fs::path &out, std::ostream &log) {
    const auto g = build_lattice(c);
    const Site origin = perturbation_site(c, g);
    const auto model = build_model(c, g, disorder_for(c, g.n_sites(), c.seeds.front()));
    const auto trace = random_walk(Propagator(model), origin, c.time_grid.seconds());

    const json echo = echo_config(c);
    CsvWriter csv(out / "random_walk.csv", echo, {"t_ns", "shell", "population"});
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        for (const auto &[d, pop] : trace.populations) {
            csv.cell(s_to_ns(trace.times[k])).cell(d).cell(pop[k]);
            csv.end_row();
        }
    }
    csv.close();
    const auto revival = first_revival_time(trace.times, trace.populations.at(0));
    log << "random-walk: " << trace.times.size() << " times x " << trace.populations.size()
        << " shells";
    if (revival) log << ", first shell-0 revival at " << s_to_ns(*revival) << " ns";
    log << '\n';
}

void cmd_otoc(const RunConfig &c, const fs::path &out, std::ostream &log) {
    check_variant(c);
    const auto g = build_lattice(c);
    const Site origin = perturbation_site(c, g);
    const auto shells = manhattan_shells(g, origin);
    ProtocolConfig pc;
    pc.variant = c.variant;
    pc.perturbation_site = origin;
    pc.times = c.time_grid.seconds();
    pc.sigma_z_colour = c.sigma_z_colour;

    struct Task {
        std::uint64_t seed;
        int n_ex;
    };
    std::vector<Task> tasks;
    for (auto seed : c.seeds) {
        for (int n : c.n_ex) tasks.push_back({seed, n});
    }
    std::vector<OtocTrace> traces(tasks.size());
    std::vector<LightCone> cones(tasks.size());
    const int inner = tasks.size() == 1 ? c.workers : 1;
    parallel_for(tasks.size(), tasks.size() == 1 ? 1 : c.workers, [&](std::size_t k) {
        const auto model = build_model(c, g, disorder_for(c, g.n_sites(), tasks[k].seed));
        const auto occ = farthest_first_occupations(g, origin, tasks[k].n_ex);
        const auto psi = product_state(model.space(), occ);
        auto trace = otoc_scan(model, psi, pc, shells, inner);
        if (c.t2_eff_us) {
            apply_dephasing(trace, us_to_s(*c.t2_eff_us));
            if (c.correct_dephasing) apply_dephasing(trace, us_to_s(*c.t2_eff_us), true);
        }
        traces[k] = subtract_baseline(std::move(trace));
        cones[k] = extract_light_cone(traces[k], c.light_cone);
    });

    const json echo = echo_config(c);
    CsvWriter csv(out / "otoc.csv", echo, {"seed", "n_ex", "time_ns", "shell", "C"});
    json runs = json::array();
    for (std::size_t k = 0; k < tasks.size(); ++k) {
        const auto &tr = traces[k];
        for (std::size_t s = 0; s < tr.times.size(); ++s) {
            for (const auto &[d, v] : tr.shell_c) {
                csv.cell(tasks[k].seed).cell(tasks[k].n_ex).cell(s_to_ns(tr.times[s])).cell(d).cell(v[s]);
                csv.end_row();
            }
        }
        runs.push_back({{"trace", to_json(tr)}, {"light_cone", to_json(cones[k])}});
    }
    csv.close();

    json ensembles = json::object();
    for (int n : c.n_ex) {
        std::vector<LightCone> group;
        for (std::size_t k = 0; k < tasks.size(); ++k) {
            if (tasks[k].n_ex == n) group.push_back(cones[k]);
        }
        const auto summary = ensemble_average(group, c.trim);
        ensembles[std::to_string(n)] = to_json(summary);
        log << "otoc n_ex=" << n << ":";
        for (const auto &[d, st] : summary.shells) log << " d" << d << "=" << s_to_ns(st.mean) << "ns";
        log << '\n';
    }
    write_json_report(out / "otoc.json", echo, {{"runs", runs}, {"ensembles", ensembles}});
}

void cmd_loschmidt(const RunConfig &c, const fs::path &out, std::ostream &log) {
    if (c.model != "hardcore") throw std::invalid_argument("loschmidt needs the hardcore model");
    const auto g = build_lattice(c);
    LoschmidtPair pair;
    if (c.pair) {
        pair = {(*c.pair)[0], (*c.pair)[1]};
    } else if (!(g.kind() == LatticeKind::grid2d && g.shape()[0] == 3 && g.shape()[1] == 3)) {
        throw std::invalid_argument("loschmidt.pair is required outside the 3x3 grid");
    }
    if (pair.a < 0 || pair.b < 0 || pair.a >= g.n_sites() || pair.b >= g.n_sites() || pair.a == pair.b) {
        throw std::invalid_argument("invalid Loschmidt pair");
    }
    const auto model = build_model(c, g, disorder_for(c, g.n_sites(), c.seeds.front()));
    const TimeReversal reversal(model, c.sigma_z_colour);
    const auto times = c.time_grid.seconds();
    const auto taus = c.tau_grid.seconds();
    const double echo_t = ns_to_s(c.echo_time_ns);

    struct Row {
        std::string sequence;
        double phi, t, tau;
        DensityMatrix2Q rho;
    };
    std::vector<Row> rows;
    for (double phi : c.phis) {
        for (double t : times) rows.push_back({"echo", phi, t, 0.0, {}});
        for (double t : times) rows.push_back({"double_forward", phi, t, 0.0, {}});
        for (double tau : taus) rows.push_back({"tau", phi, echo_t, tau, {}});
    }
    parallel_for(rows.size(), c.workers, [&](std::size_t k) {
        auto &r = rows[k];
        r.rho = r.sequence == "double_forward" ? double_forward(reversal.forward(), r.phi, r.t, pair)
                                               : loschmidt_echo(reversal, r.phi, r.t, r.tau, pair);
    });

    const json echo = echo_config(c);
    CsvWriter csv(out / "loschmidt.csv", echo,
                  {"sequence", "phi", "t_ns", "tau_ns", "fidelity_ideal", "fidelity_prepared",
                   "fidelity_phase_optimized", "concurrence", "dephasing_limit"});
    std::map<double, DensityMatrix2Q> prepared;
    for (double phi : c.phis) prepared[phi] = loschmidt_echo(reversal, phi, 0.0, 0.0, pair);
    for (const auto &r : rows) {
        const auto ideal = entangled_pair_density(r.phi, pair.a, pair.b);
        const auto &rho0 = prepared.at(r.phi);
        csv.cell(r.sequence).cell(r.phi).cell(s_to_ns(r.t)).cell(s_to_ns(r.tau));
        csv.cell(fidelity(r.rho, ideal)).cell(fidelity(r.rho, rho0));
        csv.cell(optimize_tomography_phase(r.rho, ideal).fidelity).cell(concurrence(r.rho));
        if (c.t2_eff_us && r.sequence == "echo") {
            csv.cell(loschmidt_dephasing_limit(rho0, r.t, us_to_s(*c.t2_eff_us), g.n_sites()));
        } else {
            csv.cell(std::string());
        }
        csv.end_row();
    }
    csv.close();
    log << "loschmidt: " << rows.size() << " rows\n";
}

void cmd_zz_table(const RunConfig &c, const fs::path &out, std::ostream &log) {
    const double j = mhz_to_rad_per_s(c.j_mhz);
    const double eps = mhz_to_rad_per_s(c.epsilon_mhz);
    struct Entry {
        std::string name;
        LatticeGraph graph;
        ZzConvention convention;
    };
    const std::vector<Entry> entries{{"grid2d_3x3", build_grid2d(3, 3, j), ZzConvention::combinatorial},
                                     {"chain1d_7", build_chain1d(7, j), ZzConvention::combinatorial},
                                     {"chain1d_7", build_chain1d(7, j), ZzConvention::chain_table}};
    const json echo = echo_config(c);
    CsvWriter csv(out / "zz_table.csv", echo, {"lattice", "convention", "n_ex", "proxy", "t_unreliable_ns"});
    json table = json::array();
    for (const auto &e : entries) {
        const std::string conv = e.convention == ZzConvention::combinatorial ? "combinatorial" : "chain_table";
        json row = {{"lattice", e.name}, {"convention", conv}, {"t_unreliable_ns", json::array()}};
        log << e.name << " (" << conv << "):";
        for (int n = 0; n <= 5; ++n) {
            const auto b = zz_error_budget(e.graph, n, eps, 1.0, e.convention);
            csv.cell(e.name).cell(conv).cell(n).cell(b.proxy).cell(s_to_ns(b.t_unreliable));
            csv.end_row();
            row["t_unreliable_ns"].push_back(std::isfinite(b.t_unreliable) ? json(s_to_ns(b.t_unreliable)) : json("inf"));
            log << ' ' << format_number(std::round(s_to_ns(b.t_unreliable)));
        }
        log << '\n';
        table.push_back(row);
    }
    csv.close();
    write_json_report(out / "zz_table.json", echo, {{"table", table}});
}

bool cmd_calibrate(const RunConfig &c, const fs::path &out, std::ostream &log) {
    const auto g = build_lattice(c);
    const std::uint64_t seed = c.seeds.front();
    const auto dev = make_synthetic_device(g, seed);
    json checks = json::array();
    bool all = true;
    auto check = [&](const std::string &name, double error, double threshold) {
        const bool ok = error <= threshold;
        all = all && ok;
        checks.push_back({{"name", name}, {"error", error}, {"threshold", threshold}, {"passed", ok}});
        log << (ok ? "PASS " : "FAIL ") << name << ": " << error << " (<= " << threshold << ")\n";
    };

    // Cross-talk learning and frequency targeting.
    const auto data = sample_crosstalk_dataset(dev, c.calibration_samples, c.flux_noise, seed + 1);
    const auto sol = learn_crosstalk(data);
    const double n = c.calibration_samples;
    check("crosstalk_solver_agreement", sol.max_entry_difference, 1e-6);
    check("crosstalk_matrix_recovery", (sol.least_squares.matrix - dev.crosstalk).cwiseAbs().maxCoeff(),
          std::max(1e-9, 10.0 * c.flux_noise / std::sqrt(n)));
    check("crosstalk_offset_recovery", (sol.least_squares.offsets - dev.offsets).cwiseAbs().maxCoeff(),
          std::max(1e-9, 10.0 * c.flux_noise / std::sqrt(n)));

    const auto q = static_cast<Eigen::Index>(dev.qubits.size());
    Eigen::VectorXd flux(q);
    for (Eigen::Index i = 0; i < q; ++i) flux[i] = invert_frequency(dev.qubits[i], dev.targets[i]) / std::numbers::pi;
    const Eigen::VectorXd volts = sol.least_squares.matrix.colPivHouseholderQr().solve(flux - sol.least_squares.offsets);
    std::vector<double> v(volts.data(), volts.data() + volts.size());
    double freq_err = 0.0;
    for (Eigen::Index i = 0; i < q; ++i) {
        freq_err = std::max(freq_err, std::abs(rad_per_s_to_mhz(transmon_frequency(dev.qubits[i], v) - dev.targets[i])));
    }
    check("frequency_targeting_MHz", freq_err, std::max(1e-6, 5000.0 * c.flux_noise));

    // Dressed <-> bare frequencies.
    const double w_ref = ghz_to_rad_per_s(device::kReferenceFrequencyGHz);
    const auto dressed = dress_frequencies(g, dev.targets, w_ref);
    const auto bare = undress_frequencies(g, dressed, w_ref);
    double undress_err = 0.0;
    for (std::size_t i = 0; i < bare.size(); ++i) {
        undress_err = std::max(undress_err, std::abs(rad_per_s_to_mhz(bare[i] - dev.targets[i])));
    }
    check("undressing_MHz", undress_err, 1e-3);

    // Transient fit and pre-distortion.
    const std::vector<TransientTerm> truth{{0.03, 10e-9}, {0.02, 100e-9}, {0.01, 1e-6}};
    std::vector<double> t, y;
    std::mt19937_64 rng(seed + 2);
    std::normal_distribution<double> noise(0.0, 1e-6);
    for (int k = 0; k < 5000; ++k) {
        t.push_back(k * 1e-9);
        y.push_back(transient_response(truth, t.back()) + noise(rng));
    }
    const auto fit = fit_transient(t, y, 3);
    double tau_err = 0.0;
    for (std::size_t m = 0; m < truth.size(); ++m) {
        tau_err = std::max(tau_err, std::abs(fit.terms[m].tau / truth[m].tau - 1.0));
    }
    check("transient_tau_relative", tau_err, 0.02);
    const std::vector<double> step(t.size(), 1.0);
    const auto response = distort(t, predistort(t, step, fit.terms), fit.terms);
    double flat = 0.0;
    for (double r : response) flat = std::max(flat, std::abs(r - 1.0));
    check("predistort_round_trip", flat, 1e-10);

    // Ramsey phasor.
    const double dt = 1e-9;
    const double delta0 = mhz_to_rad_per_s(1.0);
    const double alpha = mhz_to_rad_per_s(1.0) / 1e-6;
    std::vector<double> cs, sn, cc, sc;
    for (int k = 0; k < 2000; ++k) {
        const double tk = k * dt;
        cs.push_back(std::cos(delta0 * tk));
        sn.push_back(std::sin(delta0 * tk));
        cc.push_back(std::cos(0.5 * alpha * tk * tk));
        sc.push_back(std::sin(0.5 * alpha * tk * tk));
    }
    double const_err = 0.0;
    for (double d : ramsey_phasor(cs, sn, dt)) const_err = std::max(const_err, std::abs(d / delta0 - 1.0));
    check("ramsey_constant_relative", const_err, 1e-9);
    const auto chirp = ramsey_phasor(cc, sc, dt);
    double sxx = 0.0, sxy = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < chirp.size(); ++k) {
        const double tk = static_cast<double>(k) * dt;
        sx += tk;
        sy += chirp[k];
        sxx += tk * tk;
        sxy += tk * chirp[k];
    }
    const double m = static_cast<double>(chirp.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    check("ramsey_chirp_slope_relative", std::abs(slope / alpha - 1.0), 5e-3);

    const json echo = echo_config(c);
    write_json_report(out / "calibration.json", echo,
                      {{"seed", seed},
                       {"checks", checks},
                       {"all_passed", all},
                       {"crosstalk_least_squares", to_json(sol.least_squares)},
                       {"crosstalk_gradient", to_json(sol.gradient)},
                       {"transient_fit", to_json(fit)}});
    return all;
}

}  // namespace otoclab
