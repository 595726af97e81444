#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "otoclab/analysis.hpp"
#include "otoclab/io.hpp"
#include "otoclab/protocol.hpp"

namespace otoclab {

/// Evenly spaced grid in ns, both ends included.
struct TimeGrid {
    double start_ns = 0.0;
    double stop_ns = 100.0;
    double step_ns = 2.0;

    std::vector<double> seconds() const;
};

struct LatticeSpec {
    std::string kind = "grid2d";  // grid2d | chain1d
    int rows = 3;
    int cols = 3;
    int length = 7;
    /// Extra diagonal (grid) or end-to-end (chain) links as a fraction of J; 0 disables.
    double long_range_fraction = 0.0;
};

/// Everything a subcommand needs. Units at this boundary: MHz, ns, us.
struct RunConfig {
    LatticeSpec lattice;
    double j_mhz = 8.1;
    double u_mhz = -244.0;
    double epsilon_mhz = 0.54;
    bool include_zz = false;
    std::string model = "hardcore";  // hardcore | transmon3 | transmon3_f_decoupled
    OtocVariant variant = OtocVariant::ground_restricted;

    double disorder_std = 0.0;  // multiple of J
    std::vector<std::uint64_t> seeds{0};

    TimeGrid time_grid;
    std::vector<int> n_ex{1};
    std::optional<Site> perturbation_site;
    int sigma_z_colour = 0;

    std::optional<double> t2_eff_us;
    bool correct_dephasing = false;

    LightConeOptions light_cone;
    double trim = 0.0;

    std::vector<double> phis{0.0, 1.5707963267948966, 3.141592653589793};
    std::optional<std::vector<Site>> pair;
    double echo_time_ns = 70.0;
    TimeGrid tau_grid{0.0, 120.0, 1.0};

    int calibration_samples = 200;
    double flux_noise = 1e-3;  // flux quanta

    /// Not echoed into outputs: results never depend on it.
    int workers = 1;
};

/// Parses a JSON config (missing keys keep their defaults, unknown keys are
/// rejected). Throws std::invalid_argument on bad input.
RunConfig parse_config(const json &doc);
RunConfig load_config(const std::filesystem::path &path);
json echo_config(const RunConfig &config);

/// Built lattice and the default perturbation site for it.
LatticeGraph build_lattice(const RunConfig &config);
Site perturbation_site(const RunConfig &config, const LatticeGraph &graph);

void cmd_random_walk(const RunConfig &config, const std::filesystem::path &out, std::ostream &log);
void cmd_otoc(const RunConfig &config, const std::filesystem::path &out, std::ostream &log);
void cmd_loschmidt(const RunConfig &config, const std::filesystem::path &out, std::ostream &log);
void cmd_zz_table(const RunConfig &config, const std::filesystem::path &out, std::ostream &log);
/// Returns false when some recovery error exceeds its threshold.
bool cmd_calibrate(const RunConfig &config, const std::filesystem::path &out, std::ostream &log);

}  // namespace otoclab
