#include <CLI11.hpp>

#include <optional>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "otoclab/errors.hpp"
#include "otoclab/runner.hpp"

namespace {

int workers_from_env() {
    const char *env = std::getenv("OTOCLAB_WORKERS");
    if (!env || !*env) return 1;
    try {
        std::size_t used = 0;
        const int k = std::stoi(env, &used);
        if (used != std::string(env).size() || k < 1) throw std::invalid_argument(env);
        return k;
    } catch (const std::exception &) {
        throw std::invalid_argument(std::string("OTOCLAB_WORKERS must be a positive integer, got '") + env + "'");
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"otoclab: out-of-time-order correlators on a hard-core Bose-Hubbard lattice"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::optional<int> workers;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"random-walk", "single-photon shell populations"},
        {"otoc", "OTOC scan, light-cone extraction and ensemble averages"},
        {"loschmidt", "Bell-pair Loschmidt echo"},
        {"zz-table", "ZZ error-budget table"},
        {"calibrate", "synthetic calibration round trip"}};
    for (const auto &[name, help] : commands) {
        auto *sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "replace the configured seed list with a single seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--workers", workers, "worker threads (default: $OTOCLAB_WORKERS or 1)")
            ->check(CLI::PositiveNumber);
    }

    CLI11_PARSE(app, argc, argv);
    const std::string cmd = app.get_subcommands().front()->get_name();

    try {
        auto config = otoclab::load_config(config_path);
        if (seed) config.seeds = {*seed};
        config.workers = workers ? *workers : workers_from_env();
        std::filesystem::create_directories(out_dir);

        if (cmd == "random-walk") {
            otoclab::cmd_random_walk(config, out_dir, std::cout);
        } else if (cmd == "otoc") {
            otoclab::cmd_otoc(config, out_dir, std::cout);
        } else if (cmd == "loschmidt") {
            otoclab::cmd_loschmidt(config, out_dir, std::cout);
        } else if (cmd == "zz-table") {
            otoclab::cmd_zz_table(config, out_dir, std::cout);
        } else if (cmd == "calibrate") {
            if (!otoclab::cmd_calibrate(config, out_dir, std::cout)) return 1;
        }
    } catch (const std::invalid_argument &e) {
        std::cerr << "otoclab: invalid input: " << e.what() << '\n';
        return 2;
    } catch (const otoclab::Unsupported &e) {
        std::cerr << "otoclab: unsupported: " << e.what() << '\n';
        return 2;
    } catch (const otoclab::SingularFit &e) {
        std::cerr << "otoclab: singular fit: " << e.what() << '\n';
        return 2;
    } catch (const otoclab::FitFailure &e) {
        std::cerr << "otoclab: fit failed: " << e.what() << " (best residual " << e.best_residual() << ")\n";
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "otoclab: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
