#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "otoclab/analysis.hpp"
#include "otoclab/calibration.hpp"
#include "otoclab/hamiltonian.hpp"
#include "otoclab/lattice.hpp"
#include "otoclab/protocol.hpp"
#include "otoclab/qstate.hpp"

namespace otoclab {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Frequencies in MHz (divided by 2 pi), times in ns.
json to_json(const LatticeGraph &g);
json to_json(const DisorderRealization &d);
json model_summary(const HamiltonianModel &m);
json to_json(const DensityMatrix2Q &rho);
json to_json(const OtocTrace &trace);
json to_json(const LightCone &cone);
json to_json(const EnsembleSummary &summary);
json to_json(const CrosstalkFit &fit);
json to_json(const TransientFit &fit);

/// Shortest round-trip decimal form; "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double v);

/// CSV with a leading "# otoclab schema N; config: {...}" comment line.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path &path, const json &config,
              const std::vector<std::string> &header);

    CsvWriter &cell(const std::string &s);
    CsvWriter &cell(double v);
    CsvWriter &cell(long long v);
    CsvWriter &cell(int v) { return cell(static_cast<long long>(v)); }
    CsvWriter &cell(std::uint64_t v) { return cell(static_cast<long long>(v)); }
    void end_row();
    void close();

  private:
    std::string buffer_;
    std::filesystem::path path_;
    std::size_t columns_ = 0;
    std::size_t in_row_ = 0;
};

/// Writes {"schema": N, "config": ..., <results>} with two-space indent.
void write_json_report(const std::filesystem::path &path, const json &config, const json &results);

}  // namespace otoclab
