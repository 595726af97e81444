#include "otoclab/io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "otoclab/units.hpp"

namespace otoclab {

namespace {

double mhz(double w) { return rad_per_s_to_mhz(w); }
double ns(double t) { return s_to_ns(t); }


const char *kind_name(LatticeKind k) {
    switch (k) {
        case LatticeKind::grid2d: return "grid2d";
        case LatticeKind::chain1d: return "chain1d";
        case LatticeKind::custom: return "custom";
    }
    return "custom";
}

const char *model_name(ModelKind k) {
    switch (k) {
        case ModelKind::hardcore: return "hardcore";
        case ModelKind::transmon3: return "transmon3";
        case ModelKind::transmon3_f_decoupled: return "transmon3_f_decoupled";
    }
    return "?";
}

}  // namespace

json to_json(const LatticeGraph &g) {
    json bonds = json::array();
    for (const auto &b : g.bonds()) {
        bonds.push_back({{"i", b.i}, {"j", b.j}, {"J_MHz", mhz(b.coupling)}, {"long_range", b.long_range}});
    }
    json pos = json::array();
    for (const auto &p : g.positions()) pos.push_back({p[0], p[1]});
    return {{"kind", kind_name(g.kind())}, {"n_sites", g.n_sites()}, {"bonds", bonds}, {"positions", pos}};
}

json to_json(const DisorderRealization &d) {
    json det = json::array();
    for (double x : d.detunings) det.push_back(mhz(x));
    return {{"seed", d.seed}, {"target_std_J", d.target_std}, {"detunings_MHz", det}};
}

json model_summary(const HamiltonianModel &m) {
    json sectors = json::object();
    for (int n : m.sectors()) sectors[std::to_string(n)] = m.space()->sector_size(n);
    json u = json::array();
    for (double x : m.anharmonicities()) u.push_back(mhz(x));
    return {{"kind", model_name(m.kind())},
            {"levels", m.space()->levels()},
            {"sector_dimensions", sectors},
            {"anharmonicities_MHz", u},
            {"zz_MHz", m.zz_strength() ? json(mhz(*m.zz_strength())) : json(nullptr)},
            {"disorder_flipped", m.disorder_flipped()},
            {"disorder", to_json(m.disorder())},
            {"lattice", to_json(m.graph())}};
}

json to_json(const DensityMatrix2Q &rho) {
    json re = json::array(), im = json::array();
    for (int r = 0; r < 4; ++r) {
        json rr = json::array(), ri = json::array();
        for (int c = 0; c < 4; ++c) {
            rr.push_back(rho.matrix()(r, c).real());
            ri.push_back(rho.matrix()(r, c).imag());
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    return {{"sites", {rho.site_a(), rho.site_b()}}, {"basis", {"gg", "ge", "eg", "ee"}}, {"real", re}, {"imag", im}};
}

json to_json(const OtocTrace &trace) {
    json t = json::array();
    for (double x : trace.times) t.push_back(ns(x));
    json sites = json::array();
    for (std::size_t k = 0; k < trace.butterfly_sites.size(); ++k) {
        json c = json::array(), cp = json::array(), cm = json::array();
        for (std::size_t s = 0; s < trace.times.size(); ++s) {
            const auto &p = trace.values[s][k];
            c.push_back(p.c);
            if (trace.has_c_pm()) {
                cp.push_back(p.c_plus);
                cm.push_back(p.c_minus);
            }
        }
        json entry = {{"site", trace.butterfly_sites[k]}, {"shell", trace.shells.shell_of(trace.butterfly_sites[k])}, {"C", c}};
        if (trace.has_c_pm()) {
            entry["C_plus"] = cp;
            entry["C_minus"] = cm;
        }
        sites.push_back(entry);
    }
    json shells = json::object();
    for (const auto &[d, v] : trace.shell_c) shells[std::to_string(d)] = v;
    json offsets = json::object();
    for (const auto &[d, v] : trace.baseline_offsets) offsets[std::to_string(d)] = v;
    return {{"variant", to_string(trace.variant)},
            {"perturbation_site", trace.perturbation_site},
            {"n_ex", trace.n_ex},
            {"seed", trace.seed},
            {"times_ns", t},
            {"sites", sites},
            {"shell_C", shells},
            {"baseline_offsets", offsets}};
}

json to_json(const LightCone &cone) {
    json shells = json::object();
    for (const auto &[d, t] : cone.crossing) {
        shells[std::to_string(d)] = {{"crossing_ns", ns(t)}, {"sentinel", cone.is_sentinel(d)}};
    }
    return {{"threshold", cone.threshold}, {"sentinel_ns", ns(cone.sentinel)}, {"shells", shells}};
}

json to_json(const EnsembleSummary &summary) {
    json shells = json::object();
    for (const auto &[d, s] : summary.shells) {
        shells[std::to_string(d)] = {{"mean_ns", ns(s.mean)},
                                     {"std_ns", ns(s.std)},
                                     {"std_of_mean_ns", ns(s.std_of_mean)},
                                     {"count", s.count},
                                     {"sentinel_fraction", s.sentinel_fraction}};
    }
    return {{"trim", summary.trim}, {"realizations", summary.realizations}, {"shells", shells}};
}

json to_json(const CrosstalkFit &fit) {
    json m = json::array();
    for (Eigen::Index r = 0; r < fit.matrix.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < fit.matrix.cols(); ++c) row.push_back(fit.matrix(r, c));
        m.push_back(row);
    }
    json off = json::array();
    for (Eigen::Index r = 0; r < fit.offsets.size(); ++r) off.push_back(fit.offsets[r]);
    return {{"matrix", m}, {"offsets", off}, {"cost", fit.cost}, {"iterations", fit.iterations}};
}

json to_json(const TransientFit &fit) {
    json terms = json::array();
    for (const auto &t : fit.terms) terms.push_back({{"amplitude", t.amplitude}, {"tau_ns", ns(t.tau)}});
    return {{"terms", terms}, {"residual", fit.residual}, {"start_index", fit.start_index}};
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

CsvWriter::CsvWriter(const std::filesystem::path &path, const json &config,
                     const std::vector<std::string> &header)
    : path_(path), columns_(header.size()) {
    buffer_ = fmt::format("# otoclab schema {}; config: {}\n", kSchemaVersion, config.dump());
    for (std::size_t k = 0; k < header.size(); ++k) {
        buffer_ += (k ? "," : "") + header[k];
    }
    buffer_ += '\n';
}

CsvWriter &CsvWriter::cell(const std::string &s) {
    if (in_row_ == columns_) throw std::logic_error("too many CSV cells in row");
    if (in_row_++) buffer_ += ',';
    buffer_ += s;
    return *this;
}

CsvWriter &CsvWriter::cell(double v) { return cell(format_number(v)); }
CsvWriter &CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
    if (in_row_ != columns_) throw std::logic_error("incomplete CSV row");
    buffer_ += '\n';
    in_row_ = 0;
}

void CsvWriter::close() {
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path_.string());
    out << buffer_;
}

void write_json_report(const std::filesystem::path &path, const json &config, const json &results) {
    json doc = {{"schema", kSchemaVersion}, {"config", config}};
    for (auto it = results.begin(); it != results.end(); ++it) doc[it.key()] = it.value();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

}  // namespace otoclab
