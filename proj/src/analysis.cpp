#include "otoclab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/tools/minima.hpp>

namespace otoclab {

OtocTrace subtract_baseline(OtocTrace trace) {
    if (trace.times.empty() || trace.times.front() != 0.0) {
        throw std::invalid_argument("baseline subtraction needs a t = 0 sample");
    }
    trace.baseline_offsets.clear();
    std::map<int, double> ideal;
    for (const auto &[d, v] : trace.shell_c) ideal[d] = 0.0;
    for (Site j : trace.butterfly_sites) {
        if (j == trace.perturbation_site) ideal[trace.shells.shell_of(j)] += 4.0;
    }
    for (auto &[d, v] : trace.shell_c) {
        const double offset = v.front() - ideal[d];
        for (double &x : v) x -= offset;
        trace.baseline_offsets[d] = offset;
    }
    return trace;
}

LightCone extract_light_cone(const std::vector<double> &times,
                             const std::map<int, std::vector<double>> &shell_values,
                             const LightConeOptions &options) {
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1])) throw std::invalid_argument("time grid must increase");
    }
    LightCone cone;
    cone.threshold = options.threshold;
    cone.sentinel = options.sentinel;
    const double horizon = options.horizon * (1.0 + 1e-12);
    for (const auto &[d, v] : shell_values) {
        if (v.size() != times.size()) throw std::invalid_argument("shell trace length mismatch");
        cone.crossing[d] = options.sentinel;
        cone.reached[d] = false;
        for (std::size_t k = 0; k < v.size() && times[k] <= horizon; ++k) {
            if (v[k] < options.threshold) continue;
            double t = times[k];
            if (options.interpolate && k > 0) {
                const double v0 = v[k - 1];
                t = times[k - 1] + (options.threshold - v0) / (v[k] - v0) * (times[k] - times[k - 1]);
            }
            cone.crossing[d] = t;
            cone.reached[d] = true;
            break;
        }
    }
    return cone;
}

LightCone extract_light_cone(const OtocTrace &trace, const LightConeOptions &options) {
    return extract_light_cone(trace.times, trace.shell_c, options);
}

EnsembleSummary ensemble_average(const std::vector<LightCone> &cones, double trim) {
    if (cones.empty()) throw std::invalid_argument("ensemble_average needs at least one cone");
    if (!(trim >= 0.0 && trim <= 1.0)) throw std::invalid_argument("trim must lie in [0, 1]");
    EnsembleSummary out;
    out.trim = trim;
    out.realizations = static_cast<int>(cones.size());
    for (const auto &[d, t0] : cones.front().crossing) {
        std::vector<double> values;
        int sentinels = 0;
        for (const auto &c : cones) {
            if (c.crossing.size() != cones.front().crossing.size() || !c.crossing.count(d)) {
                throw std::invalid_argument("light cones have different shell structure");
            }
            values.push_back(c.crossing.at(d));
            if (c.is_sentinel(d)) ++sentinels;
        }
        const auto n = static_cast<long>(values.size());
        if (trim > 0.0) {
            std::sort(values.begin(), values.end());
            const long keep = std::max(1L, std::lround(trim * static_cast<double>(n)));
            const long start = (n - keep) / 2;
            values = std::vector<double>(values.begin() + start, values.begin() + start + keep);
        }
        ShellStatistics s;
        s.count = static_cast<int>(values.size());
        double sum = 0.0;
        for (double v : values) sum += v;
        s.mean = sum / s.count;
        if (s.count > 1) {
            double ss = 0.0;
            for (double v : values) ss += (v - s.mean) * (v - s.mean);
            s.std = std::sqrt(ss / (s.count - 1));
        }
        s.std_of_mean = s.std / std::sqrt(static_cast<double>(s.count));
        s.sentinel_fraction = static_cast<double>(sentinels) / static_cast<double>(n);
        out.shells[d] = s;
    }
    return out;
}

DensityMatrix2Q rotate_second_qubit(const DensityMatrix2Q &rho, double phi) {
    // Rz(phi) = diag(e^{i phi/2}, e^{-i phi/2}) on qubit b, identity on a.
    Eigen::Vector4cd rz;
    for (int la = 0; la < 2; ++la) {
        rz[2 * la + 0] = std::polar(1.0, phi / 2.0);
        rz[2 * la + 1] = std::polar(1.0, -phi / 2.0);
    }
    const Eigen::Matrix4cd m = rz.conjugate().asDiagonal() * rho.matrix() * rz.asDiagonal();
    return DensityMatrix2Q(m, rho.site_a(), rho.site_b());
}

TomographyPhase optimize_tomography_phase(const DensityMatrix2Q &measured,
                                          const DensityMatrix2Q &reference) {
    constexpr int kScan = 360;
    const double step = 2.0 * std::numbers::pi / kScan;
    auto neg_fid = [&](double phi) { return -fidelity(rotate_second_qubit(measured, phi), reference); };

    int best = 0;
    double best_val = 0.0, lo = 0.0, hi = 0.0;
    for (int k = 0; k < kScan; ++k) {
        const double f = -neg_fid(k * step);
        if (k == 0 || f > best_val) {
            best_val = f;
            best = k;
        }
        lo = k == 0 ? f : std::min(lo, f);
        hi = k == 0 ? f : std::max(hi, f);
    }
    TomographyPhase out;
    out.degenerate = hi - lo < 1e-9;
    double phi = best * step;
    if (!out.degenerate) {
        const auto [x, fx] = boost::math::tools::brent_find_minima(
            neg_fid, phi - step, phi + step, std::numeric_limits<double>::digits / 2);
        if (-fx >= best_val) phi = x;
    }
    phi = std::remainder(phi, 2.0 * std::numbers::pi);
    if (phi <= -std::numbers::pi) phi += 2.0 * std::numbers::pi;
    out.phi = phi;
    out.rotated = rotate_second_qubit(measured, phi);
    out.fidelity = fidelity(out.rotated, reference);
    return out;
}

ZzBudget zz_error_budget(const LatticeGraph &graph, int n_ex, double eps, double c_context,
                         ZzConvention convention) {
    const int n = graph.n_sites();
    if (n_ex < 0 || n_ex > n) throw std::invalid_argument("n_ex must lie in [0, n_sites]");
    if (!(eps > 0.0)) throw std::invalid_argument("ZZ strength must be > 0");
    if (c_context < 0.0) throw std::invalid_argument("C must be >= 0");
    ZzBudget out;
    if (n_ex >= 2) {
        using boost::math::binomial_coefficient;
        const double pair = binomial_coefficient<double>(n - 2, n_ex - 2) /
                            binomial_coefficient<double>(n, n_ex);
        out.proxy = static_cast<double>(graph.nearest_neighbor_bond_count()) * pair;
        if (convention == ZzConvention::chain_table) out.proxy *= 7.0 / 9.0;
    }
    out.delta_c_rate = std::sqrt(8.0 * c_context) * out.proxy * eps;
    if (out.proxy > 0.0) out.t_unreliable = 1.0 / (std::sqrt(8.0) * out.proxy * eps);
    return out;
}

}  // namespace otoclab
