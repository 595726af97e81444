#include "otoclab/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/tools/minima.hpp>

#include "otoclab/errors.hpp"

namespace otoclab {

namespace {

double choose(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return boost::math::binomial_coefficient<double>(static_cast<unsigned>(n),
                                                     static_cast<unsigned>(k));
}

}  // namespace

InfiniteTemperatureSector infinite_temperature_sector(int n_sites, int n_ex) {
    if (n_sites < 1) throw std::invalid_argument("need at least one site");
    if (n_ex < 0 || n_ex > n_sites) throw std::invalid_argument("n_ex must lie in [0, n_sites]");
    return {n_sites, n_ex};
}

int InfiniteTemperatureSector::configuration_count() const {
    return static_cast<int>(std::lround(choose(n_sites, n_ex)));
}

double InfiniteTemperatureSector::mean_occupation() const {
    return static_cast<double>(n_ex) / n_sites;
}

Eigen::VectorXd InfiniteTemperatureSector::diagonal(const StateSpace &space) const {
    if (space.n_sites() != n_sites || space.levels() != 2) {
        throw std::invalid_argument("state space does not match the sector");
    }
    return Eigen::VectorXd::Constant(space.sector_size(n_ex), configuration_weight());
}

DensityMatrix2Q InfiniteTemperatureSector::reduced_pair(Site a, Site b) const {
    if (n_sites < 2) throw std::invalid_argument("pair reduction needs two sites");
    const double total = choose(n_sites, n_ex);
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    rho(0, 0) = choose(n_sites - 2, n_ex) / total;
    rho(1, 1) = choose(n_sites - 2, n_ex - 1) / total;
    rho(2, 2) = rho(1, 1);
    rho(3, 3) = choose(n_sites - 2, n_ex - 2) / total;
    return DensityMatrix2Q(rho, a, b);
}

double DephasingModel::factor(double t) const {
    if (t < 0.0) throw std::invalid_argument("time must be >= 0");
    if (!(t2_eff > 0.0)) throw std::invalid_argument("T2 must be > 0");
    if (std::isinf(t2_eff)) return 1.0;
    return std::exp(-2.0 * t / t2_eff);
}

double apply_dephasing_to_c(double c_ideal, double t, double t2_eff) {
    return DephasingModel{t2_eff}.factor(t) * c_ideal;
}

double correct_dephasing_of_c(double c_measured, double t, double t2_eff) {
    return c_measured / DephasingModel{t2_eff}.factor(t);
}

void apply_dephasing(OtocTrace &trace, double t2_eff, bool correct) {
    const DephasingModel model{t2_eff};
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        const double f = model.factor(trace.times[k]);
        const double scale = correct ? 1.0 / f : f;
        for (auto &p : trace.values[k]) {
            if (trace.has_c_pm()) {
                p.c_plus *= scale;
                p.c_minus *= scale;
                p.c = 2.0 + p.c_minus - p.c_plus;
            } else {
                // Only C is stored; C+- scaling maps C to 2 - s (2 - C).
                p.c = 2.0 - scale * (2.0 - p.c);
            }
        }
    }
    sum_shells(trace);
}

DensityMatrix2Q loschmidt_dephased_state(const DensityMatrix2Q &rho0, double t, double t2_eff,
                                         int n_sites) {
    const double f = DephasingModel{t2_eff}.factor(t);
    const auto inf = infinite_temperature_sector(n_sites, 1).reduced_pair(rho0.site_a(), rho0.site_b());
    return DensityMatrix2Q(f * rho0.matrix() + (1.0 - f) * inf.matrix(), rho0.site_a(),
                           rho0.site_b());
}

double loschmidt_dephasing_limit(const DensityMatrix2Q &rho0, double t, double t2_eff,
                                 int n_sites) {
    return fidelity(loschmidt_dephased_state(rho0, t, t2_eff, n_sites), rho0);
}

double fit_t2_eff(const std::vector<double> &times, const std::vector<double> &measured,
                  const std::vector<double> &ideal, const T2FitOptions &options) {
    const std::size_t n = times.size();
    if (measured.size() != n || ideal.size() != n) {
        throw std::invalid_argument("measured and ideal traces must share the time grid");
    }
    if (!options.weights.empty() && options.weights.size() != n) {
        throw std::invalid_argument("one weight per sample required");
    }
    if (!(options.lower > 0.0) || !(options.upper > options.lower)) {
        throw std::invalid_argument("invalid T2 bracket");
    }
    auto all_zero = [](const std::vector<double> &v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
    };
    if (n == 0 || all_zero(measured) || all_zero(ideal)) {
        throw FitFailure("T2 fit needs non-zero traces", std::numeric_limits<double>::infinity());
    }

    auto cost = [&](double log_t2) {
        const double t2 = std::exp(log_t2);
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double w = options.weights.empty() ? 1.0 : options.weights[k];
            const double r = std::exp(-2.0 * times[k] / t2) * ideal[k] - measured[k];
            s += w * r * r;
        }
        return s;
    };

    // Coarse log-spaced scan to pick the basin, then Brent refinement.
    const double lo = std::log(options.lower), hi = std::log(options.upper);
    constexpr int kScan = 200;
    int best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= kScan; ++k) {
        const double c = cost(lo + (hi - lo) * k / kScan);
        if (c < best_cost) {
            best_cost = c;
            best = k;
        }
    }
    if (best == kScan) return std::numeric_limits<double>::infinity();
    const double step = (hi - lo) / kScan;
    const double a = lo + step * std::max(0, best - 1);
    const double b = lo + step * std::min(kScan, best + 1);
    const auto [x, fx] = boost::math::tools::brent_find_minima(cost, a, b, std::numeric_limits<double>::digits / 2);
    (void)fx;
    return std::exp(x);
}

double fit_t2_eff(const OtocTrace &measured, const OtocTrace &ideal, const T2FitOptions &options) {
    if (!measured.has_c_pm() || !ideal.has_c_pm()) {
        throw std::invalid_argument("T2 fit needs C+- samples");
    }
    if (measured.times != ideal.times || measured.butterfly_sites != ideal.butterfly_sites) {
        throw std::invalid_argument("traces must share the time grid and butterfly sites");
    }
    std::vector<double> t, m, id;
    for (std::size_t k = 0; k < measured.times.size(); ++k) {
        for (std::size_t j = 0; j < measured.butterfly_sites.size(); ++j) {
            for (int sign = 0; sign < 2; ++sign) {
                t.push_back(measured.times[k]);
                m.push_back(sign == 0 ? measured.values[k][j].c_plus : measured.values[k][j].c_minus);
                id.push_back(sign == 0 ? ideal.values[k][j].c_plus : ideal.values[k][j].c_minus);
            }
        }
    }
    return fit_t2_eff(t, m, id, options);
}

}  // namespace otoclab
