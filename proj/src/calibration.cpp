#include "otoclab/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "otoclab/errors.hpp"
#include "otoclab/hamiltonian.hpp"
#include "otoclab/units.hpp"

namespace otoclab {

// ---------------------------------------------------------------------------
// Transmon spectrum

void TransmonSpec::validate() const {
    if (!(omega_max > 0.0)) throw std::invalid_argument("omega_max must be > 0");
    if (!(asymmetry >= 0.0 && asymmetry <= 1.0)) {
        throw std::invalid_argument("asymmetry must lie in [0, 1]");
    }
    if (charging_energy < 0.0) throw std::invalid_argument("E_C must be >= 0");
    for (double v0 : volts_per_flux) {
        if (v0 == 0.0) throw std::invalid_argument("V0 entries must be non-zero");
    }
}

double TransmonSpec::omega_min() const {
    return (omega_max + charging_energy) * std::sqrt(asymmetry) - charging_energy;
}

double flux_phase(const TransmonSpec &spec, const std::vector<double> &volts) {
    if (volts.size() != spec.volts_per_flux.size()) {
        throw std::invalid_argument("one voltage per control line required");
    }
    double theta = -spec.flux_offset;
    for (std::size_t j = 0; j < volts.size(); ++j) {
        theta += std::numbers::pi * volts[j] / spec.volts_per_flux[j];
    }
    return theta;
}

double transmon_frequency_at_phase(const TransmonSpec &spec, double theta) {
    spec.validate();
    const double d2 = spec.asymmetry * spec.asymmetry;
    const double c = std::cos(theta);
    return (spec.omega_max + spec.charging_energy) * std::pow(d2 + (1.0 - d2) * c * c, 0.25) -
           spec.charging_energy;
}

double transmon_frequency(const TransmonSpec &spec, const std::vector<double> &volts) {
    return transmon_frequency_at_phase(spec, flux_phase(spec, volts));
}

double invert_frequency(const TransmonSpec &spec, double omega) {
    spec.validate();
    const double tol = 1e-12 * spec.omega_max;
    const double lo = spec.omega_min(), hi = spec.omega_max;
    if (omega > hi + tol || omega < lo - tol) {
        throw std::invalid_argument("target frequency outside [omega_min, omega_max]");
    }
    const double d2 = spec.asymmetry * spec.asymmetry;
    if (d2 >= 1.0) return 0.0;
    const double r = (omega + spec.charging_energy) / (spec.omega_max + spec.charging_energy);
    const double r4 = r * r * r * r;
    const double c2 = std::clamp((r4 - d2) / (1.0 - d2), 0.0, 1.0);
    return std::acos(std::sqrt(c2));
}

// ---------------------------------------------------------------------------
// Cross-talk

void CrosstalkDataset::validate() const {
    if (voltages.rows() != fluxes.rows()) {
        throw std::invalid_argument("voltage and flux sample counts differ");
    }
    if (voltages.cols() == 0 || fluxes.cols() == 0) {
        throw std::invalid_argument("dataset has no lines or no qubits");
    }
}

double crosstalk_cost(const CrosstalkDataset &data, const Eigen::MatrixXd &matrix,
                      const Eigen::VectorXd &offsets) {
    const Eigen::MatrixXd pred =
        (data.voltages * matrix.transpose()).rowwise() + offsets.transpose();
    return (data.fluxes - pred).squaredNorm() / static_cast<double>(data.voltages.rows());
}

namespace {

Eigen::MatrixXd design_matrix(const CrosstalkDataset &data) {
    Eigen::MatrixXd a(data.voltages.rows(), data.voltages.cols() + 1);
    a.leftCols(data.voltages.cols()) = data.voltages;
    a.col(data.voltages.cols()).setOnes();
    return a;
}

}  // namespace

CrosstalkFit learn_crosstalk_least_squares(const CrosstalkDataset &data) {
    data.validate();
    const Eigen::MatrixXd a = design_matrix(data);
    const auto n_par = a.cols();
    if (a.rows() < n_par) {
        throw SingularFit("need at least " + std::to_string(n_par) + " samples, got " +
                          std::to_string(a.rows()));
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < n_par) throw SingularFit("voltage design matrix is rank deficient");
    const Eigen::MatrixXd x = qr.solve(data.fluxes);  // (L+1) x Q
    CrosstalkFit fit;
    fit.matrix = x.topRows(data.voltages.cols()).transpose();
    fit.offsets = x.row(data.voltages.cols()).transpose();
    fit.cost = crosstalk_cost(data, fit.matrix, fit.offsets);
    return fit;
}

CrosstalkFit learn_crosstalk_gradient(const CrosstalkDataset &data,
                                      const Eigen::MatrixXd &initial_matrix,
                                      const Eigen::VectorXd &initial_offsets,
                                      const GradientDescentOptions &options) {
    data.validate();
    const auto q = data.fluxes.cols(), l = data.voltages.cols();
    if (initial_matrix.rows() != q || initial_matrix.cols() != l || initial_offsets.size() != q) {
        throw std::invalid_argument("initial guess has the wrong shape");
    }
    const Eigen::MatrixXd a = design_matrix(data);
    const double n = static_cast<double>(a.rows());
    if (a.rows() < a.cols()) throw SingularFit("too few samples for the number of lines");

    // Parameters stacked as X = [M^T; phi^T], (L+1) x Q; cost = |Phi - A X|^2 / N.
    const Eigen::MatrixXd ata = a.transpose() * a * (2.0 / n);
    const Eigen::MatrixXd atb = a.transpose() * data.fluxes * (2.0 / n);
    double lr = options.learning_rate;
    if (!(lr > 0.0)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ata, Eigen::EigenvaluesOnly);
        const double lmax = es.eigenvalues().maxCoeff();
        if (!(lmax > 0.0)) throw SingularFit("voltage design matrix is zero");
        lr = 1.0 / lmax;
    }

    Eigen::MatrixXd x(l + 1, q);
    x.topRows(l) = initial_matrix.transpose();
    x.row(l) = initial_offsets.transpose();
    auto cost_of = [&](const Eigen::MatrixXd &xx) { return (data.fluxes - a * xx).squaredNorm() / n; };

    CrosstalkFit fit;
    double cost = cost_of(x);
    fit.cost_history.push_back(cost);
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        const Eigen::MatrixXd grad = ata * x - atb;
        Eigen::MatrixXd trial = x - lr * grad;
        double trial_cost = cost_of(trial);
        while (trial_cost > cost && lr > 1e-300) {
            lr *= 0.5;
            trial = x - lr * grad;
            trial_cost = cost_of(trial);
        }
        const double change = cost - trial_cost;
        if (trial_cost <= cost) {
            x = std::move(trial);
            cost = trial_cost;
            fit.cost_history.push_back(cost);
        }
        if (std::abs(change) < options.cost_tolerance) {
            ++it;
            break;
        }
    }
    fit.matrix = x.topRows(l).transpose();
    fit.offsets = x.row(l).transpose();
    fit.cost = cost;
    fit.iterations = it;
    return fit;
}

CrosstalkSolutions learn_crosstalk(const CrosstalkDataset &data,
                                   const GradientDescentOptions &options) {
    CrosstalkSolutions out;
    out.least_squares = learn_crosstalk_least_squares(data);
    const auto q = data.fluxes.cols(), l = data.voltages.cols();
    out.gradient = learn_crosstalk_gradient(data, Eigen::MatrixXd::Identity(q, l),
                                            Eigen::VectorXd::Zero(q), options);
    out.max_entry_difference =
        std::max((out.least_squares.matrix - out.gradient.matrix).cwiseAbs().maxCoeff(),
                 (out.least_squares.offsets - out.gradient.offsets).cwiseAbs().maxCoeff());
    return out;
}

// ---------------------------------------------------------------------------
// Transients

double transient_response(const std::vector<TransientTerm> &terms, double t) {
    double n = 0.0;
    for (const auto &term : terms) n += term.amplitude * std::exp(-t / term.tau);
    return n;
}

namespace {

struct TransientResidual : Eigen::DenseFunctor<double> {
    const std::vector<double> &t;
    const std::vector<double> &y;
    int n_terms;

    TransientResidual(const std::vector<double> &times, const std::vector<double> &samples, int k)
        : DenseFunctor<double>(2 * k, static_cast<int>(times.size())), t(times), y(samples),
          n_terms(k) {}

    int operator()(const InputType &p, ValueType &f) const {
        for (std::size_t s = 0; s < t.size(); ++s) {
            double v = 0.0;
            for (int m = 0; m < n_terms; ++m) v += p[2 * m] * std::exp(-t[s] * std::exp(-p[2 * m + 1]));
            f[static_cast<Eigen::Index>(s)] = v - y[s];
        }
        return 0;
    }

    int df(const InputType &p, JacobianType &jac) const {
        for (std::size_t s = 0; s < t.size(); ++s) {
            for (int m = 0; m < n_terms; ++m) {
                const double rate = std::exp(-p[2 * m + 1]);
                const double e = std::exp(-t[s] * rate);
                const auto row = static_cast<Eigen::Index>(s);
                jac(row, 2 * m) = e;
                jac(row, 2 * m + 1) = p[2 * m] * e * t[s] * rate;
            }
        }
        return 0;
    }
};

// Amplitudes for fixed decay times by linear least squares.
Eigen::VectorXd amplitudes_for(const std::vector<double> &t, const std::vector<double> &y,
                               const std::vector<double> &taus) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(taus.size()));
    Eigen::VectorXd b(static_cast<Eigen::Index>(t.size()));
    for (std::size_t s = 0; s < t.size(); ++s) {
        b[static_cast<Eigen::Index>(s)] = y[s];
        for (std::size_t m = 0; m < taus.size(); ++m) {
            a(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(m)) = std::exp(-t[s] / taus[m]);
        }
    }
    return a.colPivHouseholderQr().solve(b);
}

void for_each_subset(int n, int k, const std::function<void(const std::vector<int> &)> &fn) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int m = 0; m < k; ++m) idx[m] = m;
    while (true) {
        fn(idx);
        int m = k - 1;
        while (m >= 0 && idx[m] == n - k + m) --m;
        if (m < 0) return;
        ++idx[m];
        for (int r = m + 1; r < k; ++r) idx[r] = idx[r - 1] + 1;
    }
}

}  // namespace

TransientFit fit_transient(const std::vector<double> &times, const std::vector<double> &samples,
                           int n_terms, const TransientFitOptions &options) {
    if (n_terms < 1 || n_terms > 3) throw std::invalid_argument("n_terms must be 1, 2 or 3");
    if (times.size() != samples.size()) throw std::invalid_argument("times/samples size mismatch");
    if (times.size() < static_cast<std::size_t>(2 * n_terms)) {
        throw std::invalid_argument("too few samples for the number of terms");
    }
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1])) throw std::invalid_argument("times must strictly increase");
    }
    if (options.tau_grid < n_terms) throw std::invalid_argument("tau grid smaller than n_terms");

    // Guesses span the shortest sample spacing to the full record length.
    double dt_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < times.size(); ++k) dt_min = std::min(dt_min, times[k] - times[k - 1]);
    const double span = times.back() - times.front();
    const double lo = std::log(dt_min), hi = std::log(span);
    std::vector<double> grid(static_cast<std::size_t>(options.tau_grid));
    for (int g = 0; g < options.tau_grid; ++g) {
        grid[g] = std::exp(options.tau_grid == 1 ? hi : lo + (hi - lo) * g / (options.tau_grid - 1));
    }

    const bool zero = std::all_of(samples.begin(), samples.end(), [](double v) { return v == 0.0; });
    if (zero) {
        TransientFit fit;
        for (int m = 0; m < n_terms; ++m) fit.terms.push_back({0.0, grid[m]});
        return fit;
    }

    TransientFit best;
    best.residual = std::numeric_limits<double>::infinity();
    bool any = false;
    int start = 0;
    for_each_subset(options.tau_grid, n_terms, [&](const std::vector<int> &idx) {
        std::vector<double> taus;
        for (int g : idx) taus.push_back(grid[g]);
        const Eigen::VectorXd amps = amplitudes_for(times, samples, taus);
        Eigen::VectorXd p(2 * n_terms);
        for (int m = 0; m < n_terms; ++m) {
            p[2 * m] = amps[m];
            p[2 * m + 1] = std::log(taus[m]);
        }
        TransientResidual functor(times, samples, n_terms);
        Eigen::LevenbergMarquardt<TransientResidual> lm(functor);
        lm.setMaxfev(2000);
        const auto status = lm.minimize(p);
        const bool ok = status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters &&
                        status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation &&
                        status != Eigen::LevenbergMarquardtSpace::UserAsked && p.allFinite();
        Eigen::VectorXd f(static_cast<Eigen::Index>(times.size()));
        functor(p, f);
        const double rss = f.squaredNorm();
        if (ok && std::isfinite(rss) && rss < best.residual) {
            best.residual = rss;
            best.start_index = start;
            best.terms.clear();
            for (int m = 0; m < n_terms; ++m) best.terms.push_back({p[2 * m], std::exp(p[2 * m + 1])});
            any = true;
        }
        ++start;
    });
    if (!any) {
        throw FitFailure("transient fit did not converge from any start", best.residual);
    }
    std::sort(best.terms.begin(), best.terms.end(),
              [](const TransientTerm &a, const TransientTerm &b) { return a.tau < b.tau; });
    return best;
}

std::vector<double> predistort(const std::vector<double> &times, const std::vector<double> &target,
                               const std::vector<TransientTerm> &terms) {
    if (times.size() != target.size()) throw std::invalid_argument("times/target size mismatch");
    std::vector<double> out(target.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double g = 1.0 + transient_response(terms, times[k]);
        if (!(g > 0.0)) {
            throw std::invalid_argument("1 + n(t) <= 0 at t = " + std::to_string(times[k]));
        }
        out[k] = target[k] / g;
    }
    return out;
}

std::vector<double> distort(const std::vector<double> &times, const std::vector<double> &waveform,
                            const std::vector<TransientTerm> &terms) {
    if (times.size() != waveform.size()) throw std::invalid_argument("times/waveform size mismatch");
    std::vector<double> out(waveform.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        out[k] = waveform[k] * (1.0 + transient_response(terms, times[k]));
    }
    return out;
}

std::vector<double> ramsey_phasor(const std::vector<double> &cos_stream,
                                  const std::vector<double> &sin_stream, double dt) {
    const std::size_t n = cos_stream.size();
    if (sin_stream.size() != n) throw std::invalid_argument("quadrature streams differ in length");
    if (n < 3) throw std::invalid_argument("need at least three samples");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    std::vector<double> phase(n);
    phase[0] = std::atan2(sin_stream[0], cos_stream[0]);
    for (std::size_t k = 1; k < n; ++k) {
        const double raw = std::atan2(sin_stream[k], cos_stream[k]);
        const double step = std::remainder(raw - phase[k - 1], 2.0 * std::numbers::pi);
        phase[k] = phase[k - 1] + step;
    }
    std::vector<double> delta(n);
    delta[0] = (phase[1] - phase[0]) / dt;
    delta[n - 1] = (phase[n - 1] - phase[n - 2]) / dt;
    for (std::size_t k = 1; k + 1 < n; ++k) delta[k] = (phase[k + 1] - phase[k - 1]) / (2.0 * dt);
    return delta;
}

// ---------------------------------------------------------------------------
// Dressing

std::vector<double> dress_frequencies(const LatticeGraph &graph, const std::vector<double> &bare,
                                      double reference_frequency) {
    const int n = graph.n_sites();
    if (static_cast<int>(bare.size()) != n) throw std::invalid_argument("one frequency per site");
    DisorderRealization d = DisorderRealization::none(n);
    double offset = 0.0;
    for (int s = 0; s < n; ++s) {
        d.detunings[s] = bare[s] - reference_frequency;
        offset += 0.5 * d.detunings[s];
    }
    const auto model = build_hardcore(graph, d);
    // The sigma_z form shifts every single-excitation level by -sum(dw)/2.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.block(1));
    const Eigen::MatrixXd w = es.eigenvectors().cwiseAbs2();

    // Greedy max-weight assignment; the most localised eigenvectors pick first.
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return w.col(a).maxCoeff() > w.col(b).maxCoeff();
    });
    std::vector<double> dressed(static_cast<std::size_t>(n), 0.0);
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    const auto &codes = model.space()->sector(1);
    for (int k : order) {
        int best = -1;
        for (int r = 0; r < n; ++r) {
            int site = 0;
            while (model.space()->level(codes[r], site) == 0) ++site;
            if (taken[site]) continue;
            if (best < 0 || w(r, k) > w(best, k)) best = r;
        }
        int site = 0;
        while (model.space()->level(codes[best], site) == 0) ++site;
        taken[site] = true;
        dressed[site] = es.eigenvalues()[k] + offset + reference_frequency;
    }
    return dressed;
}

std::vector<double> undress_frequencies(const LatticeGraph &graph,
                                        const std::vector<double> &dressed,
                                        double reference_frequency,
                                        const UndressOptions &options) {
    std::vector<double> bare = dressed;
    double change = std::numeric_limits<double>::infinity();
    for (int it = 0; it < options.max_iterations; ++it) {
        const auto current = dress_frequencies(graph, bare, reference_frequency);
        change = 0.0;
        for (std::size_t s = 0; s < bare.size(); ++s) {
            const double step = dressed[s] - current[s];
            bare[s] += step;
            change = std::max(change, std::abs(step));
        }
        if (change < options.tolerance) return bare;
    }
    throw FitFailure("undressing did not converge", change);
}

// ---------------------------------------------------------------------------
// Synthetic device

SyntheticDevice make_synthetic_device(const LatticeGraph &graph, std::uint64_t seed) {
    const int q = graph.n_sites();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto uniform = [&](double a, double b) { return a + (b - a) * u(rng); };

    SyntheticDevice dev;
    dev.graph = graph;
    dev.crosstalk = Eigen::MatrixXd(q, q);
    dev.offsets = Eigen::VectorXd(q);
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) {
            dev.crosstalk(i, j) = i == j ? uniform(0.4, 0.6)
                                         : (u(rng) < 0.5 ? -1.0 : 1.0) * uniform(0.005, 0.03);
        }
        dev.offsets[i] = uniform(-0.1, 0.1);
    }
    const double step = mhz_to_rad_per_s(40.0);
    const double centre = ghz_to_rad_per_s(device::kReferenceFrequencyGHz);
    for (int i = 0; i < q; ++i) {
        TransmonSpec s;
        s.omega_max = ghz_to_rad_per_s(uniform(5.9, 6.1));
        s.asymmetry = uniform(0.2, 0.4);
        s.charging_energy = mhz_to_rad_per_s(-device::kAnharmonicityMHz);
        s.flux_offset = -std::numbers::pi * dev.offsets[i];
        for (int j = 0; j < q; ++j) s.volts_per_flux.push_back(1.0 / dev.crosstalk(i, j));
        dev.qubits.push_back(std::move(s));
        dev.targets.push_back(centre + (i - 0.5 * (q - 1)) * step);
    }
    return dev;
}

CrosstalkDataset sample_crosstalk_dataset(const SyntheticDevice &device, int n_samples,
                                          double noise, std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("need at least one sample");
    if (noise < 0.0) throw std::invalid_argument("noise must be >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    const auto l = device.crosstalk.cols(), q = device.crosstalk.rows();
    CrosstalkDataset data;
    data.voltages = Eigen::MatrixXd(n_samples, l);
    data.fluxes = Eigen::MatrixXd(n_samples, q);
    for (int s = 0; s < n_samples; ++s) {
        for (Eigen::Index j = 0; j < l; ++j) data.voltages(s, j) = u(rng);
    }
    data.fluxes = (data.voltages * device.crosstalk.transpose()).rowwise() +
                  device.offsets.transpose();
    if (noise > 0.0) {
        for (int s = 0; s < n_samples; ++s) {
            for (Eigen::Index i = 0; i < q; ++i) data.fluxes(s, i) += noise * g(rng);
        }
    }
    return data;
}

}  // namespace otoclab
