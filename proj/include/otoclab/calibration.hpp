#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "otoclab/lattice.hpp"

namespace otoclab {

// ------------------------------------------------------------ transmon model

/// Flux-tunable asymmetric transmon. Frequencies and E_C in rad/s.
struct TransmonSpec {
    double omega_max = 0.0;
    /// Junction asymmetry d in [0, 1].
    double asymmetry = 0.0;
    double charging_energy = 0.0;
    /// Flux offset phi0 in radians.
    double flux_offset = 0.0;
    /// V0_j: volts per flux quantum for every control line.
    std::vector<double> volts_per_flux;

    void validate() const;
    double omega_min() const;
};

/// (w_max + E_C) [d^2 + (1 - d^2) cos^2(theta)]^{1/4} - E_C at the flux
/// phase theta = sum_j pi V_j / V0_j - phi0.
double transmon_frequency(const TransmonSpec &spec, const std::vector<double> &volts);
double transmon_frequency_at_phase(const TransmonSpec &spec, double theta);
double flux_phase(const TransmonSpec &spec, const std::vector<double> &volts);

/// Principal-branch flux phase theta in [0, pi/2] giving `omega`.
double invert_frequency(const TransmonSpec &spec, double omega);

// ------------------------------------------------------------------ crosstalk

/// N samples of line voltages (N x L) and measured fluxes in flux quanta (N x Q).
struct CrosstalkDataset {
    Eigen::MatrixXd voltages;
    Eigen::MatrixXd fluxes;

    void validate() const;
};

struct CrosstalkFit {
    /// Phi = M V + offsets, M is Q x L (flux quanta per volt).
    Eigen::MatrixXd matrix;
    Eigen::VectorXd offsets;
    double cost = 0.0;
    int iterations = 0;
    /// Cost after every accepted gradient step (gradient descent only).
    std::vector<double> cost_history;
};

/// c(M, phi) = (1/N) sum_i || Phi_i - (M V_i + phi) ||^2.
double crosstalk_cost(const CrosstalkDataset &data, const Eigen::MatrixXd &matrix,
                      const Eigen::VectorXd &offsets);

/// Closed-form solution; throws SingularFit when [V 1] is rank deficient.
CrosstalkFit learn_crosstalk_least_squares(const CrosstalkDataset &data);

struct GradientDescentOptions {
    /// <= 0 picks 1 / (largest Hessian eigenvalue).
    double learning_rate = 0.0;
    double cost_tolerance = 1e-14;
    int max_iterations = 100000;
};

CrosstalkFit learn_crosstalk_gradient(const CrosstalkDataset &data,
                                      const Eigen::MatrixXd &initial_matrix,
                                      const Eigen::VectorXd &initial_offsets,
                                      const GradientDescentOptions &options = {});

struct CrosstalkSolutions {
    CrosstalkFit least_squares;
    CrosstalkFit gradient;
    double max_entry_difference = 0.0;
};

/// Runs both solvers (gradient descent from identity / zero) and compares them.
CrosstalkSolutions learn_crosstalk(const CrosstalkDataset &data,
                                   const GradientDescentOptions &options = {});

// ----------------------------------------------------------------- transients

struct TransientTerm {
    double amplitude = 0.0;
    /// Seconds.
    double tau = 0.0;
};

struct TransientFit {
    std::vector<TransientTerm> terms;
    /// Sum of squared residuals.
    double residual = 0.0;
    int start_index = 0;
};

/// n(t) = sum_i A_i exp(-t / tau_i).
double transient_response(const std::vector<TransientTerm> &terms, double t);

struct TransientFitOptions {
    /// Number of log-spaced tau guesses; every n_terms-subset is a start.
    int tau_grid = 8;
};

/// Multistart Levenberg-Marquardt over (A_i, log tau_i). Terms come back
/// sorted by tau. Throws FitFailure when no start converges.
TransientFit fit_transient(const std::vector<double> &times, const std::vector<double> &samples,
                           int n_terms, const TransientFitOptions &options = {});

/// V_AWG(t) = target(t) / (1 + n(t)).
std::vector<double> predistort(const std::vector<double> &times, const std::vector<double> &target,
                               const std::vector<TransientTerm> &terms);
/// V_qubit(t) = V_AWG(t) (1 + n(t)).
std::vector<double> distort(const std::vector<double> &times, const std::vector<double> &waveform,
                            const std::vector<TransientTerm> &terms);

/// Instantaneous detuning d/dt arg(cos + i sin) from Ramsey quadratures,
/// unwrapped, central differences inside and one-sided at the ends.
std::vector<double> ramsey_phasor(const std::vector<double> &cos_stream,
                                  const std::vector<double> &sin_stream, double dt);

// ------------------------------------------------------------ dressing model

/// Frequencies seen in the single-excitation manifold of the coupled lattice
/// (each eigenvalue assigned to the qubit with the largest eigenvector weight).
std::vector<double> dress_frequencies(const LatticeGraph &graph, const std::vector<double> &bare,
                                      double reference_frequency);

struct UndressOptions {
    double tolerance = 1e-3;  // rad/s
    int max_iterations = 200;
};

/// Fixed-point inversion of dress_frequencies.
std::vector<double> undress_frequencies(const LatticeGraph &graph,
                                        const std::vector<double> &dressed,
                                        double reference_frequency,
                                        const UndressOptions &options = {});

// ----------------------------------------------------------- synthetic device

struct SyntheticDevice {
    LatticeGraph graph;
    std::vector<TransmonSpec> qubits;
    /// Ground-truth M (Q x L) and offsets, flux quanta.
    Eigen::MatrixXd crosstalk;
    Eigen::VectorXd offsets;
    /// Staircase of target frequencies, rad/s.
    std::vector<double> targets;
};

/// Strong-diagonal cross-talk, one control line per qubit.
SyntheticDevice make_synthetic_device(const LatticeGraph &graph, std::uint64_t seed);

/// N random voltage vectors in [-1, 1] V with fluxes from the device plus
/// Gaussian noise of `noise` flux quanta.
CrosstalkDataset sample_crosstalk_dataset(const SyntheticDevice &device, int n_samples,
                                          double noise, std::uint64_t seed);

}  // namespace otoclab
