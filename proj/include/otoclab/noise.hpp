#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "otoclab/protocol.hpp"
#include "otoclab/qstate.hpp"

namespace otoclab {

/// Uniform mixture over all configurations of n_ex excitations on n sites.
struct InfiniteTemperatureSector {
    int n_sites = 0;
    int n_ex = 0;

    int configuration_count() const;
    double configuration_weight() const { return 1.0 / configuration_count(); }
    /// <n_i> = n_ex / n_sites on every site.
    double mean_occupation() const;
    /// Diagonal of the mixture in the sector basis of `space`.
    Eigen::VectorXd diagonal(const StateSpace &space) const;
    /// Reduced state of any two sites; diagonal in |gg>,|ge>,|eg>,|ee>.
    DensityMatrix2Q reduced_pair(Site a = 0, Site b = 1) const;
};

InfiniteTemperatureSector infinite_temperature_sector(int n_sites, int n_ex);

/// Scalar dephasing acting on C+- after a forward and a backward step of
/// length t each: C+- -> exp(-2t / T2) C+-.
struct DephasingModel {
    /// Seconds; +inf disables dephasing.
    double t2_eff = 0.0;

    double factor(double t) const;
};

double apply_dephasing_to_c(double c_ideal, double t, double t2_eff);
double correct_dephasing_of_c(double c_measured, double t, double t2_eff);

/// Applies (or undoes, with `correct`) the dephasing factor to every C+- in
/// the trace, rebuilds C = 2 + C- - C+ and the shell sums.
void apply_dephasing(OtocTrace &trace, double t2_eff, bool correct = false);

/// Pair state after a Loschmidt echo of length t limited only by lattice-wide
/// dephasing: e^{-2t/T2} rho0 + (1 - e^{-2t/T2}) rho_inf, with rho_inf the
/// one-excitation infinite-temperature state reduced to the pair.
DensityMatrix2Q loschmidt_dephased_state(const DensityMatrix2Q &rho0, double t, double t2_eff,
                                         int n_sites);
double loschmidt_dephasing_limit(const DensityMatrix2Q &rho0, double t, double t2_eff,
                                 int n_sites);

struct T2FitOptions {
    double lower = 10e-9;
    double upper = 100e-6;
    /// One weight per sample; empty means uniform.
    std::vector<double> weights;
};

/// Least-squares T2 between measured and exp(-2t/T2) * ideal samples.
/// Returns +inf when the optimum sits at the upper end of the bracket.
double fit_t2_eff(const std::vector<double> &times, const std::vector<double> &measured,
                  const std::vector<double> &ideal, const T2FitOptions &options = {});

/// Same fit over every C+ and C- sample of two traces on a shared grid.
double fit_t2_eff(const OtocTrace &measured, const OtocTrace &ideal,
                  const T2FitOptions &options = {});

}  // namespace otoclab
