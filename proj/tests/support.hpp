#pragma once

// Test-side generators and brute-force reference implementations. Nothing
// here calls into the library's propagators or sector machinery: the dense
// oracle builds full-space operators from Kronecker products directly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "otoclab/lattice.hpp"
#include "otoclab/qstate.hpp"

namespace testing {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kTwoPi = 6.283185307179586;
inline double mhz(double v) { return kTwoPi * v * 1e6; }

// ---------------------------------------------------------------- generators

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    cplx complex_normal() { return {normal(), normal()}; }

    Vec complex_vector(Eigen::Index n) {
        Vec v(n);
        for (Eigen::Index k = 0; k < n; ++k) v[k] = complex_normal();
        return v / v.norm();
    }

    /// Haar-ish random unitary via QR of a Ginibre matrix.
    Mat unitary(int n) {
        Mat g(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) g(r, c) = complex_normal();
        Eigen::HouseholderQR<Mat> qr(g);
        Mat q = qr.householderQ();
        for (int k = 0; k < n; ++k) q.col(k) *= std::polar(1.0, std::arg(qr.matrixQR()(k, k)));
        return q;
    }

    /// Random normalised state supported on qubit-manifold codes of the given space.
    otoclab::SectoredState qubit_state(std::shared_ptr<const otoclab::StateSpace> space) {
        Vec dense = Vec::Zero(static_cast<Eigen::Index>(space->dimension()));
        for (std::size_t code = 0; code < space->dimension(); ++code) {
            bool qubit = true;
            for (int s = 0; s < space->n_sites(); ++s) {
                if (space->level(static_cast<otoclab::StateSpace::Code>(code), s) > 1) qubit = false;
            }
            if (qubit) dense[static_cast<Eigen::Index>(code)] = complex_normal();
        }
        dense /= dense.norm();
        return otoclab::SectoredState::from_dense(space, dense);
    }

    /// Random state over the full space, all levels populated.
    otoclab::SectoredState any_state(std::shared_ptr<const otoclab::StateSpace> space) {
        return otoclab::SectoredState::from_dense(
            space, complex_vector(static_cast<Eigen::Index>(space->dimension())));
    }

    Eigen::Matrix4cd density4() {
        Eigen::Matrix4cd a;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) a(r, c) = complex_normal();
        Eigen::Matrix4cd rho = a * a.adjoint();
        return rho / rho.trace().real();
    }
};

// ------------------------------------------------------------- dense oracle

/// Site k is the k-th least significant base-`levels` digit of the full index.
inline Mat embed(const Mat &local, int site, int n_sites) {
    const auto d = local.rows();
    Mat out = Mat::Identity(1, 1);
    for (int s = n_sites - 1; s >= 0; --s) {
        const Mat f = s == site ? local : Mat(Mat::Identity(d, d));
        out = Eigen::kroneckerProduct(out, f).eval();
    }
    return out;
}

inline Mat lowering(int levels) {
    Mat a = Mat::Zero(levels, levels);
    for (int l = 1; l < levels; ++l) a(l - 1, l) = std::sqrt(static_cast<double>(l));
    return a;
}

inline Mat number(int levels) {
    Mat n = Mat::Zero(levels, levels);
    for (int l = 0; l < levels; ++l) n(l, l) = l;
    return n;
}

/// 2x2 Pauli on g/e; `f_entry` on the |f> diagonal for three levels.
inline Mat pauli(char axis, int levels, double f_entry = 1.0) {
    Mat p = Mat::Zero(levels, levels);
    if (axis == 'x') { p(0, 1) = 1.0; p(1, 0) = 1.0; }
    if (axis == 'y') { p(0, 1) = cplx(0, 1); p(1, 0) = cplx(0, -1); }
    if (axis == 'z') { p(0, 0) = -1.0; p(1, 1) = 1.0; }
    if (levels == 3) p(2, 2) = f_entry;
    return p;
}

/// Hard-core model: -sum J (s+ s- + h.c.) + sum (dw/2) sz - eps sum_NN (1 + sz sz)/2.
inline Mat hardcore_hamiltonian(const otoclab::LatticeGraph &g, const std::vector<double> &dw,
                                double eps = 0.0) {
    const int n = g.n_sites();
    const Eigen::Index dim = Eigen::Index(1) << n;
    Mat h = Mat::Zero(dim, dim);
    const Mat sm = lowering(2);
    const Mat sz = pauli('z', 2);
    for (const auto &b : g.bonds()) {
        const Mat hop = embed(sm.adjoint(), b.i, n) * embed(sm, b.j, n);
        h -= b.coupling * (hop + hop.adjoint());
        if (eps != 0.0 && !b.long_range) {
            h -= eps * 0.5 * (Mat::Identity(dim, dim) + embed(sz, b.i, n) * embed(sz, b.j, n));
        }
    }
    for (int s = 0; s < n; ++s) h += 0.5 * dw[static_cast<std::size_t>(s)] * embed(sz, s, n);
    return h;
}

/// Three-level transmons: -sum J (a+ a + h.c.) + sum dw (n - 1/2) + U/2 n(n-1).
/// With f_decoupled only the g/e part of the hopping survives.
inline Mat transmon_hamiltonian(const otoclab::LatticeGraph &g, const std::vector<double> &dw,
                                const std::vector<double> &u, bool f_decoupled = false) {
    const int n = g.n_sites();
    Eigen::Index dim = 1;
    for (int s = 0; s < n; ++s) dim *= 3;
    Mat h = Mat::Zero(dim, dim);
    Mat a = lowering(3);
    if (f_decoupled) a(1, 2) = 0.0;
    const Mat num = number(3);
    const Mat id = Mat::Identity(3, 3);
    for (const auto &b : g.bonds()) {
        const Mat hop = embed(a.adjoint(), b.i, n) * embed(a, b.j, n);
        h -= b.coupling * (hop + hop.adjoint());
    }
    for (int s = 0; s < n; ++s) {
        const auto k = static_cast<std::size_t>(s);
        h += dw[k] * embed(num - 0.5 * id, s, n);
        h += 0.5 * u[k] * embed(num * (num - id), s, n);
    }
    return h;
}

inline Mat unitary(const Mat &h, double t) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const Eigen::VectorXcd phases =
        (es.eigenvalues().cast<cplx>() * cplx(0.0, -t)).array().exp().matrix();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// ||[W(t), V] psi||^2 with W(t) = U(t)^dag Z_j U(t), V = X_i, identity on |f>.
inline double otoc_c(const Mat &h, const Vec &psi, int i, int j, double t, int n_sites, int levels) {
    const Mat u = unitary(h, t);
    const Mat w = u.adjoint() * embed(pauli('z', levels), j, n_sites) * u;
    const Mat v = embed(pauli('x', levels), i, n_sites);
    return ((w * v - v * w) * psi).squaredNorm();
}

/// Largest singular value, via the top eigenvalue of m^H m.
inline double op_norm(const Mat &m) {
    const Mat gram = m.adjoint() * m;
    const double top = Eigen::SelfAdjointEigenSolver<Mat>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    return std::sqrt(std::max(0.0, top));
}

inline double max_abs(const std::vector<double> &a, const std::vector<double> &b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

}  // namespace testing
