// Test-only oracles kept independent of the implementation paths they check:
// random-state generators, Wootters concurrence, eigenvalue-based purity, a
// brute-force CHSH grid optimizer, and the m-class phase-constraint sampler.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>

#include "corrsist/families.hpp"
#include "corrsist/qstate.hpp"
#include "corrsist/util.hpp"

namespace oracles {

using corrsist::cx;
using corrsist::Mat;
using corrsist::Vec;

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline corrsist::PureState random_pure(int n, corrsist::Rng& rng) {
    Vec v(Eigen::Index(1) << n);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cx(rng.normal(), rng.normal());
    v /= v.norm();
    return corrsist::PureState(n, std::move(v));
}

inline corrsist::DensityMatrix random_mixed(int n, int rank, corrsist::Rng& rng) {
    const Eigen::Index d = Eigen::Index(1) << n;
    Mat m = Mat::Zero(d, d);
    for (int k = 0; k < rank; ++k) {
        Vec v(d);
        for (Eigen::Index i = 0; i < d; ++i) v[i] = cx(rng.normal(), rng.normal());
        m += v * v.adjoint();
    }
    m /= m.trace().real();
    return corrsist::DensityMatrix(n, std::move(m));
}

inline corrsist::DensityMatrix random_single_qubit(corrsist::Rng& rng, bool pure = true) {
    if (pure) {
        Vec v(2);
        v << cx(rng.normal(), rng.normal()), cx(rng.normal(), rng.normal());
        v /= v.norm();
        return corrsist::DensityMatrix(1, v * v.adjoint());
    }
    return random_mixed(1, 2, rng);
}

inline corrsist::TauMinCoords random_taumin(corrsist::Rng& rng) {
    Eigen::Vector4d x;
    for (int j = 0; j < 4; ++j) x[j] = rng.normal();
    x /= x.norm();
    return corrsist::TauMinCoords(x);
}

inline corrsist::GenericACoords random_generic_a(corrsist::Rng& rng) {
    Eigen::Vector4cd z;
    for (int j = 0; j < 4; ++j) z[j] = cx(rng.normal(), rng.normal());
    z /= std::sqrt(z.squaredNorm());
    return corrsist::GenericACoords(z);
}

// flat simplex weights + two-phase ansatz theta = (0, a/2, b/2, b/2 + pi/2);
// solvable when (p0, p1, |p2-p3|) satisfy the triangle inequality
inline std::optional<corrsist::MClassCoords> sample_mclass(corrsist::Rng& rng) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        Eigen::Vector4d p;
        double acc = 0;
        for (int j = 0; j < 4; ++j) {
            p[j] = -std::log(std::max(rng.uniform(), 1e-300));
            acc += p[j];
        }
        p /= acc;
        const double a = p[0], b = p[1], c = std::abs(p[2] - p[3]);
        if (a < 1e-10 || b < 1e-10) continue;
        if (a > b + c || b > a + c || c > a + b) continue;
        const double ca = std::clamp((c * c - a * a - b * b) / (2 * a * b), -1.0, 1.0);
        const double al = std::acos(ca);
        const double be = std::atan2(-b * std::sin(al), -a - b * std::cos(al));
        const double off = p[2] >= p[3] ? 0.0 : M_PI;
        Eigen::Vector4d th(0.0, al / 2, (be - off) / 2, (be - off) / 2 + M_PI / 2);
        cx resid = 0;
        for (int j = 0; j < 4; ++j) resid += p[j] * std::exp(cx(0, 2 * th[j]));
        if (std::abs(resid) > 1e-10) continue;
        return corrsist::MClassCoords(p, th);
    }
    return std::nullopt;
}

// haar-ish random orthonormal measurement triad (columns)
inline std::array<corrsist::QubitObservable, 3> random_triad(corrsist::Rng& rng) {
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = rng.normal();
    const Eigen::HouseholderQR<Eigen::Matrix3d> qr(m);
    const Eigen::Matrix3d q = qr.householderQ();
    return {corrsist::QubitObservable(q.col(0)), corrsist::QubitObservable(q.col(1)),
            corrsist::QubitObservable(q.col(2))};
}

inline double wootters_concurrence(const corrsist::DensityMatrix& rho) {
    const Mat yy = corrsist::kron(corrsist::pauli(1), corrsist::pauli(1));
    const Mat r = rho.entries * yy * rho.entries.conjugate() * yy;
    Eigen::ComplexEigenSolver<Mat> es(r);
    Eigen::Vector4d lam;
    for (int i = 0; i < 4; ++i)
        lam[i] = std::sqrt(std::max(0.0, es.eigenvalues()[i].real()));
    std::sort(lam.data(), lam.data() + 4, std::greater<double>());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

inline double purity_by_eigenvalues(const corrsist::DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho.entries, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs2().sum();
}

// dense grid + refinement over two planar angles per side; independent of the
// see-saw path
inline double brute_force_chsh(const corrsist::DensityMatrix& rho) {
    const auto bt = corrsist::bloch_and_T(rho);
    const Eigen::Matrix3d T = bt.T;
    // Horodecki: the optimum lives in the planes spanned by the two dominant
    // principal axes on each side (A vectors in the left plane, B in the right)
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(T, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Matrix3d basisA = svd.matrixU();
    const Eigen::Matrix3d basisB = svd.matrixV();
    auto avec = [&](double ang) {
        return Eigen::Vector3d(basisA.col(0) * std::cos(ang) + basisA.col(1) * std::sin(ang));
    };
    auto bvec = [&](double ang) {
        return Eigen::Vector3d(basisB.col(0) * std::cos(ang) + basisB.col(1) * std::sin(ang));
    };
    auto value = [&](double a0, double a1, double b0, double b1) {
        const Eigen::Vector3d A0 = avec(a0), A1 = avec(a1), B0 = bvec(b0), B1 = bvec(b1);
        return A0.dot(T * B0) + A0.dot(T * B1) + A1.dot(T * B0) - A1.dot(T * B1);
    };
    double best = -1e300;
    const int N = 24;
    double ga0 = 0, ga1 = 0, gb0 = 0, gb1 = 0;
    for (int i0 = 0; i0 < N; ++i0)
        for (int i1 = 0; i1 < N; ++i1)
            for (int j0 = 0; j0 < N; ++j0)
                for (int j1 = 0; j1 < N; ++j1) {
                    const double v = value(2 * M_PI * i0 / N, 2 * M_PI * i1 / N,
                                           2 * M_PI * j0 / N, 2 * M_PI * j1 / N);
                    if (v > best) {
                        best = v;
                        ga0 = 2 * M_PI * i0 / N; ga1 = 2 * M_PI * i1 / N;
                        gb0 = 2 * M_PI * j0 / N; gb1 = 2 * M_PI * j1 / N;
                    }
                }
    double step = 2 * M_PI / N;
    for (int it = 0; it < 60; ++it) {
        step *= 0.7;
        for (double* ang : {&ga0, &ga1, &gb0, &gb1}) {
            for (double delta : {-step, step}) {
                const double old = *ang;
                *ang = old + delta;
                const double v = value(ga0, ga1, gb0, gb1);
                if (v > best) best = v; else *ang = old;
            }
        }
    }
    return best;
}

}  // namespace oracles
