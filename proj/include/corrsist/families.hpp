// Constructors for the four-qubit state families: the generic class spanned by
// the Bell-pair products u0..u3, its tau_min and M subclasses, the named states
// (GHZ, W, cluster, Dicke), the W loss mixture, and the closed-form reduced
// states of tau_min states.
//
// Conventions fixed here (and pinned by tests against direct partial traces):
//   u0 = |phi+>|phi+>, u1 = |phi->|phi->, u2 = |psi+>|psi+>, u3 = |psi->|psi->,
//   so sum z_j u_j has amplitudes (z0+z1)/2 on {0000,1111}, (z0-z1)/2 on
//   {0011,1100}, (z2+z3)/2 on {0101,1010}, (z2-z3)/2 on {0110,1001}.
//   tau_min_reduced: lost=1, which=i traces out qubit i; lost=2, which=1/2/3
//   traces out {3,4}/{2,4}/{2,3}.
#pragma once

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "corrsist/qstate.hpp"

namespace corrsist {

struct GenericACoords {
    Eigen::Vector4cd z;

    explicit GenericACoords(const Eigen::Vector4cd& zz) : z(zz) {
        if (std::abs(z.squaredNorm() - 1.0) > kStateTol)
            throw std::invalid_argument("GenericACoords: |z| != 1");
    }
};

struct TauMinCoords {
    Eigen::Vector4d x;

    explicit TauMinCoords(const Eigen::Vector4d& xx) : x(xx) {
        if (std::abs(x.squaredNorm() - 1.0) > kStateTol)
            throw std::invalid_argument("TauMinCoords: |x| != 1");
    }
    static TauMinCoords ghz() {
        return TauMinCoords({1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0, 0});
    }
    static TauMinCoords dicke() {
        const double s = 1 / std::sqrt(6.0);
        return TauMinCoords({s, -s, 2 * s, 0});
    }
};

struct MClassCoords {
    Eigen::Vector4d p;
    Eigen::Vector4d theta;

    MClassCoords(const Eigen::Vector4d& pp, const Eigen::Vector4d& th) : p(pp), theta(th) {
        if (p.minCoeff() < 0) throw std::invalid_argument("MClassCoords: negative weight");
        if (std::abs(p.sum() - 1.0) > kStateTol)
            throw std::invalid_argument("MClassCoords: weights do not sum to 1");
        cx resid = 0;
        for (int j = 0; j < 4; ++j) resid += p[j] * std::exp(cx(0, 2 * theta[j]));
        if (std::abs(resid) > 1e-8)
            throw std::invalid_argument("MClassCoords: sum p_j e^{2i theta_j} != 0");
    }

    Eigen::Vector4cd z() const {
        Eigen::Vector4cd out;
        for (int j = 0; j < 4; ++j) out[j] = std::sqrt(p[j]) * std::exp(cx(0, theta[j]));
        return out;
    }
};

inline PureState generic_a_state(const GenericACoords& c) {
    Vec amps = Vec::Zero(16);
    const cx a = (c.z[0] + c.z[1]) / 2.0;
    const cx b = (c.z[0] - c.z[1]) / 2.0;
    const cx d = (c.z[2] + c.z[3]) / 2.0;
    const cx e = (c.z[2] - c.z[3]) / 2.0;
    amps[0b0000] = a; amps[0b1111] = a;
    amps[0b0011] = b; amps[0b1100] = b;
    amps[0b0101] = d; amps[0b1010] = d;
    amps[0b0110] = e; amps[0b1001] = e;
    return PureState(4, std::move(amps));
}

inline PureState tau_min_state(const TauMinCoords& c) {
    Eigen::Vector4cd z;
    for (int j = 0; j < 4; ++j) z[j] = c.x[j];
    return generic_a_state(GenericACoords(z));
}

inline PureState m_class_state(const MClassCoords& c) {
    return generic_a_state(GenericACoords(c.z()));
}

inline PureState named_state(const std::string& name, int n) {
    if (name == "GHZ" || name == "ghz") {
        if (n < 2) throw std::invalid_argument("GHZ needs n >= 2");
        Vec amps = Vec::Zero(Eigen::Index(1) << n);
        amps[0] = 1 / std::sqrt(2.0);
        amps[(Eigen::Index(1) << n) - 1] = 1 / std::sqrt(2.0);
        return PureState(n, std::move(amps));
    }
    if (name == "W" || name == "w") {
        if (n < 2) throw std::invalid_argument("W needs n >= 2");
        Vec amps = Vec::Zero(Eigen::Index(1) << n);
        for (int q = 0; q < n; ++q) amps[Eigen::Index(1) << q] = 1 / std::sqrt(double(n));
        return PureState(n, std::move(amps));
    }
    if (name == "cluster4") {
        if (n != 4) throw std::invalid_argument("cluster4 is a 4-qubit state");
        Vec amps = Vec::Zero(16);
        amps[0b0000] = 0.5;
        amps[0b0011] = 0.5;
        amps[0b1100] = 0.5;
        amps[0b1111] = -0.5;
        return PureState(4, std::move(amps));
    }
    if (name == "dicke4") {
        if (n != 4) throw std::invalid_argument("dicke4 is a 4-qubit state");
        Vec amps = Vec::Zero(16);
        for (int i = 0; i < 16; ++i)
            if (__builtin_popcount(unsigned(i)) == 2) amps[i] = 1 / std::sqrt(6.0);
        return PureState(4, std::move(amps));
    }
    throw std::invalid_argument("unknown named state: " + name);
}

// rho(p) = p |W3><W3| + (1-p) |000><000|; equals any (N-3)-loss reduction of W^N
// at p = 3/N.
inline DensityMatrix w_loss_mixture(double p) {
    if (p < 0 || p > 1) throw std::invalid_argument("w_loss_mixture: p outside [0,1]");
    const PureState w3 = named_state("W", 3);
    Mat m = p * (w3.amplitudes * w3.amplitudes.adjoint());
    m(0, 0) += 1 - p;
    return DensityMatrix(3, std::move(m));
}

namespace detail {
inline Vec ket3(int i0, int i1, int i2) {
    Vec v = Vec::Zero(8);
    v[(i0 << 2) | (i1 << 1) | i2] = 1;
    return v;
}
inline Vec ket2(int i0, int i1) {
    Vec v = Vec::Zero(4);
    v[(i0 << 1) | i1] = 1;
    return v;
}
}  // namespace detail

// Closed-form reduced states of tau_min states. The component vectors are kept
// sub-normalized; their squared norms carry the mixture weights.
inline DensityMatrix tau_min_reduced(const TauMinCoords& c, int lost, int which) {
    using detail::ket2;
    using detail::ket3;
    const double a = (c.x[0] + c.x[1]) / 2;
    const double b = (c.x[0] - c.x[1]) / 2;
    const double d = (c.x[2] + c.x[3]) / 2;
    const double e = (c.x[2] - c.x[3]) / 2;

    if (lost == 1) {
        if (which < 1 || which > 4)
            throw std::invalid_argument("tau_min_reduced: which must be 1..4 for lost=1");
        Vec wtilde;
        switch (which) {
            case 1: wtilde = e * ket3(0, 0, 1) + d * ket3(0, 1, 0) + b * ket3(1, 0, 0); break;
            case 2: wtilde = d * ket3(0, 0, 1) + e * ket3(0, 1, 0) + b * ket3(1, 0, 0); break;
            case 3: wtilde = b * ket3(0, 0, 1) + e * ket3(0, 1, 0) + d * ket3(1, 0, 0); break;
            default: wtilde = b * ket3(0, 0, 1) + d * ket3(0, 1, 0) + e * ket3(1, 0, 0); break;
        }
        const Vec psi = wtilde + a * ket3(1, 1, 1);
        Vec phi(8);  // sigma_x^3 flip: reverse bit pattern per qubit
        for (int i = 0; i < 8; ++i) phi[i] = psi[7 - i];
        Mat m = psi * psi.adjoint() + phi * phi.adjoint();
        return DensityMatrix(3, std::move(m));
    }
    if (lost == 2) {
        if (which < 1 || which > 3)
            throw std::invalid_argument("tau_min_reduced: which must be 1..3 for lost=2");
        Vec eta, xi;
        switch (which) {
            case 1:
                eta = b * ket2(0, 0) + a * ket2(1, 1);
                xi = e * ket2(0, 1) + d * ket2(1, 0);
                break;
            case 2:
                eta = d * ket2(0, 0) + a * ket2(1, 1);
                // printed coefficient (x2+x3)/2 on |01> fails the partial-trace
                // oracle; (x2-x3)/2 is the verified one.
                xi = e * ket2(0, 1) + b * ket2(1, 0);
                break;
            default:
                eta = e * ket2(0, 0) + a * ket2(1, 1);
                xi = d * ket2(0, 1) + b * ket2(1, 0);
                break;
        }
        Vec etaf(4), xif(4);
        for (int i = 0; i < 4; ++i) {
            etaf[i] = eta[3 - i];
            xif[i] = xi[3 - i];
        }
        Mat m = eta * eta.adjoint() + xi * xi.adjoint() + etaf * etaf.adjoint() +
                xif * xif.adjoint();
        return DensityMatrix(2, std::move(m));
    }
    throw std::invalid_argument("tau_min_reduced: lost must be 1 or 2");
}

// Loss sets matching tau_min_reduced's `which`; frozen by the oracle property.
inline std::set<int> tau_min_loss_set(int lost, int which) {
    if (lost == 1) return {which};
    switch (which) {
        case 1: return {3, 4};
        case 2: return {2, 4};
        case 3: return {2, 3};
    }
    throw std::invalid_argument("tau_min_loss_set: bad which");
}

}  // namespace corrsist
