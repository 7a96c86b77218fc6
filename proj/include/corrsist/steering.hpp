// Steering detection: the T-diagonal criterion behind the appendix closed
// forms, a pluggable two-qubit criterion registry, and the 3-setting genuine
// tripartite steering inequality with its see-saw optimizer.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "corrsist/bell.hpp"
#include "corrsist/families.hpp"
#include "corrsist/qstate.hpp"
#include "corrsist/util.hpp"

namespace corrsist {

struct SteeringVerdict {
    bool detected = false;
    std::string criterion;
    double value = 0;  // margin; detected iff margin > 0 (strict)
};

// T-matrix-only criterion: steerable if for some pairing
// |t_i| + |t_j| > (2/pi) * 2 * sqrt(1 - t_k^2).
inline SteeringVerdict t_diag_criterion(const Eigen::Vector3d& t) {
    for (int i = 0; i < 3; ++i)
        if (std::abs(t[i]) > 1 + 1e-9)
            throw std::invalid_argument("t_diag_criterion: |t_i| > 1");
    const std::array<std::array<int, 3>, 3> pairings = {{{0, 1, 2}, {0, 2, 1}, {1, 2, 0}}};
    double margin = -1e300;
    for (const auto& [i, j, k] : pairings) {
        const double tk = std::min(1.0, std::abs(t[k]));
        margin = std::max(margin, std::abs(t[i]) + std::abs(t[j]) -
                                      (2.0 / M_PI) * 2.0 * std::sqrt(1 - tk * tk));
    }
    return {margin > 0, "t-diag", margin};
}

// linear criteria sqrt(sum over the best I of t_i^2) > 1, |I| = 2 or 3
inline SteeringVerdict linear_steering_criterion(const Eigen::Vector3d& t, int settings) {
    Eigen::Vector3d a = t.cwiseAbs();
    std::sort(a.data(), a.data() + 3, std::greater<double>());
    double margin;
    std::string name;
    if (settings == 2) {
        margin = std::sqrt(a[0] * a[0] + a[1] * a[1]) - 1.0;
        name = "linear-2-setting";
    } else if (settings == 3) {
        margin = a.norm() - 1.0;
        name = "linear-3-setting";
    } else {
        throw std::invalid_argument("linear_steering_criterion: settings must be 2 or 3");
    }
    return {margin > 0, name, margin};
}

// Registry of named two-qubit steering detectors. All shipped detectors only
// look at the T-matrix diagonal; a fuller criterion sensitive to local Bloch
// vectors is a free slot (needed for the two-loss W4 claim).
struct SteeringCriterion {
    std::string name;
    std::function<SteeringVerdict(const DensityMatrix&)> run;
};

inline const std::vector<SteeringCriterion>& steering_registry() {
    static const std::vector<SteeringCriterion> reg = [] {
        std::vector<SteeringCriterion> r;
        auto tdiag_of = [](const DensityMatrix& rho) {
            const auto bt = bloch_and_T(rho);
            return Eigen::Vector3d(bt.T(0, 0), bt.T(1, 1), bt.T(2, 2));
        };
        r.push_back({"t-diag", [tdiag_of](const DensityMatrix& rho) {
                         return t_diag_criterion(tdiag_of(rho));
                     }});
        r.push_back({"linear-2-setting", [tdiag_of](const DensityMatrix& rho) {
                         auto v = linear_steering_criterion(tdiag_of(rho), 2);
                         return v;
                     }});
        r.push_back({"linear-3-setting", [tdiag_of](const DensityMatrix& rho) {
                         auto v = linear_steering_criterion(tdiag_of(rho), 3);
                         return v;
                     }});
        return r;
    }();
    return reg;
}

inline SteeringVerdict detect_steering_2q(const DensityMatrix& rho,
                                          const std::string& criterion = "") {
    if (rho.n_qubits != 2) throw std::invalid_argument("detect_steering_2q: need 2 qubits");
    SteeringVerdict best{false, "none", -1e300};
    for (const auto& c : steering_registry()) {
        if (!criterion.empty() && c.name != criterion) continue;
        const auto v = c.run(rho);
        if (v.value > best.value) best = v;
    }
    if (best.criterion == "none")
        throw std::invalid_argument("detect_steering_2q: unknown criterion " + criterion);
    return best;
}

// The three appendix closed forms S(rho_i^2) for tau_min coordinates; equal to
// t_diag_criterion on the T-diagonals of the closed-form pair reductions.
inline std::array<double, 3> appendix_b_conditions(const TauMinCoords& c) {
    std::array<double, 3> out{};
    for (int i = 1; i <= 3; ++i) {
        const auto bt = bloch_and_T(tau_min_reduced(c, 2, i));
        out[size_t(i - 1)] =
            t_diag_criterion({bt.T(0, 0), bt.T(1, 1), bt.T(2, 2)}).value;
    }
    return out;
}

// ---------------------------------------------------------------------------
// genuine tripartite steering, three settings per site

// Alice's and Bob's three settings must form orthonormal triads: the lemma
// bounding each relabeled game at 1 (and with it the bound of 3) holds only
// then. The steered party's directions are unconstrained unit vectors.
struct GenuineSteeringSettings {
    std::array<QubitObservable, 3> a;
    std::array<QubitObservable, 3> b;
    std::array<QubitObservable, 3> c;

    void validate() const {
        for (const auto* triad : {&a, &b}) {
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j)
                    if (std::abs((*triad)[size_t(i)].bloch.dot((*triad)[size_t(j)].bloch)) >
                        1e-9)
                        throw std::invalid_argument(
                            "genuine steering settings: A and B must be orthonormal triads");
        }
    }
};

namespace detail {

// D_i games as signed (a-setting, b-setting) pairs
inline const std::array<std::array<std::pair<std::array<int, 2>, double>, 3>, 3>& d_games() {
    static const std::array<std::array<std::pair<std::array<int, 2>, double>, 3>, 3> g = {{
        {{{{0, 0}, 1.0}, {{1, 1}, 1.0}, {{2, 2}, 1.0}}},
        {{{{0, 2}, 1.0}, {{1, 0}, -1.0}, {{2, 1}, 1.0}}},
        {{{{0, 1}, 1.0}, {{1, 2}, -1.0}, {{2, 0}, 1.0}}},
    }};
    return g;
}

}  // namespace detail

// |sum_i <D_i C_i>|; > 3 certifies genuine steering from the third party.
inline double genuine_steering_value(const DensityMatrix& rho,
                                     const GenuineSteeringSettings& s) {
    if (rho.n_qubits != 3)
        throw std::invalid_argument("genuine_steering_value: need 3 qubits");
    s.validate();
    double acc = 0;
    for (int i = 0; i < 3; ++i) {
        for (const auto& [ab, sign] : detail::d_games()[size_t(i)]) {
            acc += sign * correlator(rho, {s.a[size_t(ab[0])], s.b[size_t(ab[1])],
                                           s.c[size_t(i)]});
        }
    }
    return std::abs(acc);
}

struct GenuineSteeringResult {
    double value = 0;
    GenuineSteeringSettings settings;
};

namespace detail {

// correlator with a Pauli axis inserted at one slot
inline double gs_corr(const DensityMatrix& rho, const Eigen::Vector3d& a,
                      const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    std::vector<Mat> ops(3);
    ops[0] = a[0] * pauli(0) + a[1] * pauli(1) + a[2] * pauli(2);
    ops[1] = b[0] * pauli(0) + b[1] * pauli(1) + b[2] * pauli(2);
    ops[2] = c[0] * pauli(0) + c[1] * pauli(1) + c[2] * pauli(2);
    return (rho.entries * kron_all(ops)).trace().real();
}

// closest orthogonal frame maximizing tr(R^T G): polar factor of G
inline Eigen::Matrix3d procrustes(const Eigen::Matrix3d& g) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

inline std::pair<double, GenuineSteeringSettings> gs_seesaw_once(const DensityMatrix& rho,
                                                                 Rng& rng) {
    auto random_frame = [&rng] {
        Eigen::Matrix3d m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = rng.normal();
        const Eigen::HouseholderQR<Eigen::Matrix3d> qr(m);
        return Eigen::Matrix3d(qr.householderQ());
    };
    Eigen::Matrix3d A = random_frame(), B = random_frame();  // columns are settings
    std::array<Eigen::Vector3d, 3> C{rng.unit3(), rng.unit3(), rng.unit3()};
    const auto& games = d_games();

    auto value = [&] {
        double acc = 0;
        for (int i = 0; i < 3; ++i)
            for (const auto& [ab, sign] : games[size_t(i)])
                acc += sign * gs_corr(rho, A.col(ab[0]), B.col(ab[1]), C[size_t(i)]);
        return acc;
    };

    double prev = -1e300;
    for (int sweep = 0; sweep < 400; ++sweep) {
        Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
        for (int i = 0; i < 3; ++i)
            for (const auto& [ab, sign] : games[size_t(i)])
                for (int k = 0; k < 3; ++k)
                    G(k, ab[0]) += sign * gs_corr(rho, Eigen::Vector3d::Unit(k),
                                                  B.col(ab[1]), C[size_t(i)]);
        A = procrustes(G);
        G.setZero();
        for (int i = 0; i < 3; ++i)
            for (const auto& [ab, sign] : games[size_t(i)])
                for (int k = 0; k < 3; ++k)
                    G(k, ab[1]) += sign * gs_corr(rho, A.col(ab[0]),
                                                  Eigen::Vector3d::Unit(k), C[size_t(i)]);
        B = procrustes(G);
        for (int i = 0; i < 3; ++i) {
            Eigen::Vector3d g = Eigen::Vector3d::Zero();
            for (const auto& [ab, sign] : games[size_t(i)])
                for (int k = 0; k < 3; ++k)
                    g[k] += sign * gs_corr(rho, A.col(ab[0]), B.col(ab[1]),
                                           Eigen::Vector3d::Unit(k));
            if (g.norm() > 1e-14) C[size_t(i)] = g.normalized();
        }
        const double v = value();
        if (v - prev < 1e-10) {
            prev = v;
            break;
        }
        prev = v;
    }

    GenuineSteeringSettings s{{QubitObservable(A.col(0)), QubitObservable(A.col(1)),
                               QubitObservable(A.col(2))},
                              {QubitObservable(B.col(0)), QubitObservable(B.col(1)),
                               QubitObservable(B.col(2))},
                              {QubitObservable(C[0]), QubitObservable(C[1]),
                               QubitObservable(C[2])}};
    return {prev, s};
}

}  // namespace detail

// See-saw over orthonormal A/B triads (orthogonal-Procrustes updates) and free
// steered-party directions; flipping all C vectors flips the sign, so the
// signed maximum already is the maximum modulus. Deterministic given the seed.
inline GenuineSteeringResult maximize_genuine_steering(const DensityMatrix& rho,
                                                       int restarts, std::uint64_t seed) {
    if (rho.n_qubits != 3)
        throw std::invalid_argument("maximize_genuine_steering: need 3 qubits");
    if (restarts < 1) restarts = 1;
    std::vector<double> vals(static_cast<size_t>(restarts));
    std::vector<GenuineSteeringSettings> settings(
        static_cast<size_t>(restarts),
        GenuineSteeringSettings{{QubitObservable::x(), QubitObservable::y(),
                                 QubitObservable::z()},
                                {QubitObservable::x(), QubitObservable::y(),
                                 QubitObservable::z()},
                                {QubitObservable::z(), QubitObservable::z(),
                                 QubitObservable::z()}});
    parallel_for(static_cast<size_t>(restarts), [&](std::size_t r) {
        Rng rng(Rng::derive(seed, r));
        auto [v, s] = detail::gs_seesaw_once(rho, rng);
        vals[r] = v;
        settings[r] = s;
    });
    std::size_t best = 0;
    for (std::size_t r = 1; r < vals.size(); ++r)
        if (vals[r] > vals[best]) best = r;
    return {std::abs(vals[best]), settings[best]};
}

// S3 = <A0B0 + A1B1 + A2B2> on a two-qubit state; <= 1 for product states.
inline double product_s3_value(const std::array<QubitObservable, 3>& a_batt,
                               const std::array<QubitObservable, 3>& b_batt,
                               const DensityMatrix& rho) {
    if (rho.n_qubits != 2) throw std::invalid_argument("product_s3_value: need 2 qubits");
    double acc = 0;
    for (int i = 0; i < 3; ++i)
        acc += correlator(rho, {a_batt[size_t(i)], b_batt[size_t(i)]});
    return acc;
}

}  // namespace corrsist
