// Dense complex linear algebra for few-qubit pure and mixed states: partial
// traces, product-observable correlators, measurement behaviors, local filters
// and two-qubit Bloch data. Qubit 1 is the leftmost tensor factor (most
// significant bit of the computational-basis index).
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "corrsist/behavior.hpp"

namespace corrsist {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kStateTol = 1e-10;   // normalization / hermiticity
inline constexpr double kPsdSlack = 1e-9;    // eigenvalue floor for density matrices

// Thrown when a trace-decreasing map kills the state or a requested region is empty.
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Mat pauli(int axis) {
    Mat m(2, 2);
    switch (axis) {
        case 0: m << 0, 1, 1, 0; break;
        case 1: m << 0, cx(0, -1), cx(0, 1), 0; break;
        case 2: m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("pauli axis must be 0,1,2");
    }
    return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Mat kron_all(const std::vector<Mat>& ops) {
    Mat out = Mat::Identity(1, 1);
    for (const auto& o : ops) out = kron(out, o);
    return out;
}

struct PureState {
    int n_qubits = 0;
    Vec amplitudes;

    PureState(int n, Vec amps) : n_qubits(n), amplitudes(std::move(amps)) {
        if (n < 1) throw std::invalid_argument("PureState: need at least one qubit");
        if (amplitudes.size() != (Eigen::Index(1) << n))
            throw std::invalid_argument("PureState: amplitude count != 2^n");
        if (std::abs(amplitudes.squaredNorm() - 1.0) > kStateTol)
            throw std::invalid_argument("PureState: not normalized");
    }

    // amplitude of |bits> given as string, e.g. "0110"
    cx amp(const std::string& bits) const {
        return amplitudes(Eigen::Index(std::stoul(bits, nullptr, 2)));
    }
};

struct DensityMatrix {
    int n_qubits = 0;
    Mat entries;

    DensityMatrix(int n, Mat m) : n_qubits(n), entries(std::move(m)) {
        const Eigen::Index d = Eigen::Index(1) << n;
        if (n < 1 || entries.rows() != d || entries.cols() != d)
            throw std::invalid_argument("DensityMatrix: bad dimension");
        if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > kStateTol)
            throw std::invalid_argument("DensityMatrix: not Hermitian");
        if (std::abs(entries.trace().real() - 1.0) > kStateTol ||
            std::abs(entries.trace().imag()) > kStateTol)
            throw std::invalid_argument("DensityMatrix: trace != 1");
        Eigen::SelfAdjointEigenSolver<Mat> es(entries, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -kPsdSlack)
            throw std::invalid_argument("DensityMatrix: negative eigenvalue");
    }

    static DensityMatrix from_pure(const PureState& psi) {
        return DensityMatrix(psi.n_qubits, psi.amplitudes * psi.amplitudes.adjoint());
    }

    double purity() const { return (entries * entries).trace().real(); }
};

struct QubitObservable {
    Eigen::Vector3d bloch;

    explicit QubitObservable(const Eigen::Vector3d& n) : bloch(n) {
        if (std::abs(bloch.norm() - 1.0) > kStateTol)
            throw std::invalid_argument("QubitObservable: Bloch vector not unit");
    }
    static QubitObservable x() { return QubitObservable({1, 0, 0}); }
    static QubitObservable y() { return QubitObservable({0, 1, 0}); }
    static QubitObservable z() { return QubitObservable({0, 0, 1}); }

    Mat matrix() const {
        return bloch[0] * pauli(0) + bloch[1] * pauli(1) + bloch[2] * pauli(2);
    }
    // projector onto outcome +1 (a=0) or -1 (a=1)
    Mat projector(int outcome_bit) const {
        const double sgn = outcome_bit == 0 ? 1.0 : -1.0;
        return 0.5 * (Mat::Identity(2, 2) + sgn * matrix());
    }
};

// Per-party measurement settings; settings[i][x] is observable x of party i+1.
struct MeasurementBattery {
    std::vector<std::vector<QubitObservable>> settings;

    int parties() const { return int(settings.size()); }
    void validate() const {
        if (settings.empty()) throw std::invalid_argument("battery: no parties");
        for (const auto& s : settings)
            if (s.empty()) throw std::invalid_argument("battery: party without settings");
    }
};

// One 2x2 operator per party, operator norm <= 1.
struct LocalFilter {
    std::vector<Eigen::Matrix2cd> ops;

    explicit LocalFilter(std::vector<Eigen::Matrix2cd> o) : ops(std::move(o)) {
        for (const auto& m : ops) {
            Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
            if (svd.singularValues()(0) > 1.0 + 1e-12)
                throw std::invalid_argument("LocalFilter: operator norm exceeds 1");
        }
    }
    static LocalFilter identity(int parties) {
        return LocalFilter(std::vector<Eigen::Matrix2cd>(parties, Eigen::Matrix2cd::Identity()));
    }
    // the diag(eps,1) filter of the paper, same eps on every party
    static LocalFilter uniform_eps(int parties, double eps) {
        Eigen::Matrix2cd f;
        f << eps, 0, 0, 1;
        return LocalFilter(std::vector<Eigen::Matrix2cd>(parties, f));
    }
};

inline int qubit_bit(int n, int qubit, Eigen::Index index) {
    return int((index >> (n - qubit)) & 1);  // qubit is 1-based
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::set<int>& lost) {
    const int n = rho.n_qubits;
    if (lost.empty()) return rho;
    for (int q : lost)
        if (q < 1 || q > n) throw std::invalid_argument("partial_trace: index out of range");
    if (int(lost.size()) >= n) throw std::invalid_argument("partial_trace: cannot trace all qubits");

    std::vector<int> keep;
    for (int q = 1; q <= n; ++q)
        if (!lost.count(q)) keep.push_back(q);
    const int m = int(keep.size());
    const int nl = int(lost.size());
    std::vector<int> lostv(lost.begin(), lost.end());

    Mat out = Mat::Zero(Eigen::Index(1) << m, Eigen::Index(1) << m);
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        for (Eigen::Index c = 0; c < out.cols(); ++c) {
            cx acc = 0;
            for (Eigen::Index l = 0; l < (Eigen::Index(1) << nl); ++l) {
                Eigen::Index fr = 0, fc = 0;
                for (int k = 0; k < m; ++k) {
                    fr |= Eigen::Index((r >> (m - 1 - k)) & 1) << (n - keep[k]);
                    fc |= Eigen::Index((c >> (m - 1 - k)) & 1) << (n - keep[k]);
                }
                for (int k = 0; k < nl; ++k) {
                    const Eigen::Index bit = (l >> (nl - 1 - k)) & 1;
                    fr |= bit << (n - lostv[k]);
                    fc |= bit << (n - lostv[k]);
                }
                acc += rho.entries(fr, fc);
            }
            out(r, c) = acc;
        }
    }
    return DensityMatrix(m, std::move(out));
}

// tr(rho O_1 x ... x O_n); nullopt slots contribute identity (traced-out parties).
inline double correlator(const DensityMatrix& rho,
                         const std::vector<std::optional<QubitObservable>>& obs) {
    if (int(obs.size()) != rho.n_qubits)
        throw std::invalid_argument("correlator: observable list length != n_qubits");
    std::vector<Mat> ops;
    ops.reserve(obs.size());
    for (const auto& o : obs) ops.push_back(o ? o->matrix() : Mat::Identity(2, 2));
    return (rho.entries * kron_all(ops)).trace().real();
}

// Full conditional probability table via projective measurements (1 +- n.sigma)/2.
inline Behavior behavior(const DensityMatrix& rho, const MeasurementBattery& battery) {
    battery.validate();
    if (battery.parties() != rho.n_qubits)
        throw std::invalid_argument("behavior: battery parties != n_qubits");
    Scenario sc;
    sc.parties = battery.parties();
    for (const auto& s : battery.settings) sc.settings.push_back(int(s.size()));

    Behavior b(sc);
    const int n = sc.parties;
    for (int xi = 0; xi < sc.joint_settings(); ++xi) {
        const auto xs = sc.unpack_setting(xi);
        for (int ai = 0; ai < (1 << n); ++ai) {
            std::vector<Mat> ops;
            ops.reserve(n);
            for (int p = 0; p < n; ++p)
                ops.push_back(battery.settings[p][xs[p]].projector((ai >> (n - 1 - p)) & 1));
            b.table[Eigen::Index(xi) * (1 << n) + ai] =
                (rho.entries * kron_all(ops)).trace().real();
        }
    }
    return b;
}

inline std::pair<DensityMatrix, double> apply_filter(const DensityMatrix& rho,
                                                     const LocalFilter& f) {
    if (int(f.ops.size()) != rho.n_qubits)
        throw std::invalid_argument("apply_filter: filter arity != n_qubits");
    std::vector<Mat> ops;
    for (const auto& m : f.ops) ops.push_back(m);
    const Mat F = kron_all(ops);
    Mat out = F * rho.entries * F.adjoint();
    const double succ = out.trace().real();
    if (succ < 1e-14) throw infeasible_error("filter annihilates state");
    out /= succ;
    out = 0.5 * (out + out.adjoint().eval());  // scrub roundoff asymmetry
    return {DensityMatrix(rho.n_qubits, std::move(out)), succ};
}

struct TwoQubitBloch {
    Eigen::Vector3d a;  // first-party Bloch vector
    Eigen::Vector3d b;  // second-party Bloch vector
    Eigen::Matrix3d T;  // T_ij = tr(rho sigma_i x sigma_j)
};

inline TwoQubitBloch bloch_and_T(const DensityMatrix& rho) {
    if (rho.n_qubits != 2) throw std::invalid_argument("bloch_and_T: need a 2-qubit state");
    TwoQubitBloch out;
    const Mat id = Mat::Identity(2, 2);
    for (int i = 0; i < 3; ++i) {
        out.a[i] = (rho.entries * kron(pauli(i), id)).trace().real();
        out.b[i] = (rho.entries * kron(id, pauli(i))).trace().real();
        for (int j = 0; j < 3; ++j)
            out.T(i, j) = (rho.entries * kron(pauli(i), pauli(j))).trace().real();
    }
    return out;
}

enum class Ppt { NPT, PPT };

// Partial transpose over `subset`, NPT iff an eigenvalue drops below -1e-10.
inline Ppt ppt_check(const DensityMatrix& rho, const std::set<int>& subset) {
    const int n = rho.n_qubits;
    if (subset.empty() || int(subset.size()) >= n)
        throw std::invalid_argument("ppt_check: need a nonempty proper subset");
    for (int q : subset)
        if (q < 1 || q > n) throw std::invalid_argument("ppt_check: index out of range");

    Eigen::Index mask = 0;
    for (int q : subset) mask |= Eigen::Index(1) << (n - q);

    const Eigen::Index d = rho.entries.rows();
    Mat pt(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            const Eigen::Index rr = (r & ~mask) | (c & mask);
            const Eigen::Index cc = (c & ~mask) | (r & mask);
            pt(rr, cc) = rho.entries(r, c);
        }
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(pt, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() < -1e-10 ? Ppt::NPT : Ppt::PPT;
}

}  // namespace corrsist
