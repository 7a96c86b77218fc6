// Entanglement monotones for 4-qubit pure states: bipartite tangles
// 2(1 - purity), their one-vs-rest and two-vs-two averages tau1/tau2, and the
// permutation-invariant 4-tangle |<psi|sy^4|psi*>|^2.
#pragma once

#include <map>
#include <set>
#include <string>

#include "corrsist/qstate.hpp"

namespace corrsist {

struct TangleSummary {
    double tau1 = 0;
    double tau2 = 0;
    double tau4 = 0;
    std::map<std::string, double> per_cut;  // keyed by the retained-side letters
};

// 2(1 - tr(rho_cut^2)) where rho_cut keeps `cut`. Purity via the squared
// Frobenius norm; no eigendecomposition.
inline double bipartite_tangle(const PureState& psi, const std::set<int>& cut) {
    const int n = psi.n_qubits;
    if (cut.empty() || int(cut.size()) >= n)
        throw std::invalid_argument("bipartite_tangle: need a nonempty proper cut");
    std::set<int> lost;
    for (int q = 1; q <= n; ++q)
        if (!cut.count(q)) lost.insert(q);
    const DensityMatrix red = partial_trace(DensityMatrix::from_pure(psi), lost);
    return 2.0 * (1.0 - red.entries.squaredNorm());
}

inline double four_tangle(const PureState& psi) {
    if (psi.n_qubits != 4) throw std::invalid_argument("four_tangle: need 4 qubits");
    // sigma_y^{x4} |psi*>, conjugation in the computational basis
    const Mat sy = pauli(1);
    Mat op = kron(kron(sy, sy), kron(sy, sy));
    const Vec target = op * psi.amplitudes.conjugate();
    const cx overlap = psi.amplitudes.adjoint() * target;
    return std::norm(overlap);
}

inline TangleSummary tau_aggregates(const PureState& psi) {
    if (psi.n_qubits != 4) throw std::invalid_argument("tau_aggregates: need 4 qubits");
    TangleSummary out;
    static const char* kLetters = "ABCD";

    double acc1 = 0;
    for (int q = 1; q <= 4; ++q) {
        const double t = bipartite_tangle(psi, {q});
        out.per_cut[std::string(1, kLetters[q - 1])] = t;
        acc1 += t;
    }
    out.tau1 = acc1 / 4.0;

    const std::pair<std::set<int>, std::string> twos[] = {
        {{1, 2}, "AB"}, {{1, 3}, "AC"}, {{1, 4}, "AD"}};
    double acc2 = 0;
    for (const auto& [cut, label] : twos) {
        const double t = bipartite_tangle(psi, cut);
        out.per_cut[label] = t;
        acc2 += t;
    }
    out.tau2 = acc2 / 3.0;
    out.tau4 = four_tangle(psi);
    return out;
}

}  // namespace corrsist
