// Bell functionals over correlators, see-saw maximization over qubit product
// observables, the built-in tripartite facet and B16 with its filtered-state
// formula, and LP membership oracles for the local and NS2 polytopes at two
// settings and two outcomes per site.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "corrsist/behavior.hpp"
#include "corrsist/families.hpp"
#include "corrsist/qstate.hpp"
#include "corrsist/simplex.hpp"
#include "corrsist/util.hpp"

namespace corrsist {

struct BellInequality {
    std::string name;
    Scenario scenario;
    std::vector<std::pair<CorrelatorLabel, double>> coefficients;
    double bound = 0;  // local bound for local facets, NS2 bound for B16

    void validate_labels() const {
        for (const auto& [lab, c] : coefficients) {
            (void)c;
            for (auto [p, s] : lab)
                if (p < 0 || p >= scenario.parties || s < 0 || s >= scenario.settings[p])
                    throw std::invalid_argument("inequality label outside scenario: " +
                                                label_to_string(lab));
        }
    }
    double coefficient_l1() const {
        double s = 0;
        for (const auto& [lab, c] : coefficients) {
            (void)lab;
            s += std::abs(c);
        }
        return s;
    }
};

inline double evaluate_bell(const BellInequality& ineq, const Behavior& b) {
    if (!(ineq.scenario == b.scenario))
        throw std::invalid_argument("evaluate_bell: scenario mismatch");
    double acc = 0;
    for (const auto& [lab, c] : ineq.coefficients) acc += c * b.correlator(lab);
    return acc;
}

// ---------------------------------------------------------------------------
// built-in inequalities

inline BellInequality builtin_chsh() {
    BellInequality q;
    q.name = "chsh";
    q.scenario = {2, {2, 2}};
    q.coefficients = {
        {{{0, 0}, {1, 0}}, 1}, {{{0, 0}, {1, 1}}, 1}, {{{0, 1}, {1, 0}}, 1},
        {{{0, 1}, {1, 1}}, -1}};
    q.bound = 2;
    return q;
}

// Tripartite local-polytope facet with local bound 2, the one tau_min
// reductions can violate. Shape: 2<A0> + chsh'(B,C) - <A0 x chsh'(B,C)>.
inline BellInequality builtin_facet4() {
    BellInequality q;
    q.name = "facet4";
    q.scenario = {3, {2, 2, 2}};
    q.coefficients = {
        {{{0, 0}}, 2},
        {{{1, 0}, {2, 0}}, 1},  {{{1, 0}, {2, 1}}, -1},
        {{{1, 1}, {2, 0}}, -1}, {{{1, 1}, {2, 1}}, -1},
        {{{0, 0}, {1, 0}, {2, 0}}, -1}, {{{0, 0}, {1, 0}, {2, 1}}, 1},
        {{{0, 0}, {1, 1}, {2, 0}}, 1},  {{{0, 0}, {1, 1}, {2, 1}}, 1}};
    q.bound = 2;
    return q;
}

// NS2-polytope facet with bound 4 reaching 4.72678 on |W3>. The printed source
// has two transcription slips (an A0B1 sign and a dropped A0B1C0 term); this
// form is the polytope facet recovered from the W3-optimal behavior and is
// validated by the vertex oracle below.
inline BellInequality builtin_b16() {
    BellInequality q;
    q.name = "b16";
    q.scenario = {3, {2, 2, 2}};
    q.coefficients = {
        {{{0, 0}, {1, 0}}, 1},  {{{0, 0}, {1, 1}}, -1},
        {{{0, 1}, {1, 0}}, 1},  {{{0, 1}, {1, 1}}, -1},
        {{{2, 0}}, -2},
        {{{0, 1}, {2, 1}}, 2},  {{{1, 1}, {2, 1}}, 2},
        {{{0, 0}, {1, 0}, {2, 0}}, 1}, {{{0, 0}, {1, 1}, {2, 0}}, -1},
        {{{0, 1}, {1, 0}, {2, 0}}, 1}, {{{0, 1}, {1, 1}, {2, 0}}, 1}};
    q.bound = 4;
    return q;
}

// text format: "scenario P S O" / "bound <real>" / "coef <LABEL> <real>" lines
inline BellInequality load_inequality(std::istream& in, const std::string& name = "file") {
    BellInequality q;
    q.name = name;
    std::string line;
    bool have_scenario = false, have_bound = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw) || kw.empty() || kw[0] == '#') continue;
        if (kw == "scenario") {
            int p = 0, s = 0, o = 0;
            if (!(ls >> p >> s >> o) || p < 1 || s < 1 || o != 2)
                throw std::invalid_argument("inequality file: bad scenario line");
            q.scenario = {p, std::vector<int>(size_t(p), s)};
            have_scenario = true;
        } else if (kw == "bound") {
            if (!(ls >> q.bound)) throw std::invalid_argument("inequality file: bad bound");
            have_bound = true;
        } else if (kw == "coef") {
            std::string lab;
            double c = 0;
            if (!(ls >> lab >> c)) throw std::invalid_argument("inequality file: bad coef");
            q.coefficients.emplace_back(label_from_string(lab), c);
        } else {
            throw std::invalid_argument("inequality file: unknown keyword " + kw);
        }
    }
    if (!have_scenario || !have_bound)
        throw std::invalid_argument("inequality file: missing scenario or bound");
    q.validate_labels();
    return q;
}

inline void save_inequality(std::ostream& out, const BellInequality& q) {
    out << "scenario " << q.scenario.parties << " " << q.scenario.settings[0] << " 2\n";
    out << "bound " << q.bound << "\n";
    for (const auto& [lab, c] : q.coefficients)
        out << "coef " << label_to_string(lab) << " " << c << "\n";
}

// ---------------------------------------------------------------------------
// see-saw maximization

struct SeesawResult {
    double value = 0;
    MeasurementBattery battery;
};

namespace detail {

// gradient of the functional w.r.t. party p's setting s observable: vector m,
// m_i = sum over labels containing (p,s) of coef * tr(rho sigma_i x others)
inline Eigen::Vector3d seesaw_gradient(const BellInequality& ineq, const DensityMatrix& rho,
                                       const std::vector<std::vector<Eigen::Vector3d>>& bloch,
                                       int p, int s) {
    const int n = rho.n_qubits;
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (const auto& [lab, c] : ineq.coefficients) {
        bool has = false;
        for (auto [pp, ss] : lab) has |= (pp == p && ss == s);
        if (!has) continue;
        for (int i = 0; i < 3; ++i) {
            std::vector<Mat> ops(size_t(n), Mat::Identity(2, 2));
            for (auto [pp, ss] : lab) {
                if (pp == p) {
                    ops[pp] = pauli(i);
                } else {
                    const auto& v = bloch[pp][ss];
                    ops[pp] = v[0] * pauli(0) + v[1] * pauli(1) + v[2] * pauli(2);
                }
            }
            g[i] += c * (rho.entries * kron_all(ops)).trace().real();
        }
    }
    return g;
}

inline double seesaw_value(const BellInequality& ineq, const DensityMatrix& rho,
                           const std::vector<std::vector<Eigen::Vector3d>>& bloch) {
    const int n = rho.n_qubits;
    double acc = 0;
    for (const auto& [lab, c] : ineq.coefficients) {
        std::vector<Mat> ops(size_t(n), Mat::Identity(2, 2));
        for (auto [pp, ss] : lab) {
            const auto& v = bloch[pp][ss];
            ops[pp] = v[0] * pauli(0) + v[1] * pauli(1) + v[2] * pauli(2);
        }
        acc += c * (rho.entries * kron_all(ops)).trace().real();
    }
    return acc;
}

inline std::pair<double, std::vector<std::vector<Eigen::Vector3d>>> seesaw_once(
    const BellInequality& ineq, const DensityMatrix& rho, Rng& rng) {
    const int n = rho.n_qubits;
    std::vector<std::vector<Eigen::Vector3d>> bloch(static_cast<size_t>(n));
    for (int p = 0; p < n; ++p)
        for (int s = 0; s < ineq.scenario.settings[p]; ++s) bloch[p].push_back(rng.unit3());

    double prev = -1e300;
    for (int sweep = 0; sweep < 500; ++sweep) {
        for (int p = 0; p < n; ++p) {
            for (int s = 0; s < ineq.scenario.settings[p]; ++s) {
                const Eigen::Vector3d g = seesaw_gradient(ineq, rho, bloch, p, s);
                if (g.norm() > 1e-14) bloch[p][s] = g.normalized();
            }
        }
        const double val = seesaw_value(ineq, rho, bloch);
        if (val - prev < 1e-10) {
            prev = val;
            break;
        }
        prev = val;
    }
    return {prev, bloch};
}

}  // namespace detail

// Alternating per-party ascent from `restarts` seeded random starts; the
// result is a lower bound on the quantum maximum and is deterministic in
// (restarts, seed) regardless of the worker count.
inline SeesawResult maximize_bell(const BellInequality& ineq, const DensityMatrix& rho,
                                  int restarts, std::uint64_t seed) {
    if (ineq.scenario.parties != rho.n_qubits)
        throw std::invalid_argument("maximize_bell: scenario parties != n_qubits");
    ineq.validate_labels();
    if (restarts < 1) restarts = 1;

    std::vector<double> vals(static_cast<size_t>(restarts));
    std::vector<std::vector<std::vector<Eigen::Vector3d>>> blochs(static_cast<size_t>(restarts));
    parallel_for(size_t(restarts), [&](std::size_t r) {
        Rng rng(Rng::derive(seed, r));
        auto [v, b] = detail::seesaw_once(ineq, rho, rng);
        vals[r] = v;
        blochs[r] = std::move(b);
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < vals.size(); ++r)
        if (vals[r] > vals[best]) best = r;

    SeesawResult out;
    out.value = vals[best];
    for (int p = 0; p < rho.n_qubits; ++p) {
        std::vector<QubitObservable> obs;
        for (const auto& v : blochs[best][size_t(p)]) obs.push_back(QubitObservable(v));
        out.battery.settings.push_back(std::move(obs));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Appendix-A closed forms for the facet maximum on tau_min reductions.
// The quantum maximum equals the two-largest-|T|-component CHSH expression of
// the reduced pair left untouched by the facet's marked party; the printed
// expression for the first reduction disagrees with the see-saw oracle off the
// x3=0 slice and the oracle-confirmed form (= the second expression) is used.
inline double facet4_closed_max(const TauMinCoords& c, int which) {
    const double x0 = c.x[0], x1 = c.x[1], x2 = c.x[2], x3 = c.x[3];
    auto maxroots = [](double p, double q, double r) {
        return std::max({std::sqrt(p * p + q * q), std::sqrt(p * p + r * r),
                         std::sqrt(q * q + r * r)});
    };
    switch (which) {
        case 1:
        case 2:
            return 2 * maxroots(1 - 2 * x0 * x0 - 2 * x2 * x2,
                                1 - 2 * x1 * x1 - 2 * x2 * x2,
                                1 - 2 * x0 * x0 - 2 * x1 * x1);
        case 3:
            return 4 * maxroots(x0 * x2 + x1 * x3, x1 * x2 + x0 * x3,
                                x0 * x1 + x2 * x3);
        case 4:
            return 4 * maxroots(x0 * x1 - x2 * x3, x0 * x2 - x1 * x3,
                                x1 * x2 - x0 * x3);
    }
    throw std::invalid_argument("facet4_closed_max: which must be 1..4");
}

// B16(p, eps) for the filtered W loss mixture, as printed.
inline double b16_filtered_formula(double p, double eps) {
    if (p <= 0) throw std::invalid_argument("b16_filtered_formula: requires p > 0");
    if (p > 1 || eps <= 0 || eps > 1)
        throw std::invalid_argument("b16_filtered_formula: p in (0,1], eps in (0,1]");
    return (p * 4.72678 + 2 * eps * eps * (p - 1)) / (eps * eps * (1 - p) + p);
}

// ---------------------------------------------------------------------------
// LP membership oracles

enum class Membership { Inside, Outside };

namespace detail {

inline std::vector<CorrelatorLabel> scenario_labels(const Scenario& sc) {
    std::vector<CorrelatorLabel> labels;
    for (int sub = 1; sub < (1 << sc.parties); ++sub) {
        std::vector<int> parties;
        for (int p = 0; p < sc.parties; ++p)
            if ((sub >> p) & 1) parties.push_back(p);
        std::vector<int> idx(parties.size(), 0);
        for (;;) {
            CorrelatorLabel lab;
            for (size_t k = 0; k < parties.size(); ++k)
                lab.emplace_back(parties[k], idx[k]);
            labels.push_back(lab);
            int k = int(idx.size()) - 1;
            while (k >= 0 && ++idx[size_t(k)] == sc.settings[size_t(parties[size_t(k)])]) {
                idx[size_t(k)] = 0;
                --k;
            }
            if (k < 0) break;
        }
    }
    return labels;
}

inline Eigen::VectorXd behavior_coords(const Behavior& b,
                                       const std::vector<CorrelatorLabel>& labels) {
    Eigen::VectorXd v(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) v[Eigen::Index(i)] = b.correlator(labels[i]);
    return v;
}

// deterministic-strategy correlator vectors for the local polytope
inline std::vector<Eigen::VectorXd> local_vertex_coords(
    const Scenario& sc, const std::vector<CorrelatorLabel>& labels) {
    // strategies per party: outcomes (+-1) per setting
    std::vector<int> radix(size_t(sc.parties));
    for (int p = 0; p < sc.parties; ++p) radix[size_t(p)] = 1 << sc.settings[size_t(p)];
    long total = 1;
    for (int r : radix) total *= r;

    std::vector<Eigen::VectorXd> verts;
    verts.reserve(size_t(total));
    for (long t = 0; t < total; ++t) {
        long rem = t;
        std::vector<std::vector<int>> strat(size_t(sc.parties));
        for (int p = 0; p < sc.parties; ++p) {
            const int code = int(rem % radix[size_t(p)]);
            rem /= radix[size_t(p)];
            for (int s = 0; s < sc.settings[size_t(p)]; ++s)
                strat[size_t(p)].push_back(((code >> s) & 1) ? -1 : 1);
        }
        Eigen::VectorXd v(labels.size());
        for (size_t i = 0; i < labels.size(); ++i) {
            int prod = 1;
            for (auto [p, s] : labels[i]) prod *= strat[size_t(p)][size_t(s)];
            v[Eigen::Index(i)] = prod;
        }
        verts.push_back(std::move(v));
    }
    return verts;
}

// bipartite no-signalling vertices at (2,2,2): 16 deterministic + 8 PR-type,
// as p(ab|xy) tables indexed [x][y][a][b]
inline const std::vector<std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2>>&
ns_pair_boxes() {
    static const auto boxes = [] {
        std::vector<std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2>> out;
        for (int code_a = 0; code_a < 4; ++code_a) {
            for (int code_b = 0; code_b < 4; ++code_b) {
                auto& t = out.emplace_back();
                for (auto& q : t)
                    for (auto& r : q)
                        for (auto& s : r) s = {0, 0};
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y)
                        t[size_t(x)][size_t(y)][size_t((code_a >> x) & 1)]
                         [size_t((code_b >> y) & 1)] = 1.0;
            }
        }
        for (int al = 0; al < 2; ++al)
            for (int be = 0; be < 2; ++be)
                for (int ga = 0; ga < 2; ++ga) {
                    auto& t = out.emplace_back();
                    for (auto& q : t)
                        for (auto& r : q)
                            for (auto& s : r) s = {0, 0};
                    for (int x = 0; x < 2; ++x)
                        for (int y = 0; y < 2; ++y)
                            for (int a = 0; a < 2; ++a) {
                                const int b = a ^ ((x & y) ^ (al & x) ^ (be & y) ^ ga);
                                t[size_t(x)][size_t(y)][size_t(a)][size_t(b)] = 0.5;
                            }
                }
        return out;
    }();
    return boxes;
}

}  // namespace detail

// NS2-polytope vertex behaviors for the (3,2,2) scenario: for each bipartition,
// (bipartite NS vertex) x (deterministic single-party vertex).
inline const std::vector<Behavior>& ns2_vertex_behaviors() {
    static const std::vector<Behavior> verts = [] {
        std::vector<Behavior> out;
        const Scenario sc{3, {2, 2, 2}};
        for (const auto& pair : detail::ns_pair_boxes()) {
            for (int code_c = 0; code_c < 4; ++code_c) {
                for (int part = 0; part < 3; ++part) {
                    Behavior b(sc);
                    for (int x = 0; x < 2; ++x)
                        for (int y = 0; y < 2; ++y)
                            for (int z = 0; z < 2; ++z)
                                for (int a = 0; a < 2; ++a)
                                    for (int bb = 0; bb < 2; ++bb)
                                        for (int cc = 0; cc < 2; ++cc) {
                                            double val = 0;
                                            if (part == 0) {  // AB | C
                                                val = pair[size_t(x)][size_t(y)][size_t(a)]
                                                          [size_t(bb)] *
                                                      (((code_c >> z) & 1) == cc ? 1.0 : 0.0);
                                            } else if (part == 1) {  // AC | B
                                                val = pair[size_t(x)][size_t(z)][size_t(a)]
                                                          [size_t(cc)] *
                                                      (((code_c >> y) & 1) == bb ? 1.0 : 0.0);
                                            } else {  // BC | A
                                                val = pair[size_t(y)][size_t(z)][size_t(bb)]
                                                          [size_t(cc)] *
                                                      (((code_c >> x) & 1) == a ? 1.0 : 0.0);
                                            }
                                            const int xi = sc.pack_setting({x, y, z});
                                            const int ai = (a << 2) | (bb << 1) | cc;
                                            b.prob(xi, ai) = val;
                                        }
                    out.push_back(std::move(b));
                }
            }
        }
        return out;
    }();
    return verts;
}

inline Membership local_membership(const Behavior& b) {
    const Scenario& sc = b.scenario;
    if (sc.parties > 3)
        throw std::invalid_argument("local_membership: scenario larger than 3 parties");
    for (int s : sc.settings)
        if (s > 2) throw std::invalid_argument("local_membership: more than 2 settings");
    const auto labels = detail::scenario_labels(sc);
    const auto verts = detail::local_vertex_coords(sc, labels);

    Eigen::MatrixXd A(labels.size() + 1, verts.size());
    for (size_t j = 0; j < verts.size(); ++j) {
        A.block(0, Eigen::Index(j), Eigen::Index(labels.size()), 1) = verts[j];
        A(Eigen::Index(labels.size()), Eigen::Index(j)) = 1.0;
    }
    Eigen::VectorXd rhs(labels.size() + 1);
    rhs.head(Eigen::Index(labels.size())) = detail::behavior_coords(b, labels);
    rhs[Eigen::Index(labels.size())] = 1.0;
    return lp_feasible(A, rhs).feasible ? Membership::Inside : Membership::Outside;
}

inline Membership ns2_membership(const Behavior& b) {
    const Scenario expect{3, {2, 2, 2}};
    if (!(b.scenario == expect))
        throw std::invalid_argument("ns2_membership: scenario must be (3,2,2)");
    const auto labels = detail::scenario_labels(b.scenario);
    const auto& verts = ns2_vertex_behaviors();

    Eigen::MatrixXd A(labels.size() + 1, verts.size());
    for (size_t j = 0; j < verts.size(); ++j) {
        A.block(0, Eigen::Index(j), Eigen::Index(labels.size()), 1) =
            detail::behavior_coords(verts[j], labels);
        A(Eigen::Index(labels.size()), Eigen::Index(j)) = 1.0;
    }
    Eigen::VectorXd rhs(labels.size() + 1);
    rhs.head(Eigen::Index(labels.size())) = detail::behavior_coords(b, labels);
    rhs[Eigen::Index(labels.size())] = 1.0;
    return lp_feasible(A, rhs).feasible ? Membership::Inside : Membership::Outside;
}

// max of a functional over the local deterministic vertices (oracle used by
// tests and to validate shipped inequalities)
inline double local_vertex_maximum(const BellInequality& ineq) {
    const auto labels = detail::scenario_labels(ineq.scenario);
    const auto verts = detail::local_vertex_coords(ineq.scenario, labels);
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(Eigen::Index(labels.size()));
    for (const auto& [lab, c] : ineq.coefficients)
        for (size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == lab) coef[Eigen::Index(i)] += c;
    double best = -1e300;
    for (const auto& v : verts) best = std::max(best, coef.dot(v));
    return best;
}

inline double ns2_vertex_maximum(const BellInequality& ineq) {
    double best = -1e300;
    for (const auto& v : ns2_vertex_behaviors()) best = std::max(best, evaluate_bell(ineq, v));
    return best;
}

}  // namespace corrsist
