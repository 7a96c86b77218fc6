// Acceptance suite: ten end-to-end criteria, one pass/fail line each.
// Exit status 0 iff every criterion passes.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "corrsist/bell.hpp"
#include "corrsist/entdetect.hpp"
#include "corrsist/families.hpp"
#include "corrsist/persistency.hpp"
#include "corrsist/scan.hpp"
#include "corrsist/statespec.hpp"
#include "corrsist/steering.hpp"
#include "corrsist/tangles.hpp"
#include "corrsist/util.hpp"
#include "support/oracles.hpp"

using namespace corrsist;

namespace {

int g_failures = 0;

class Criterion {
public:
    Criterion(int num, std::string title)
        : num_(num), title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}

    void check(bool ok, const std::string& detail) {
        if (!ok) {
            ok_ = false;
            if (!first_failure_.size()) first_failure_ = detail;
        }
    }
    void note(const std::string& text) { notes_ += (notes_.empty() ? "" : "; ") + text; }

    ~Criterion() {
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start_)
                                 .count();
        std::ostringstream line;
        line << (ok_ ? "[PASS]" : "[FAIL]") << " criterion " << num_ << ": " << title_;
        if (!notes_.empty()) line << " (" << notes_ << ")";
        if (!ok_) line << " -- " << first_failure_;
        line << " [" << elapsed << " ms]";
        std::cout << line.str() << std::endl;
        if (!ok_) ++g_failures;
    }

private:
    int num_;
    std::string title_;
    std::string notes_;
    std::string first_failure_;
    bool ok_ = true;
    std::chrono::steady_clock::time_point start_;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void criterion1() {
    Criterion c(1, "tangle identities on random class samples");
    Rng rng(1001);
    double worst_resid = 0, worst_t1 = 0, t2_lo = 10, t2_hi = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto tg = tau_aggregates(generic_a_state(oracles::random_generic_a(rng)));
        worst_resid = std::max(worst_resid, std::abs(tg.tau4 - (4 * tg.tau1 - 3 * tg.tau2)));
        worst_t1 = std::max(worst_t1, std::abs(tg.tau1 - 1));
        t2_lo = std::min(t2_lo, tg.tau2);
        t2_hi = std::max(t2_hi, tg.tau2);
    }
    c.check(worst_resid < 1e-9, "residual identity off by " + fmt(worst_resid));
    c.check(worst_t1 < 1e-9, "tau1 off by " + fmt(worst_t1));
    c.check(t2_lo >= 1 - 1e-9 && t2_hi <= 4.0 / 3 + 1e-9,
            "tau2 range [" + fmt(t2_lo) + "," + fmt(t2_hi) + "]");

    double worst_m = 0, worst_m4 = 0;
    int made = 0;
    while (made < 1000) {
        const auto mc = oracles::sample_mclass(rng);
        if (!mc) continue;
        ++made;
        const auto tg = tau_aggregates(m_class_state(*mc));
        worst_m = std::max(worst_m, std::abs(tg.tau2 - 4.0 / 3));
        worst_m4 = std::max(worst_m4, tg.tau4);
    }
    c.check(worst_m < 1e-9, "M-class tau2 off by " + fmt(worst_m));
    c.check(worst_m4 < 1e-12, "M-class tau4 up to " + fmt(worst_m4));

    double worst_tm = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto tg = tau_aggregates(tau_min_state(oracles::random_taumin(rng)));
        worst_tm = std::max(worst_tm, std::abs(tg.tau2 - 1));
    }
    c.check(worst_tm < 1e-9, "tau_min tau2 off by " + fmt(worst_tm));
    c.note("worst residual " + fmt(worst_resid));
}

void criterion2() {
    Criterion c(2, "convention lock: closed-form reductions equal partial traces");
    Rng rng(1002);
    double worst = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto coords = oracles::random_taumin(rng);
        const auto rho = DensityMatrix::from_pure(tau_min_state(coords));
        for (int which = 1; which <= 4; ++which) {
            const auto a = tau_min_reduced(coords, 1, which);
            const auto b = partial_trace(rho, tau_min_loss_set(1, which));
            worst = std::max(worst, (a.entries - b.entries).cwiseAbs().maxCoeff());
        }
        for (int which = 1; which <= 3; ++which) {
            const auto a = tau_min_reduced(coords, 2, which);
            const auto b = partial_trace(rho, tau_min_loss_set(2, which));
            worst = std::max(worst, (a.entries - b.entries).cwiseAbs().maxCoeff());
        }
    }
    c.check(worst < 1e-10, "worst entrywise deviation " + fmt(worst));
    c.note("worst deviation " + fmt(worst));
}

void criterion3() {
    Criterion c(3, "GHZ4 persistency collapses at the first loss with certificates");
    const auto rho = DensityMatrix::from_pure(named_state("GHZ", 4));
    PersistencyOptions opt;
    opt.batteries = 20;
    opt.restarts = 8;
    for (auto kind : {PropertyKind::E, PropertyKind::GE}) {
        const auto rep = persistency_bounds(rho, kind, opt, "ghz:4");
        c.check(rep.lower == 1, std::string(kind_name(kind)) + " lower != 1");
        c.check(rep.upper && *rep.upper == 1, std::string(kind_name(kind)) + " upper != 1");
        bool cert = false;
        for (const auto& w : rep.witness_per_k.at(1))
            cert |= w.outcome.verdict == Verdict::CertifiedAbsent;
        c.check(cert, "missing CertifiedAbsent certificate");
    }
}

void criterion4() {
    Criterion c(4, "Dicke state: condition 1, S_i = 1/3, engine P_GE = 3");
    const auto coords = TauMinCoords::dicke();
    c.check(cond_persist_ge(coords), "condition 1 fails on Dicke coordinates");
    const auto s = s_values(coords);
    c.check(std::abs(s.s1 - 1.0 / 3) < 1e-12 && std::abs(s.s2 - 1.0 / 3) < 1e-12 &&
                std::abs(s.s3 - 1.0 / 3) < 1e-12,
            "S values (" + fmt(s.s1) + "," + fmt(s.s2) + "," + fmt(s.s3) + ")");
    PersistencyOptions opt;
    opt.batteries = 20;
    opt.restarts = 8;
    const auto rep = persistency_bounds(DensityMatrix::from_pure(named_state("dicke4", 4)),
                                        PropertyKind::GE, opt, "dicke4");
    c.check(rep.lower >= 3, "P_GE lower bound " + std::to_string(rep.lower));
    c.note("P_GE lower " + std::to_string(rep.lower));
}

void criterion5() {
    Criterion c(5, "closed facet maxima match see-saw; no point violates in all reductions");
    Rng rng(1005);
    std::vector<TauMinCoords> coords;
    for (int t = 0; t < 100; ++t) coords.push_back(oracles::random_taumin(rng));
    std::vector<double> worst_per(coords.size(), 0.0);
    parallel_for(coords.size(), [&](std::size_t i) {
        for (int which = 1; which <= 4; ++which) {
            const double closed = facet4_closed_max(coords[i], which);
            const double seesaw =
                maximize_bell(builtin_facet4(), tau_min_reduced(coords[i], 1, which), 24,
                              Rng::derive(1005, i * 4 + std::uint64_t(which)))
                    .value;
            worst_per[i] = std::max(worst_per[i], std::abs(closed - seesaw));
        }
    });
    double worst = 0;
    for (double w : worst_per) worst = std::max(worst, w);
    c.check(worst < 1e-3, "closed-form vs see-saw deviation " + fmt(worst));

    const int n = 50;
    double grid_worst = -1e300;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double x0 = -1 + 2.0 * i / (n - 1);
                const double x1 = -1 + 2.0 * j / (n - 1);
                const double x2 = -1 + 2.0 * k / (n - 1);
                const double r = 1 - x0 * x0 - x1 * x1 - x2 * x2;
                if (r < -1e-12) continue;
                Eigen::Vector4d x(x0, x1, x2, std::sqrt(std::max(r, 0.0)));
                x /= x.norm();
                const TauMinCoords tc(x);
                grid_worst = std::max(grid_worst,
                                      std::min({facet4_closed_max(tc, 1),
                                                facet4_closed_max(tc, 3),
                                                facet4_closed_max(tc, 4)}));
            }
    c.check(grid_worst <= 2 + 1e-9, "grid min max " + fmt(grid_worst));
    c.note("see-saw deviation " + fmt(worst) + ", grid max-of-min " + fmt(grid_worst));
}

void criterion6() {
    Criterion c(6, "B16 chain: W3 maximum, filtered formula, small-eps violation");
    const auto w3 = DensityMatrix::from_pure(named_state("W", 3));
    const auto best = maximize_bell(builtin_b16(), w3, 48, 1006);
    c.check(std::abs(best.value - 4.72678) < 1e-3, "W3 see-saw " + fmt(best.value));

    auto eval_filtered = [&](double p, double eps) {
        auto [rho, succ] = apply_filter(w_loss_mixture(p), LocalFilter::uniform_eps(3, eps));
        (void)succ;
        return evaluate_bell(builtin_b16(), behavior(rho, best.battery));
    };
    double worst = 0;
    for (double p : {0.75, 0.3})
        for (double eps : {0.1, 0.01})
            worst = std::max(worst,
                             std::abs(eval_filtered(p, eps) - b16_filtered_formula(p, eps)));
    c.check(worst < 1e-3, "formula vs direct deviates by " + fmt(worst));

    const double tiny1 = eval_filtered(0.75, 1e-3);
    const double tiny2 = eval_filtered(0.3, 1e-3);
    c.check(tiny1 > 4.7 && tiny2 > 4.7,
            "filtered values " + fmt(tiny1) + ", " + fmt(tiny2));
    c.note("W3 max " + fmt(best.value) + ", filtered(3/4,1e-3) " + fmt(tiny1));
}

void criterion7() {
    Criterion c(7, "LP oracles: vertex bounds and NS2 membership");
    c.check(std::abs(local_vertex_maximum(builtin_chsh()) - 2.0) < 1e-12, "CHSH bound");
    c.check(std::abs(local_vertex_maximum(builtin_facet4()) - 2.0) < 1e-12, "facet4 bound");
    c.check(std::abs(ns2_vertex_maximum(builtin_b16()) - 4.0) < 1e-12, "B16 NS2 bound");

    const auto rho = w_loss_mixture(0.75);
    Rng rng(1007);
    int outside = 0;
    for (int t = 0; t < 100; ++t) {
        MeasurementBattery batt;
        for (int p = 0; p < 3; ++p)
            batt.settings.push_back({QubitObservable(rng.unit3()), QubitObservable(rng.unit3())});
        if (ns2_membership(behavior(rho, batt)) == Membership::Outside) ++outside;
    }
    c.check(outside == 0, std::to_string(outside) + " sampled behaviors left NS2");

    const auto w3 = DensityMatrix::from_pure(named_state("W", 3));
    const auto best = maximize_bell(builtin_b16(), w3, 32, 1007);
    c.check(ns2_membership(behavior(w3, best.battery)) == Membership::Outside,
            "W3 optimal behavior not outside NS2");
}

void criterion8() {
    Criterion c(8, "genuine steering: violation on the W loss mixture, lemma, bound case");
    const auto r = maximize_genuine_steering(w_loss_mixture(0.75), 48, 1008);
    c.check(r.value > 3, "optimizer value " + fmt(r.value));
    c.note("found value " + fmt(r.value));

    Rng rng(1008);
    double worst = 0;
    for (int t = 0; t < 10000; ++t) {
        const auto a = oracles::random_single_qubit(rng, (t % 2) == 0);
        const auto b = oracles::random_single_qubit(rng, (t % 3) == 0);
        const DensityMatrix prod(2, kron(a.entries, b.entries));
        worst = std::max(worst, std::abs(product_s3_value(oracles::random_triad(rng),
                                                          oracles::random_triad(rng), prod)));
    }
    c.check(worst <= 1 + 1e-9, "product |S3| reached " + fmt(worst));

    Vec phip = Vec::Zero(4);
    phip[0] = phip[3] = 1 / std::sqrt(2.0);
    Mat third = Mat::Zero(2, 2);
    third(0, 0) = 1;
    const DensityMatrix bound_state(3, kron(phip * phip.adjoint(), third));
    const GenuineSteeringSettings s{
        {QubitObservable::x(), QubitObservable::y(), QubitObservable::z()},
        {QubitObservable::x(), QubitObservable({0, -1, 0}), QubitObservable::z()},
        {QubitObservable::z(), QubitObservable::z(), QubitObservable::z()}};
    const double attained = genuine_steering_value(bound_state, s);
    c.check(std::abs(attained - 3.0) < 1e-12, "bound attainment " + fmt(attained));
}

void criterion9() {
    Criterion c(9, "101^3 scan completes with nonempty regions and frozen format");
    const auto rows = scan_tau_min(101);
    std::size_t pge = 0, pe = 0, ps = 0;
    for (const auto& r : rows) {
        pge += r.pge_max;
        pe += r.pe_max;
        ps += r.ps_max;
    }
    c.check(pge > 0, "pge_max region empty");
    c.check(pe > 0, "pe_max region empty");
    c.check(ps > 0, "ps_max region empty");

    const char* path = "acceptance_scan.csv";
    {
        std::ofstream out(path);
        write_scan_csv(out, rows);
    }
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    c.check(header == "x0,x1,x2,x3,cond1,cond2,s1,s2,s3,pge_max,pe_max,ps_max,facet4_min",
            "unexpected CSV header: " + header);
    std::size_t lines = 0;
    std::string tmp;
    while (std::getline(in, tmp)) ++lines;
    c.check(lines == rows.size(), "row count mismatch");
    std::remove(path);
    c.note(std::to_string(rows.size()) + " rows; pge/pe/ps sizes " + std::to_string(pge) +
           "/" + std::to_string(pe) + "/" + std::to_string(ps));
}

void criterion10() {
    Criterion c(10, "honest bounds: W4 genuine steering reported as an interval");
    PersistencyOptions opt;
    opt.batteries = 20;
    opt.restarts = 32;
    const auto rep = persistency_bounds(DensityMatrix::from_pure(named_state("W", 4)),
                                        PropertyKind::GS, opt, "w:4");
    c.check(rep.lower >= 2, "lower bound " + std::to_string(rep.lower));
    c.check(!rep.upper.has_value(), "upper unexpectedly certified");
    c.check(rep.uncertified_at.has_value() && *rep.uncertified_at == 2,
            "expected uncertified upper at k = 2");
    c.note("lower " + std::to_string(rep.lower) + ", uncertified at 2");
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    if (g_failures) {
        std::cout << g_failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all criteria passed" << std::endl;
    return 0;
}
