// corrsist: persistency-of-correlations toolkit CLI.
//
// Subcommands: state show, tangle, detect, bell max|member, steer [genuine],
// persistency, scan. Exit codes: 0 success, 2 invalid input, 3 infeasible or
// annihilated state. CORRSIST_THREADS caps the worker pool.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "corrsist/bell.hpp"
#include "corrsist/entdetect.hpp"
#include "corrsist/families.hpp"
#include "corrsist/persistency.hpp"
#include "corrsist/scan.hpp"
#include "corrsist/statespec.hpp"
#include "corrsist/steering.hpp"
#include "corrsist/tangles.hpp"

using json = nlohmann::json;
using namespace corrsist;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 1;
    bool json_out = false;
    std::string out_path;
};

void emit(const GlobalOpts& g, const json& j, const std::string& text) {
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!g.out_path.empty()) {
        file.open(g.out_path);
        if (!file) throw std::invalid_argument("cannot open output file: " + g.out_path);
        os = &file;
    }
    if (g.json_out)
        *os << j.dump(2) << "\n";
    else
        *os << text;
}

MeasurementBattery load_battery(const std::string& path, int parties) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open battery file: " + path);
    std::map<int, std::map<int, Eigen::Vector3d>> raw;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string label;
        double nx, ny, nz;
        if (!(ls >> label)) continue;
        if (label[0] == '#') continue;
        if (!(ls >> nx >> ny >> nz))
            throw std::invalid_argument("battery file: bad line: " + line);
        if (label.size() < 2 || label[0] < 'A' || label[0] > 'Z')
            throw std::invalid_argument("battery file: bad label: " + label);
        raw[label[0] - 'A'][std::stoi(label.substr(1))] = Eigen::Vector3d(nx, ny, nz);
    }
    MeasurementBattery batt;
    for (int p = 0; p < parties; ++p) {
        auto it = raw.find(p);
        if (it == raw.end())
            throw std::invalid_argument("battery file: missing party " +
                                        std::string(1, char('A' + p)));
        std::vector<QubitObservable> obs;
        for (int s = 0; s < int(it->second.size()); ++s) {
            auto jt = it->second.find(s);
            if (jt == it->second.end())
                throw std::invalid_argument("battery file: settings must be 0..k");
            obs.emplace_back(Eigen::Vector3d(jt->second.normalized()));
        }
        batt.settings.push_back(std::move(obs));
    }
    return batt;
}

json battery_json(const MeasurementBattery& b) {
    json out = json::array();
    for (const auto& party : b.settings) {
        json ps = json::array();
        for (const auto& o : party) ps.push_back({o.bloch[0], o.bloch[1], o.bloch[2]});
        out.push_back(ps);
    }
    return out;
}

BellInequality resolve_inequality(const std::string& name) {
    if (name == "chsh") return builtin_chsh();
    if (name == "facet4") return builtin_facet4();
    if (name == "b16") return builtin_b16();
    std::ifstream in(name);
    if (!in) throw std::invalid_argument("unknown inequality and no such file: " + name);
    return load_inequality(in, name);
}

json report_json(const PersistencyReport& rep) {
    json j;
    j["kind"] = kind_name(rep.kind);
    j["state"] = rep.state_label;
    j["lower"] = rep.lower;
    if (rep.upper)
        j["upper"] = *rep.upper;
    else if (rep.uncertified_at)
        j["upper"] = "uncertified at " + std::to_string(*rep.uncertified_at);
    else
        j["upper"] = "uncertified";
    json wit;
    for (const auto& [k, ws] : rep.witness_per_k) {
        json arr = json::array();
        for (const auto& w : ws) {
            arr.push_back({{"lost", w.lost},
                           {"verdict", verdict_name(w.outcome.verdict)},
                           {"evidence", w.outcome.evidence}});
        }
        wit[std::to_string(k)] = arr;
    }
    j["witness_per_k"] = wit;
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"persistency of genuine correlations under particle loss"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--seed", g.seed, "master RNG seed");
    app.add_flag("--json", g.json_out, "emit JSON instead of text");
    app.add_option("--out", g.out_path, "write output to a file");

    std::string state_spec, property, ineq_name = "facet4", model = "local";
    std::string battery_path, criterion;
    int restarts = 64, batteries = 100, grid = 101;
    bool both_signs = false;
    std::vector<double> range{-1.0, 1.0};

    auto* state_cmd = app.add_subcommand("state", "state utilities");
    auto* show = state_cmd->add_subcommand("show", "print a state");
    show->add_option("--state", state_spec, "state spec")->required();

    auto* tangle_cmd = app.add_subcommand("tangle", "tangles of a 4-qubit pure state");
    tangle_cmd->add_option("--state", state_spec)->required();

    auto* detect_cmd = app.add_subcommand("detect", "entanglement / genuine entanglement");
    detect_cmd->add_option("--state", state_spec)->required();
    detect_cmd->add_option("--property", property, "e or ge")->required();

    auto* bell_cmd = app.add_subcommand("bell", "Bell functionals");
    auto* bell_max = bell_cmd->add_subcommand("max", "see-saw maximization");
    bell_max->add_option("--ineq", ineq_name, "facet4|b16|chsh|<file>");
    bell_max->add_option("--state", state_spec)->required();
    bell_max->add_option("--restarts", restarts);
    auto* bell_member = bell_cmd->add_subcommand("member", "LP membership");
    bell_member->add_option("--model", model, "local|ns2");
    bell_member->add_option("--state", state_spec)->required();
    bell_member->add_option("--battery", battery_path, "battery file")->required();

    auto* steer_cmd = app.add_subcommand("steer", "two-qubit steering detection");
    steer_cmd->add_option("--state", state_spec);
    steer_cmd->add_option("--criterion", criterion, "registry criterion name");
    auto* steer_gen = steer_cmd->add_subcommand("genuine", "3-setting genuine steering");
    steer_gen->add_option("--state", state_spec)->required();
    steer_gen->add_option("--restarts", restarts);

    auto* pers_cmd = app.add_subcommand("persistency", "certified persistency bounds");
    pers_cmd->add_option("--state", state_spec)->required();
    pers_cmd->add_option("--property", property, "e|ge|s|gs|nl|gnl|hnl|hgnl")->required();
    pers_cmd->add_option("--batteries", batteries);
    pers_cmd->add_option("--restarts", restarts);

    auto* scan_cmd = app.add_subcommand("scan", "tau_min parameter-space scan (CSV)");
    scan_cmd->add_option("--grid", grid, "points per axis");
    scan_cmd->add_option("--range", range, "axis range lo hi")->expected(2);
    scan_cmd->add_flag("--both-signs", both_signs, "also emit the x3 < 0 sheet");

    // let --seed/--json/--out appear after the subcommand name
    for (CLI::App* sub : {state_cmd, show, tangle_cmd, detect_cmd, bell_cmd, bell_max,
                          bell_member, steer_cmd, steer_gen, pers_cmd, scan_cmd})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (show->parsed()) {
        const auto st = parse_state_spec(state_spec);
        json j;
        j["spec"] = state_spec;
        j["n_qubits"] = st.rho.n_qubits;
        j["purity"] = st.rho.purity();
        if (st.filter_success) j["filter_success"] = *st.filter_success;
        std::ostringstream text;
        text << "state " << state_spec << ": " << st.rho.n_qubits
             << " qubits, purity " << st.rho.purity() << "\n";
        if (st.pure) {
            json amps = json::array();
            const int n = st.pure->n_qubits;
            for (Eigen::Index i = 0; i < st.pure->amplitudes.size(); ++i) {
                const cx a = st.pure->amplitudes[i];
                if (std::abs(a) < 1e-12) continue;
                std::string bits;
                for (int q = 1; q <= n; ++q) bits += char('0' + qubit_bit(n, q, i));
                amps.push_back({{"ket", bits}, {"re", a.real()}, {"im", a.imag()}});
                text << "  |" << bits << ">  " << a.real() << (a.imag() < 0 ? " - " : " + ")
                     << std::abs(a.imag()) << "i\n";
            }
            j["amplitudes"] = amps;
        }
        if (st.filter_success) text << "  filter success probability " << *st.filter_success
                                    << "\n";
        emit(g, j, text.str());
        return 0;
    }
    if (tangle_cmd->parsed()) {
        const auto st = parse_state_spec(state_spec);
        if (!st.pure || st.pure->n_qubits != 4)
            throw std::invalid_argument("tangle requires a 4-qubit pure state spec");
        const auto tg = tau_aggregates(*st.pure);
        json j{{"tau1", tg.tau1}, {"tau2", tg.tau2}, {"tau4", tg.tau4}};
        for (const auto& [cut, v] : tg.per_cut) j["per_cut"][cut] = v;
        std::ostringstream text;
        text << "tau1 " << tg.tau1 << "\ntau2 " << tg.tau2 << "\ntau4 " << tg.tau4 << "\n";
        for (const auto& [cut, v] : tg.per_cut) text << "  cut " << cut << ": " << v << "\n";
        emit(g, j, text.str());
        return 0;
    }
    if (detect_cmd->parsed()) {
        const auto st = parse_state_spec(state_spec);
        const bool genuine = property == "ge" || property == "GE";
        if (!genuine && property != "e" && property != "E")
            throw std::invalid_argument("detect --property must be e or ge");
        json j;
        std::ostringstream text;
        if (st.rho.n_qubits == 3) {
            const auto out = genuine ? detect_ge_3q(st.rho) : detect_entanglement_3q(st.rho);
            j = {{"state", state_spec},
                 {"property", genuine ? "ge" : "e"},
                 {"verdict", verdict_name(out.verdict)},
                 {"evidence", out.evidence}};
            text << verdict_name(out.verdict) << ": " << out.evidence << "\n";
        } else if (st.rho.n_qubits == 2) {
            const auto out = detect_entanglement_2q(st.rho);
            j = {{"state", state_spec},
                 {"property", "e"},
                 {"verdict", verdict_name(out.verdict)},
                 {"evidence", out.evidence}};
            text << verdict_name(out.verdict) << ": " << out.evidence << "\n";
        } else if (st.taumin) {
            const auto s = s_values(*st.taumin);
            const auto mp = cond_max_persistency(*st.taumin);
            j = {{"state", state_spec},
                 {"property", genuine ? "ge" : "e"},
                 {"cond_persist_ge", cond_persist_ge(*st.taumin)},
                 {"cond_persist_e", cond_persist_e(*st.taumin)},
                 {"s_values", {s.s1, s.s2, s.s3}},
                 {"pge_max", mp.pge_max},
                 {"pe_max", mp.pe_max}};
            text << "tau_min closed-form conditions:\n"
                 << "  cond1 (P_GE>1): " << (cond_persist_ge(*st.taumin) ? "yes" : "no")
                 << "\n  cond2 (P_E>1):  " << (cond_persist_e(*st.taumin) ? "yes" : "no")
                 << "\n  S = (" << s.s1 << ", " << s.s2 << ", " << s.s3 << ")"
                 << "\n  P_GE max: " << (mp.pge_max ? "yes" : "no")
                 << "\n  P_E max:  " << (mp.pe_max ? "yes" : "no") << "\n";
        } else {
            throw std::invalid_argument(
                "detect needs a 2- or 3-qubit state or tau_min coordinates");
        }
        emit(g, j, text.str());
        return 0;
    }
    if (bell_max->parsed()) {
        const auto st = parse_state_spec(state_spec);
        const auto ineq = resolve_inequality(ineq_name);
        const auto r = maximize_bell(ineq, st.rho, restarts, g.seed);
        json j{{"inequality", ineq.name},
               {"state", state_spec},
               {"value", r.value},
               {"bound", ineq.bound},
               {"violated", r.value > ineq.bound + 1e-9},
               {"battery", battery_json(r.battery)}};
        std::ostringstream text;
        text << ineq.name << " on " << state_spec << ": " << r.value << " (bound "
             << ineq.bound << (r.value > ineq.bound + 1e-9 ? ", violated" : ", respected")
             << ")\n";
        emit(g, j, text.str());
        return 0;
    }
    if (bell_member->parsed()) {
        const auto st = parse_state_spec(state_spec);
        const auto batt = load_battery(battery_path, st.rho.n_qubits);
        const auto b = behavior(st.rho, batt);
        Membership m;
        if (model == "local")
            m = local_membership(b);
        else if (model == "ns2")
            m = ns2_membership(b);
        else
            throw std::invalid_argument("bell member --model must be local or ns2");
        json j{{"state", state_spec},
               {"model", model},
               {"membership", m == Membership::Inside ? "Inside" : "Outside"}};
        emit(g, j,
             std::string(m == Membership::Inside ? "Inside" : "Outside") + " the " + model +
                 " polytope\n");
        return 0;
    }
    if (steer_gen->parsed()) {
        const auto st = parse_state_spec(state_spec);
        const auto r = maximize_genuine_steering(st.rho, restarts, g.seed);
        json settings = json::array();
        for (const auto* batt : {&r.settings.a, &r.settings.b, &r.settings.c}) {
            json ps = json::array();
            for (const auto& o : *batt) ps.push_back({o.bloch[0], o.bloch[1], o.bloch[2]});
            settings.push_back(ps);
        }
        json j{{"state", state_spec},
               {"value", r.value},
               {"bound", 3.0},
               {"detected", r.value > 3 + 1e-9},
               {"settings", settings}};
        std::ostringstream text;
        text << "genuine steering value " << r.value << " (bound 3"
             << (r.value > 3 + 1e-9 ? ", violated" : ", respected") << ")\n";
        emit(g, j, text.str());
        return 0;
    }
    if (steer_cmd->parsed()) {
        if (state_spec.empty()) throw std::invalid_argument("steer requires --state");
        const auto st = parse_state_spec(state_spec);
        if (st.rho.n_qubits != 2)
            throw std::invalid_argument("steer works on 2-qubit states; use steer genuine "
                                        "for 3 qubits");
        const auto v = detect_steering_2q(st.rho, criterion);
        json j{{"state", state_spec},
               {"criterion", v.criterion},
               {"detected", v.detected},
               {"margin", v.value}};
        std::ostringstream text;
        text << (v.detected ? "Detected" : "Undetected") << " (criterion " << v.criterion
             << ", margin " << v.value << ")\n";
        emit(g, j, text.str());
        return 0;
    }
    if (pers_cmd->parsed()) {
        const auto st = parse_state_spec(state_spec);
        PersistencyOptions opt;
        opt.batteries = batteries;
        opt.restarts = restarts;
        opt.seed = g.seed;
        const auto rep =
            persistency_bounds(st.rho, kind_from_string(property), opt, state_spec);
        const json j = report_json(rep);
        std::ostringstream text;
        text << "P_" << kind_name(rep.kind) << "(" << state_spec << "): lower " << rep.lower;
        if (rep.upper)
            text << ", upper " << *rep.upper;
        else if (rep.uncertified_at)
            text << ", upper uncertified at k = " << *rep.uncertified_at;
        text << "\n";
        for (const auto& [k, ws] : rep.witness_per_k) {
            text << "  k = " << k << ":\n";
            for (const auto& w : ws) {
                text << "    lost {";
                for (size_t i = 0; i < w.lost.size(); ++i)
                    text << (i ? "," : "") << w.lost[i];
                text << "}: " << verdict_name(w.outcome.verdict) << " — "
                     << w.outcome.evidence << "\n";
            }
        }
        emit(g, j, text.str());
        return 0;
    }
    if (scan_cmd->parsed()) {
        const auto rows = scan_tau_min(grid, range[0], range[1], both_signs);
        std::ostream* os = &std::cout;
        std::ofstream file;
        if (!g.out_path.empty()) {
            file.open(g.out_path);
            if (!file) throw std::invalid_argument("cannot open output file: " + g.out_path);
            os = &file;
        }
        write_scan_csv(*os, rows);
        return 0;
    }
    throw std::invalid_argument("no subcommand selected");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const corrsist::infeasible_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
