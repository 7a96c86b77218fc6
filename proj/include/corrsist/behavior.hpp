// Conditional probability tables p(a|x) for multi-party two-outcome scenarios,
// plus the correlator algebra Bell functionals are written in. Outcome bit 0
// maps to +1 and bit 1 to -1.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace corrsist {

struct Scenario {
    int parties = 0;
    std::vector<int> settings;  // per party; outcomes are binary throughout

    int joint_settings() const {
        int m = 1;
        for (int s : settings) m *= s;
        return m;
    }
    // mixed-radix unpack, party 0 most significant
    std::vector<int> unpack_setting(int xi) const {
        std::vector<int> xs(parties);
        for (int p = parties - 1; p >= 0; --p) {
            xs[p] = xi % settings[p];
            xi /= settings[p];
        }
        return xs;
    }
    int pack_setting(const std::vector<int>& xs) const {
        int xi = 0;
        for (int p = 0; p < parties; ++p) xi = xi * settings[p] + xs[p];
        return xi;
    }
    bool operator==(const Scenario& o) const {
        return parties == o.parties && settings == o.settings;
    }
};

// A correlator label is a set of (party, setting) pairs, parties strictly
// increasing; e.g. {(0,1),(2,0)} prints as "A1C0".
using CorrelatorLabel = std::vector<std::pair<int, int>>;

inline std::string label_to_string(const CorrelatorLabel& lab) {
    std::string out;
    for (auto [p, s] : lab) {
        out += char('A' + p);
        out += std::to_string(s);
    }
    return out;
}

inline CorrelatorLabel label_from_string(const std::string& str) {
    CorrelatorLabel lab;
    size_t i = 0;
    while (i < str.size()) {
        if (str[i] < 'A' || str[i] > 'Z')
            throw std::invalid_argument("bad correlator label: " + str);
        const int party = str[i] - 'A';
        ++i;
        size_t j = i;
        while (j < str.size() && std::isdigit(static_cast<unsigned char>(str[j]))) ++j;
        if (j == i) throw std::invalid_argument("label missing setting index: " + str);
        lab.emplace_back(party, std::stoi(str.substr(i, j - i)));
        i = j;
    }
    for (size_t k = 1; k < lab.size(); ++k)
        if (lab[k].first <= lab[k - 1].first)
            throw std::invalid_argument("label parties must strictly increase: " + str);
    return lab;
}

struct Behavior {
    Scenario scenario;
    // table[(joint setting)*(2^parties) + joint outcome]; outcome bits party 0 first
    std::vector<double> table;

    Behavior() = default;
    explicit Behavior(Scenario sc)
        : scenario(std::move(sc)),
          table(size_t(scenario.joint_settings()) << scenario.parties, 0.0) {}

    double prob(int joint_setting, int joint_outcome) const {
        return table[(size_t(joint_setting) << scenario.parties) + joint_outcome];
    }
    double& prob(int joint_setting, int joint_outcome) {
        return table[(size_t(joint_setting) << scenario.parties) + joint_outcome];
    }

    // <product of outcomes over the labelled parties>, remaining parties summed out
    // (their settings put at 0; well-defined for non-signalling tables).
    double correlator(const CorrelatorLabel& lab) const {
        const int n = scenario.parties;
        std::vector<int> xs(n, 0);
        for (auto [p, s] : lab) {
            if (p < 0 || p >= n || s < 0 || s >= scenario.settings[p])
                throw std::invalid_argument("correlator label outside scenario: " +
                                            label_to_string(lab));
            xs[p] = s;
        }
        const int xi = scenario.pack_setting(xs);
        double acc = 0;
        for (int a = 0; a < (1 << n); ++a) {
            int sgn = 1;
            for (auto [p, s] : lab)
                if ((a >> (n - 1 - p)) & 1) sgn = -sgn;
            acc += sgn * prob(xi, a);
        }
        return acc;
    }

    double max_normalization_error() const {
        double worst = 0;
        for (int xi = 0; xi < scenario.joint_settings(); ++xi) {
            double tot = 0;
            for (int a = 0; a < (1 << scenario.parties); ++a) tot += prob(xi, a);
            worst = std::max(worst, std::abs(tot - 1.0));
        }
        return worst;
    }

    // Largest deviation of any party-deleted marginal under a change of the
    // deleted party's setting.
    double max_signalling() const {
        const int n = scenario.parties;
        double worst = 0;
        for (int p = 0; p < n; ++p) {
            Scenario rest;
            rest.parties = n - 1;
            for (int q = 0; q < n; ++q)
                if (q != p) rest.settings.push_back(scenario.settings[q]);
            for (int xr = 0; xr < rest.joint_settings(); ++xr) {
                const auto xo = rest.unpack_setting(xr);
                for (int ar = 0; ar < (1 << (n - 1)); ++ar) {
                    double ref = 0;
                    bool first = true;
                    for (int sp = 0; sp < scenario.settings[p]; ++sp) {
                        std::vector<int> xs(n);
                        int k = 0;
                        for (int q = 0; q < n; ++q) xs[q] = (q == p) ? sp : xo[k++];
                        const int xi = scenario.pack_setting(xs);
                        double m = 0;
                        for (int ap = 0; ap < 2; ++ap) {
                            int a = 0;
                            int kk = 0;
                            for (int q = 0; q < n; ++q) {
                                const int bit = (q == p) ? ap : ((ar >> (n - 2 - kk)) & 1);
                                if (q != p) ++kk;
                                a |= bit << (n - 1 - q);
                            }
                            m += prob(xi, a);
                        }
                        if (first) {
                            ref = m;
                            first = false;
                        } else {
                            worst = std::max(worst, std::abs(m - ref));
                        }
                    }
                }
            }
        }
        return worst;
    }
};

}  // namespace corrsist
