// Parser for the CLI state grammar:
//   ghz:4  w:5  cluster4  dicke4  taumin:x0,x1,x2,x3  genA:re+imj,...
//   mclass:p0,p1,p2,p3;t0,t1,t2,t3  wmix:p  wmix:p;filter=eps
// Coordinate vectors are normalized after parsing (text input cannot be exact);
// a vector further than 1e-6 from unit norm is rejected.
#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "corrsist/families.hpp"
#include "corrsist/qstate.hpp"

namespace corrsist {

struct ParsedState {
    std::string spec;
    DensityMatrix rho;
    std::optional<PureState> pure;
    std::optional<TauMinCoords> taumin;
    std::optional<double> filter_success;  // set for wmix:p;filter=eps
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_real(const std::string& s) {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad number: " + s);
    return v;
}

// "a+bj", "a-bj", "a", "bj" with scientific notation allowed
inline cx parse_complex(std::string s) {
    std::erase(s, ' ');
    if (s.empty()) throw std::invalid_argument("empty complex literal");
    if (s.back() != 'j' && s.back() != 'J') return cx(parse_real(s), 0.0);
    s.pop_back();
    // split at the last +/- that is not an exponent sign and not leading
    size_t cut = std::string::npos;
    for (size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            cut = i;
            break;
        }
    }
    if (cut == std::string::npos) {
        if (s.empty() || s == "+" || s == "-") s += "1";
        return cx(0.0, parse_real(s));
    }
    std::string im = s.substr(cut);
    if (im == "+" || im == "-") im += "1";
    return cx(parse_real(s.substr(0, cut)), parse_real(im));
}

template <typename V>
inline void renormalize(V& v, const char* what) {
    const double n = std::sqrt(std::abs(v.squaredNorm()));
    if (std::abs(n - 1.0) > 1e-6)
        throw std::invalid_argument(std::string(what) + ": coordinates not normalized");
    v /= n;
}

}  // namespace detail

inline ParsedState parse_state_spec(const std::string& spec) {
    using detail::parse_real;
    using detail::split;
    const auto head = spec.substr(0, spec.find(':'));
    const std::string rest =
        spec.find(':') == std::string::npos ? "" : spec.substr(spec.find(':') + 1);

    auto from_pure = [&](PureState psi) {
        ParsedState out{spec, DensityMatrix::from_pure(psi), std::move(psi), {}, {}};
        return out;
    };

    if (head == "ghz" || head == "w") {
        const int n = std::stoi(rest);
        if (n < 2 || n > 6) throw std::invalid_argument("state spec: n must be in 2..6");
        return from_pure(named_state(head == "ghz" ? "GHZ" : "W", n));
    }
    if (spec == "cluster4") return from_pure(named_state("cluster4", 4));
    if (spec == "dicke4") {
        auto out = from_pure(named_state("dicke4", 4));
        out.taumin = TauMinCoords::dicke();
        return out;
    }
    if (head == "taumin") {
        const auto parts = split(rest, ',');
        if (parts.size() != 4) throw std::invalid_argument("taumin needs 4 coordinates");
        Eigen::Vector4d x;
        for (int j = 0; j < 4; ++j) x[j] = parse_real(parts[size_t(j)]);
        detail::renormalize(x, "taumin");
        const TauMinCoords c(x);
        auto out = from_pure(tau_min_state(c));
        out.taumin = c;
        return out;
    }
    if (head == "genA") {
        const auto parts = split(rest, ',');
        if (parts.size() != 4) throw std::invalid_argument("genA needs 4 coordinates");
        Eigen::Vector4cd z;
        for (int j = 0; j < 4; ++j) z[j] = detail::parse_complex(parts[size_t(j)]);
        detail::renormalize(z, "genA");
        return from_pure(generic_a_state(GenericACoords(z)));
    }
    if (head == "mclass") {
        const auto halves = split(rest, ';');
        if (halves.size() != 2) throw std::invalid_argument("mclass needs p...;t...");
        const auto ps = split(halves[0], ',');
        const auto ts = split(halves[1], ',');
        if (ps.size() != 4 || ts.size() != 4)
            throw std::invalid_argument("mclass needs 4 weights and 4 phases");
        Eigen::Vector4d p, th;
        for (int j = 0; j < 4; ++j) {
            p[j] = parse_real(ps[size_t(j)]);
            th[j] = parse_real(ts[size_t(j)]);
        }
        if (p.minCoeff() < 0) throw std::invalid_argument("mclass: negative weight");
        if (std::abs(p.sum() - 1.0) > 1e-6)
            throw std::invalid_argument("mclass: weights must sum to 1");
        p /= p.sum();
        return from_pure(m_class_state(MClassCoords(p, th)));
    }
    if (head == "wmix") {
        const auto halves = split(rest, ';');
        const double p = parse_real(halves[0]);
        DensityMatrix rho = w_loss_mixture(p);
        ParsedState out{spec, rho, {}, {}, {}};
        if (halves.size() == 2) {
            if (halves[1].rfind("filter=", 0) != 0)
                throw std::invalid_argument("wmix: expected filter=<eps>");
            const double eps = parse_real(halves[1].substr(7));
            if (eps <= 0 || eps > 1) throw std::invalid_argument("wmix: eps in (0,1]");
            auto [filtered, succ] = apply_filter(rho, LocalFilter::uniform_eps(3, eps));
            out.rho = filtered;
            out.filter_success = succ;
        } else if (halves.size() > 2) {
            throw std::invalid_argument("wmix: too many ';' fields");
        }
        return out;
    }
    throw std::invalid_argument("unknown state spec: " + spec);
}

}  // namespace corrsist
