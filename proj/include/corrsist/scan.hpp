// Parameter-space scans over tau_min coordinates (x0,x1,x2) with
// x3 = +sqrt(1 - x0^2 - x1^2 - x2^2), evaluating the closed-form persistency
// conditions and the facet maximum at every feasible grid point.
#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "corrsist/bell.hpp"
#include "corrsist/entdetect.hpp"
#include "corrsist/steering.hpp"
#include "corrsist/util.hpp"

namespace corrsist {

struct ScanRow {
    double x0 = 0, x1 = 0, x2 = 0, x3 = 0;
    bool cond1 = false, cond2 = false;
    double s1 = 0, s2 = 0, s3 = 0;
    bool pge_max = false, pe_max = false, ps_max = false;
    double facet4_min = 0;
};

namespace detail {

inline ScanRow scan_point(double x0, double x1, double x2, double x3) {
    Eigen::Vector4d x(x0, x1, x2, x3);
    x /= x.norm();
    const TauMinCoords c(x);
    ScanRow row;
    row.x0 = x0; row.x1 = x1; row.x2 = x2; row.x3 = x3;
    row.cond1 = cond_persist_ge(c);
    row.cond2 = cond_persist_e(c);
    const SValues s = s_values(c);
    row.s1 = s.s1; row.s2 = s.s2; row.s3 = s.s3;
    const auto mp = cond_max_persistency(c);
    row.pge_max = mp.pge_max;
    row.pe_max = mp.pe_max;
    const auto sb = appendix_b_conditions(c);
    row.ps_max = sb[0] > 0 && sb[1] > 0 && sb[2] > 0;
    row.facet4_min = std::min({facet4_closed_max(c, 1), facet4_closed_max(c, 3),
                               facet4_closed_max(c, 4)});
    return row;
}

}  // namespace detail

// Lexicographic grid over (x0,x1,x2) in [lo,hi]^3; points with
// 1 - x0^2 - x1^2 - x2^2 < -1e-12 are excluded. With both_signs, each feasible
// point with x3 > 0 is followed by its x3 < 0 mirror.
inline std::vector<ScanRow> scan_tau_min(int grid, double lo = -1.0, double hi = 1.0,
                                         bool both_signs = false) {
    if (grid < 2) throw std::invalid_argument("scan_tau_min: grid must be >= 2 per axis");
    if (lo < -1.0 || hi > 1.0 || lo >= hi)
        throw std::invalid_argument("scan_tau_min: range must be within [-1,1]");

    std::vector<double> axis(static_cast<size_t>(grid));
    for (int i = 0; i < grid; ++i) axis[size_t(i)] = lo + (hi - lo) * i / (grid - 1);

    struct Point { double x0, x1, x2, x3; };
    std::vector<Point> pts;
    for (double x0 : axis)
        for (double x1 : axis)
            for (double x2 : axis) {
                const double r = 1 - x0 * x0 - x1 * x1 - x2 * x2;
                if (r < -1e-12) continue;
                const double x3 = std::sqrt(std::max(r, 0.0));
                pts.push_back({x0, x1, x2, x3});
                if (both_signs && x3 > 0) pts.push_back({x0, x1, x2, -x3});
            }
    if (pts.empty()) throw infeasible_error("scan_tau_min: empty feasible region");

    std::vector<ScanRow> rows(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        rows[i] = detail::scan_point(pts[i].x0, pts[i].x1, pts[i].x2, pts[i].x3);
    });
    return rows;
}

// Frozen CSV format: booleans as 0/1, reals with 9 significant digits.
inline void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows) {
    out << "x0,x1,x2,x3,cond1,cond2,s1,s2,s3,pge_max,pe_max,ps_max,facet4_min\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf,
                      "%.9g,%.9g,%.9g,%.9g,%d,%d,%.9g,%.9g,%.9g,%d,%d,%d,%.9g\n",
                      r.x0, r.x1, r.x2, r.x3, r.cond1 ? 1 : 0, r.cond2 ? 1 : 0, r.s1, r.s2,
                      r.s3, r.pge_max ? 1 : 0, r.pe_max ? 1 : 0, r.ps_max ? 1 : 0,
                      r.facet4_min);
        out << buf;
    }
}

}  // namespace corrsist
