// Dense phase-1 simplex with Bland's rule, sized for the membership problems
// here (<= ~300 columns). Decides feasibility of  A x = b, x >= 0.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

namespace corrsist {

struct FeasibilityResult {
    bool feasible = false;
    double residual = 0;  // phase-1 objective at termination
};

inline FeasibilityResult lp_feasible(Eigen::MatrixXd A, Eigen::VectorXd b,
                                     double tol = 1e-9) {
    const int m = int(A.rows());
    const int n = int(A.cols());

    for (int i = 0; i < m; ++i) {
        if (b[i] < 0) {
            b[i] = -b[i];
            A.row(i) = -A.row(i);
        }
    }

    // tableau over [x | artificials], artificial basis
    Eigen::MatrixXd T(m + 1, n + m + 1);
    T.setZero();
    T.block(0, 0, m, n) = A;
    T.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
    T.block(0, n + m, m, 1) = b;
    // phase-1 objective row: minimize sum of artificials -> reduced costs
    for (int j = 0; j <= n + m; ++j) {
        double s = 0;
        for (int i = 0; i < m; ++i) s += T(i, j);
        T(m, j) = (j >= n && j < n + m) ? 0.0 : -s;
    }

    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;

    const double pivot_tol = 1e-11;
    const int max_iters = 50000;
    for (int iter = 0; iter < max_iters; ++iter) {
        // Bland: entering = lowest index with negative reduced cost
        int enter = -1;
        for (int j = 0; j < n + m; ++j) {
            if (T(m, j) < -pivot_tol) {
                enter = j;
                break;
            }
        }
        if (enter < 0) break;

        int leave = -1;
        double best = 0;
        for (int i = 0; i < m; ++i) {
            if (T(i, enter) > pivot_tol) {
                const double ratio = T(i, n + m) / T(i, enter);
                if (leave < 0 || ratio < best - 1e-15 ||
                    (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
        }
        if (leave < 0) break;  // unbounded cannot happen in phase 1

        const double piv = T(leave, enter);
        T.row(leave) /= piv;
        for (int i = 0; i <= m; ++i) {
            if (i == leave) continue;
            const double f = T(i, enter);
            if (f != 0.0) T.row(i) -= f * T.row(leave);
        }
        basis[leave] = enter;
    }

    double obj = 0;
    for (int i = 0; i < m; ++i)
        if (basis[i] >= n) obj += T(i, n + m);
    return {obj <= tol, obj};
}

}  // namespace corrsist
