#pragma once

#include <vector>

namespace nskd {

/// max objective . v  subject to  rows . v = rhs, v >= 0.
struct LpProblem {
    int nvars = 0;
    std::vector<double> objective;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
};

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double optimum = 0.0;
    std::vector<double> x;
    double feasibility_residual = 0.0;  // max |rows.x - rhs| at the optimum
};

/// Dense two-phase simplex with Bland's anti-cycling rule. Sized for the
/// desk-scale problems here (a few hundred to ~1k variables); the returned
/// solution is certified by its feasibility residual.
LpSolution solve_lp(const LpProblem& problem);

}  // namespace nskd
