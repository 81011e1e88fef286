#include "nskd/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nskd/rng.hpp"

namespace nskd {

namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kCostEps = 1e-9;

// Full tableau with columns [vars | artificials | rhs | rhs_perturbed] and a
// maintained reduced-cost row. Pricing is Dantzig's rule. Degeneracy is
// handled by a deterministic Charnes-style perturbation: the ratio test runs
// on a seeded micro-perturbed rhs (ties almost surely never happen, so the
// method cannot stall or cycle), while the true rhs is pivoted alongside and
// read out at the end. The optimal basis of the perturbed problem is optimal
// for the original one: reduced costs do not depend on the rhs.
class Tableau {
public:
    explicit Tableau(const LpProblem& p) : n_(p.nvars), m_(static_cast<int>(p.rows.size())) {
        if (static_cast<int>(p.objective.size()) != n_ || p.rhs.size() != p.rows.size())
            throw std::invalid_argument("lp: inconsistent problem dimensions");
        cols_ = n_ + m_ + 2;
        t_.assign(static_cast<std::size_t>(m_ + 1) * static_cast<std::size_t>(cols_), 0.0);
        basis_.resize(static_cast<std::size_t>(m_));
        Rng rng(0x6c70736565645fULL);  // fixed: perturbation must be reproducible
        double scale = 1.0;
        for (double v : p.rhs) scale = std::max(scale, std::abs(v));
        for (int r = 0; r < m_; ++r) {
            if (static_cast<int>(p.rows[static_cast<std::size_t>(r)].size()) != n_)
                throw std::invalid_argument("lp: row length mismatch");
            const double sign = p.rhs[static_cast<std::size_t>(r)] < 0.0 ? -1.0 : 1.0;
            for (int c = 0; c < n_; ++c)
                at(r, c) = sign * p.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            at(r, n_ + r) = 1.0;
            const double b = sign * p.rhs[static_cast<std::size_t>(r)];
            at(r, cols_ - 2) = b;
            at(r, cols_ - 1) = b + 1e-7 * scale * (0.5 + rng.uniform());
            basis_[static_cast<std::size_t>(r)] = n_ + r;
        }
    }

    double& at(int r, int c) { return t_[static_cast<std::size_t>(r) * cols_ + static_cast<std::size_t>(c)]; }
    double at(int r, int c) const { return t_[static_cast<std::size_t>(r) * cols_ + static_cast<std::size_t>(c)]; }
    double rhs(int r) const { return at(r, cols_ - 2); }
    double prhs(int r) const { return at(r, cols_ - 1); }

    // Load reduced costs z_j - c_j for a maximization objective c (one entry
    // per structural/artificial column).
    void load_costs(const std::vector<double>& obj) {
        for (int c = 0; c < cols_; ++c) at(m_, c) = c < n_ + m_ ? -obj[static_cast<std::size_t>(c)] : 0.0;
        for (int r = 0; r < m_; ++r) {
            const double cb = obj[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])];
            if (cb == 0.0) continue;
            for (int c = 0; c < cols_; ++c) at(m_, c) += cb * at(r, c);
        }
    }

    void pivot(int r, int c) {
        const double pv = at(r, c);
        double* prow = &t_[static_cast<std::size_t>(r) * cols_];
        for (int j = 0; j < cols_; ++j) prow[j] /= pv;
        for (int i = 0; i <= m_; ++i) {
            if (i == r) continue;
            double* row = &t_[static_cast<std::size_t>(i) * cols_];
            const double f = row[c];
            if (f == 0.0) continue;
            for (int j = 0; j < cols_; ++j) row[j] -= f * prow[j];
            row[c] = 0.0;
        }
        basis_[static_cast<std::size_t>(r)] = c;
    }

    // Returns false on unboundedness. The leaving row minimizes the true
    // ratio; among rows tied at the minimum (the degenerate case), the
    // perturbed ratio decides, which reproduces the perturbed problem's
    // unique pivot inside every degenerate stall.
    bool iterate(int allowed_cols) {
        while (true) {
            int enter = -1;
            double best = -kCostEps;
            for (int c = 0; c < allowed_cols; ++c)
                if (at(m_, c) < best) {
                    best = at(m_, c);
                    enter = c;
                }
            if (enter < 0) return true;
            // rhs values sit at tiny negatives after degenerate pivots;
            // clamping the numerator keeps noise from producing huge
            // negative ratios over small pivot elements
            double min_ratio = std::numeric_limits<double>::infinity();
            for (int r = 0; r < m_; ++r) {
                const double a = at(r, enter);
                if (a > kPivotEps) min_ratio = std::min(min_ratio, std::max(0.0, rhs(r)) / a);
            }
            if (min_ratio == std::numeric_limits<double>::infinity()) return false;
            int leave = -1;
            double best_pr = std::numeric_limits<double>::infinity();
            for (int r = 0; r < m_; ++r) {
                const double a = at(r, enter);
                if (a <= kPivotEps) continue;
                if (std::max(0.0, rhs(r)) / a > min_ratio + 1e-9) continue;
                const double pr = std::max(0.0, prhs(r)) / a;
                if (pr < best_pr ||
                    (pr == best_pr && leave >= 0 &&
                     basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
                    best_pr = pr;
                    leave = r;
                }
            }
            pivot(leave, enter);
        }
    }

    int n_, m_, cols_;
    std::vector<double> t_;
    std::vector<int> basis_;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
    Tableau t(problem);
    const int n = t.n_, m = t.m_;
    LpSolution sol;

    // Phase 1: maximize -sum(artificials).
    std::vector<double> phase1(static_cast<std::size_t>(n + m), 0.0);
    for (int c = n; c < n + m; ++c) phase1[static_cast<std::size_t>(c)] = -1.0;
    t.load_costs(phase1);
    t.iterate(n + m);
    double art_sum = 0.0;
    for (int r = 0; r < m; ++r)
        if (t.basis_[static_cast<std::size_t>(r)] >= n) art_sum += std::abs(t.rhs(r));
    if (art_sum > 1e-8) {
        sol.status = LpStatus::Infeasible;
        return sol;
    }
    // Move leftover artificials out of the basis where a structural pivot
    // exists (their true value is zero; rows with no pivot are redundant).
    for (int r = 0; r < m; ++r) {
        if (t.basis_[static_cast<std::size_t>(r)] >= n) {
            for (int c = 0; c < n; ++c) {
                if (std::abs(t.at(r, c)) > kPivotEps) {
                    t.pivot(r, c);
                    break;
                }
            }
        }
    }

    // Phase 2 over the structural variables.
    std::vector<double> phase2(static_cast<std::size_t>(n + m), 0.0);
    for (int c = 0; c < n; ++c)
        phase2[static_cast<std::size_t>(c)] = problem.objective[static_cast<std::size_t>(c)];
    t.load_costs(phase2);
    if (!t.iterate(n)) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    sol.x.assign(static_cast<std::size_t>(n), 0.0);
    for (int r = 0; r < m; ++r)
        if (t.basis_[static_cast<std::size_t>(r)] < n)
            sol.x[static_cast<std::size_t>(t.basis_[static_cast<std::size_t>(r)])] =
                std::max(0.0, t.rhs(r));
    sol.optimum = 0.0;
    for (int c = 0; c < n; ++c)
        sol.optimum += problem.objective[static_cast<std::size_t>(c)] * sol.x[static_cast<std::size_t>(c)];
    double resid = 0.0;
    for (std::size_t r = 0; r < problem.rows.size(); ++r) {
        double s = 0.0;
        for (int c = 0; c < n; ++c)
            s += problem.rows[r][static_cast<std::size_t>(c)] * sol.x[static_cast<std::size_t>(c)];
        resid = std::max(resid, std::abs(s - problem.rhs[r]));
    }
    sol.feasibility_residual = resid;
    sol.status = LpStatus::Optimal;
    return sol;
}

}  // namespace nskd
