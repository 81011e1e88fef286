#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "nskd/eve.hpp"
#include "nskd/lp.hpp"
#include "nskd/quantum.hpp"

using namespace nskd;

namespace {

// Brute-force LP oracle: enumerate all basis subsets of the equality system,
// solve by Gaussian elimination, keep feasible vertices, return the best
// objective. Only for tiny instances.
double brute_force_lp(const LpProblem& p) {
    const int n = p.nvars;
    const int m = static_cast<int>(p.rows.size());
    double best = -1e300;
    std::vector<int> cols(static_cast<std::size_t>(m));
    // iterate over all m-subsets of columns
    for (int i = 0; i < m; ++i) cols[static_cast<std::size_t>(i)] = i;
    auto try_basis = [&](const std::vector<int>& basis) {
        std::vector<std::vector<double>> a(static_cast<std::size_t>(m),
                                           std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0));
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c)
                a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                    p.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(basis[static_cast<std::size_t>(c)])];
            a[static_cast<std::size_t>(r)][static_cast<std::size_t>(m)] = p.rhs[static_cast<std::size_t>(r)];
        }
        // Gaussian elimination with partial pivoting
        for (int c = 0; c < m; ++c) {
            int piv = -1;
            double bestp = 1e-9;
            for (int r = c; r < m; ++r)
                if (std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) > bestp) {
                    bestp = std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
                    piv = r;
                }
            if (piv < 0) return;  // singular basis
            std::swap(a[static_cast<std::size_t>(c)], a[static_cast<std::size_t>(piv)]);
            for (int r = 0; r < m; ++r) {
                if (r == c) continue;
                const double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] /
                                 a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
                for (int k = c; k <= m; ++k)
                    a[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] -=
                        f * a[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
            }
        }
        double obj = 0.0;
        for (int c = 0; c < m; ++c) {
            const double v = a[static_cast<std::size_t>(c)][static_cast<std::size_t>(m)] /
                             a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
            if (v < -1e-9) return;  // infeasible vertex
            obj += p.objective[static_cast<std::size_t>(basis[static_cast<std::size_t>(c)])] * v;
        }
        best = std::max(best, obj);
    };
    std::vector<int> basis;
    // recursive subset enumeration
    std::vector<int> stack;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(stack.size()) == m) {
            try_basis(stack);
            return;
        }
        for (int c = start; c < n; ++c) {
            stack.push_back(c);
            rec(c + 1);
            stack.pop_back();
        }
    };
    rec(0);
    return best;
}

}  // namespace

TEST_CASE("simplex solves textbook and degenerate problems") {
    LpProblem p;
    p.nvars = 2;
    p.objective = {1.0, 0.0};
    p.rows = {{1.0, 1.0}};
    p.rhs = {1.0};
    LpSolution s = solve_lp(p);
    CHECK(s.status == LpStatus::Optimal);
    CHECK(s.optimum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.feasibility_residual < 1e-12);

    // degenerate ties: multiple optima share the objective value
    LpProblem d;
    d.nvars = 4;
    d.objective = {1.0, 1.0, 0.0, 0.0};
    d.rows = {{1.0, 0.0, 1.0, 0.0}, {0.0, 1.0, 0.0, 1.0}, {1.0, 1.0, 1.0, 1.0}};
    d.rhs = {0.5, 0.5, 1.0};
    LpSolution ds = solve_lp(d);
    CHECK(ds.status == LpStatus::Optimal);
    CHECK(ds.optimum == doctest::Approx(1.0).epsilon(1e-10));

    // unbounded: maximize x with only x - y = 0
    LpProblem u;
    u.nvars = 2;
    u.objective = {1.0, 0.0};
    u.rows = {{1.0, -1.0}};
    u.rhs = {0.0};
    CHECK(solve_lp(u).status == LpStatus::Unbounded);

    // infeasible: x + y = -1 with x, y >= 0 (expressed via sign flip it
    // becomes -x - y = 1, still infeasible)
    LpProblem inf;
    inf.nvars = 2;
    inf.objective = {1.0, 1.0};
    inf.rows = {{-1.0, -1.0}};
    inf.rhs = {1.0};
    CHECK(solve_lp(inf).status == LpStatus::Infeasible);
}

TEST_CASE("simplex optimum matches brute-force vertex enumeration") {
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 4 + rng.uniform_int(5);  // up to 8 vars
        const int m = 2 + rng.uniform_int(2);  // 2..3 equalities
        LpProblem p;
        p.nvars = n;
        p.objective.resize(static_cast<std::size_t>(n));
        for (double& v : p.objective) v = rng.uniform() * 2.0 - 1.0;
        // guarantee feasibility: build rows as A, rhs = A * x0 with x0 >= 0
        std::vector<double> x0(static_cast<std::size_t>(n));
        for (double& v : x0) v = rng.uniform();
        for (int r = 0; r < m; ++r) {
            std::vector<double> row(static_cast<std::size_t>(n));
            for (double& v : row) v = rng.uniform();
            double rhs = 0.0;
            for (int c = 0; c < n; ++c) rhs += row[static_cast<std::size_t>(c)] * x0[static_cast<std::size_t>(c)];
            p.rows.push_back(std::move(row));
            p.rhs.push_back(rhs);
        }
        LpSolution s = solve_lp(p);
        REQUIRE(s.status == LpStatus::Optimal);
        const double oracle = brute_force_lp(p);
        CHECK(s.optimum == doctest::Approx(oracle).epsilon(1e-7));
        CHECK(s.feasibility_residual < 1e-9);
    }
}

TEST_CASE("max_guessing: PR squeeze, deterministic box, quantum boxes") {
    GuessResult pr = max_guessing(pr_analog(2, false), 0);
    CHECK(pr.bc == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pr.value == doctest::Approx(0.5).epsilon(1e-7));  // squeeze: value <= bc and >= mode = 1/2

    Box det = local_deterministic({0, 0}, {0, 0});
    GuessResult d = max_guessing(det, 0);
    CHECK(d.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.bc >= 1.0 - 1e-12);

    for (double p : {0.8, 0.9, 1.0}) {
        GuessResult g = max_guessing(epr_box(p, 2), 0);
        CHECK(g.value <= expected_bc(p, 2) + 1e-7);
        double mode = 0.0;
        Box b = epr_box(p, 2);
        for (int a = 0; a < 2; ++a) mode = std::max(mode, b.alice_marginal(a, 0));
        CHECK(g.value + 1e-9 >= mode);
        CHECK(g.witness.ns_residual() < 1e-8);
        // witness marginal reproduces the input box
        NBox marg = g.witness.ab_marginal();
        NBox orig = product({b});
        for (std::size_t i = 0; i < marg.entries().size(); ++i)
            CHECK(std::abs(marg.entries()[i] - orig.entries()[i]) < 1e-8);
    }
}

TEST_CASE("max_guessing achieved values are stable (regression anchors)") {
    // Recorded from the first LP runs. For the noisy EPR boxes at M = 2 the
    // optimum meets the BC value exactly: the monogamy bound is tight here,
    // and that tightness is itself the frozen regression fact.
    CHECK(max_guessing(epr_box(1.0, 2), 0).value == doctest::Approx(0.7928932).epsilon(2e-6));
    CHECK(max_guessing(epr_box(0.9, 2), 0).value == doctest::Approx(0.8636039).epsilon(2e-6));
    CHECK(max_guessing(epr_box(0.8, 2), 0).value == doctest::Approx(0.9343146).epsilon(2e-6));
    for (double p : {0.8, 0.9})
        CHECK(max_guessing(epr_box(p, 2), 0).slack == doctest::Approx(0.0).epsilon(1e-6));
    // spot check: tight at M = 3 as well, and for off-zero targets
    GuessResult g3 = max_guessing(epr_box(0.95, 3), 1);
    CHECK(g3.bc == doctest::Approx(expected_bc(0.95, 3)).epsilon(1e-10));
    CHECK(g3.slack == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("relabeling covariance of the guessing probability") {
    Rng rng(41);
    for (int trial = 0; trial < 4; ++trial) {
        const int m = 2 + rng.uniform_int(2);
        Box box = random_ns_box(m, rng, false);
        const int x_t = rng.uniform_int(m);
        for (int shift = 0; shift < m; ++shift) {
            const double lhs = max_guessing(relabel(box, shift), x_t).value;
            const double rhs = max_guessing(box, ((x_t - shift) % m + m) % m).value;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-7));
        }
    }
}

TEST_CASE("max_guessing enforces its size caps and rejects bad targets") {
    CHECK_THROWS(max_guessing(pr_analog(5, false), 0));  // M > 4
    CHECK_THROWS(max_guessing(pr_analog(3, false), 3));  // target out of range
    NBox three = product({pr_analog(2, false), pr_analog(2, false), pr_analog(2, false)});
    CHECK_THROWS(max_guessing(three, {0, 0, 0}));  // N > 2
    CHECK_THROWS(max_guessing(product({pr_analog(2, false)}), {0, 1}));  // length mismatch
}

TEST_CASE("beta tensor monotonicity up to n = 3") {
    for (int m : {2, 3, 4})
        for (int n : {1, 2, 3}) CHECK(beta_monotonicity_check(m, n) <= 1e-14);
    CHECK_THROWS(beta_monotonicity_check(5, 1));
    CHECK_THROWS(beta_monotonicity_check(2, 4));
}

TEST_CASE("N = 2 guessing stays below the BC product (small LP)") {
    NBox two = product({pr_analog(2, false), pr_analog(2, false)});
    GuessResult g = max_guessing(two, {0, 0});
    CHECK(g.bc == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(g.value <= g.bc + 1e-7);
    CHECK(g.value == doctest::Approx(0.25).epsilon(1e-6));  // squeeze again: mode = 1/4
}

TEST_CASE("correlated two-pair attack: LP witness through the exact distance") {
    // a genuinely non-product two-pair box (mixture of products), attacked
    // jointly by Eve; the witness then drives hashing and the exact distance
    Rng rng(47);
    NBox p1 = product({pr_analog(2, false), random_ns_box(2, rng, false)});
    NBox p2 = product({random_ns_box(2, rng, false), pr_analog(2, false)});
    std::vector<double> e(p1.entries().size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = 0.5 * (p1.entries()[i] + p2.entries()[i]);
    NBox mixed(2, 2, false, std::move(e));

    GuessResult g = max_guessing(mixed, {0, 0});
    CHECK(g.value <= g.bc + 1e-7);
    CHECK(g.witness.ns_residual() < 1e-8);

    for (int n_s : {1, 2}) {
        KeyTable t = tripartite_key_table(g.witness, {0, 1, 1, 0}, 1, n_s);
        const double dist = key_distance_exact(t);
        CHECK(dist <= 2.0);
        CHECK(dist <= pa_bound(2, n_s, 1, g.bc) + 1e-9);
    }
}

TEST_CASE("tripartite key tables are normalized and feed the distance") {
    GuessResult g = max_guessing(epr_box(0.9, 2), 0);
    KeyTable t = tripartite_key_table(g.witness, {0, 1}, 1, 1);
    double sum = 0.0;
    for (double v : t.p) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    const double dist = key_distance_exact(t);
    CHECK(dist >= 0.0);
    CHECK(dist <= pa_bound(1, 1, 1, g.bc) + 1e-9);
}
