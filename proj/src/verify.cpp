#include "nskd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nskd/box.hpp"
#include "nskd/eve.hpp"
#include "nskd/hashing.hpp"
#include "nskd/stats.hpp"

namespace nskd {

namespace {

std::string fmt(const char* pattern, double v) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), pattern, v);
    return buf;
}

}  // namespace

CheckResult verify_symmetric_event_lift(int n_max) {
    CheckResult res{"symmetric-event lift (|V|=2)", true, ""};
    double worst_margin = 1e300;
    for (int n = 2; n <= n_max; ++n) {
        // Binomial weights per type k (number of ones).
        std::vector<double> log_binom(static_cast<std::size_t>(n) + 1, 0.0);
        for (int k = 1; k <= n; ++k)
            log_binom[static_cast<std::size_t>(k)] =
                log_binom[static_cast<std::size_t>(k - 1)] + std::log(static_cast<double>(n - k + 1) / k);
        const double q_count = static_cast<double>(n + 1);
        // Every symmetric event is a union of type classes: 2^(n+1) events.
        for (std::uint32_t ev = 1; ev + 1 < (1u << (n + 1)); ++ev) {
            // eps* = max over i.i.d. p of P(E); dense grid plus endpoints.
            double eps = 0.0;
            const int grid = 2000;
            for (int gi = 0; gi <= grid; ++gi) {
                const double p = static_cast<double>(gi) / grid;
                double pe = 0.0;
                for (int k = 0; k <= n; ++k) {
                    if (!((ev >> k) & 1)) continue;
                    if ((p == 0.0 && k > 0) || (p == 1.0 && k < n)) continue;
                    pe += std::exp(log_binom[static_cast<std::size_t>(k)] + k * std::log(std::max(p, 1e-300)) +
                                   (n - k) * std::log(std::max(1.0 - p, 1e-300)));
                }
                eps = std::max(eps, pe);
            }
            // Type-uniform distributions are the extreme points: P(E) is 1 on
            // member types, 0 elsewhere; mixtures interpolate. The lift says
            // 1 <= eps * |Q| for every member type.
            const double bound = static_cast<double>(symmetric_event_bound(std::min(1.0, eps * 1.0000001), n, 2));
            if (bound + 1e-9 < 1.0) {
                res.pass = false;
                res.detail = "violated at N=" + std::to_string(n) + " event mask " + std::to_string(ev);
                return res;
            }
            worst_margin = std::min(worst_margin, eps * q_count);
        }
    }
    res.detail = "exhaustive events to N=" + std::to_string(n_max) +
                 ", tightest eps*|Q| = " + fmt("%.4f", worst_margin);
    return res;
}

CheckResult verify_type_mode() {
    CheckResult res{"type-distribution mode at P_V", true, ""};
    int checked = 0;
    for (int n = 2; n <= 8; ++n) {
        for (int k = 0; k <= n; ++k) {
            const std::vector<double> pv{static_cast<double>(k) / n, static_cast<double>(n - k) / n};
            auto dist = type_distribution(pv, n);
            double sum = 0.0;
            for (const auto& [q, p] : dist) sum += p;
            if (std::abs(sum - 1.0) > 1e-12 || !mode_is_pv(pv, n)) {
                res.pass = false;
                res.detail = "failed at |V|=2, N=" + std::to_string(n) + ", k=" + std::to_string(k);
                return res;
            }
            ++checked;
        }
    }
    for (int n = 2; n <= 5; ++n) {
        for (int k1 = 0; k1 <= n; ++k1)
            for (int k2 = 0; k1 + k2 <= n; ++k2) {
                const std::vector<double> pv{static_cast<double>(k1) / n, static_cast<double>(k2) / n,
                                             static_cast<double>(n - k1 - k2) / n};
                double sum = 0.0;
                for (const auto& [q, p] : type_distribution(pv, n)) sum += p;
                if (std::abs(sum - 1.0) > 1e-12 || !mode_is_pv(pv, n)) {
                    res.pass = false;
                    res.detail = "failed at |V|=3, N=" + std::to_string(n);
                    return res;
                }
                ++checked;
            }
    }
    res.detail = std::to_string(checked) + " grid distributions, all modal at P_V";
    return res;
}

CheckResult verify_estimation_confidence(std::uint64_t seed, int trials) {
    CheckResult res{"split-sample estimation confidence", true, ""};
    Rng rng(seed);
    // {0,1}-valued i.i.d. variables: the product mean is p^n1 and the event
    // p > V_est + n2^{-1/4} marks a failed estimate.
    const int n1 = 10;
    const long long n2 = 400;
    const double corr = std::pow(static_cast<double>(n2), -0.25);
    int violations = 0;
    for (int t = 0; t < trials; ++t) {
        const double p = rng.uniform();
        long long ones = 0;
        for (long long i = 0; i < n2; ++i) ones += rng.bernoulli(p) ? 1 : 0;
        const double v_est = static_cast<double>(ones) / static_cast<double>(n2);
        if (std::pow(p, n1) > std::pow(v_est + corr, n1)) ++violations;
    }
    const double empirical = static_cast<double>(violations) / trials;
    const double bound = estimation_confidence(n1, n2, 1.0, 2);
    res.pass = empirical <= bound;
    res.detail = "empirical " + fmt("%.5f", empirical) + " vs bound " + fmt("%.5f", std::min(1.0, bound));
    return res;
}

CheckResult verify_marginal_identity(std::uint64_t seed, int singles, int pairs) {
    CheckResult res{"marginal identity (dual vectors)", true, ""};
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < singles; ++t) {
        const int m = 2 + rng.uniform_int(3);
        Box box = random_ns_box(m, rng);
        NBox nb = product({box});
        for (int a = 0; a < 2; ++a) worst = std::max(worst, marginal_identity_residual(nb, {a}));
    }
    for (int t = 0; t < pairs; ++t) {
        const int m = 2 + rng.uniform_int(2);
        Box b1 = random_ns_box(m, rng);
        Box b2 = random_ns_box(m, rng);
        NBox nb = product({b1, b2});
        for (int a1 = 0; a1 < 2; ++a1)
            for (int a2 = 0; a2 < 2; ++a2)
                worst = std::max(worst, marginal_identity_residual(nb, {a1, a2}));
    }
    res.pass = worst < 1e-10;
    res.detail = "worst residual " + fmt("%.3g", worst);
    return res;
}

CheckResult verify_monogamy(std::uint64_t seed, int boxes) {
    CheckResult res{"monogamy: guessing <= BC value", true, ""};
    Rng rng(seed);
    double worst_slack = 1e300;
    for (int t = 0; t < boxes; ++t) {
        const int m = 2 + rng.uniform_int(2);
        Box box = random_ns_box(m, rng, false);
        GuessResult g = max_guessing(box, rng.uniform_int(m));
        if (g.value > g.bc + 1e-7) {
            res.pass = false;
            res.detail = "violated: value " + fmt("%.9f", g.value) + " > bc " + fmt("%.9f", g.bc);
            return res;
        }
        // Eve can always guess the mode of Alice's marginal.
        double mode = 0.0;
        for (int a = 0; a < 2; ++a) mode = std::max(mode, box.alice_marginal(a, 0));
        if (g.value + 1e-7 < mode) {
            res.pass = false;
            res.detail = "LP below the trivial mode guess";
            return res;
        }
        worst_slack = std::min(worst_slack, g.slack);
    }
    GuessResult pr = max_guessing(pr_analog(2, false), 0);
    if (std::abs(pr.value - 0.5) > 1e-7) {
        res.pass = false;
        res.detail = "PR-analog squeeze failed: value " + fmt("%.9f", pr.value);
        return res;
    }
    res.detail = std::to_string(boxes) + " random boxes, min slack " + fmt("%.3g", worst_slack) +
                 ", PR squeeze at 1/2";
    return res;
}

CheckResult verify_beta_monotonicity() {
    CheckResult res{"beta tensor monotonicity", true, ""};
    double worst = -1.0;
    for (int m = 2; m <= 4; ++m)
        for (int n = 1; n <= 3; ++n) worst = std::max(worst, beta_monotonicity_check(m, n));
    res.pass = worst <= 1e-14;
    res.detail = "max componentwise excess " + fmt("%.3g", worst);
    return res;
}

CheckResult verify_hash_two_universality(std::uint64_t seed, int draws) {
    CheckResult res{"Toeplitz two-universality", true, ""};
    Rng rng(seed);
    const int in_len = 64;
    for (int out_len : {4, 8}) {
        const double q = std::exp2(-out_len);
        const double sigma = std::sqrt(q * (1.0 - q) / draws);
        for (int pair = 0; pair < 5; ++pair) {
            std::vector<std::uint8_t> a(in_len), a2(in_len);
            for (int i = 0; i < in_len; ++i) {
                a[static_cast<std::size_t>(i)] = rng.bernoulli(0.5);
                a2[static_cast<std::size_t>(i)] = rng.bernoulli(0.5);
            }
            if (a == a2) a2[0] ^= 1;
            int collisions = 0;
            for (int d = 0; d < draws; ++d) {
                ToeplitzHash h = sample_hash(in_len, out_len, rng);
                if (apply_hash(h, a) == apply_hash(h, a2)) ++collisions;
            }
            const double rate = static_cast<double>(collisions) / draws;
            if (std::abs(rate - q) > 3.0 * sigma) {
                res.pass = false;
                res.detail = "rate " + fmt("%.6f", rate) + " vs " + fmt("%.6f", q) + " at out=" +
                             std::to_string(out_len);
                return res;
            }
        }
    }
    res.detail = "collision rates within 3 sigma of 2^-out for out in {4,8}";
    return res;
}

std::vector<CheckResult> verify_all(std::uint64_t seed) {
    Rng master(seed);
    std::vector<CheckResult> out;
    out.push_back(verify_type_mode());
    out.push_back(verify_symmetric_event_lift());
    out.push_back(verify_estimation_confidence(master.stream(11).next_u64()));
    out.push_back(verify_marginal_identity(master.stream(12).next_u64()));
    out.push_back(verify_monogamy(master.stream(13).next_u64()));
    out.push_back(verify_beta_monotonicity());
    out.push_back(verify_hash_two_universality(master.stream(14).next_u64(), 20000));
    return out;
}

}  // namespace nskd
