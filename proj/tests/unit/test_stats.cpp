#include <bit>
#include <cmath>
#include <map>

#include "doctest.h"
#include "nskd/rng.hpp"
#include "nskd/stats.hpp"
#include "nskd/verify.hpp"

using namespace nskd;

namespace {

// Brute-force type distribution: walk every string of length n, multiply
// single-symbol probabilities, accumulate by count vector. Independent of
// the multinomial formula under test.
std::map<std::vector<int>, double> enumerate_types(const std::vector<double>& pv, int n) {
    const int v = static_cast<int>(pv.size());
    std::map<std::vector<int>, double> out;
    std::vector<int> s(static_cast<std::size_t>(n), 0);
    while (true) {
        double prob = 1.0;
        std::vector<int> counts(static_cast<std::size_t>(v), 0);
        for (int sym : s) {
            prob *= pv[static_cast<std::size_t>(sym)];
            ++counts[static_cast<std::size_t>(sym)];
        }
        if (prob != 0.0) out[counts] += prob;
        int i = 0;
        while (i < n && ++s[static_cast<std::size_t>(i)] == v) s[static_cast<std::size_t>(i++)] = 0;
        if (i == n) break;
    }
    return out;
}

}  // namespace

TEST_CASE("freq basics and class sizes") {
    Frequency f = freq({0, 0, 1, 1}, 2);
    CHECK(f.counts == std::vector<int>{2, 2});
    CHECK(f.as_distribution()[0] == doctest::Approx(0.5));

    Frequency point = freq({1, 1, 1}, 2);
    CHECK(point.counts == std::vector<int>{0, 3});

    CHECK_THROWS(freq({}, 2));
    CHECK_THROWS(freq({2}, 2));

    // all 2^4 strings grouped by type: class sizes 1,4,6,4,1
    std::map<std::vector<int>, int> sizes;
    for (int s = 0; s < 16; ++s) {
        std::vector<int> str;
        for (int i = 0; i < 4; ++i) str.push_back((s >> i) & 1);
        ++sizes[freq(str, 2).counts];
    }
    CHECK(sizes[{4, 0}] == 1);
    CHECK(sizes[{3, 1}] == 4);
    CHECK(sizes[{2, 2}] == 6);
    CHECK(sizes[{1, 3}] == 4);
    CHECK(sizes[{0, 4}] == 1);
}

TEST_CASE("type_count_bound vs actual type counts") {
    CHECK(type_count_bound(4, 2) == 5);
    CHECK(enumerate_types({0.5, 0.5}, 4).size() == 5);
    CHECK(type_count_bound(2, 3) == 9);
    CHECK(enumerate_types({1.0 / 3, 1.0 / 3, 1.0 / 3}, 2).size() == 6);  // bound is not tight
    CHECK(type_count_bound(7, 1) == 1);
    for (int n = 2; n <= 8; ++n)
        CHECK(static_cast<long long>(enumerate_types({0.3, 0.7}, n).size()) <= type_count_bound(n, 2));
}

TEST_CASE("type_distribution matches enumeration and sums to one") {
    auto d = type_distribution({0.5, 0.5}, 2);
    CHECK(d[{2, 0}] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(d[{1, 1}] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d[{0, 2}] == doctest::Approx(0.25).epsilon(1e-15));

    auto point = type_distribution({0.0, 1.0}, 5);
    CHECK(point.size() == 1);
    CHECK(point[{0, 5}] == doctest::Approx(1.0));

    for (int n = 2; n <= 8; ++n) {
        for (double p : {0.2, 0.5, 0.75}) {
            auto got = type_distribution({p, 1 - p}, n);
            auto want = enumerate_types({p, 1 - p}, n);
            REQUIRE(got.size() == want.size());
            double sum = 0.0;
            for (const auto& [q, pr] : got) {
                CHECK(pr == doctest::Approx(want[q]).epsilon(1e-13));
                sum += pr;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("mode of the type distribution sits at P_V") {
    CHECK(mode_is_pv({0.75, 0.25}, 4));
    // argmax type is exactly the counts 3,1
    auto d = type_distribution({0.75, 0.25}, 4);
    double best = 0;
    std::vector<int> arg;
    for (const auto& [q, p] : d)
        if (p > best) {
            best = p;
            arg = q;
        }
    CHECK(arg == std::vector<int>{3, 1});

    CHECK(mode_is_pv({0.5, 0.5}, 2));
    CHECK(type_distribution({0.5, 0.5}, 2)[{1, 1}] == doctest::Approx(0.5));

    CHECK_THROWS(mode_is_pv({0.3, 0.7}, 4));  // 0.3 not on the 1/4 grid

    CHECK(verify_type_mode().pass);  // exhaustive grid sweep
}

TEST_CASE("bernstein tail bound") {
    CHECK(bernstein_tail(100, 1e-12) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(bernstein_tail(100, 4.0) == doctest::Approx(2.0 * std::exp(-4.0)).epsilon(1e-12));

    // Monte Carlo oracle: fair +-1 coins, N = 1e4, omega = 3
    Rng rng(123);
    const int n = 10000, trials = 2000;
    int exceed = 0;
    for (int t = 0; t < trials; ++t) {
        long long sum = 0;
        for (int i = 0; i < n; ++i) sum += rng.bernoulli(0.5) ? 1 : -1;
        if (std::abs(static_cast<double>(sum)) > 3.0 * std::sqrt(static_cast<double>(n))) ++exceed;
    }
    CHECK(static_cast<double>(exceed) / trials < 0.21);
}

TEST_CASE("symmetric event bound formula and exhaustive lift") {
    CHECK(symmetric_event_bound(0.0, 10, 2) == 0.0);
    CHECK(symmetric_event_bound(1e-3, 100, 2) == doctest::Approx(0.101).epsilon(1e-12));
    CHECK_THROWS(symmetric_event_bound(1.5, 10, 2));
    CHECK(verify_symmetric_event_lift(6).pass);
}

TEST_CASE("estimation confidence formula and Monte Carlo") {
    // v_plus = M + 1/2 at M = 6, N2 = 1e4: bound is 2|Q| exp(-100/169)
    const double b = estimation_confidence(100, 10000, 6.5, 2);
    CHECK(b == doctest::Approx(2.0 * 10101 * std::exp(-100.0 / 169.0)).epsilon(1e-12));
    CHECK(estimation_confidence(10, 1LL << 40, 1.0, 2) < 1e-6);  // N2 -> infinity limit
    CHECK(verify_estimation_confidence(99, 4000).pass);
}

TEST_CASE("symmetric distributions decompose exactly into type-uniform mixtures") {
    // build a symmetric distribution over {0,1}^N, compute P_Q, reconstruct
    Rng rng(5);
    for (int n : {3, 5, 6}) {
        const std::size_t total = std::size_t{1} << n;
        std::vector<double> p(total, 0.0);
        // random weights per type, spread uniformly inside each class
        std::vector<double> type_w(static_cast<std::size_t>(n) + 1);
        double tot = 0.0;
        for (double& w : type_w) {
            w = rng.uniform();
            tot += w;
        }
        std::vector<double> class_size(static_cast<std::size_t>(n) + 1, 0.0);
        for (std::size_t s = 0; s < total; ++s) ++class_size[static_cast<std::size_t>(std::popcount(s))];
        for (std::size_t s = 0; s < total; ++s) {
            const auto k = static_cast<std::size_t>(std::popcount(s));
            p[s] = type_w[k] / tot / class_size[k];
        }
        // P_Q and reconstruction
        std::vector<double> pq(static_cast<std::size_t>(n) + 1, 0.0);
        for (std::size_t s = 0; s < total; ++s) pq[static_cast<std::size_t>(std::popcount(s))] += p[s];
        for (std::size_t s = 0; s < total; ++s) {
            const auto k = static_cast<std::size_t>(std::popcount(s));
            CHECK(pq[k] / class_size[k] == doctest::Approx(p[s]).epsilon(1e-14));
        }
    }
}
