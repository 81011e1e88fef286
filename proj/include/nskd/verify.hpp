#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nskd {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Symmetric-event lift: exhaustive over all symmetric events for |V|=2,
/// N <= n_max; compares every type-uniform (and mixed) distribution against
/// the i.i.d. grid maximum times the type-count bound.
CheckResult verify_symmetric_event_lift(int n_max = 6);

/// Type-distribution mode sits at P_V, exhaustively over the 1/N grid
/// (|V|=2 up to N=8, |V|=3 up to N=5), and type probabilities sum to 1.
CheckResult verify_type_mode();

/// Split-sample estimation confidence: seeded Monte Carlo on i.i.d. sources,
/// empirical violation rate of the product bound vs. the formula.
CheckResult verify_estimation_confidence(std::uint64_t seed, int trials = 10000);

/// Marginal identity P_A|X(a,0) = tensor(beta_a) . P on random no-signaling
/// boxes (single pairs and N=2 products/mixtures).
CheckResult verify_marginal_identity(std::uint64_t seed, int singles = 500, int pairs = 50);

/// Monogamy: LP guessing probability <= BC value on random boxes, plus the
/// PR-analog squeeze at exactly 1/2.
CheckResult verify_monogamy(std::uint64_t seed, int boxes = 200);

/// Componentwise tensor bound on the beta vectors (n <= 3, M <= 4).
CheckResult verify_beta_monotonicity();

/// Toeplitz family collision statistics vs. the exact 2^-out bound.
CheckResult verify_hash_two_universality(std::uint64_t seed, int draws = 100000);

/// Runs every suite above with substreams of one seed.
std::vector<CheckResult> verify_all(std::uint64_t seed);

}  // namespace nskd
