#pragma once

#include <vector>

#include "nskd/box.hpp"
#include "nskd/lp.hpp"
#include "nskd/security.hpp"

namespace nskd {

/// No-signaling extension of an Alice-Bob box by one eavesdropper system
/// with a single setting and n_e outcomes. Entries indexed
/// (a-string, b-string, e, x-string, y-string), strings packed as in NBox.
struct TripartiteBox {
    int n_pairs = 1;
    int m = 2;
    bool bob_extra = false;
    int n_e = 2;
    std::vector<double> p;

    std::size_t a_card() const { return std::size_t{1} << n_pairs; }
    std::size_t x_card() const;
    std::size_t y_card() const;
    double at(std::size_t as, std::size_t bs, int e, std::size_t xs, std::size_t ys) const;
    double& at(std::size_t as, std::size_t bs, int e, std::size_t xs, std::size_t ys);
    void allocate();

    /// Alice-Bob marginal (sums Eve out); re-validated as an NBox.
    NBox ab_marginal() const;
    /// Worst no-signaling residual over all subsystems including Eve's.
    double ns_residual() const;
};

struct GuessResult {
    double value = 0.0;       // optimal guessing probability
    double bc = 0.0;          // <B_1...B_N> of the input box (monogamy bound)
    double slack = 0.0;       // bc - value
    TripartiteBox witness;    // extension achieving value
};

/// LP over all one-setting, 2^N-outcome no-signaling extensions: Eve's
/// outcome is her guess of Alice's outcome string at x_target, the optimum
/// is the guessing probability. Caps: N <= 2, M <= 4.
GuessResult max_guessing(const Box& box, int x_target);
GuessResult max_guessing(const NBox& box, const std::vector<int>& x_target);

/// Max over the 2^n sign patterns and all components of
/// tensor(beta_{a_i}) - beta^{tensor n}; contract: <= 1e-14.
double beta_monotonicity_check(int m, int n);

/// Distribution P(k,c,e,g|z) produced by hashing Alice's outcomes of a
/// tripartite extension at x = 0-string: f maps a-string index -> c, the
/// hash family is the full Toeplitz family (uniform seed), n_c = log2 of
/// the number of distinct f values rounded up.
KeyTable tripartite_key_table(const TripartiteBox& box, const std::vector<int>& f, int n_c,
                              int n_s);

}  // namespace nskd
