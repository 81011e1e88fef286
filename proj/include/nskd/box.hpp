#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nskd/rng.hpp"

namespace nskd {

/// Shape or invariant violation when constructing/loading a box.
struct BoxError : std::runtime_error {
    explicit BoxError(const std::string& what) : std::runtime_error(what) {}
};

struct NsReport {
    double alice_residual = 0.0;  // worst spread of an Alice marginal over the other side's settings
    double bob_residual = 0.0;
    double max_residual = 0.0;
    bool pass = false;
    std::string worst;  // human-readable worst offending (party, outcome, setting)
};

/// Bipartite conditional distribution P(a,b|x,y) for one pair of systems.
/// a,b in {0,1}; x in {0..M-1}; y in {0..M-1}, plus y = M when bob_extra
/// (the raw-key setting). Entries are stored dense, row-major over
/// (a,b,x,y). Values are immutable after construction; the constructor
/// clamps tiny negatives, then enforces normalization per (x,y) and
/// no-signaling in both directions.
class Box {
public:
    static constexpr int kMaxSettings = 16;
    static constexpr double kClampTol = 1e-15;
    static constexpr double kNsTol = 1e-12;

    Box(int m, bool bob_extra, std::vector<double> entries);

    int settings() const { return m_; }
    bool bob_extra() const { return extra_; }
    int y_count() const { return m_ + (extra_ ? 1 : 0); }

    double at(int a, int b, int x, int y) const {
        return e_[static_cast<std::size_t>(((a * 2 + b) * m_ + x) * y_count() + y)];
    }

    /// P(a|x); y-independent by construction (evaluated at y = 0).
    double alice_marginal(int a, int x) const { return at(a, 0, x, 0) + at(a, 1, x, 0); }
    /// P(b|y); evaluated at x = 0.
    double bob_marginal(int b, int y) const { return at(0, b, 0, y) + at(1, b, 0, y); }

    const std::vector<double>& entries() const { return e_; }

    std::string to_json(const std::string& meta = "") const;
    static Box from_json(const std::string& text);

private:
    int m_;
    bool extra_;
    std::vector<double> e_;
};

/// N-pair conditional distribution P(a,b|x,y) over outcome/setting strings,
/// for exact small-N work. Index order: (a-string, b-string, x-string,
/// y-string), each string little-endian in the pair index (pair 0 is the
/// least significant digit).
class NBox {
public:
    static constexpr int kMaxPairs = 4;
    static constexpr std::size_t kMaxEntries = std::size_t{1} << 24;
    static constexpr double kNsTol = 1e-10;

    NBox(int n_pairs, int m, bool bob_extra, std::vector<double> entries);

    int pairs() const { return n_; }
    int settings() const { return m_; }
    bool bob_extra() const { return extra_; }
    int y_count() const { return m_ + (extra_ ? 1 : 0); }

    std::size_t a_card() const { return std::size_t{1} << n_; }
    std::size_t b_card() const { return a_card(); }
    std::size_t x_card() const { return xc_; }
    std::size_t y_card() const { return yc_; }

    double at(std::size_t as, std::size_t bs, std::size_t xs, std::size_t ys) const {
        return e_[((as * a_card() + bs) * xc_ + xs) * yc_ + ys];
    }

    /// Digit of a setting string: pair i's setting inside the packed index.
    int x_digit(std::size_t xs, int i) const;
    int y_digit(std::size_t ys, int i) const;
    std::size_t pack_x(const std::vector<int>& x) const;
    std::size_t pack_y(const std::vector<int>& y) const;

    const std::vector<double>& entries() const { return e_; }

private:
    int n_, m_;
    bool extra_;
    std::size_t xc_, yc_;
    std::vector<double> e_;
};

NsReport check_nonsignaling(const Box& box, double tol = Box::kNsTol);
NsReport check_nonsignaling(const NBox& box, double tol = NBox::kNsTol);

/// Real-valued functional over the MxM estimation block of a box
/// (Bob's y = M column never enters a contraction).
class DualVector {
public:
    explicit DualVector(int m) : m_(m), e_(static_cast<std::size_t>(4 * m * m), 0.0) {}

    int settings() const { return m_; }
    double at(int a, int b, int x, int y) const { return e_[idx(a, b, x, y)]; }
    void set(int a, int b, int x, int y, double v) { e_[idx(a, b, x, y)] = v; }

    double dot(const Box& box) const;

    DualVector abs() const;
    DualVector& operator+=(const DualVector& o);
    DualVector& operator-=(const DualVector& o);
    DualVector& scale(double s);

    const std::vector<double>& entries() const { return e_; }

private:
    std::size_t idx(int a, int b, int x, int y) const {
        return static_cast<std::size_t>(((a * 2 + b) * m_ + x) * m_ + y);
    }
    int m_;
    std::vector<double> e_;
};

DualVector mu(int m);
DualVector nu(int m);
DualVector beta_a(int m, int a);
DualVector beta(int m);

/// The estimation settings {(x,y): y = x or y = x+1 mod M}.
std::vector<std::pair<int, int>> estimation_settings(int m);

/// Value of the Braunstein-Caves random variable at one sample.
double bc_term(int a, int b, int x, int y, int m);

/// <B> of a box: computed both as the expectation of bc_term under the
/// uniform distribution on the estimation settings and as beta . P; the two
/// routes must agree to 1e-10 (guards the mu/nu construction) or a BoxError
/// is thrown.
double bc_value(const Box& box);

/// <B_1...B_N> of an NBox via the tensor-product functional.
double bc_product(const NBox& box);

/// |P_A|X(a-string, 0-string) - (tensor of beta_{a_n}) . P|. Throws if the
/// box is signaling (the identity is only guaranteed on the polytope).
double marginal_identity_residual(const NBox& box, const std::vector<int>& a_string);

/// Cyclic setting relabeling by m: X -> X+m, Y -> Y+m (mod M) with the
/// compensating outcome flips; Bob's y = M column keeps its setting and
/// outcome labels (only Alice's side transforms there).
Box relabel(const Box& box, int m);

/// lambda * b1 + (1 - lambda) * b2.
Box mix(const Box& b1, const Box& b2, double lambda);

/// Tensor product of independent pairs (all factors must share M/bob_extra).
NBox product(const std::vector<Box>& factors);

/// Deterministic box a = fa[x], b = fb[y]; fb.size() decides bob_extra.
Box local_deterministic(const std::vector<int>& fa, const std::vector<int>& fb);

/// The no-signaling box with A xor B = I{X=M-1}I{Y=0} exactly and uniform
/// single-party marginals; attains <B> = 1/2. The y = M column, when
/// present, is uncorrelated uniform.
Box pr_analog(int m, bool bob_extra = true);

/// Every entry 1/4.
Box uniform_box(int m, bool bob_extra = true);

/// Random point of the no-signaling polytope: a convex mixture of seeded
/// local-deterministic vertices and the PR analog (membership by
/// construction, no rejection step).
Box random_ns_box(int m, Rng& rng, bool bob_extra = true);

}  // namespace nskd
