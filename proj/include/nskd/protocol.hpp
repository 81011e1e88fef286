#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "nskd/box.hpp"
#include "nskd/ec.hpp"
#include "nskd/hashing.hpp"

namespace nskd {

/// Run aborted before a key was produced (empty estimation set, decode
/// failure, ...). Composable-security hygiene: no partial keys escape.
struct ProtocolAbort : std::runtime_error {
    enum class Reason { EmptyEstimationSet, DecodeFailure };
    ProtocolAbort(Reason r, const std::string& what) : std::runtime_error(what), reason(r) {}
    Reason reason;
};

struct ProtocolParams {
    long long n = 0;                // pair count
    int m = 2;                      // setting count
    double delta = 0.1;             // sampling bias, in (0,1)
    std::uint64_t seed = 0;
    EcConfig ec;
    double sample_fraction = 0.05;  // raw-key fraction sacrificed to estimate w

    void validate() const {
        if (n < 1) throw std::invalid_argument("N must be >= 1");
        if (m < 2) throw std::invalid_argument("M must be >= 2");
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
        if (sample_fraction < 0.0 || sample_fraction > 0.5)
            throw std::invalid_argument("sample fraction outside [0, 0.5]");
    }
};

/// delta = N^{-1/4}, the scaling that makes N_e ~ 2 sqrt(N)/M.
double auto_delta(long long n);

/// Pair source. Honest i.i.d. sources wrap a single-pair Box; adversarial
/// scripted sources pre-commit a full NBox (and may correlate pairs any way
/// the no-signaling polytope allows).
class Source {
public:
    virtual ~Source() = default;
    virtual long long pairs() const = 0;  // 0 = any N (i.i.d.)
    virtual void measure(const std::vector<int>& x, const std::vector<int>& y, Rng& rng,
                         std::vector<std::uint8_t>& a, std::vector<std::uint8_t>& b) const = 0;
};

class BoxSource final : public Source {
public:
    explicit BoxSource(Box box) : box_(std::move(box)) {}
    long long pairs() const override { return 0; }
    void measure(const std::vector<int>& x, const std::vector<int>& y, Rng& rng,
                 std::vector<std::uint8_t>& a, std::vector<std::uint8_t>& b) const override;
    const Box& box() const { return box_; }

private:
    Box box_;
};

class NBoxSource final : public Source {
public:
    explicit NBoxSource(NBox box) : box_(std::move(box)) {}
    long long pairs() const override { return box_.pairs(); }
    void measure(const std::vector<int>& x, const std::vector<int>& y, Rng& rng,
                 std::vector<std::uint8_t>& a, std::vector<std::uint8_t>& b) const override;

private:
    NBox box_;
};

struct PublicMessage {
    std::string step;
    std::string payload;
};

/// Full record of one run.
struct Transcript {
    long long n = 0;
    int m = 0;
    double delta = 0.0;
    std::uint64_t seed = 0;

    std::vector<std::uint8_t> i_bits, j_bits;  // I, J
    std::vector<int> x, y;                     // settings
    std::vector<std::uint8_t> a, b;            // outcomes

    std::vector<long long> est_set;     // indices meeting the estimation condition
    std::vector<long long> sample_set;  // sacrificed raw-key indices (w estimate)
    double b_est = 0.0;
    double w_hat = 0.0;

    long long n_r = 0, n_e = 0, n_c = 0;
    long long n_s = 0;     // operative key length (protocol rate form)
    long long n_s_uc = 0;  // composable finite-size length, reported alongside

    std::vector<std::uint8_t> syndrome;  // C (syndromes + tag)
    ToeplitzHash hash;                   // G
    std::vector<std::uint8_t> key_a, key_b;

    std::vector<PublicMessage> public_log;

    std::string to_json() const;
    static Transcript from_json(const std::string& text);
};

struct Settings {
    std::vector<std::uint8_t> i_bits, j_bits;
    std::vector<int> x, y;
};

/// Step 1: I,J ~ Bernoulli(delta); X = 0 / uniform, Y = M / uniform.
Settings sample_settings(const ProtocolParams& params, Rng& rng);

/// Draw outcomes from a single-pair box, independently per pair.
void measure(const Box& source, const std::vector<int>& x, const std::vector<int>& y, Rng& rng,
             std::vector<std::uint8_t>& a, std::vector<std::uint8_t>& b);

/// Step 2: mean of the BC variable over the estimation set.
double estimate_bc(const Transcript& t);

/// Steps 1-4 end to end. Aborts throw ProtocolAbort.
Transcript run_protocol(const ProtocolParams& params, const Source& source);

}  // namespace nskd
