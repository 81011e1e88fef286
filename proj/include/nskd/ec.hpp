#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nskd/rng.hpp"

namespace nskd {

/// Error-correction configuration. Two interchangeable schemes sit behind
/// the same syndrome interface:
///  - Block: seeded random parity checks on 16-bit blocks with exhaustive
///    coset-leader (maximum-likelihood) decoding; simple and exact, but the
///    short block length costs reliability near the Shannon rate.
///  - Ldpc: seeded column-weight-3 LDPC with sum-product syndrome decoding;
///    the choice for realistic error rates.
struct EcConfig {
    enum class Scheme { Block, Ldpc };
    Scheme scheme = Scheme::Block;
    double margin = 0.15;     // syndrome rate is h(w_hat) + margin
    int block_len = 16;       // Block scheme
    int decode_radius = 8;    // Block: flag blocks whose correction needs more flips
    int max_iter = 80;        // Ldpc: belief-propagation iterations
    int tag_bits = 32;        // verification tag appended to the public message
    double w_floor = 1e-3;    // Ldpc channel-prior floor when w_hat is ~0
};

/// Public reconciliation message C = f(A_r): concatenated syndromes plus a
/// short seeded verification tag. Everything here is published and counts
/// toward N_c.
struct EcMessage {
    std::vector<std::uint8_t> syndrome;
    std::vector<std::uint8_t> tag;
    double w_hat = 0.0;
    long long n = 0;
    long long bits() const { return static_cast<long long>(syndrome.size() + tag.size()); }
};

struct EcResult {
    std::vector<std::uint8_t> corrected;
    bool ok = false;
    std::vector<long long> flagged_blocks;  // Block: blocks outside the decode radius
    std::string failure;                    // empty when ok
};

/// The code matrix is public and derived from code_seed, which both sides
/// must share.
EcMessage ec_encode(const std::vector<std::uint8_t>& a, double w_hat, const EcConfig& cfg,
                    std::uint64_t code_seed);
EcResult ec_decode(const std::vector<std::uint8_t>& b, const EcMessage& msg, const EcConfig& cfg,
                   std::uint64_t code_seed);

/// Syndrome length the scheme will emit for raw length n at error rate w
/// (excluding the tag).
long long ec_syndrome_bits(long long n, double w_hat, const EcConfig& cfg);

}  // namespace nskd
