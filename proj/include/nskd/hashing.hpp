#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nskd/rng.hpp"

namespace nskd {

/// Two-universal hash from the Toeplitz family over GF(2): the out x in
/// matrix T with T[i][j] = seed[i - j + in - 1] applied as a mod-2
/// matrix-vector product. Distinct inputs collide with probability exactly
/// 2^-out over the uniform seed.
struct ToeplitzHash {
    int in_len = 0;
    int out_len = 0;
    std::vector<std::uint8_t> seed;  // in_len + out_len - 1 bits, 0/1 per byte

    std::string seed_hex() const;
    static ToeplitzHash from_hex(int in_len, int out_len, const std::string& hex);
};

ToeplitzHash sample_hash(int in_len, int out_len, Rng& rng);

std::vector<std::uint8_t> apply_hash(const ToeplitzHash& h, const std::vector<std::uint8_t>& a);

std::string bits_to_string(const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> string_to_bits(const std::string& s);

}  // namespace nskd
