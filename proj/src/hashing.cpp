#include "nskd/hashing.hpp"

#include <bit>
#include <stdexcept>

namespace nskd {

namespace {

std::vector<std::uint64_t> pack_bits(const std::vector<std::uint8_t>& bits) {
    std::vector<std::uint64_t> w((bits.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) w[i >> 6] |= std::uint64_t{1} << (i & 63);
    return w;
}

// 64 bits of `w` starting at bit offset `off` (reads past the end as zero).
std::uint64_t read64(const std::vector<std::uint64_t>& w, std::size_t off) {
    const std::size_t i = off >> 6;
    const unsigned sh = static_cast<unsigned>(off & 63);
    std::uint64_t lo = i < w.size() ? w[i] : 0;
    if (sh == 0) return lo;
    std::uint64_t hi = i + 1 < w.size() ? w[i + 1] : 0;
    return (lo >> sh) | (hi << (64 - sh));
}

}  // namespace

ToeplitzHash sample_hash(int in_len, int out_len, Rng& rng) {
    if (out_len < 0 || in_len < 1 || out_len > in_len)
        throw std::invalid_argument("sample_hash: need 0 <= out_len <= in_len");
    ToeplitzHash h;
    h.in_len = in_len;
    h.out_len = out_len;
    if (out_len == 0) return h;
    h.seed.resize(static_cast<std::size_t>(in_len + out_len - 1));
    for (auto& b : h.seed) b = rng.bernoulli(0.5) ? 1 : 0;
    return h;
}

std::vector<std::uint8_t> apply_hash(const ToeplitzHash& h, const std::vector<std::uint8_t>& a) {
    if (static_cast<int>(a.size()) != h.in_len) throw std::invalid_argument("apply_hash: input length mismatch");
    // Row i of T dotted with a equals seed[i .. i+in) dotted with a reversed.
    std::vector<std::uint8_t> arev(a.rbegin(), a.rend());
    const auto aw = pack_bits(arev);
    const auto sw = pack_bits(h.seed);
    const std::size_t in = static_cast<std::size_t>(h.in_len);
    std::vector<std::uint8_t> out(static_cast<std::size_t>(h.out_len), 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t acc = 0;
        for (std::size_t j = 0; j < in; j += 64) {
            std::uint64_t chunk = read64(sw, i + j) & aw[j >> 6];
            acc ^= chunk;
        }
        out[i] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
    }
    return out;
}

std::string ToeplitzHash::seed_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve((seed.size() + 3) / 4);
    int nib = 0, n_bits = 0;
    for (std::size_t i = 0; i < seed.size(); ++i) {
        nib = (nib << 1) | seed[i];
        if (++n_bits == 4) {
            s.push_back(digits[nib]);
            nib = 0;
            n_bits = 0;
        }
    }
    if (n_bits > 0) s.push_back(digits[nib << (4 - n_bits)]);
    return s;
}

ToeplitzHash ToeplitzHash::from_hex(int in_len, int out_len, const std::string& hex) {
    ToeplitzHash h;
    h.in_len = in_len;
    h.out_len = out_len;
    if (out_len == 0) return h;
    const std::size_t n = static_cast<std::size_t>(in_len + out_len - 1);
    h.seed.assign(n, 0);
    std::size_t bit = 0;
    for (char c : hex) {
        int v = c >= '0' && c <= '9' ? c - '0' : (c >= 'a' && c <= 'f' ? c - 'a' + 10 : -1);
        if (v < 0) throw std::invalid_argument("bad hex digit in hash seed");
        for (int k = 3; k >= 0 && bit < n; --k) h.seed[bit++] = static_cast<std::uint8_t>((v >> k) & 1);
    }
    if (bit < n) throw std::invalid_argument("hash seed hex too short");
    return h;
}

std::string bits_to_string(const std::vector<std::uint8_t>& bits) {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) s[i] = '1';
    return s;
}

std::vector<std::uint8_t> string_to_bits(const std::string& s) {
    std::vector<std::uint8_t> bits(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("bit string must be 0/1");
        bits[i] = s[i] == '1' ? 1 : 0;
    }
    return bits;
}

}  // namespace nskd
