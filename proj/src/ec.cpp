#include "nskd/ec.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "nskd/hashing.hpp"
#include "nskd/security.hpp"

namespace nskd {

namespace {

constexpr std::uint64_t kTagStream = 0x7461675fULL;   // tag
constexpr std::uint64_t kBlockStream = 0x626c6bULL;   // blk
constexpr std::uint64_t kLdpcStream = 0x6c647063ULL;  // ldpc

int block_syndrome_len(const EcConfig& cfg, double w_hat) {
    const double rate = binary_entropy(w_hat) + cfg.margin;
    return std::clamp(static_cast<int>(std::ceil(cfg.block_len * rate)), 0, cfg.block_len);
}

// Random parity-check columns for one run; distinct and nonzero when the
// syndrome space allows, so weight-1 errors are always decoded.
std::vector<std::uint32_t> block_columns(const EcConfig& cfg, int slen, std::uint64_t code_seed) {
    Rng rng = Rng(code_seed).stream(kBlockStream);
    std::vector<std::uint32_t> cols(static_cast<std::size_t>(cfg.block_len), 0);
    const std::uint32_t space = slen >= 31 ? 0x7fffffffu : (1u << slen);
    for (auto& c : cols) {
        for (int tries = 0; tries < 64; ++tries) {
            std::uint32_t v = static_cast<std::uint32_t>(rng.next_u64() & (space - 1));
            if (v == 0 && space > 1) continue;
            if (space > static_cast<std::uint32_t>(2 * cfg.block_len) &&
                std::find(cols.begin(), cols.end(), v) != cols.end())
                continue;
            c = v;
            break;
        }
    }
    return cols;
}

std::uint32_t block_syndrome(const std::vector<std::uint32_t>& cols, std::uint32_t word) {
    std::uint32_t s = 0;
    while (word) {
        const int j = std::countr_zero(word);
        s ^= cols[static_cast<std::size_t>(j)];
        word &= word - 1;
    }
    return s;
}

struct CosetTable {
    std::vector<std::uint32_t> leader;
    std::vector<std::uint8_t> weight;
};

// Exhaustive 2^L sweep: minimum-weight representative for every syndrome.
CosetTable build_coset_table(const std::vector<std::uint32_t>& cols, int slen, int block_len) {
    CosetTable t;
    t.leader.assign(std::size_t{1} << slen, 0);
    t.weight.assign(std::size_t{1} << slen, 255);
    std::vector<std::uint32_t> syn(std::size_t{1} << block_len, 0);
    for (std::uint32_t v = 1; v < (1u << block_len); ++v) {
        syn[v] = syn[v & (v - 1)] ^ cols[static_cast<std::size_t>(std::countr_zero(v))];
        const int w = std::popcount(v);
        if (w < t.weight[syn[v]]) {
            t.weight[syn[v]] = static_cast<std::uint8_t>(w);
            t.leader[syn[v]] = v;
        }
    }
    t.weight[0] = 0;
    t.leader[0] = 0;
    return t;
}

std::vector<std::uint8_t> make_tag(const std::vector<std::uint8_t>& a, int tag_bits,
                                   std::uint64_t code_seed) {
    if (tag_bits <= 0 || a.empty()) return {};
    Rng rng = Rng(code_seed).stream(kTagStream);
    const int out = std::min<int>(tag_bits, static_cast<int>(a.size()));
    return apply_hash(sample_hash(static_cast<int>(a.size()), out, rng), a);
}

struct LdpcCode {
    long long n = 0;
    long long m = 0;
    std::vector<std::array<std::int32_t, 3>> col_rows;
    std::vector<std::vector<std::int32_t>> row_cols;
};

LdpcCode build_ldpc(long long n, long long m, std::uint64_t code_seed) {
    LdpcCode code;
    code.n = n;
    code.m = m;
    code.col_rows.resize(static_cast<std::size_t>(n));
    code.row_cols.resize(static_cast<std::size_t>(m));
    Rng rng = Rng(code_seed).stream(kLdpcStream);
    for (long long j = 0; j < n; ++j) {
        std::array<std::int32_t, 3> rows{-1, -1, -1};
        for (int k = 0; k < 3; ++k) {
            std::int32_t r;
            bool fresh;
            do {
                r = static_cast<std::int32_t>(rng.uniform_int(static_cast<int>(m)));
                fresh = true;
                for (int l = 0; l < k; ++l)
                    if (rows[static_cast<std::size_t>(l)] == r) fresh = false;
            } while (!fresh);
            rows[static_cast<std::size_t>(k)] = r;
            code.row_cols[static_cast<std::size_t>(r)].push_back(static_cast<std::int32_t>(j));
        }
        code.col_rows[static_cast<std::size_t>(j)] = rows;
    }
    return code;
}

std::vector<std::uint8_t> ldpc_syndrome(const LdpcCode& code, const std::vector<std::uint8_t>& v) {
    std::vector<std::uint8_t> s(static_cast<std::size_t>(code.m), 0);
    for (long long j = 0; j < code.n; ++j) {
        if (!v[static_cast<std::size_t>(j)]) continue;
        for (std::int32_t r : code.col_rows[static_cast<std::size_t>(j)]) s[static_cast<std::size_t>(r)] ^= 1;
    }
    return s;
}

// Sum-product decoding of the error pattern e with H e = target, i.i.d.
// prior P(e_j = 1) = w.
bool ldpc_bp_decode(const LdpcCode& code, const std::vector<std::uint8_t>& target, double w,
                    int max_iter, std::vector<std::uint8_t>& e_out) {
    const double llr_ch = std::log((1.0 - w) / w);
    const std::size_t n = static_cast<std::size_t>(code.n);

    std::vector<std::array<double, 3>> var_to_check(n, {llr_ch, llr_ch, llr_ch});
    std::vector<std::array<double, 3>> check_to_var(n, {0.0, 0.0, 0.0});
    // Edge position of column j within row r, precomputed once.
    std::vector<std::array<std::int32_t, 3>> edge_pos(n);
    {
        std::vector<std::int32_t> cursor(static_cast<std::size_t>(code.m), 0);
        for (std::size_t j = 0; j < n; ++j)
            for (int k = 0; k < 3; ++k) {
                const auto r = static_cast<std::size_t>(code.col_rows[j][static_cast<std::size_t>(k)]);
                edge_pos[j][static_cast<std::size_t>(k)] = cursor[r]++;
            }
    }
    std::vector<std::vector<double>> row_in(static_cast<std::size_t>(code.m));
    for (std::size_t r = 0; r < row_in.size(); ++r) row_in[r].resize(code.row_cols[r].size());

    e_out.assign(n, 0);
    auto clamp_t = [](double t) { return std::clamp(t, -0.9999999999, 0.9999999999); };
    for (int iter = 0; iter < max_iter; ++iter) {
        for (std::size_t j = 0; j < n; ++j)
            for (int k = 0; k < 3; ++k) {
                const auto r = static_cast<std::size_t>(code.col_rows[j][static_cast<std::size_t>(k)]);
                row_in[r][static_cast<std::size_t>(edge_pos[j][static_cast<std::size_t>(k)])] =
                    std::tanh(0.5 * var_to_check[j][static_cast<std::size_t>(k)]);
            }
        for (std::size_t j = 0; j < n; ++j) {
            for (int k = 0; k < 3; ++k) {
                const auto r = static_cast<std::size_t>(code.col_rows[j][static_cast<std::size_t>(k)]);
                double prod = target[r] ? -1.0 : 1.0;
                const auto& in = row_in[r];
                const auto self = static_cast<std::size_t>(edge_pos[j][static_cast<std::size_t>(k)]);
                for (std::size_t t = 0; t < in.size(); ++t)
                    if (t != self) prod *= in[t];
                check_to_var[j][static_cast<std::size_t>(k)] = 2.0 * std::atanh(clamp_t(prod));
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double total = llr_ch + check_to_var[j][0] + check_to_var[j][1] + check_to_var[j][2];
            e_out[j] = total < 0.0 ? 1 : 0;
            for (int k = 0; k < 3; ++k)
                var_to_check[j][static_cast<std::size_t>(k)] =
                    std::clamp(total - check_to_var[j][static_cast<std::size_t>(k)], -40.0, 40.0);
        }
        if (ldpc_syndrome(code, e_out) == target) return true;
    }
    return ldpc_syndrome(code, e_out) == target;
}

}  // namespace

long long ec_syndrome_bits(long long n, double w_hat, const EcConfig& cfg) {
    if (n <= 0) return 0;
    if (cfg.scheme == EcConfig::Scheme::Block) {
        const long long blocks = (n + cfg.block_len - 1) / cfg.block_len;
        return blocks * block_syndrome_len(cfg, w_hat);
    }
    const double rate = std::min(1.0, binary_entropy(w_hat) + cfg.margin);
    return static_cast<long long>(std::ceil(static_cast<double>(n) * rate));
}

EcMessage ec_encode(const std::vector<std::uint8_t>& a, double w_hat, const EcConfig& cfg,
                    std::uint64_t code_seed) {
    EcMessage msg;
    msg.w_hat = w_hat;
    msg.n = static_cast<long long>(a.size());
    if (a.empty()) return msg;
    if (cfg.scheme == EcConfig::Scheme::Block) {
        const int L = cfg.block_len;
        const int slen = block_syndrome_len(cfg, w_hat);
        const auto cols = block_columns(cfg, slen, code_seed);
        const long long blocks = (msg.n + L - 1) / L;
        msg.syndrome.reserve(static_cast<std::size_t>(blocks * slen));
        for (long long b = 0; b < blocks; ++b) {
            std::uint32_t word = 0;
            for (int j = 0; j < L; ++j) {
                const long long idx = b * L + j;
                if (idx < msg.n && a[static_cast<std::size_t>(idx)]) word |= 1u << j;
            }
            const std::uint32_t s = block_syndrome(cols, word);
            for (int k = 0; k < slen; ++k)
                msg.syndrome.push_back(static_cast<std::uint8_t>((s >> k) & 1));
        }
    } else {
        const long long m = ec_syndrome_bits(msg.n, w_hat, cfg);
        const LdpcCode code = build_ldpc(msg.n, m, code_seed);
        msg.syndrome = ldpc_syndrome(code, a);
    }
    msg.tag = make_tag(a, cfg.tag_bits, code_seed);
    return msg;
}

EcResult ec_decode(const std::vector<std::uint8_t>& b, const EcMessage& msg, const EcConfig& cfg,
                   std::uint64_t code_seed) {
    EcResult res;
    if (static_cast<long long>(b.size()) != msg.n) throw std::invalid_argument("ec_decode: length mismatch");
    res.corrected = b;
    if (b.empty()) {
        res.ok = true;
        return res;
    }
    if (cfg.scheme == EcConfig::Scheme::Block) {
        const int L = cfg.block_len;
        const int slen = block_syndrome_len(cfg, msg.w_hat);
        const auto cols = block_columns(cfg, slen, code_seed);
        const long long blocks = (msg.n + L - 1) / L;
        if (static_cast<long long>(msg.syndrome.size()) != blocks * slen)
            throw std::invalid_argument("ec_decode: syndrome length mismatch");
        if (slen > 0) {
            const CosetTable table = build_coset_table(cols, slen, L);
            for (long long blk = 0; blk < blocks; ++blk) {
                std::uint32_t word = 0;
                for (int j = 0; j < L; ++j) {
                    const long long idx = blk * L + j;
                    if (idx < msg.n && b[static_cast<std::size_t>(idx)]) word |= 1u << j;
                }
                std::uint32_t sa = 0;
                for (int k = 0; k < slen; ++k)
                    if (msg.syndrome[static_cast<std::size_t>(blk * slen + k)]) sa |= 1u << k;
                const std::uint32_t se = sa ^ block_syndrome(cols, word);
                const std::uint32_t e = table.leader[se];
                if (table.weight[se] > cfg.decode_radius) res.flagged_blocks.push_back(blk);
                for (int j = 0; j < L; ++j) {
                    const long long idx = blk * L + j;
                    if (idx < msg.n && ((e >> j) & 1)) res.corrected[static_cast<std::size_t>(idx)] ^= 1;
                }
            }
        }
        res.ok = res.flagged_blocks.empty();
        if (!res.ok) res.failure = "blocks outside decode radius";
    } else {
        const long long m = static_cast<long long>(msg.syndrome.size());
        const LdpcCode code = build_ldpc(msg.n, m, code_seed);
        std::vector<std::uint8_t> target = ldpc_syndrome(code, b);
        for (std::size_t i = 0; i < target.size(); ++i) target[i] ^= msg.syndrome[i];
        const double w = std::max(msg.w_hat, cfg.w_floor);
        std::vector<std::uint8_t> e;
        res.ok = ldpc_bp_decode(code, target, w, cfg.max_iter, e);
        if (res.ok)
            for (std::size_t i = 0; i < e.size(); ++i) res.corrected[i] ^= e[i];
        else
            res.failure = "belief propagation did not converge";
    }
    if (res.ok && cfg.tag_bits > 0) {
        if (make_tag(res.corrected, cfg.tag_bits, code_seed) != msg.tag) {
            res.ok = false;
            res.failure = "verification tag mismatch";
        }
    }
    return res;
}

}  // namespace nskd
