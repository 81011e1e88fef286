#include "nskd/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "nskd/security.hpp"

namespace nskd {

namespace {

constexpr std::uint64_t kStreamSettings = 1;
constexpr std::uint64_t kStreamMeasure = 2;
constexpr std::uint64_t kStreamSample = 3;
constexpr std::uint64_t kStreamCode = 4;
constexpr std::uint64_t kStreamHash = 5;

}  // namespace

double auto_delta(long long n) { return std::pow(static_cast<double>(n), -0.25); }

void BoxSource::measure(const std::vector<int>& x, const std::vector<int>& y, Rng& rng,
                        std::vector<std::uint8_t>& a, std::vector<std::uint8_t>& b) const {
    nskd::measure(box_, x, y, rng, a, b);
}

void measure(const Box& source, const std::vector<int>& x, const std::vector<int>& y, Rng& rng,
             std::vector<std::uint8_t>& a, std::vector<std::uint8_t>& b) {
    const std::size_t n = x.size();
    a.resize(n);
    b.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (x[k] < 0 || x[k] >= source.settings() || y[k] < 0 || y[k] >= source.y_count())
            throw std::invalid_argument("measure: setting outside the source's range");
        const double u = rng.uniform();
        double acc = 0.0;
        int out = 3;
        for (int ab = 0; ab < 4; ++ab) {
            acc += source.at(ab >> 1, ab & 1, x[k], y[k]);
            if (u < acc) {
                out = ab;
                break;
            }
        }
        a[k] = static_cast<std::uint8_t>(out >> 1);
        b[k] = static_cast<std::uint8_t>(out & 1);
    }
}

void NBoxSource::measure(const std::vector<int>& x, const std::vector<int>& y, Rng& rng,
                         std::vector<std::uint8_t>& a, std::vector<std::uint8_t>& b) const {
    const int n = box_.pairs();
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("NBox source: pair count mismatch");
    const std::size_t xs = box_.pack_x(x);
    const std::size_t ys = box_.pack_y(y);
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t as = box_.a_card() - 1, bs = box_.b_card() - 1;
    for (std::size_t aa = 0; aa < box_.a_card() && acc <= u; ++aa)
        for (std::size_t bb = 0; bb < box_.b_card(); ++bb) {
            acc += box_.at(aa, bb, xs, ys);
            if (u < acc) {
                as = aa;
                bs = bb;
                break;
            }
        }
    a.resize(static_cast<std::size_t>(n));
    b.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        a[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((as >> i) & 1);
        b[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((bs >> i) & 1);
    }
}

Settings sample_settings(const ProtocolParams& params, Rng& rng) {
    params.validate();
    Settings s;
    const std::size_t n = static_cast<std::size_t>(params.n);
    s.i_bits.resize(n);
    s.j_bits.resize(n);
    s.x.resize(n);
    s.y.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        s.i_bits[k] = rng.bernoulli(params.delta) ? 1 : 0;
        s.j_bits[k] = rng.bernoulli(params.delta) ? 1 : 0;
        s.x[k] = s.i_bits[k] ? rng.uniform_int(params.m) : 0;
        s.y[k] = s.j_bits[k] ? rng.uniform_int(params.m) : params.m;
    }
    return s;
}

double estimate_bc(const Transcript& t) {
    if (t.est_set.empty())
        throw ProtocolAbort(ProtocolAbort::Reason::EmptyEstimationSet, "empty estimation set");
    double sum = 0.0;
    for (long long n : t.est_set) {
        const std::size_t k = static_cast<std::size_t>(n);
        sum += bc_term(t.a[k], t.b[k], t.x[k], t.y[k], t.m);
    }
    return sum / static_cast<double>(t.est_set.size());
}

Transcript run_protocol(const ProtocolParams& params, const Source& source) {
    params.validate();
    if (source.pairs() != 0 && source.pairs() != params.n)
        throw std::invalid_argument("scripted source commits to a different pair count");
    const Rng master(params.seed);

    Transcript t;
    t.n = params.n;
    t.m = params.m;
    t.delta = params.delta;
    t.seed = params.seed;

    // Step 1: settings and measurements.
    {
        Rng rng = master.stream(kStreamSettings);
        Settings s = sample_settings(params, rng);
        t.i_bits = std::move(s.i_bits);
        t.j_bits = std::move(s.j_bits);
        t.x = std::move(s.x);
        t.y = std::move(s.y);
    }
    {
        Rng rng = master.stream(kStreamMeasure);
        source.measure(t.x, t.y, rng, t.a, t.b);
    }

    // Step 2: publish I, J and the outcomes of the I=J=1 pairs; estimate
    // nonlocality from the pairs meeting the neighbor condition.
    t.public_log.push_back({"I", bits_to_string(t.i_bits)});
    t.public_log.push_back({"J", bits_to_string(t.j_bits)});
    std::string est_payload;
    std::vector<long long> raw_idx;
    for (long long k = 0; k < t.n; ++k) {
        const std::size_t u = static_cast<std::size_t>(k);
        if (t.i_bits[u] && t.j_bits[u]) {
            est_payload += std::to_string(k) + ":" + std::to_string(t.x[u]) + "," +
                           std::to_string(t.y[u]) + "," + std::to_string(int(t.a[u])) + "," +
                           std::to_string(int(t.b[u])) + ";";
            if (t.y[u] == t.x[u] || t.y[u] == (t.x[u] + 1) % t.m) t.est_set.push_back(k);
        } else if (!t.i_bits[u] && !t.j_bits[u]) {
            raw_idx.push_back(k);
        }
    }
    t.public_log.push_back({"estimation", est_payload});
    t.n_e = static_cast<long long>(t.est_set.size());
    t.b_est = estimate_bc(t);  // throws on empty estimation set

    // Sacrifice a random raw-key sample to measure w; both sides publish it.
    {
        Rng rng = master.stream(kStreamSample);
        std::vector<long long> pool = raw_idx;
        const long long want = static_cast<long long>(
            std::floor(params.sample_fraction * static_cast<double>(pool.size())));
        for (long long i = 0; i < want; ++i) {
            const std::size_t j =
                static_cast<std::size_t>(i) +
                static_cast<std::size_t>(rng.uniform_int(static_cast<int>(pool.size() - i)));
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
            t.sample_set.push_back(pool[static_cast<std::size_t>(i)]);
        }
        std::sort(t.sample_set.begin(), t.sample_set.end());
    }
    long long mismatches = 0;
    std::string sample_payload;
    for (long long k : t.sample_set) {
        const std::size_t u = static_cast<std::size_t>(k);
        if (t.a[u] != t.b[u]) ++mismatches;
        sample_payload += std::to_string(k) + ":" + std::to_string(int(t.a[u])) + "," +
                          std::to_string(int(t.b[u])) + ";";
    }
    t.public_log.push_back({"w_sample", sample_payload});
    t.w_hat = t.sample_set.empty()
                  ? 0.0
                  : static_cast<double>(mismatches) / static_cast<double>(t.sample_set.size());

    // Remaining raw key.
    std::vector<std::uint8_t> a_r, b_r;
    {
        std::vector<long long> keep;
        std::set_difference(raw_idx.begin(), raw_idx.end(), t.sample_set.begin(),
                            t.sample_set.end(), std::back_inserter(keep));
        a_r.reserve(keep.size());
        b_r.reserve(keep.size());
        for (long long k : keep) {
            a_r.push_back(t.a[static_cast<std::size_t>(k)]);
            b_r.push_back(t.b[static_cast<std::size_t>(k)]);
        }
    }
    t.n_r = static_cast<long long>(a_r.size());

    // No extractable key at the planned reconciliation cost: end the run
    // with an empty key instead of spending (or aborting on) error
    // correction the rate cannot pay for.
    const long long planned_tag =
        a_r.empty() ? 0 : std::min<long long>(params.ec.tag_bits, t.n_r);
    const long long planned_nc = ec_syndrome_bits(t.n_r, t.w_hat, params.ec) + planned_tag +
                                 static_cast<long long>(t.sample_set.size());
    const long long planned_ns =
        t.b_est > 0.0 ? protocol_key_length(t.n_r, planned_nc, t.b_est) : 0;
    if (planned_ns == 0) {
        t.n_c = planned_nc;
        t.n_s = 0;
        t.n_s_uc = output_length(t.n_r, t.n_c, t.b_est, t.n_e);
        t.hash = ToeplitzHash{static_cast<int>(std::max(1LL, t.n_r)), 0, {}};
        t.public_log.push_back({"no_key", "estimated nonlocality cannot pay the reconciliation cost"});
        return t;
    }

    // Step 3: error correction.
    const std::uint64_t code_seed = master.stream(kStreamCode).next_u64();
    EcMessage msg = ec_encode(a_r, t.w_hat, params.ec, code_seed);
    t.syndrome = msg.syndrome;
    t.syndrome.insert(t.syndrome.end(), msg.tag.begin(), msg.tag.end());
    t.public_log.push_back({"syndromes", bits_to_string(t.syndrome)});
    t.n_c = msg.bits() + static_cast<long long>(t.sample_set.size());

    EcResult dec = ec_decode(b_r, msg, params.ec, code_seed);
    if (!dec.ok)
        throw ProtocolAbort(ProtocolAbort::Reason::DecodeFailure, "error correction failed: " + dec.failure);

    // Step 4: privacy amplification. The operative length is the protocol
    // rate form; the composable finite-size length rides along in the record.
    t.n_s = protocol_key_length(t.n_r, t.n_c, t.b_est);
    t.n_s_uc = output_length(t.n_r, t.n_c, t.b_est, t.n_e);
    {
        Rng rng = master.stream(kStreamHash);
        t.hash = sample_hash(static_cast<int>(t.n_r), static_cast<int>(t.n_s), rng);
        t.key_a = apply_hash(t.hash, a_r);
        t.key_b = apply_hash(t.hash, dec.corrected);
        t.public_log.push_back({"hash", t.hash.seed_hex()});
    }
    return t;
}

std::string Transcript::to_json() const {
    nlohmann::json j;
    j["N"] = n;
    j["M"] = m;
    j["delta"] = delta;
    j["seed"] = seed;
    j["I"] = bits_to_string(i_bits);
    j["J"] = bits_to_string(j_bits);
    j["X"] = x;
    j["Y"] = y;
    j["A"] = bits_to_string(a);
    j["B"] = bits_to_string(b);
    j["estSet"] = est_set;
    j["sampleSet"] = sample_set;
    j["B_est"] = b_est;
    j["w_hat"] = w_hat;
    j["N_r"] = n_r;
    j["N_e"] = n_e;
    j["N_c"] = n_c;
    j["N_s"] = n_s;
    j["N_s_uc"] = n_s_uc;
    j["C"] = bits_to_string(syndrome);
    j["G"] = {{"inLen", hash.in_len}, {"outLen", hash.out_len}, {"seedHex", hash.seed_hex()}};
    j["K_A"] = bits_to_string(key_a);
    j["K_B"] = bits_to_string(key_b);
    nlohmann::json log = nlohmann::json::array();
    for (const auto& msg : public_log) log.push_back({{"step", msg.step}, {"payload", msg.payload}});
    j["publicLog"] = log;
    return j.dump(2);
}

Transcript Transcript::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    Transcript t;
    t.n = j.at("N").get<long long>();
    t.m = j.at("M").get<int>();
    t.delta = j.at("delta").get<double>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.i_bits = string_to_bits(j.at("I").get<std::string>());
    t.j_bits = string_to_bits(j.at("J").get<std::string>());
    t.x = j.at("X").get<std::vector<int>>();
    t.y = j.at("Y").get<std::vector<int>>();
    t.a = string_to_bits(j.at("A").get<std::string>());
    t.b = string_to_bits(j.at("B").get<std::string>());
    t.est_set = j.at("estSet").get<std::vector<long long>>();
    t.sample_set = j.at("sampleSet").get<std::vector<long long>>();
    t.b_est = j.at("B_est").get<double>();
    t.w_hat = j.at("w_hat").get<double>();
    t.n_r = j.at("N_r").get<long long>();
    t.n_e = j.at("N_e").get<long long>();
    t.n_c = j.at("N_c").get<long long>();
    t.n_s = j.at("N_s").get<long long>();
    t.n_s_uc = j.at("N_s_uc").get<long long>();
    t.syndrome = string_to_bits(j.at("C").get<std::string>());
    t.hash = ToeplitzHash::from_hex(j.at("G").at("inLen").get<int>(), j.at("G").at("outLen").get<int>(),
                                    j.at("G").at("seedHex").get<std::string>());
    t.key_a = string_to_bits(j.at("K_A").get<std::string>());
    t.key_b = string_to_bits(j.at("K_B").get<std::string>());
    for (const auto& e : j.at("publicLog"))
        t.public_log.push_back({e.at("step").get<std::string>(), e.at("payload").get<std::string>()});
    return t;
}

}  // namespace nskd
