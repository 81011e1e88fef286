#include "nskd/security.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"
#include "nskd/quantum.hpp"

namespace nskd {

long long output_length(long long n_r, long long n_c, double b_est, long long n_e) {
    if (n_r < 0 || n_c < 0 || n_e < 1 || b_est < 0.0)
        throw std::invalid_argument("output_length: bad arguments");
    const double g = b_est + std::pow(static_cast<double>(n_e), -0.25);
    if (g >= 1.0 / std::sqrt(2.0)) return 0;
    const double r = 2.0 * static_cast<double>(n_r) * std::log2((1.0 / std::sqrt(2.0)) / g) -
                     static_cast<double>(n_c) - std::sqrt(static_cast<double>(n_e));
    return std::max(0LL, static_cast<long long>(std::floor(r)) - 1);
}

long long protocol_key_length(long long n_r, long long n_c, double b_est) {
    if (n_r < 0 || n_c < 0 || b_est <= 0.0)
        throw std::invalid_argument("protocol_key_length: bad arguments");
    if (b_est >= 1.0 / std::sqrt(2.0)) return 0;
    const double r =
        2.0 * static_cast<double>(n_r) * std::log2(1.0 / (std::sqrt(2.0) * b_est)) -
        static_cast<double>(n_c);
    return std::max(0LL, static_cast<long long>(std::floor(r)));
}

double binary_entropy(double w) {
    if (w < 0.0 || w > 1.0) throw std::invalid_argument("binary_entropy: w outside [0,1]");
    if (w == 0.0 || w == 1.0) return 0.0;
    return -w * std::log2(w) - (1.0 - w) * std::log2(1.0 - w);
}

double asymptotic_rate(double bc, double w) {
    if (bc <= 0.0) throw std::invalid_argument("asymptotic_rate: B must be positive");
    return 2.0 * std::log2(1.0 / (std::sqrt(2.0) * bc)) - binary_entropy(w);
}

std::vector<RatePoint> rate_curve(int m, const std::vector<double>& p_grid) {
    std::vector<RatePoint> rows;
    rows.reserve(p_grid.size());
    for (double p : p_grid) {
        RatePoint r;
        r.p = p;
        r.m = m;
        r.bc = expected_bc(p, m);
        r.w = raw_error_rate(p);
        r.rate_raw = asymptotic_rate(r.bc, r.w);
        r.rate_clamped = std::max(0.0, r.rate_raw);
        rows.push_back(r);
    }
    return rows;
}

std::string rate_curve_csv(const std::vector<RatePoint>& rows) {
    std::string out = "p,M,B,w,rate_raw,rate_clamped\n";
    char buf[192];
    for (const RatePoint& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.10g,%d,%.12g,%.12g,%.12g,%.12g\n", r.p, r.m, r.bc, r.w,
                      r.rate_raw, r.rate_clamped);
        out += buf;
    }
    return out;
}

double noise_threshold(int m, double tol) {
    auto rate_at = [m](double p) { return asymptotic_rate(expected_bc(p, m), raw_error_rate(p)); };
    double lo = 0.0, hi = 1.0;
    if (rate_at(hi) <= 0.0) return 1.0;  // no key even noiseless
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (rate_at(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<int, double> optimal_m(double p, int m_max) {
    if (m_max < 2) throw std::invalid_argument("optimal_m: m_max must be >= 2");
    int best_m = 2;
    double best_rate = asymptotic_rate(expected_bc(p, 2), raw_error_rate(p));
    for (int m = 3; m <= m_max; ++m) {
        const double r = asymptotic_rate(expected_bc(p, m), raw_error_rate(p));
        if (r > best_rate) {
            best_rate = r;
            best_m = m;
        }
    }
    return {best_m, best_rate};
}

double pa_bound(long long n, long long n_s, long long n_c, double bc_product) {
    if (n < 0 || n_s < 0 || n_c < 0 || bc_product < 0.0)
        throw std::invalid_argument("pa_bound: negative argument");
    return std::pow(std::sqrt(2.0), static_cast<double>(n + n_s + n_c + 1)) * bc_product;
}

double pa_bound_log2(long long n, long long n_s, long long n_c, double log2_bc_product) {
    return 0.5 * static_cast<double>(n + n_s + n_c + 1) + log2_bc_product;
}

double security_epsilon(long long n_e) { return std::exp2(security_epsilon_log2(n_e)); }

double security_epsilon_log2(long long n_e) {
    if (n_e < 1) throw std::invalid_argument("security_epsilon: N_e must be >= 1");
    return -0.5 * std::sqrt(static_cast<double>(n_e));
}

double estimation_failure(long long n, long long n_e, int m) {
    if (n_e < 1) throw std::invalid_argument("estimation_failure: N_e must be >= 1");
    const double v = 3.0 * static_cast<double>(n) *
                     std::exp(-std::sqrt(static_cast<double>(n_e)) / (9.0 * m * m));
    return std::clamp(v, 0.0, 1.0);
}

long long solve_ne_for_failure(long long n, int m, double target) {
    if (target <= 0.0 || target >= 1.0) throw std::invalid_argument("target outside (0,1)");
    long long lo = 1, hi = 1;
    while (estimation_failure(n, hi, m) > target) {
        hi *= 2;
        if (hi > (1LL << 60)) throw std::runtime_error("solve_ne_for_failure: no feasible N_e");
    }
    while (lo < hi) {
        const long long mid = lo + (hi - lo) / 2;
        if (estimation_failure(n, mid, m) <= target)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

SecurityReport security_report(long long n, long long n_r, long long n_e, long long n_c,
                               double b_est, int m) {
    SecurityReport rep;
    rep.n = n;
    rep.n_r = n_r;
    rep.n_e = n_e;
    rep.n_c = n_c;
    rep.b_est = b_est;
    rep.m = m;
    rep.n_s = output_length(n_r, n_c, b_est, n_e);
    rep.epsilon = security_epsilon(n_e);
    rep.est_failure = estimation_failure(n, n_e, m);
    rep.rate = n > 0 ? static_cast<double>(rep.n_s) / static_cast<double>(n) : 0.0;
    return rep;
}

std::string SecurityReport::to_json() const {
    nlohmann::json j;
    j["N_s"] = n_s;
    j["epsilon"] = epsilon;
    j["estFailure"] = est_failure;
    j["rate"] = rate;
    j["inputs"] = {{"N", n}, {"N_r", n_r}, {"N_e", n_e}, {"N_c", n_c}, {"B_est", b_est}, {"M", m}};
    return j.dump(2);
}

double key_distance_exact(const KeyTable& t) {
    if (t.nk != (1 << t.n_s)) throw std::invalid_argument("key table: |K| must be 2^N_s");
    for (int z = 0; z < t.nz; ++z) {
        double s = 0.0;
        for (int k = 0; k < t.nk; ++k)
            for (int c = 0; c < t.nc; ++c)
                for (int e = 0; e < t.ne; ++e)
                    for (int g = 0; g < t.ng; ++g) s += t.at(k, c, e, g, z);
        if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("key table not normalized");
    }
    const double u = std::exp2(-static_cast<double>(t.n_s));
    double total = 0.0;
    for (int k = 0; k < t.nk; ++k) {
        for (int c = 0; c < t.nc; ++c) {
            for (int g = 0; g < t.ng; ++g) {
                double best_z = 0.0;
                for (int z = 0; z < t.nz; ++z) {
                    double s = 0.0;
                    for (int e = 0; e < t.ne; ++e) {
                        double marg = 0.0;
                        for (int kk = 0; kk < t.nk; ++kk) marg += t.at(kk, c, e, g, z);
                        s += std::abs(t.at(k, c, e, g, z) - u * marg);
                    }
                    best_z = std::max(best_z, s);
                }
                total += best_z;
            }
        }
    }
    return total;
}

KeyTable marginalize_eve(const KeyTable& t) {
    KeyTable r = t;
    r.ne = 1;
    r.allocate();
    for (int k = 0; k < t.nk; ++k)
        for (int c = 0; c < t.nc; ++c)
            for (int e = 0; e < t.ne; ++e)
                for (int g = 0; g < t.ng; ++g)
                    for (int z = 0; z < t.nz; ++z) r.at(k, c, 0, g, z) += t.at(k, c, e, g, z);
    return r;
}

}  // namespace nskd
