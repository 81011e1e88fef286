#pragma once

#include <string>
#include <utility>
#include <vector>

namespace nskd {

/// Binary Shannon entropy with h(0) = h(1) = 0 by continuity.
double binary_entropy(double w);

/// Asymptotic secret-key rate 2*log2(1/(sqrt(2) B)) - h(w); may be negative.
double asymptotic_rate(double bc, double w);

struct RatePoint {
    double p;
    int m;
    double bc;
    double w;
    double rate_raw;
    double rate_clamped;
};

/// Rate rows for the noisy-EPR source over a purity grid.
std::vector<RatePoint> rate_curve(int m, const std::vector<double>& p_grid);

std::string rate_curve_csv(const std::vector<RatePoint>& rows);

/// Smallest purity with positive rate for M settings, by bisection.
double noise_threshold(int m, double tol = 1e-4);

/// argmax over M in {2..m_max} of the asymptotic rate at purity p; ties go
/// to smaller M.
std::pair<int, double> optimal_m(double p, int m_max);

/// Composable finite-size output length: one bit below
/// floor(N_r*2*log2((1/sqrt(2))/(B_est + N_e^{-1/4})) - N_c - sqrt(N_e)),
/// clamped at 0. The reserved bit makes the privacy-amplification bound
/// collapse to exactly sqrt(2)^(-sqrt(N_e)) for every parameter choice.
long long output_length(long long n_r, long long n_c, double b_est, long long n_e);

/// Operative protocol length max(0, floor(N_r*2*log2(1/(sqrt(2) B_est)) - N_c)):
/// the asymptotic assignment without finite-size smoothing, used for the
/// keys an actual desk-scale run emits.
long long protocol_key_length(long long n_r, long long n_c, double b_est);

/// Privacy-amplification distance bound sqrt(2)^(N+N_s+N_c+1) * bc_product.
double pa_bound(long long n, long long n_s, long long n_c, double bc_product);
/// Same bound in log2 (bc_product passed as log2 too); immune to underflow.
double pa_bound_log2(long long n, long long n_s, long long n_c, double log2_bc_product);

/// Composable-security epsilon sqrt(2)^(-sqrt(N_e)).
double security_epsilon(long long n_e);
double security_epsilon_log2(long long n_e);

/// Probability bound that the estimation step fails to certify the key:
/// 3N exp(-sqrt(N_e) (3M)^-2), clamped to [0,1].
double estimation_failure(long long n, long long n_e, int m);

/// Smallest N_e with estimation_failure(n, N_e, m) <= target.
long long solve_ne_for_failure(long long n, int m, double target);

struct SecurityReport {
    long long n_s = 0;
    double epsilon = 1.0;
    double est_failure = 1.0;
    double rate = 0.0;
    long long n_r = 0, n_e = 0, n_c = 0, n = 0;
    double b_est = 0.0;
    int m = 0;
    std::string to_json() const;
};

/// Report for one protocol run: the composable key length, its epsilon, the
/// estimation-failure bound and the achieved rate n_s/n.
SecurityReport security_report(long long n, long long n_r, long long n_e, long long n_c,
                               double b_est, int m);

/// Explicit conditional table P(k,c,e,g|z) for exact desk-scale distance
/// computations; k runs over 2^n_s key values.
struct KeyTable {
    int n_s = 0;
    int nk = 1, nc = 1, ne = 1, ng = 1, nz = 1;
    std::vector<double> p;  // index ((((k*nc + c)*ne + e)*ng + g)*nz + z)

    double& at(int k, int c, int e, int g, int z) {
        return p[static_cast<std::size_t>(((((k * nc + c) * ne + e) * ng + g) * nz + z))];
    }
    double at(int k, int c, int e, int g, int z) const {
        return p[static_cast<std::size_t>(((((k * nc + c) * ne + e) * ng + g) * nz + z))];
    }
    void allocate() {
        p.assign(static_cast<std::size_t>(nk) * nc * ne * ng * nz, 0.0);
    }
};

/// Exact distance of the table from an ideal key:
/// sum_{k,c,g} max_z sum_e |P(k,c,e,g|z) - 2^-n_s P(c,e,g|z)|.
double key_distance_exact(const KeyTable& table);

/// Discard Eve's outcome (sum e into one slot): data processing can only
/// shrink the distance.
KeyTable marginalize_eve(const KeyTable& table);

}  // namespace nskd
