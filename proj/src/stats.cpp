#include "nskd/stats.hpp"

#include <cmath>

namespace nskd {

std::vector<double> Frequency::as_distribution() const {
    std::vector<double> q(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        q[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
    return q;
}

Frequency freq(const std::vector<int>& v, int alphabet) {
    if (v.empty()) throw std::invalid_argument("freq of empty string");
    Frequency f;
    f.alphabet = alphabet;
    f.n = static_cast<int>(v.size());
    f.counts.assign(static_cast<std::size_t>(alphabet), 0);
    for (int s : v) {
        if (s < 0 || s >= alphabet) throw std::invalid_argument("symbol outside alphabet");
        ++f.counts[static_cast<std::size_t>(s)];
    }
    return f;
}

long long type_count_bound(int n, int alphabet) {
    if (n < 1 || alphabet < 1) throw std::invalid_argument("type_count_bound: bad arguments");
    long long r = 1;
    for (int i = 1; i < alphabet; ++i) r *= (n + 1);
    return r;
}

namespace {

void enumerate_counts(int alphabet, int remaining, std::vector<int>& cur,
                      const std::vector<double>& pv, double n_fact,
                      std::map<std::vector<int>, double>& out) {
    if (static_cast<int>(cur.size()) == alphabet - 1) {
        cur.push_back(remaining);
        double prob = n_fact;
        for (std::size_t v = 0; v < cur.size(); ++v) {
            const int k = cur[v];
            for (int i = 2; i <= k; ++i) prob /= i;
            prob *= std::pow(pv[v], k);
        }
        if (prob != 0.0) out[cur] = prob;
        cur.pop_back();
        return;
    }
    for (int k = 0; k <= remaining; ++k) {
        cur.push_back(k);
        enumerate_counts(alphabet, remaining - k, cur, pv, n_fact, out);
        cur.pop_back();
    }
}

}  // namespace

std::map<std::vector<int>, double> type_distribution(const std::vector<double>& pv, int n) {
    const int alphabet = static_cast<int>(pv.size());
    if (alphabet < 1 || n < 1) throw std::invalid_argument("type_distribution: bad arguments");
    if (n > 16 || (alphabet > 3 && n > 10))
        throw std::invalid_argument("type_distribution: instance too large for exact enumeration");
    double s = 0.0;
    for (double p : pv) {
        if (p < 0.0) throw std::invalid_argument("type_distribution: negative probability");
        s += p;
    }
    if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("type_distribution: P_V not normalized");

    double n_fact = 1.0;
    for (int i = 2; i <= n; ++i) n_fact *= i;
    std::map<std::vector<int>, double> out;
    std::vector<int> cur;
    enumerate_counts(alphabet, n, cur, pv, n_fact, out);
    return out;
}

bool mode_is_pv(const std::vector<double>& pv, int n) {
    std::vector<int> grid_counts(pv.size());
    for (std::size_t v = 0; v < pv.size(); ++v) {
        const double k = pv[v] * n;
        const double r = std::round(k);
        if (std::abs(k - r) > 1e-9)
            throw std::invalid_argument("mode_is_pv: P_V not on the 1/N grid");
        grid_counts[v] = static_cast<int>(r);
    }
    auto dist = type_distribution(pv, n);
    double best = 0.0;
    for (const auto& [q, p] : dist) best = std::max(best, p);
    auto it = dist.find(grid_counts);
    const double at_pv = it == dist.end() ? 0.0 : it->second;
    return at_pv >= best * (1.0 - 1e-12);
}

double bernstein_tail(long long, double omega) { return 2.0 * std::exp(-omega * omega / 4.0); }

double symmetric_event_bound(double epsilon, long long n, int alphabet) {
    if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon outside [0,1]");
    double bound = epsilon;
    for (int i = 1; i < alphabet; ++i) bound *= static_cast<double>(n + 1);
    return bound;
}

double estimation_confidence(long long n1, long long n2, double v_plus, int alphabet) {
    if (n1 < 1 || n2 < 1 || v_plus <= 0.0) throw std::invalid_argument("estimation_confidence: bad arguments");
    double types = 1.0;
    for (int i = 1; i < alphabet; ++i) types *= static_cast<double>(n1 + n2 + 1);
    return 2.0 * types * std::exp(-std::sqrt(static_cast<double>(n2)) / (4.0 * v_plus * v_plus));
}

}  // namespace nskd
