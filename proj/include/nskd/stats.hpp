#pragma once

#include <map>
#include <stdexcept>
#include <vector>

namespace nskd {

/// Type/frequency of a string over a finite alphabet: integer counts keyed
/// exactly (no float equality games on the 1/N grid).
struct Frequency {
    int alphabet = 0;
    int n = 0;
    std::vector<int> counts;

    std::vector<double> as_distribution() const;
    bool operator==(const Frequency& o) const { return counts == o.counts; }
};

Frequency freq(const std::vector<int>& v, int alphabet);

/// (N+1)^(|V|-1), the standard cardinality bound on the set of types.
long long type_count_bound(int n, int alphabet);

/// Exact distribution of the type of an i.i.d. string: maps count vectors
/// to multinomial probabilities; sums to 1 within 1e-12.
std::map<std::vector<int>, double> type_distribution(const std::vector<double>& pv, int n);

/// True iff the mode of the type distribution is attained at q = P_V
/// (ties allowed). Requires every P_V(v) to sit on the 1/N grid.
bool mode_is_pv(const std::vector<double>& pv, int n);

/// Bernstein tail bound 2*exp(-omega^2/4) on
/// P(|sum V - N<V>| > omega*sqrt(<V^2> N)).
double bernstein_tail(long long n, double omega);

/// Lifts an i.i.d. event bound epsilon to symmetric distributions:
/// epsilon * (N+1)^(|V|-1).
double symmetric_event_bound(double epsilon, long long n, int alphabet);

/// Failure-probability bound for the split-sample estimate: the event
/// <V_1...V_{N1}> <= (V_est + N2^{-1/4})^{N1} holds except with probability
/// 2*(N1+N2+1)^(|V|-1)*exp(-sqrt(N2)/(4 v_plus^2)).
double estimation_confidence(long long n1, long long n2, double v_plus, int alphabet);

}  // namespace nskd
