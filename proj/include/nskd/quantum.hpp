#pragma once

#include "nskd/box.hpp"

namespace nskd {

/// Noisy EPR source: purity p in [0,1] and setting count M >= 2.
struct EprParams {
    double p;
    int m;
};

/// Born-rule box for the state p*Phi + (1-p)*I/4 measured in the equatorial
/// bases: Alice's setting x at phase pi*x/M, Bob's setting y < M at phase
/// -pi*(y-1/2)/M, Bob's raw-key setting y = M at phase 0. Outcome 0 is the
/// "-" basis vector for both parties, which yields
/// P(A=B|x=0,y=M) = (1+p)/2 and bc_value equal to expected_bc.
Box epr_box(const EprParams& params);
inline Box epr_box(double p, int m) { return epr_box(EprParams{p, m}); }

/// Closed-form <B> of the EPR box: 1/2 + M*(p*sin^2(pi/4M) + (1-p)/2).
double expected_bc(double p, int m);

/// Raw-key error rate w = (1-p)/2.
double raw_error_rate(double p);

}  // namespace nskd
