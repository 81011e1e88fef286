#include "nskd/quantum.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace nskd {

namespace {

using Cx = std::complex<double>;
using Mat2 = std::array<Cx, 4>;   // row-major 2x2
using Mat4 = std::array<Cx, 16>;  // row-major 4x4

// Projector onto the basis vector (|0> + s*e^{i*phase}|1>)/sqrt(2),
// s = -1 for outcome 0, +1 for outcome 1.
Mat2 projector(double phase, int outcome) {
    const double s = outcome == 0 ? -1.0 : 1.0;
    const Cx c0{1.0 / std::sqrt(2.0), 0.0};
    const Cx c1 = s * std::exp(Cx{0.0, phase}) / std::sqrt(2.0);
    return {c0 * std::conj(c0), c0 * std::conj(c1), c1 * std::conj(c0), c1 * std::conj(c1)};
}

Mat4 kron(const Mat2& a, const Mat2& b) {
    Mat4 r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    r[static_cast<std::size_t>((2 * i + k) * 4 + (2 * j + l))] =
                        a[static_cast<std::size_t>(2 * i + j)] * b[static_cast<std::size_t>(2 * k + l)];
    return r;
}

double trace_prod(const Mat4& a, const Mat4& b) {
    Cx t{0.0, 0.0};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            t += a[static_cast<std::size_t>(4 * i + k)] * b[static_cast<std::size_t>(4 * k + i)];
    return t.real();
}

}  // namespace

Box epr_box(const EprParams& params) {
    const double p = params.p;
    const int m = params.m;
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("purity outside [0,1]");
    if (m < 2) throw std::invalid_argument("setting count must be >= 2");

    // rho = p |Phi+><Phi+| + (1-p) I/4
    Mat4 rho{};
    const std::array<Cx, 4> phi{Cx{1 / std::sqrt(2.0), 0}, Cx{0, 0}, Cx{0, 0}, Cx{1 / std::sqrt(2.0), 0}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            rho[static_cast<std::size_t>(4 * i + j)] =
                p * phi[static_cast<std::size_t>(i)] * std::conj(phi[static_cast<std::size_t>(j)]);
    for (int i = 0; i < 4; ++i) rho[static_cast<std::size_t>(5 * i)] += (1.0 - p) / 4.0;

    const double pi = std::numbers::pi;
    const int yc = m + 1;
    std::vector<double> entries(static_cast<std::size_t>(4 * m * yc), 0.0);
    for (int x = 0; x < m; ++x) {
        const double pha = pi * x / m;
        for (int y = 0; y < yc; ++y) {
            const double phb = y == m ? 0.0 : -pi * (y - 0.5) / m;
            for (int a = 0; a < 2; ++a) {
                const Mat2 pa = projector(pha, a);
                for (int b = 0; b < 2; ++b) {
                    const Mat4 pab = kron(pa, projector(phb, b));
                    entries[static_cast<std::size_t>(((a * 2 + b) * m + x) * yc + y)] =
                        trace_prod(rho, pab);
                }
            }
        }
    }
    return Box(m, true, std::move(entries));
}

double expected_bc(double p, int m) {
    const double s = std::sin(std::numbers::pi / (4.0 * m));
    return 0.5 + m * (p * s * s + (1.0 - p) / 2.0);
}

double raw_error_rate(double p) { return (1.0 - p) / 2.0; }

}  // namespace nskd
