#include "nskd/box.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace nskd {

namespace {

void validate_common(int m, std::size_t want, std::size_t got) {
    if (m < 2 || m > Box::kMaxSettings) throw BoxError("setting count M out of range");
    if (want != got) {
        std::ostringstream os;
        os << "entry array has " << got << " values, expected " << want;
        throw BoxError(os.str());
    }
}

}  // namespace

Box::Box(int m, bool bob_extra, std::vector<double> entries)
    : m_(m), extra_(bob_extra), e_(std::move(entries)) {
    const std::size_t want = static_cast<std::size_t>(4 * m_) * static_cast<std::size_t>(m_ + (extra_ ? 1 : 0));
    validate_common(m, want, e_.size());
    for (double& v : e_) {
        if (v < 0.0) {
            if (v < -kClampTol) throw BoxError("negative probability entry");
            v = 0.0;
        }
        if (v > 1.0 + 1e-12) throw BoxError("probability entry above 1");
    }
    for (int x = 0; x < m_; ++x) {
        for (int y = 0; y < y_count(); ++y) {
            double s = at(0, 0, x, y) + at(0, 1, x, y) + at(1, 0, x, y) + at(1, 1, x, y);
            if (std::abs(s - 1.0) > 1e-12) throw BoxError("block not normalized");
        }
    }
    NsReport rep = check_nonsignaling(*this, kNsTol);
    if (!rep.pass) throw BoxError("signaling box: " + rep.worst);
}

NsReport check_nonsignaling(const Box& box, double tol) {
    NsReport rep;
    const int m = box.settings();
    std::ostringstream worst;
    // Alice's marginal for (a,x) must not depend on y.
    for (int a = 0; a < 2; ++a) {
        for (int x = 0; x < m; ++x) {
            double lo = 2.0, hi = -1.0;
            for (int y = 0; y < box.y_count(); ++y) {
                double s = box.at(a, 0, x, y) + box.at(a, 1, x, y);
                lo = std::min(lo, s);
                hi = std::max(hi, s);
            }
            if (hi - lo > rep.alice_residual) {
                rep.alice_residual = hi - lo;
                worst.str("");
                worst << "party=A outcome=" << a << " setting=" << x;
            }
        }
    }
    std::string worst_a = worst.str();
    worst.str("");
    for (int b = 0; b < 2; ++b) {
        for (int y = 0; y < box.y_count(); ++y) {
            double lo = 2.0, hi = -1.0;
            for (int x = 0; x < m; ++x) {
                double s = box.at(0, b, x, y) + box.at(1, b, x, y);
                lo = std::min(lo, s);
                hi = std::max(hi, s);
            }
            if (hi - lo > rep.bob_residual) {
                rep.bob_residual = hi - lo;
                worst.str("");
                worst << "party=B outcome=" << b << " setting=" << y;
            }
        }
    }
    rep.max_residual = std::max(rep.alice_residual, rep.bob_residual);
    rep.worst = rep.alice_residual >= rep.bob_residual ? worst_a : worst.str();
    rep.pass = rep.max_residual <= tol;
    return rep;
}

NBox::NBox(int n_pairs, int m, bool bob_extra, std::vector<double> entries)
    : n_(n_pairs), m_(m), extra_(bob_extra), e_(std::move(entries)) {
    if (n_ < 1 || n_ > kMaxPairs) throw BoxError("pair count out of range (1..4)");
    if (m_ < 2 || m_ > Box::kMaxSettings) throw BoxError("setting count M out of range");
    xc_ = 1;
    yc_ = 1;
    const int ycnt = m_ + (extra_ ? 1 : 0);
    for (int i = 0; i < n_; ++i) {
        xc_ *= static_cast<std::size_t>(m_);
        yc_ *= static_cast<std::size_t>(ycnt);
    }
    const std::size_t want = a_card() * b_card() * xc_ * yc_;
    if (want > kMaxEntries) throw BoxError("NBox too large for exact storage");
    if (want != e_.size()) throw BoxError("NBox entry array size mismatch");
    for (double& v : e_) {
        if (v < 0.0) {
            if (v < -1e-13) throw BoxError("negative probability entry");
            v = 0.0;
        }
    }
    for (std::size_t xs = 0; xs < xc_; ++xs) {
        for (std::size_t ys = 0; ys < yc_; ++ys) {
            double s = 0.0;
            for (std::size_t as = 0; as < a_card(); ++as)
                for (std::size_t bs = 0; bs < b_card(); ++bs) s += at(as, bs, xs, ys);
            if (std::abs(s - 1.0) > 1e-10) throw BoxError("NBox block not normalized");
        }
    }
    NsReport rep = check_nonsignaling(*this, kNsTol);
    if (!rep.pass) throw BoxError("signaling NBox: " + rep.worst);
}

int NBox::x_digit(std::size_t xs, int i) const {
    for (int k = 0; k < i; ++k) xs /= static_cast<std::size_t>(m_);
    return static_cast<int>(xs % static_cast<std::size_t>(m_));
}

int NBox::y_digit(std::size_t ys, int i) const {
    const std::size_t yc = static_cast<std::size_t>(y_count());
    for (int k = 0; k < i; ++k) ys /= yc;
    return static_cast<int>(ys % yc);
}

std::size_t NBox::pack_x(const std::vector<int>& x) const {
    std::size_t v = 0;
    for (int i = n_ - 1; i >= 0; --i) v = v * static_cast<std::size_t>(m_) + static_cast<std::size_t>(x[i]);
    return v;
}

std::size_t NBox::pack_y(const std::vector<int>& y) const {
    std::size_t v = 0;
    for (int i = n_ - 1; i >= 0; --i) v = v * static_cast<std::size_t>(y_count()) + static_cast<std::size_t>(y[i]);
    return v;
}

NsReport check_nonsignaling(const NBox& box, double tol) {
    NsReport rep;
    const int n = box.pairs();
    const int m = box.settings();
    const int ycnt = box.y_count();
    std::ostringstream worst;

    // Subsystem-wise constraints; per the equivalence for multipartite
    // no-signaling this covers arbitrary subsets.
    std::size_t x_stride = 1;
    for (int i = 0; i < n; ++i) {
        // Alice subsystem i: sum over a_i independent of x_i.
        for (std::size_t as = 0; as < box.a_card(); ++as) {
            if ((as >> i) & 1) continue;  // iterate with a_i = 0, add a_i = 1 inside
            const std::size_t as1 = as | (std::size_t{1} << i);
            for (std::size_t bs = 0; bs < box.b_card(); ++bs) {
                for (std::size_t xs = 0; xs < box.x_card(); ++xs) {
                    if (box.x_digit(xs, i) != 0) continue;
                    for (std::size_t ys = 0; ys < box.y_card(); ++ys) {
                        double ref = box.at(as, bs, xs, ys) + box.at(as1, bs, xs, ys);
                        for (int xi = 1; xi < m; ++xi) {
                            const std::size_t xs2 = xs + x_stride * static_cast<std::size_t>(xi);
                            double v = box.at(as, bs, xs2, ys) + box.at(as1, bs, xs2, ys);
                            double d = std::abs(v - ref);
                            if (d > rep.alice_residual) {
                                rep.alice_residual = d;
                                worst.str("");
                                worst << "party=A" << i << " setting=" << xi;
                            }
                        }
                    }
                }
            }
        }
        x_stride *= static_cast<std::size_t>(m);
    }
    std::string worst_a = worst.str();
    worst.str("");
    std::size_t y_stride = 1;
    for (int i = 0; i < n; ++i) {
        for (std::size_t bs = 0; bs < box.b_card(); ++bs) {
            if ((bs >> i) & 1) continue;
            const std::size_t bs1 = bs | (std::size_t{1} << i);
            for (std::size_t as = 0; as < box.a_card(); ++as) {
                for (std::size_t ys = 0; ys < box.y_card(); ++ys) {
                    if (box.y_digit(ys, i) != 0) continue;
                    for (std::size_t xs = 0; xs < box.x_card(); ++xs) {
                        double ref = box.at(as, bs, xs, ys) + box.at(as, bs1, xs, ys);
                        for (int yi = 1; yi < ycnt; ++yi) {
                            const std::size_t ys2 = ys + y_stride * static_cast<std::size_t>(yi);
                            double v = box.at(as, bs, xs, ys2) + box.at(as, bs1, xs, ys2);
                            double d = std::abs(v - ref);
                            if (d > rep.bob_residual) {
                                rep.bob_residual = d;
                                worst.str("");
                                worst << "party=B" << i << " setting=" << yi;
                            }
                        }
                    }
                }
            }
        }
        y_stride *= static_cast<std::size_t>(ycnt);
    }
    rep.max_residual = std::max(rep.alice_residual, rep.bob_residual);
    rep.worst = rep.alice_residual >= rep.bob_residual ? worst_a : worst.str();
    rep.pass = rep.max_residual <= tol;
    return rep;
}

double DualVector::dot(const Box& box) const {
    double s = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int x = 0; x < m_; ++x)
                for (int y = 0; y < m_; ++y) s += at(a, b, x, y) * box.at(a, b, x, y);
    return s;
}

DualVector DualVector::abs() const {
    DualVector r(m_);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = std::fabs(e_[i]);
    return r;
}

DualVector& DualVector::operator+=(const DualVector& o) {
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
    return *this;
}

DualVector& DualVector::operator-=(const DualVector& o) {
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
    return *this;
}

DualVector& DualVector::scale(double s) {
    for (double& v : e_) v *= s;
    return *this;
}

std::vector<std::pair<int, int>> estimation_settings(int m) {
    std::vector<std::pair<int, int>> s;
    s.reserve(static_cast<std::size_t>(2 * m));
    for (int x = 0; x < m; ++x) {
        s.emplace_back(x, x);
        s.emplace_back(x, (x + 1) % m);
    }
    return s;
}

double bc_term(int a, int b, int x, int y, int m) {
    const int corner = (x == m - 1 && y == 0) ? 1 : 0;
    return 0.5 + m * static_cast<double>(a ^ b ^ corner);
}

DualVector mu(int m) {
    DualVector v(m);
    const double w = 1.0 / (4.0 * m);
    for (auto [x, y] : estimation_settings(m))
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) v.set(a, b, x, y, w);
    return v;
}

// Sign of nu's block at estimation setting (x,y): +1 on the superdiagonal
// (incl. the wrap block) and at (0,0), -1 on the rest of the diagonal. This
// is the unique pattern for which (mu + nu) . P = P_A(0|x=0) on the whole
// no-signaling polytope; bc_value() asserts the induced identity on every
// call.
namespace {
double nu_sign(int x, int y, int m) {
    if (y == (x + 1) % m) return 1.0;
    return x == 0 ? 1.0 : -1.0;
}
}  // namespace

DualVector nu(int m) {
    DualVector v(m);
    for (auto [x, y] : estimation_settings(m)) {
        const int corner = (x == m - 1 && y == 0) ? 1 : 0;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                if ((a ^ b ^ corner) == 1)
                    v.set(a, b, x, y, 0.5 * (a == 0 ? 1.0 : -1.0) * nu_sign(x, y, m));
            }
        }
    }
    return v;
}

DualVector beta_a(int m, int a) {
    DualVector v = mu(m);
    DualVector n = nu(m);
    if (a != 0) n.scale(-1.0);
    v += n;
    return v;
}

DualVector beta(int m) {
    DualVector v = mu(m);
    v += nu(m).abs();
    return v;
}

double bc_value(const Box& box) {
    const int m = box.settings();
    double sampled = 0.0;
    const double w = 1.0 / (2.0 * m);
    for (auto [x, y] : estimation_settings(m))
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) sampled += w * box.at(a, b, x, y) * bc_term(a, b, x, y, m);
    const double dual = beta(m).dot(box);
    if (std::abs(sampled - dual) > 1e-10)
        throw BoxError("bc_value internal identity violated (mu/nu construction)");
    return sampled;
}

double bc_product(const NBox& box) {
    const int n = box.pairs();
    const int m = box.settings();
    const DualVector b = beta(m);
    double total = 0.0;
    for (std::size_t as = 0; as < box.a_card(); ++as) {
        for (std::size_t bs = 0; bs < box.b_card(); ++bs) {
            for (std::size_t xs = 0; xs < box.x_card(); ++xs) {
                for (std::size_t ys = 0; ys < box.y_card(); ++ys) {
                    bool in_block = true;
                    double coef = 1.0;
                    for (int i = 0; i < n && in_block; ++i) {
                        const int yi = box.y_digit(ys, i);
                        if (yi >= m) {
                            in_block = false;
                            break;
                        }
                        coef *= b.at(static_cast<int>((as >> i) & 1), static_cast<int>((bs >> i) & 1),
                                     box.x_digit(xs, i), yi);
                    }
                    if (in_block && coef != 0.0) total += coef * box.at(as, bs, xs, ys);
                }
            }
        }
    }
    return total;
}

double marginal_identity_residual(const NBox& box, const std::vector<int>& a_string) {
    const int n = box.pairs();
    const int m = box.settings();
    if (static_cast<int>(a_string.size()) != n) throw BoxError("a-string length mismatch");
    NsReport rep = check_nonsignaling(box);
    if (!rep.pass) throw BoxError("marginal identity requires a no-signaling box");

    std::size_t as = 0;
    for (int i = n - 1; i >= 0; --i) as = as * 2 + static_cast<std::size_t>(a_string[i]);

    // P_A|X(a, 0): marginal over b-strings at x = 0-string, any y-string.
    double lhs = 0.0;
    for (std::size_t bs = 0; bs < box.b_card(); ++bs) lhs += box.at(as, bs, 0, 0);

    std::vector<DualVector> betas;
    betas.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) betas.push_back(beta_a(m, a_string[i]));

    double rhs = 0.0;
    for (std::size_t aa = 0; aa < box.a_card(); ++aa) {
        for (std::size_t bs = 0; bs < box.b_card(); ++bs) {
            for (std::size_t xs = 0; xs < box.x_card(); ++xs) {
                for (std::size_t ys = 0; ys < box.y_card(); ++ys) {
                    bool in_block = true;
                    double coef = 1.0;
                    for (int i = 0; i < n; ++i) {
                        const int yi = box.y_digit(ys, i);
                        if (yi >= m) {
                            in_block = false;
                            break;
                        }
                        coef *= betas[static_cast<std::size_t>(i)].at(
                            static_cast<int>((aa >> i) & 1), static_cast<int>((bs >> i) & 1),
                            box.x_digit(xs, i), yi);
                        if (coef == 0.0) break;
                    }
                    if (in_block && coef != 0.0) rhs += coef * box.at(aa, bs, xs, ys);
                }
            }
        }
    }
    return std::abs(lhs - rhs);
}

Box relabel(const Box& box, int m) {
    const int M = box.settings();
    if (m < 0 || m >= M) throw BoxError("relabel shift out of range");
    std::vector<double> out(box.entries().size(), 0.0);
    const int yc = box.y_count();
    auto put = [&](int a, int b, int x, int y, double v) {
        out[static_cast<std::size_t>(((a * 2 + b) * M + x) * yc + y)] = v;
    };
    for (int x = 0; x < M; ++x) {
        const int fa = (m > 0 && x >= M - m) ? 1 : 0;
        for (int y = 0; y < M; ++y) {
            const int fb = (m > 0 && y >= M - m) ? 1 : 0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    put(a ^ fa, b ^ fb, (x + m) % M, (y + m) % M, box.at(a, b, x, y));
        }
        if (box.bob_extra()) {
            // raw-key column: Bob's setting and outcome labels untouched
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) put(a ^ fa, b, (x + m) % M, M, box.at(a, b, x, M));
        }
    }
    return Box(M, box.bob_extra(), std::move(out));
}

Box mix(const Box& b1, const Box& b2, double lambda) {
    if (b1.settings() != b2.settings() || b1.bob_extra() != b2.bob_extra())
        throw BoxError("mix: incompatible shapes");
    if (lambda < 0.0 || lambda > 1.0) throw BoxError("mix: weight outside [0,1]");
    std::vector<double> out(b1.entries().size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = lambda * b1.entries()[i] + (1.0 - lambda) * b2.entries()[i];
    return Box(b1.settings(), b1.bob_extra(), std::move(out));
}

NBox product(const std::vector<Box>& factors) {
    if (factors.empty()) throw BoxError("product of zero boxes");
    const int n = static_cast<int>(factors.size());
    const int m = factors[0].settings();
    const bool extra = factors[0].bob_extra();
    for (const Box& f : factors)
        if (f.settings() != m || f.bob_extra() != extra) throw BoxError("product: incompatible shapes");
    const int ycnt = m + (extra ? 1 : 0);
    std::size_t xc = 1, yc = 1;
    for (int i = 0; i < n; ++i) {
        xc *= static_cast<std::size_t>(m);
        yc *= static_cast<std::size_t>(ycnt);
    }
    const std::size_t ac = std::size_t{1} << n;
    if (n > NBox::kMaxPairs || ac * ac * xc * yc > NBox::kMaxEntries)
        throw BoxError("product: NBox too large for exact storage");
    std::vector<double> out(ac * ac * xc * yc);
    for (std::size_t as = 0; as < ac; ++as) {
        for (std::size_t bs = 0; bs < ac; ++bs) {
            for (std::size_t xs = 0; xs < xc; ++xs) {
                for (std::size_t ys = 0; ys < yc; ++ys) {
                    double v = 1.0;
                    std::size_t xr = xs, yr = ys;
                    for (int i = 0; i < n; ++i) {
                        const int xi = static_cast<int>(xr % static_cast<std::size_t>(m));
                        const int yi = static_cast<int>(yr % static_cast<std::size_t>(ycnt));
                        xr /= static_cast<std::size_t>(m);
                        yr /= static_cast<std::size_t>(ycnt);
                        v *= factors[static_cast<std::size_t>(i)].at(
                            static_cast<int>((as >> i) & 1), static_cast<int>((bs >> i) & 1), xi, yi);
                    }
                    out[((as * ac + bs) * xc + xs) * yc + ys] = v;
                }
            }
        }
    }
    return NBox(n, m, extra, std::move(out));
}

Box local_deterministic(const std::vector<int>& fa, const std::vector<int>& fb) {
    const int m = static_cast<int>(fa.size());
    const bool extra = static_cast<int>(fb.size()) == m + 1;
    if (!extra && static_cast<int>(fb.size()) != m) throw BoxError("fb must cover M or M+1 settings");
    const int yc = m + (extra ? 1 : 0);
    std::vector<double> out(static_cast<std::size_t>(4 * m * yc), 0.0);
    for (int x = 0; x < m; ++x)
        for (int y = 0; y < yc; ++y)
            out[static_cast<std::size_t>(((fa[static_cast<std::size_t>(x)] * 2 +
                                           fb[static_cast<std::size_t>(y)]) *
                                              m +
                                          x) *
                                             yc +
                                         y)] = 1.0;
    return Box(m, extra, std::move(out));
}

Box pr_analog(int m, bool bob_extra) {
    const int yc = m + (bob_extra ? 1 : 0);
    std::vector<double> out(static_cast<std::size_t>(4 * m * yc), 0.0);
    auto put = [&](int a, int b, int x, int y, double v) {
        out[static_cast<std::size_t>(((a * 2 + b) * m + x) * yc + y)] = v;
    };
    for (int x = 0; x < m; ++x) {
        for (int y = 0; y < m; ++y) {
            const int corner = (x == m - 1 && y == 0) ? 1 : 0;
            put(0, corner, x, y, 0.5);
            put(1, 1 ^ corner, x, y, 0.5);
        }
        if (bob_extra)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) put(a, b, x, m, 0.25);
    }
    return Box(m, bob_extra, std::move(out));
}

Box uniform_box(int m, bool bob_extra) {
    const int yc = m + (bob_extra ? 1 : 0);
    return Box(m, bob_extra, std::vector<double>(static_cast<std::size_t>(4 * m * yc), 0.25));
}

Box random_ns_box(int m, Rng& rng, bool bob_extra) {
    const int yc = m + (bob_extra ? 1 : 0);
    const int k = 3 + rng.uniform_int(5);
    std::vector<double> w(static_cast<std::size_t>(k) + 1);
    double tot = 0.0;
    for (double& v : w) {
        v = -std::log(1.0 - rng.uniform());
        tot += v;
    }
    for (double& v : w) v /= tot;

    std::vector<double> acc(static_cast<std::size_t>(4 * m * yc), 0.0);
    for (int i = 0; i < k; ++i) {
        std::vector<int> fa(static_cast<std::size_t>(m)), fb(static_cast<std::size_t>(yc));
        for (int& v : fa) v = rng.uniform_int(2);
        for (int& v : fb) v = rng.uniform_int(2);
        Box d = local_deterministic(fa, fb);
        for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += w[static_cast<std::size_t>(i)] * d.entries()[j];
    }
    Box pr = pr_analog(m, bob_extra);
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += w[static_cast<std::size_t>(k)] * pr.entries()[j];
    return Box(m, bob_extra, std::move(acc));
}

std::string Box::to_json(const std::string& meta) const {
    nlohmann::json j;
    j["M"] = m_;
    j["bobExtra"] = extra_;
    j["entries"] = e_;
    j["meta"] = meta;
    return j.dump(2);
}

Box Box::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("M") || !j.contains("bobExtra") || !j.contains("entries"))
        throw BoxError("box json missing required field");
    return Box(j["M"].get<int>(), j["bobExtra"].get<bool>(), j["entries"].get<std::vector<double>>());
}

}  // namespace nskd
