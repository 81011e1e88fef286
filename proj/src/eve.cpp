#include "nskd/eve.hpp"

#include <cmath>
#include <stdexcept>

#include "nskd/hashing.hpp"

namespace nskd {

std::size_t TripartiteBox::x_card() const {
    std::size_t v = 1;
    for (int i = 0; i < n_pairs; ++i) v *= static_cast<std::size_t>(m);
    return v;
}

std::size_t TripartiteBox::y_card() const {
    std::size_t v = 1;
    for (int i = 0; i < n_pairs; ++i) v *= static_cast<std::size_t>(m + (bob_extra ? 1 : 0));
    return v;
}

double TripartiteBox::at(std::size_t as, std::size_t bs, int e, std::size_t xs, std::size_t ys) const {
    return p[(((as * a_card() + bs) * static_cast<std::size_t>(n_e) + static_cast<std::size_t>(e)) *
                  x_card() +
              xs) *
                 y_card() +
             ys];
}

double& TripartiteBox::at(std::size_t as, std::size_t bs, int e, std::size_t xs, std::size_t ys) {
    return p[(((as * a_card() + bs) * static_cast<std::size_t>(n_e) + static_cast<std::size_t>(e)) *
                  x_card() +
              xs) *
                 y_card() +
             ys];
}

void TripartiteBox::allocate() {
    p.assign(a_card() * a_card() * static_cast<std::size_t>(n_e) * x_card() * y_card(), 0.0);
}

NBox TripartiteBox::ab_marginal() const {
    std::vector<double> out(a_card() * a_card() * x_card() * y_card(), 0.0);
    std::size_t idx = 0;
    for (std::size_t as = 0; as < a_card(); ++as)
        for (std::size_t bs = 0; bs < a_card(); ++bs)
            for (std::size_t xs = 0; xs < x_card(); ++xs)
                for (std::size_t ys = 0; ys < y_card(); ++ys, ++idx) {
                    double s = 0.0;
                    for (int e = 0; e < n_e; ++e) s += at(as, bs, e, xs, ys);
                    out[idx] = s;
                }
    return NBox(n_pairs, m, bob_extra, std::move(out));
}

double TripartiteBox::ns_residual() const {
    double worst = 0.0;
    const int ycnt = m + (bob_extra ? 1 : 0);
    std::size_t x_stride = 1;
    // Alice subsystems: sum over a_i independent of x_i (joint with Bob+Eve).
    for (int i = 0; i < n_pairs; ++i) {
        for (std::size_t as = 0; as < a_card(); ++as) {
            if ((as >> i) & 1) continue;
            const std::size_t as1 = as | (std::size_t{1} << i);
            for (std::size_t bs = 0; bs < a_card(); ++bs)
                for (int e = 0; e < n_e; ++e)
                    for (std::size_t xs = 0; xs < x_card(); ++xs) {
                        std::size_t digit = xs / x_stride % static_cast<std::size_t>(m);
                        if (digit != 0) continue;
                        for (std::size_t ys = 0; ys < y_card(); ++ys) {
                            const double ref = at(as, bs, e, xs, ys) + at(as1, bs, e, xs, ys);
                            for (int xi = 1; xi < m; ++xi) {
                                const std::size_t xs2 = xs + x_stride * static_cast<std::size_t>(xi);
                                const double v = at(as, bs, e, xs2, ys) + at(as1, bs, e, xs2, ys);
                                worst = std::max(worst, std::abs(v - ref));
                            }
                        }
                    }
        }
        x_stride *= static_cast<std::size_t>(m);
    }
    std::size_t y_stride = 1;
    for (int i = 0; i < n_pairs; ++i) {
        for (std::size_t bs = 0; bs < a_card(); ++bs) {
            if ((bs >> i) & 1) continue;
            const std::size_t bs1 = bs | (std::size_t{1} << i);
            for (std::size_t as = 0; as < a_card(); ++as)
                for (int e = 0; e < n_e; ++e)
                    for (std::size_t ys = 0; ys < y_card(); ++ys) {
                        std::size_t digit = ys / y_stride % static_cast<std::size_t>(ycnt);
                        if (digit != 0) continue;
                        for (std::size_t xs = 0; xs < x_card(); ++xs) {
                            const double ref = at(as, bs, e, xs, ys) + at(as, bs1, e, xs, ys);
                            for (int yi = 1; yi < ycnt; ++yi) {
                                const std::size_t ys2 = ys + y_stride * static_cast<std::size_t>(yi);
                                const double v = at(as, bs, e, xs, ys2) + at(as, bs1, e, xs, ys2);
                                worst = std::max(worst, std::abs(v - ref));
                            }
                        }
                    }
        }
        y_stride *= static_cast<std::size_t>(ycnt);
    }
    // Eve has a single setting, so her own no-signaling constraint is
    // vacuous; that her marginal is setting-independent follows from the
    // two families above, but verify directly anyway.
    for (int e = 0; e < n_e; ++e) {
        double ref = -1.0;
        for (std::size_t xs = 0; xs < x_card(); ++xs)
            for (std::size_t ys = 0; ys < y_card(); ++ys) {
                double s = 0.0;
                for (std::size_t as = 0; as < a_card(); ++as)
                    for (std::size_t bs = 0; bs < a_card(); ++bs) s += at(as, bs, e, xs, ys);
                if (ref < 0.0)
                    ref = s;
                else
                    worst = std::max(worst, std::abs(s - ref));
            }
    }
    return worst;
}

namespace {

GuessResult max_guessing_impl(const NBox& box, const std::vector<int>& x_target, double bc) {
    const int n = box.pairs();
    const int m = box.settings();
    if (n > 2) throw std::invalid_argument("max_guessing: N <= 2 only");
    if (m > 4) throw std::invalid_argument("max_guessing: M <= 4 only");
    NsReport rep = check_nonsignaling(box);
    if (!rep.pass) throw std::invalid_argument("max_guessing: input box is signaling");
    for (int xi : x_target)
        if (xi < 0 || xi >= m) throw std::invalid_argument("max_guessing: target setting out of range");

    TripartiteBox w;
    w.n_pairs = n;
    w.m = m;
    w.bob_extra = box.bob_extra();
    w.n_e = static_cast<int>(std::size_t{1} << n);

    const std::size_t ac = box.a_card();
    const std::size_t xc = box.x_card();
    const std::size_t yc = box.y_card();
    const int ycnt = box.y_count();
    const std::size_t ne = static_cast<std::size_t>(w.n_e);

    // Presolve: entries with zero marginal force all their Eve slices to
    // zero (positivity + marginal consistency); dropping them shrinks the
    // LP and removes the degenerate zero-rhs consistency rows outright.
    const std::size_t raw_vars = ac * ac * ne * xc * yc;
    std::vector<int> var_of(raw_vars, -1);
    auto ridx = [&](std::size_t as, std::size_t bs, std::size_t e, std::size_t xs, std::size_t ys) {
        return (((as * ac + bs) * ne + e) * xc + xs) * yc + ys;
    };
    int nvars = 0;
    for (std::size_t as = 0; as < ac; ++as)
        for (std::size_t bs = 0; bs < ac; ++bs)
            for (std::size_t xs = 0; xs < xc; ++xs)
                for (std::size_t ys = 0; ys < yc; ++ys) {
                    if (box.at(as, bs, xs, ys) <= 1e-14) continue;
                    for (std::size_t e = 0; e < ne; ++e)
                        var_of[ridx(as, bs, e, xs, ys)] = nvars++;
                }
    auto vidx = [&](std::size_t as, std::size_t bs, std::size_t e, std::size_t xs, std::size_t ys) {
        return var_of[ridx(as, bs, e, xs, ys)];
    };

    LpProblem lp;
    lp.nvars = nvars;
    lp.objective.assign(static_cast<std::size_t>(nvars), 0.0);
    const std::size_t xt = box.pack_x(x_target);
    for (std::size_t e = 0; e < ne; ++e)
        for (std::size_t bs = 0; bs < ac; ++bs) {
            const int v = vidx(e, bs, e, xt, 0);
            if (v >= 0) lp.objective[static_cast<std::size_t>(v)] = 1.0;
        }

    // Marginal consistency: sum_e P(as,bs,e|xs,ys) = box(as,bs|xs,ys).
    for (std::size_t as = 0; as < ac; ++as)
        for (std::size_t bs = 0; bs < ac; ++bs)
            for (std::size_t xs = 0; xs < xc; ++xs)
                for (std::size_t ys = 0; ys < yc; ++ys) {
                    if (vidx(as, bs, 0, xs, ys) < 0) continue;
                    std::vector<double> row(static_cast<std::size_t>(nvars), 0.0);
                    for (std::size_t e = 0; e < ne; ++e)
                        row[static_cast<std::size_t>(vidx(as, bs, e, xs, ys))] = 1.0;
                    lp.rows.push_back(std::move(row));
                    lp.rhs.push_back(box.at(as, bs, xs, ys));
                }

    // Alice subsystem i no-signaling within the extension: for every
    // (a_{-i}, bs, e, x_{-i}, ys), sum over a_i equal at x_i = 0 and x_i = k.
    auto push_ns_row = [&](std::initializer_list<std::pair<int, double>> terms) {
        std::vector<double> row(static_cast<std::size_t>(nvars), 0.0);
        bool nonzero = false;
        for (const auto& [v, coef] : terms) {
            if (v < 0) continue;
            row[static_cast<std::size_t>(v)] += coef;
            nonzero = true;
        }
        if (!nonzero) return;
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(0.0);
    };
    std::size_t x_stride = 1;
    for (int i = 0; i < n; ++i) {
        for (std::size_t as = 0; as < ac; ++as) {
            if ((as >> i) & 1) continue;
            const std::size_t as1 = as | (std::size_t{1} << i);
            for (std::size_t bs = 0; bs < ac; ++bs)
                for (std::size_t e = 0; e < ne; ++e)
                    for (std::size_t xs = 0; xs < xc; ++xs) {
                        if (xs / x_stride % static_cast<std::size_t>(m) != 0) continue;
                        for (std::size_t ys = 0; ys < yc; ++ys)
                            for (int xi = 1; xi < m; ++xi) {
                                const std::size_t xs2 = xs + x_stride * static_cast<std::size_t>(xi);
                                push_ns_row({{vidx(as, bs, e, xs, ys), 1.0},
                                             {vidx(as1, bs, e, xs, ys), 1.0},
                                             {vidx(as, bs, e, xs2, ys), -1.0},
                                             {vidx(as1, bs, e, xs2, ys), -1.0}});
                            }
                    }
        }
        x_stride *= static_cast<std::size_t>(m);
    }
    std::size_t y_stride = 1;
    for (int i = 0; i < n; ++i) {
        for (std::size_t bs = 0; bs < ac; ++bs) {
            if ((bs >> i) & 1) continue;
            const std::size_t bs1 = bs | (std::size_t{1} << i);
            for (std::size_t as = 0; as < ac; ++as)
                for (std::size_t e = 0; e < ne; ++e)
                    for (std::size_t ys = 0; ys < yc; ++ys) {
                        if (ys / y_stride % static_cast<std::size_t>(ycnt) != 0) continue;
                        for (std::size_t xs = 0; xs < xc; ++xs)
                            for (int yi = 1; yi < ycnt; ++yi) {
                                const std::size_t ys2 = ys + y_stride * static_cast<std::size_t>(yi);
                                push_ns_row({{vidx(as, bs, e, xs, ys), 1.0},
                                             {vidx(as, bs1, e, xs, ys), 1.0},
                                             {vidx(as, bs, e, xs, ys2), -1.0},
                                             {vidx(as, bs1, e, xs, ys2), -1.0}});
                            }
                    }
        }
        y_stride *= static_cast<std::size_t>(ycnt);
    }

    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal)
        throw std::runtime_error("max_guessing: LP not optimal (product extension is always feasible)");
    if (sol.feasibility_residual > 1e-9)
        throw std::runtime_error("max_guessing: LP residual certificate failed");

    GuessResult res;
    res.value = sol.optimum;
    res.bc = bc;
    res.slack = res.bc - res.value;
    w.allocate();
    for (std::size_t as = 0; as < ac; ++as)
        for (std::size_t bs = 0; bs < ac; ++bs)
            for (std::size_t e = 0; e < ne; ++e)
                for (std::size_t xs = 0; xs < xc; ++xs)
                    for (std::size_t ys = 0; ys < yc; ++ys) {
                        const int v = vidx(as, bs, e, xs, ys);
                        w.at(as, bs, static_cast<int>(e), xs, ys) =
                            v < 0 ? 0.0 : std::max(0.0, sol.x[static_cast<std::size_t>(v)]);
                    }
    res.witness = std::move(w);
    return res;
}

}  // namespace

GuessResult max_guessing(const Box& box, int x_target) {
    NBox nb = product({box});
    return max_guessing_impl(nb, {x_target}, bc_value(box));
}

GuessResult max_guessing(const NBox& box, const std::vector<int>& x_target) {
    if (static_cast<int>(x_target.size()) != box.pairs())
        throw std::invalid_argument("max_guessing: target length mismatch");
    return max_guessing_impl(box, x_target, bc_product(box));
}

double beta_monotonicity_check(int m, int n) {
    if (n > 3 || m > 4) throw std::invalid_argument("beta_monotonicity_check: n <= 3, M <= 4");
    std::vector<DualVector> betas{beta_a(m, 0), beta_a(m, 1)};
    const DualVector b = beta(m);
    const std::size_t comp = b.entries().size();
    double worst = -1.0;
    for (int pattern = 0; pattern < (1 << n); ++pattern) {
        // iterate over component tuples of the n-fold tensor
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        while (true) {
            double lhs = 1.0, rhs = 1.0;
            for (int i = 0; i < n; ++i) {
                const int a = (pattern >> i) & 1;
                lhs *= betas[static_cast<std::size_t>(a)].entries()[idx[static_cast<std::size_t>(i)]];
                rhs *= b.entries()[idx[static_cast<std::size_t>(i)]];
            }
            worst = std::max(worst, lhs - rhs);
            int carry = 0;
            while (carry < n) {
                if (++idx[static_cast<std::size_t>(carry)] < comp) break;
                idx[static_cast<std::size_t>(carry)] = 0;
                ++carry;
            }
            if (carry == n) break;
        }
    }
    return worst;
}

KeyTable tripartite_key_table(const TripartiteBox& box, const std::vector<int>& f, int n_c,
                              int n_s) {
    const int n = box.n_pairs;
    const std::size_t ac = box.a_card();
    if (f.size() != ac) throw std::invalid_argument("key table: f must map every a-string");
    if (n_s < 1 || n_s > n) throw std::invalid_argument("key table: need 1 <= n_s <= N");

    // P(a, e | x = 0-string, z): Bob marginalized at ys = 0 (y-independent
    // because the extension is no-signaling).
    std::vector<std::vector<double>> pae(ac, std::vector<double>(static_cast<std::size_t>(box.n_e), 0.0));
    for (std::size_t as = 0; as < ac; ++as)
        for (int e = 0; e < box.n_e; ++e) {
            double s = 0.0;
            for (std::size_t bs = 0; bs < ac; ++bs) s += box.at(as, bs, e, 0, 0);
            pae[as][static_cast<std::size_t>(e)] = s;
        }

    KeyTable t;
    t.n_s = n_s;
    t.nk = 1 << n_s;
    t.nc = 1 << n_c;
    t.ne = box.n_e;
    t.nz = 1;
    const int seed_bits = n + n_s - 1;
    t.ng = 1 << seed_bits;
    t.allocate();
    const double pg = 1.0 / static_cast<double>(t.ng);
    for (int g = 0; g < t.ng; ++g) {
        ToeplitzHash h;
        h.in_len = n;
        h.out_len = n_s;
        h.seed.resize(static_cast<std::size_t>(seed_bits));
        for (int bit = 0; bit < seed_bits; ++bit)
            h.seed[static_cast<std::size_t>(bit)] = static_cast<std::uint8_t>((g >> bit) & 1);
        for (std::size_t as = 0; as < ac; ++as) {
            std::vector<std::uint8_t> abits(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) abits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((as >> i) & 1);
            const auto kbits = apply_hash(h, abits);
            int k = 0;
            for (int i = 0; i < n_s; ++i) k |= kbits[static_cast<std::size_t>(i)] << i;
            const int c = f[as];
            if (c < 0 || c >= t.nc) throw std::invalid_argument("key table: f value outside 2^n_c");
            for (int e = 0; e < box.n_e; ++e)
                t.at(k, c, e, g, 0) += pg * pae[as][static_cast<std::size_t>(e)];
        }
    }
    return t;
}

}  // namespace nskd
