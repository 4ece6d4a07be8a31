#include "dkdv/bilinear.hpp"

#include <algorithm>
#include <cmath>

#include "dkdv/bourgain.hpp"

namespace dkdv {

namespace {

constexpr double kEps = 1e-9;

bool sim(double a, double b) { return b / 2.0 - kEps <= a && a <= 2.0 * b + kEps; }      // a ~ b
bool lesssim(double a, double b) { return a <= 4.0 * b + kEps; }                          // a <~ b
bool muchless(double a, double b) { return 4.0 * a <= b + kEps; }                         // a << b

}  // namespace

double s_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw validation_error("s_alpha: alpha must be in (0,1]");
    return alpha <= 0.5 ? -0.75 : -3.0 / (5.0 - 2.0 * alpha);
}

void DyadicBlock::validate() const {
    for (double v : {n1, n2, n3, l1, l2, l3})
        if (!is_dyadic(v)) throw validation_error("DyadicBlock: entries must be powers of two");
}

Modulations modulations(double tau, double tau1, double xi, double xi1) {
    Modulations m;
    m.sigma = tau - xi * xi * xi;
    m.sigma1 = tau1 - xi1 * xi1 * xi1;
    double xi2 = xi - xi1;
    m.sigma2 = (tau - tau1) - xi2 * xi2 * xi2;
    return m;
}

double kernel_K_general(double tau, double tau1, double xi, double xi1,
                        const ModelParams& params, double out_exp, double in_exp) {
    const Modulations m = modulations(tau, tau1, xi, xi1);
    const double a = params.alpha, s = params.s;
    const double xi2 = xi - xi1;
    double out = std::abs(xi) * std::pow(jbracket(xi), s) /
                 std::pow(symbol_bracket(m.sigma, xi, a), out_exp);
    out *= std::pow(jbracket(xi1), -s) / std::pow(symbol_bracket(m.sigma1, xi1, a), in_exp);
    out *= std::pow(jbracket(xi2), -s) / std::pow(symbol_bracket(m.sigma2, xi2, a), in_exp);
    return out;
}

double kernel_K(double tau, double tau1, double xi, double xi1, const ModelParams& params) {
    return kernel_K_general(tau, tau1, xi, xi1, params, 0.5 - params.delta, 0.5);
}

double dyadic_block_bound(const DyadicBlock& b, CoherenceCase which) {
    b.validate();
    const double prod = b.n_product();
    if (!sim(b.n_max(), b.n_med()))
        throw validation_error("dyadic_block_bound: hypothesis N_max ~ N_med fails");
    if (!sim(b.l_max(), std::max(prod, b.l_med())))
        throw validation_error("dyadic_block_bound: hypothesis L_max ~ max(N1 N2 N3, L_med) fails");

    switch (which) {
        case CoherenceCase::PlusPlus:
            if (!sim(b.n_max(), b.n_min()))
                throw validation_error("dyadic_block_bound: (++) needs N_max ~ N_min");
            if (!sim(b.l_max(), prod))
                throw validation_error("dyadic_block_bound: (++) needs L_max ~ N1 N2 N3");
            return std::sqrt(b.l_min()) * std::pow(b.n_max(), -0.25) * std::pow(b.l_med(), 0.25);
        case CoherenceCase::PlusMinus:
            if (b.n1 != b.n_min())
                throw validation_error("dyadic_block_bound: (+-) needs n1 = N_min (low-frequency factor)");
            if (!sim(b.n2, b.n3))
                throw validation_error("dyadic_block_bound: (+-) needs N2 ~ N3");
            if (!muchless(b.n1, b.n_max()))
                throw validation_error("dyadic_block_bound: (+-) needs N2 ~ N3 >> N1");
            if (!sim(b.l1, prod))
                throw validation_error("dyadic_block_bound: (+-) needs L1 ~ N1 N2 N3");
            if (!lesssim(b.l2, b.l1) || !lesssim(b.l3, b.l1))
                throw validation_error("dyadic_block_bound: (+-) needs L1 >~ L2, L3");
            return std::sqrt(b.l_min()) / b.n_max() *
                   std::sqrt(std::min(prod, b.n_max() / b.n_min() * b.l_med()));
        case CoherenceCase::Other:
            return std::sqrt(b.l_min()) / b.n_max() * std::sqrt(std::min(prod, b.l_med()));
    }
    throw validation_error("dyadic_block_bound: unknown case");
}

std::int64_t IndicatorProfile::cell_count() const {
    std::int64_t total = 0;
    for (const auto& col : columns)
        for (const auto& iv : col.intervals) total += iv.count();
    return total;
}

double IndicatorProfile::measure() const {
    return static_cast<double>(cell_count()) * st_grid->dtau() * st_grid->grid_x()->dxi();
}

bool IndicatorProfile::empty() const { return cell_count() == 0; }

IndicatorProfile indicator_from_field(const SpaceTimeField& f) {
    if (f.rep != Rep::Frequency)
        throw validation_error("indicator_from_field: frequency representation required");
    const SpaceTimeGrid& g = *f.st_grid;
    IndicatorProfile p;
    p.st_grid = f.st_grid;
    for (std::int64_t k = 0; k < g.n_x(); ++k) {
        IndicatorColumn col;
        col.k = g.grid_x()->mode(k);
        bool open = false;
        for (std::int64_t m = 0; m < g.n_time(); ++m) {
            double v = std::abs(f.at(m, k));
            if (std::abs(v - 1.0) > 1e-9 && std::abs(v) > 1e-9)
                throw validation_error("indicator_from_field: values must be 0 or 1");
            bool on = v > 0.5;
            if (on && !open) {
                col.intervals.push_back({g.tmode(m), g.tmode(m)});
                open = true;
            } else if (on) {
                col.intervals.back().hi = g.tmode(m);
            } else {
                open = false;
            }
        }
        if (!col.intervals.empty()) p.columns.push_back(std::move(col));
    }
    return p;
}

namespace {

std::int64_t sum_arith(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) return 0;
    return (hi * (hi + 1) - (lo - 1) * lo) / 2;
}

// Sum over v in [a,b] of |{(m1,m2) : m1 in [lo1,hi1], m2 in [lo2,hi2], m1+m2 = v}|.
std::int64_t convolution_mass(std::int64_t lo1, std::int64_t hi1, std::int64_t lo2,
                              std::int64_t hi2, std::int64_t a, std::int64_t b) {
    if (lo1 > hi1 || lo2 > hi2 || a > b) return 0;
    const std::int64_t s = lo1 + lo2, e = hi1 + hi2;
    const std::int64_t plateau = std::min(hi1 - lo1, hi2 - lo2) + 1;
    std::int64_t total = 0;
    // rising part: f(v) = v - s + 1 on [s, s+plateau-2]
    {
        std::int64_t vlo = std::max(a, s), vhi = std::min(b, s + plateau - 2);
        total += sum_arith(vlo - s + 1, vhi - s + 1);
    }
    // flat part
    {
        std::int64_t vlo = std::max(a, s + plateau - 1), vhi = std::min(b, e - plateau + 1);
        if (vlo <= vhi) total += plateau * (vhi - vlo + 1);
    }
    // falling part: f(v) = e - v + 1 on [e-plateau+2, e]
    {
        std::int64_t vlo = std::max(a, e - plateau + 2), vhi = std::min(b, e);
        total += sum_arith(e - vhi + 1, e - vlo + 1);
    }
    return total;
}

std::vector<TauInterval> intersect_lists(const std::vector<TauInterval>& x,
                                         const std::vector<TauInterval>& y) {
    std::vector<TauInterval> out;
    for (const auto& p : x)
        for (const auto& q : y) {
            std::int64_t lo = std::max(p.lo, q.lo), hi = std::min(p.hi, q.hi);
            if (lo <= hi) out.push_back({lo, hi});
        }
    return out;
}

// m-range of [lo_tau, hi_tau] on the tau lattice
TauInterval tau_window(double lo, double hi, double dtau) {
    return {static_cast<std::int64_t>(std::ceil(lo / dtau - kEps)),
            static_cast<std::int64_t>(std::floor(hi / dtau + kEps))};
}

// Restriction of a profile to the block shell |xi| in [n/2, 2n],
// |tau - xi^3| in [l/2, 2l].
IndicatorProfile clip_to_block_shell(const IndicatorProfile& p, double n, double l) {
    const double dxi = p.st_grid->grid_x()->dxi();
    const double dtau = p.st_grid->dtau();
    IndicatorProfile out;
    out.st_grid = p.st_grid;
    for (const auto& col : p.columns) {
        double xi = static_cast<double>(col.k) * dxi;
        if (std::abs(xi) < n / 2.0 - kEps || std::abs(xi) > 2.0 * n + kEps) continue;
        double c = xi * xi * xi;
        std::vector<TauInterval> bands;
        bands.push_back(tau_window(c + l / 2.0, c + 2.0 * l, dtau));
        bands.push_back(tau_window(c - 2.0 * l, c - l / 2.0, dtau));
        auto iv = intersect_lists(col.intervals, bands);
        if (!iv.empty()) out.columns.push_back({col.k, std::move(iv)});
    }
    return out;
}

const IndicatorColumn* find_column(const IndicatorProfile& p, std::int64_t k) {
    auto it = std::lower_bound(p.columns.begin(), p.columns.end(), k,
                               [](const IndicatorColumn& c, std::int64_t kk) { return c.k < kk; });
    if (it == p.columns.end() || it->k != k) return nullptr;
    return &*it;
}

double counting_trilinear(const IndicatorProfile& f1, const IndicatorProfile& f2,
                          const IndicatorProfile& f3) {
    std::int64_t count = 0;
    for (const auto& c1 : f1.columns)
        for (const auto& c2 : f2.columns) {
            const IndicatorColumn* c3 = find_column(f3, -(c1.k + c2.k));
            if (!c3) continue;
            for (const auto& i1 : c1.intervals)
                for (const auto& i2 : c2.intervals)
                    for (const auto& i3 : c3->intervals)
                        count += convolution_mass(i1.lo, i1.hi, i2.lo, i2.hi, -i3.hi, -i3.lo);
        }
    const auto& g = *f1.st_grid;
    const double w = g.dtau() * g.grid_x()->dxi();
    return static_cast<double>(count) * w * w;
}

double kernel_trilinear_sparse(const IndicatorProfile& f1, const IndicatorProfile& f2,
                               const IndicatorProfile& f3, const ModelParams& params) {
    const auto& g = *f1.st_grid;
    const double dtau = g.dtau(), dxi = g.grid_x()->dxi();
    double acc = 0.0;
    for (const auto& c1 : f1.columns)
        for (const auto& c2 : f2.columns) {
            const IndicatorColumn* c3 = find_column(f3, -(c1.k + c2.k));
            if (!c3) continue;
            const double xi1 = c1.k * dxi, xi = (c1.k + c2.k) * dxi;
            for (const auto& i1 : c1.intervals)
                for (std::int64_t m1 = i1.lo; m1 <= i1.hi; ++m1)
                    for (const auto& i2 : c2.intervals)
                        for (std::int64_t m2 = i2.lo; m2 <= i2.hi; ++m2) {
                            std::int64_t m3 = -(m1 + m2);
                            bool inside = false;
                            for (const auto& i3 : c3->intervals)
                                if (i3.lo <= m3 && m3 <= i3.hi) { inside = true; break; }
                            if (!inside) continue;
                            acc += kernel_K((m1 + m2) * dtau, m1 * dtau, xi, xi1, params);
                        }
        }
    const double w = dtau * dxi;
    return acc * w * w;
}

}  // namespace

double trilinear_integral(const IndicatorProfile& f1, const IndicatorProfile& f2,
                          const IndicatorProfile& f3, TrilinearMultiplier multiplier,
                          const DyadicBlock* block, const ModelParams& params) {
    switch (multiplier) {
        case TrilinearMultiplier::Unit:
            return counting_trilinear(f1, f2, f3);
        case TrilinearMultiplier::BlockCharacteristic: {
            if (!block)
                throw validation_error("trilinear_integral: block required for the characteristic");
            auto c1 = clip_to_block_shell(f1, block->n1, block->l1);
            auto c2 = clip_to_block_shell(f2, block->n2, block->l2);
            auto c3 = clip_to_block_shell(f3, block->n3, block->l3);
            return counting_trilinear(c1, c2, c3);
        }
        case TrilinearMultiplier::KernelWeighted:
            return kernel_trilinear_sparse(f1, f2, f3, params);
    }
    throw validation_error("trilinear_integral: unknown multiplier");
}

double trilinear_integral(const ExtremizerTriple& triple, TrilinearMultiplier multiplier,
                          const ModelParams& params) {
    return trilinear_integral(triple.f1, triple.f2, triple.f3, multiplier, &triple.block, params);
}

cplx kernel_trilinear_form(const SpaceTimeField& h_hat, const SpaceTimeField& f_hat,
                           const SpaceTimeField& g_hat, const ModelParams& params) {
    const SpaceTimeGrid& g = *f_hat.st_grid;
    const std::int64_t nt = g.n_time(), nx = g.n_x();
    const double dtau = g.dtau(), dxi = g.grid_x()->dxi();
    cplx acc = 0.0;
    for (std::int64_t m1 = 0; m1 < nt; ++m1)
        for (std::int64_t k1 = 0; k1 < nx; ++k1) {
            cplx fv = f_hat.at(m1, k1);
            if (fv == cplx{0, 0}) continue;
            for (std::int64_t m2 = 0; m2 < nt; ++m2)
                for (std::int64_t k2 = 0; k2 < nx; ++k2) {
                    cplx gv = g_hat.at(m2, k2);
                    if (gv == cplx{0, 0}) continue;
                    std::int64_t ms = g.tmode(m1) + g.tmode(m2);
                    std::int64_t ks = g.grid_x()->mode(k1) + g.grid_x()->mode(k2);
                    if (ms < -nt / 2 || ms >= nt / 2 || ks < -nx / 2 || ks >= nx / 2) continue;
                    cplx hv = h_hat.at(ms + nt / 2, ks + nx / 2);
                    if (hv == cplx{0, 0}) continue;
                    double kk = kernel_K(ms * dtau, g.tmode(m1) * dtau, ks * dxi,
                                         g.grid_x()->mode(k1) * dxi, params);
                    acc += kk * hv * fv * gv;
                }
        }
    const double w = dtau * dxi;
    return acc * w * w;
}

double kernel_convolution_norm(const SpaceTimeField& f_hat, const SpaceTimeField& g_hat,
                               const ModelParams& params) {
    const SpaceTimeGrid& g = *f_hat.st_grid;
    const std::int64_t nt = g.n_time(), nx = g.n_x();
    const double dtau = g.dtau(), dxi = g.grid_x()->dxi();
    std::vector<cplx> conv(static_cast<size_t>(nt * nx), cplx{0, 0});
    for (std::int64_t m1 = 0; m1 < nt; ++m1)
        for (std::int64_t k1 = 0; k1 < nx; ++k1) {
            cplx fv = f_hat.at(m1, k1);
            if (fv == cplx{0, 0}) continue;
            for (std::int64_t m2 = 0; m2 < nt; ++m2)
                for (std::int64_t k2 = 0; k2 < nx; ++k2) {
                    cplx gv = g_hat.at(m2, k2);
                    if (gv == cplx{0, 0}) continue;
                    std::int64_t ms = g.tmode(m1) + g.tmode(m2);
                    std::int64_t ks = g.grid_x()->mode(k1) + g.grid_x()->mode(k2);
                    if (ms < -nt / 2 || ms >= nt / 2 || ks < -nx / 2 || ks >= nx / 2) continue;
                    double kk = kernel_K(ms * dtau, g.tmode(m1) * dtau, ks * dxi,
                                         g.grid_x()->mode(k1) * dxi, params);
                    conv[(ms + nt / 2) * nx + (ks + nx / 2)] += kk * fv * gv * dtau * dxi;
                }
        }
    double acc = 0.0;
    for (const auto& c : conv) acc += std::norm(c);
    return std::sqrt(acc * dtau * dxi) / (2.0 * M_PI);
}

ExtremizerTriple extremizer_triple(const DyadicBlock& block, const StGridPtr& st_grid) {
    block.validate();
    const double prod = block.n_product();
    if (!sim(block.n2, block.n3))
        throw validation_error("extremizer_triple: regime needs N2 ~ N3");
    if (!lesssim(block.n1, std::min(block.n2, block.n3)))
        throw validation_error("extremizer_triple: regime needs N2 ~ N3 >~ N1");
    if (!sim(block.l1, prod))
        throw validation_error("extremizer_triple: regime needs L1 ~ N1 N2 N3");
    if (!(block.l1 + kEps >= block.l2 && block.l2 + kEps >= block.l3))
        throw validation_error("extremizer_triple: regime needs L1 >= L2 >= L3");

    const SpaceTimeGrid& g = *st_grid;
    const double dtau = g.dtau(), dxi = g.grid_x()->dxi();
    if (!(dtau < block.l3))
        throw numerical_error("extremizer_triple: tau spacing " + std::to_string(dtau) +
                              " does not resolve the thinnest slab L3 = " +
                              std::to_string(block.l3) + "; increase T_box");

    const std::int64_t m_cap = g.n_time() / 2 - 1;
    const std::int64_t k_cap = g.n_x() / 2 - 1;

    auto require_tau = [&](double abs_tau_needed) {
        std::int64_t m_needed = static_cast<std::int64_t>(std::ceil(abs_tau_needed / dtau)) + 1;
        if (m_needed > m_cap) {
            std::int64_t n_needed = 2;
            while (n_needed / 2 - 1 < m_needed) n_needed *= 2;
            throw numerical_error(
                "extremizer_triple: tau range under-resolved; required minimum n_time = " +
                std::to_string(n_needed));
        }
    };
    auto require_xi = [&](double abs_xi_needed) {
        std::int64_t k_needed = static_cast<std::int64_t>(std::ceil(abs_xi_needed / dxi)) + 1;
        if (k_needed > k_cap)
            throw numerical_error(
                "extremizer_triple: xi range under-resolved; required minimum n_points = " +
                std::to_string(4 * k_needed));
    };

    require_xi(block.n2 + block.n1);
    require_tau(3.0 * block.n2 * block.n2 * block.n1 + block.n1 * block.n1 * block.n2);
    double ximax = block.n2 + block.n1;
    require_tau(ximax * ximax * ximax + std::max(block.l2, block.l3));

    ExtremizerTriple t;
    t.block = block;
    t.f1.st_grid = t.f2.st_grid = t.f3.st_grid = st_grid;

    auto xi_window = [&](double lo, double hi) {
        return std::pair<std::int64_t, std::int64_t>(
            static_cast<std::int64_t>(std::ceil(lo / dxi - kEps)),
            static_cast<std::int64_t>(std::floor(hi / dxi + kEps)));
    };

    // f1: |xi| in [n1/2, n1], tau within n1^2 n2 of 3 n2^2 xi
    const double w1 = block.n1 * block.n1 * block.n2;
    for (int sign : {-1, 1}) {
        auto [klo, khi] = sign > 0 ? xi_window(block.n1 / 2.0, block.n1)
                                   : xi_window(-block.n1, -block.n1 / 2.0);
        for (std::int64_t k = klo; k <= khi; ++k) {
            double xi = k * dxi;
            double c = 3.0 * block.n2 * block.n2 * xi;
            TauInterval iv = tau_window(c - w1, c + w1, dtau);
            if (iv.lo <= iv.hi) t.f1.columns.push_back({k, {iv}});
        }
    }
    std::sort(t.f1.columns.begin(), t.f1.columns.end(),
              [](const auto& a, const auto& b) { return a.k < b.k; });

    // f2 / f3: slabs |sigma| <= l around xi = +-n2
    auto make_slab = [&](double center, double l, IndicatorProfile& out) {
        auto [klo, khi] = xi_window(center - block.n1, center + block.n1);
        for (std::int64_t k = klo; k <= khi; ++k) {
            double xi = k * dxi;
            double c = xi * xi * xi;
            TauInterval iv = tau_window(c - l, c + l, dtau);
            if (iv.lo <= iv.hi) out.columns.push_back({k, {iv}});
        }
    };
    make_slab(block.n2, block.l2, t.f2);
    make_slab(-block.n2, block.l3, t.f3);

    for (const IndicatorProfile* p : {&t.f1, &t.f2, &t.f3})
        if (p->empty())
            throw numerical_error("extremizer_triple: empty support, lattice under-resolved");
    return t;
}

StGridPtr sweep_lattice_for(const DyadicBlock& block) {
    const double lmin = block.l_min();
    double t_box = std::max(2.0, dyadic_ceil(16.0 * M_PI / lmin));
    const double dtau = M_PI / t_box;

    const double dxi = block.n1 / 16.0;
    const double l_x = 2.0 * M_PI / dxi;
    double xi_need = block.n2 + 2.0 * block.n1;
    std::int64_t n_x = 16;
    while ((n_x / 2 - 1) * dxi < xi_need) n_x *= 2;

    double ximax = block.n2 + block.n1;
    double tau_need = std::max(3.0 * block.n2 * block.n2 * block.n1 +
                                   block.n1 * block.n1 * block.n2,
                               ximax * ximax * ximax + std::max(block.l2, block.l3));
    tau_need *= 1.05;
    std::int64_t n_t = 16;
    while ((n_t / 2 - 1) * dtau < tau_need) n_t *= 2;

    return make_spacetime_grid(make_grid(n_x, l_x), n_t, t_box);
}

double block_lower_bound(const DyadicBlock& block, const StGridPtr& st_grid,
                         const ModelParams& params) {
    ExtremizerTriple t = extremizer_triple(block, st_grid);
    double val = trilinear_integral(t, TrilinearMultiplier::BlockCharacteristic, params);
    return val / (t.f1.l2_norm() * t.f2.l2_norm() * t.f3.l2_norm());
}

double bilinear_ratio(const SpaceTimeField& u, const SpaceTimeField& v,
                      const ModelParams& params) {
    params.validate();
    if (u.rep != Rep::Physical || v.rep != Rep::Physical)
        throw validation_error("bilinear_ratio: physical representation required");

    auto u_hat = spacetime_transform_forward(u);
    auto v_hat = spacetime_transform_forward(v);
    st_dealias(u_hat);
    st_dealias(v_hat);
    const double den_u = xbs_norm(u_hat, 0.5, params.s, params.alpha);
    const double den_v = xbs_norm(v_hat, 0.5, params.s, params.alpha);
    if (den_u < 1e-300 || den_v < 1e-300)
        throw validation_error("bilinear_ratio: zero denominator");

    auto ud = spacetime_transform_inverse(u_hat);
    auto vd = spacetime_transform_inverse(v_hat);
    SpaceTimeField w(u.st_grid, Rep::Physical);
    for (size_t i = 0; i < w.values.size(); ++i) w.values[i] = ud.values[i] * vd.values[i];
    auto w_hat = spacetime_transform_forward(w);
    const SpaceTimeGrid& g = *u.st_grid;
    for (std::int64_t m = 0; m < g.n_time(); ++m)
        for (std::int64_t k = 0; k < g.n_x(); ++k)
            w_hat.at(m, k) *= cplx(0.0, g.grid_x()->frequency(k));
    st_dealias(w_hat);

    double num = xbs_norm(w_hat, -0.5 + params.delta, params.s, params.alpha);
    return num / (den_u * den_v);
}

double predicted_sweep_slope(double s, double alpha) {
    if (alpha <= 0.5) return -2.0 * s - 1.5;
    return -2.0 * s - 1.25 - alpha / 2.0 + (alpha - 0.5) * (s + 0.5);
}

SweepReport sharpness_sweep(double s, double alpha, const std::vector<double>& n1_list,
                            const ModelParams& params) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw validation_error("sharpness_sweep: alpha in (0,1]");
    if (n1_list.size() < 3)
        throw validation_error("sharpness_sweep: need at least 3 resolvable N1 points");
    for (size_t i = 0; i < n1_list.size(); ++i) {
        if (!is_dyadic(n1_list[i])) throw validation_error("sharpness_sweep: N1 must be dyadic");
        if (i > 0 && n1_list[i] <= n1_list[i - 1])
            throw validation_error("sharpness_sweep: N1 list must increase");
    }

    ModelParams p = params;
    p.alpha = alpha;
    p.s = s;

    SweepReport rep;
    rep.s = s;
    rep.alpha = alpha;
    rep.predicted_slope = predicted_sweep_slope(s, alpha);

    std::vector<double> logn, logr;
    for (double n1 : n1_list) {
        const double n2 = n1;
        double n3, el1, el2;
        if (alpha <= 0.5) {
            n3 = 1.0;
            el1 = el2 = std::max(1.0, n3 * n3 * n1);
        } else {
            n3 = dyadic_round(std::pow(n1, alpha - 0.5));
            el1 = el2 = dyadic_round(std::pow(n1, 2.0 * alpha));
        }
        const double el3 = n3 * n1 * n1;

        // extremizer labeling: low-frequency factor first
        DyadicBlock block{n3, n1, n2, el3, el1, el2};
        auto lattice = sweep_lattice_for(block);
        double measured = block_lower_bound(block, lattice, p);
        if (!(measured > 0.0))
            throw numerical_error("sharpness_sweep: vanishing block lower bound at N1 = " +
                                  std::to_string(n1));

        const double d = params.delta;
        const double a2 = 2.0 * alpha;
        double weight = n3 * std::pow(jbracket(n3), s) * std::pow(jbracket(n1), -s) *
                        std::pow(jbracket(n2), -s);
        weight /= std::pow(jbracket(std::max(el3, std::pow(n3, a2))), 0.5 - d);
        weight /= std::sqrt(jbracket(std::max(el1, std::pow(n1, a2))));
        weight /= std::sqrt(jbracket(std::max(el2, std::pow(n2, a2))));

        double ratio = weight * measured;
        rep.n1_values.push_back(n1);
        rep.ratios.push_back(ratio);
        logn.push_back(std::log(n1));
        logr.push_back(std::log(ratio));
    }

    LineFit fit = fit_line(logn, logr);
    rep.fitted_slope = fit.slope;
    rep.slope_stderr = fit.slope_stderr;
    rep.verdict = rep.fitted_slope > 0.05 ? SweepVerdict::Divergent : SweepVerdict::Bounded;
    return rep;
}

std::vector<DyadicBlock> plus_minus_block_family() {
    std::vector<DyadicBlock> blocks;
    for (double n1 : {1.0, 2.0}) {
        for (double m = 4.0; m <= 128.0; m *= 2.0) {
            if (m < 4.0 * n1) continue;
            double l1 = n1 * m * m;
            double l23 = std::max(1.0, dyadic_round(n1 * n1 * m / 4.0));
            blocks.push_back({n1, m, m, l1, l23, l23});
        }
    }
    return blocks;
}

BlockSharpness block_sharpness(const DyadicBlock& block, const ModelParams& params) {
    BlockSharpness out;
    out.block = block;
    out.bound = dyadic_block_bound(block, CoherenceCase::PlusMinus);
    out.measured = block_lower_bound(block, sweep_lattice_for(block), params);
    return out;
}

}  // namespace dkdv
