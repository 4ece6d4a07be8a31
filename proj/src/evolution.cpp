#include "dkdv/evolution.hpp"

#include <bit>
#include <cstring>
#include <ostream>
#include <istream>

#include "dkdv/bilinear.hpp"
#include "dkdv/bourgain.hpp"
#include "dkdv/fourier.hpp"

namespace dkdv {

namespace {

double coeff_l2(const Grid1D& g, const std::vector<cplx>& coeffs) {
    double acc = 0.0;
    for (const auto& c : coeffs) acc += std::norm(c);
    return std::sqrt(acc * g.dxi() / (2.0 * M_PI));
}

void check_finite(const Grid1D& g, const std::vector<cplx>& coeffs, double t) {
    for (const auto& c : coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw numerical_error("solution blew up at t = " + std::to_string(t));
    (void)g;
}

}  // namespace

EtdrkScheme::EtdrkScheme(GridPtr grid, double dt, double alpha)
    : grid_(std::move(grid)), dt_(dt), alpha_(alpha) {
    if (!(dt > 0.0)) throw validation_error("EtdrkScheme: dt must be positive");
    const std::int64_t n = grid_->n_points();
    e_.resize(n);
    e2_.resize(n);
    q_.resize(n);
    f1_.resize(n);
    f2_.resize(n);
    f3_.resize(n);
    const int m_pts = 32;
    for (std::int64_t i = 0; i < n; ++i) {
        const cplx z = dt * linear_symbol(grid_->frequency(i), alpha);
        e_[i] = std::exp(z);
        e2_[i] = std::exp(0.5 * z);
        cplx q = 0, f1 = 0, f2 = 0, f3 = 0;
        for (int j = 0; j < m_pts; ++j) {
            double th = 2.0 * M_PI * (j + 0.5) / m_pts;
            cplx w = z + cplx(std::cos(th), std::sin(th));
            cplx ew = std::exp(w);
            cplx w2 = w * w, w3 = w2 * w;
            q += (std::exp(0.5 * w) - 1.0) / w;
            f1 += (-4.0 - w + ew * (4.0 - 3.0 * w + w2)) / w3;
            f2 += (2.0 + w + ew * (-2.0 + w)) / w3;
            f3 += (-4.0 - 3.0 * w - w2 + ew * (4.0 - w)) / w3;
        }
        const double sc = dt / m_pts;
        q_[i] = sc * q;
        f1_[i] = sc * f1;
        f2_[i] = sc * f2;
        f3_[i] = sc * f3;
    }
}

std::vector<cplx> EtdrkScheme::step(const std::vector<cplx>& v, bool with_nonlinearity) const {
    const Grid1D& g = *grid_;
    const std::int64_t n = g.n_points();
    if (!with_nonlinearity) {
        std::vector<cplx> out(n);
        for (std::int64_t i = 0; i < n; ++i) out[i] = e_[i] * v[i];
        return out;
    }
    auto nv = nonlinearity_coeffs(g, v);
    std::vector<cplx> a(n), b(n), c(n);
    for (std::int64_t i = 0; i < n; ++i) a[i] = e2_[i] * v[i] + q_[i] * nv[i];
    auto na = nonlinearity_coeffs(g, a);
    for (std::int64_t i = 0; i < n; ++i) b[i] = e2_[i] * v[i] + q_[i] * na[i];
    auto nb = nonlinearity_coeffs(g, b);
    for (std::int64_t i = 0; i < n; ++i) c[i] = e2_[i] * a[i] + q_[i] * (2.0 * nb[i] - nv[i]);
    auto nc = nonlinearity_coeffs(g, c);
    std::vector<cplx> out(n);
    for (std::int64_t i = 0; i < n; ++i)
        out[i] = e_[i] * v[i] + f1_[i] * nv[i] + 2.0 * f2_[i] * (na[i] + nb[i]) + f3_[i] * nc[i];
    return out;
}

SpectralField etdrk4_step(const SpectralField& u, double dt, const ModelParams& params) {
    params.validate();
    EtdrkScheme scheme(u.grid, dt, params.alpha);
    SpectralField out(u.grid);
    out.coeffs = scheme.step(u.coeffs);
    const double pre = coeff_l2(*u.grid, u.coeffs);
    const double post = coeff_l2(*u.grid, out.coeffs);
    if (post > pre * (1.0 + 1e-9))
        throw numerical_error("etdrk4_step: stability violation, L2 norm grew by " +
                              std::to_string(post / pre - 1.0));
    return out;
}

Trajectory solve_ivp(const Field& u0, double T, double dt, const ModelParams& params,
                     std::int64_t record_every) {
    params.validate();
    if (!(T > 0.0)) throw validation_error("solve_ivp: T must be positive");
    if (!(dt > 0.0)) throw validation_error("solve_ivp: dt must be positive");
    if (record_every < 1) throw validation_error("solve_ivp: record_every must be >= 1");

    const std::int64_t n_steps = std::max<std::int64_t>(1, std::llround(T / dt));
    const double h = T / static_cast<double>(n_steps);
    EtdrkScheme scheme(u0.grid, h, params.alpha);

    Trajectory traj;
    traj.params = params;
    SpectralField state = transform(u0);
    traj.times.push_back(0.0);
    traj.states.push_back(state);

    double l2_prev = coeff_l2(*u0.grid, state.coeffs);
    for (std::int64_t k = 1; k <= n_steps; ++k) {
        state.coeffs = scheme.step(state.coeffs);
        const double t = h * static_cast<double>(k);
        check_finite(*u0.grid, state.coeffs, t);
        const double l2 = coeff_l2(*u0.grid, state.coeffs);
        if (l2 > l2_prev * (1.0 + 1e-9))
            throw numerical_error("solve_ivp: stability violation at t = " + std::to_string(t));
        l2_prev = l2;
        if (k % record_every == 0 || k == n_steps) {
            traj.times.push_back(t);
            traj.states.push_back(state);
        }
    }
    return traj;
}

std::vector<double> decay_diagnostic(const Trajectory& traj, double s_probe) {
    std::vector<double> out;
    out.reserve(traj.states.size());
    for (const auto& st : traj.states) out.push_back(sobolev_norm(st, s_probe));
    return out;
}

std::pair<double, double> energy_rate_check(const SpectralField& u, double dt,
                                            const ModelParams& params) {
    EtdrkScheme full(u.grid, dt, params.alpha);
    EtdrkScheme half(u.grid, dt / 2.0, params.alpha);
    auto u1 = full.step(u.coeffs);
    auto uh = half.step(u.coeffs);
    const Grid1D& g = *u.grid;

    auto dissipation = [&](const std::vector<cplx>& c) {
        double acc = 0.0;
        for (std::int64_t i = 0; i < g.n_points(); ++i)
            acc += std::pow(std::abs(g.frequency(i)), 2.0 * params.alpha) * std::norm(c[i]);
        return 2.0 * acc * g.dxi() / (2.0 * M_PI);
    };

    double e0 = coeff_l2(g, u.coeffs), e1 = coeff_l2(g, u1);
    double lhs = (e1 * e1 - e0 * e0) / dt;
    double rhs = -(dissipation(u.coeffs) + 4.0 * dissipation(uh) + dissipation(u1)) / 6.0;
    return {lhs, rhs};
}

void PicardConfig::validate(const ModelParams& params) const {
    if (!(T > 0.0)) throw validation_error("PicardConfig: T must be positive");
    if (n_quad < 9 || !is_power_of_two(n_quad - 1))
        throw validation_error("PicardConfig: n_quad must be 2^k + 1 with 2^k >= 8");
    if (max_iters < 2) throw validation_error("PicardConfig: max_iters must be >= 2");
    if (!(t_box >= 2.0)) throw validation_error("PicardConfig: t_box must be >= 2");
    if (!(s_c_plus > s_alpha(params.alpha)))
        throw validation_error("PicardConfig: s_c_plus must exceed s_alpha(alpha)");
    if (2.0 * T > t_box)
        throw validation_error("PicardConfig: lattice must contain supp psi_T^2 = [-2T, 2T]");
}

namespace {

// Marches I(t_j) = int_0^{t_j} e^{(t_j - t')Lambda} vhat(t') dt' on the
// nonnegative half of the time lattice. Slices are x-spectra. Even nodes use
// composite Simpson; odd nodes add the last cell by a 3-point backward rule.
std::vector<std::vector<cplx>> march_duhamel(const SpaceTimeGrid& g,
                                             const std::vector<std::vector<cplx>>& vhat,
                                             double alpha) {
    const std::int64_t nx = g.n_x();
    const std::int64_t j0 = g.time_zero_index();
    const std::int64_t nt = g.n_time();
    const double h = g.dt();

    std::vector<cplx> p1(nx), p2(nx);
    for (std::int64_t k = 0; k < nx; ++k) {
        p1[k] = std::exp(h * linear_symbol(g.grid_x()->frequency(k), alpha));
        p2[k] = p1[k] * p1[k];
    }

    std::vector<std::vector<cplx>> acc(nt - j0, std::vector<cplx>(nx, cplx{0, 0}));

    for (std::int64_t j = j0 + 2; j < nt; j += 2) {
        auto& out = acc[j - j0];
        const auto& prev = acc[j - 2 - j0];
        const auto& va = vhat[j - 2 - j0];
        const auto& vb = vhat[j - 1 - j0];
        const auto& vc = vhat[j - j0];
        for (std::int64_t k = 0; k < nx; ++k)
            out[k] = p2[k] * prev[k] +
                     (h / 3.0) * (p2[k] * va[k] + 4.0 * p1[k] * vb[k] + vc[k]);
    }
    if (j0 + 1 < nt) {
        auto& out = acc[1];
        const auto& v0 = vhat[0];
        const auto& v1 = vhat[1];
        for (std::int64_t k = 0; k < nx; ++k)
            out[k] = (h / 2.0) * (p1[k] * v0[k] + v1[k]);
    }
    for (std::int64_t j = j0 + 3; j < nt; j += 2) {
        auto& out = acc[j - j0];
        const auto& even = acc[j - 1 - j0];
        const auto& va = vhat[j - 2 - j0];
        const auto& vb = vhat[j - 1 - j0];
        const auto& vc = vhat[j - j0];
        for (std::int64_t k = 0; k < nx; ++k)
            out[k] = p1[k] * even[k] +
                     (h / 12.0) * (-p2[k] * va[k] + 8.0 * p1[k] * vb[k] + 5.0 * vc[k]);
    }
    return acc;
}

std::vector<cplx> slice_of(const SpaceTimeField& u, std::int64_t j) {
    const std::int64_t nx = u.st_grid->n_x();
    return std::vector<cplx>(u.values.begin() + j * nx, u.values.begin() + (j + 1) * nx);
}

void set_slice(SpaceTimeField& u, std::int64_t j, const std::vector<cplx>& s) {
    const std::int64_t nx = u.st_grid->n_x();
    std::copy(s.begin(), s.end(), u.values.begin() + j * nx);
}

}  // namespace

SpaceTimeField duhamel_integral(const SpaceTimeField& v, double alpha) {
    if (v.rep != Rep::Physical)
        throw validation_error("duhamel_integral: physical representation required");
    const SpaceTimeGrid& g = *v.st_grid;
    const Grid1D& gx = *g.grid_x();
    const std::int64_t j0 = g.time_zero_index();

    std::vector<std::vector<cplx>> vhat(g.n_time() - j0);
    for (std::int64_t j = j0; j < g.n_time(); ++j)
        vhat[j - j0] = transform_complex(gx, slice_of(v, j));

    auto acc = march_duhamel(g, vhat, alpha);

    SpaceTimeField out(v.st_grid, Rep::Physical);
    for (std::int64_t j = j0; j < g.n_time(); ++j)
        set_slice(out, j, inverse_transform_complex(gx, acc[j - j0]));
    return out;
}

SpaceTimeField duhamel_map(const SpaceTimeField& u, const Field& u0, const PicardConfig& cfg,
                           const ModelParams& params) {
    params.validate();
    cfg.validate(params);
    if (u.rep != Rep::Physical)
        throw validation_error("duhamel_map: physical representation required");
    const SpaceTimeGrid& g = *u.st_grid;
    const Grid1D& gx = *g.grid_x();
    if (u0.grid->n_points() != gx.n_points())
        throw validation_error("duhamel_map: u0 grid does not match the space-time lattice");
    const std::int64_t j0 = g.time_zero_index();

    // w(t') = psi_T(t')^2 * d_x(u(t')^2), x-spectrum per slice
    std::vector<std::vector<cplx>> what(g.n_time() - j0);
    for (std::int64_t j = j0; j < g.n_time(); ++j) {
        const double cut = bump_psi(g.time(j), cfg.T);
        auto& w = what[j - j0];
        if (cut == 0.0) {
            w.assign(gx.n_points(), cplx{0, 0});
            continue;
        }
        auto uh = transform_complex(gx, slice_of(u, j));
        dealias(gx, uh);
        auto up = fourier::inverse_1d(uh);
        const double inv_l = 1.0 / gx.domain_length();
        for (auto& val : up) {
            val *= inv_l;
            val *= val;
        }
        w = transform_complex(gx, up);
        dealias(gx, w);
        const double c2 = cut * cut;
        for (std::int64_t k = 0; k < gx.n_points(); ++k)
            w[k] *= cplx(0.0, gx.frequency(k)) * c2;
    }

    auto acc = march_duhamel(g, what, params.alpha);

    SpectralField u0_hat = transform(u0);
    SpaceTimeField out(u.st_grid, Rep::Physical);
    for (std::int64_t j = 0; j < g.n_time(); ++j) {
        const double t = g.time(j);
        const double psi = bump_psi(t, 1.0);
        std::vector<cplx> fhat(gx.n_points(), cplx{0, 0});
        if (psi != 0.0) {
            SpectralField lin = apply_semigroup(u0_hat, t, params.alpha);
            for (std::int64_t k = 0; k < gx.n_points(); ++k) fhat[k] = psi * lin.coeffs[k];
            if (j > j0) {
                const auto& ij = acc[j - j0];
                for (std::int64_t k = 0; k < gx.n_points(); ++k) fhat[k] -= 0.5 * psi * ij[k];
            }
        }
        set_slice(out, j, inverse_transform_complex(gx, fhat));
    }
    return out;
}

double duhamel_resolution_check(const SpaceTimeField& u, const Field& u0,
                                const PicardConfig& cfg, const ModelParams& params) {
    PicardConfig coarse_cfg = cfg;
    coarse_cfg.n_quad = (cfg.n_quad - 1) / 2 + 1;
    auto coarse_grid = make_spacetime_grid(u0.grid, coarse_cfg.n_time(), cfg.t_box);

    SpaceTimeField u_coarse(coarse_grid, Rep::Physical);
    for (std::int64_t j = 0; j < coarse_grid->n_time(); ++j)
        set_slice(u_coarse, j, slice_of(u, 2 * j));

    SpaceTimeField f_fine = duhamel_map(u, u0, cfg, params);
    SpaceTimeField f_coarse = duhamel_map(u_coarse, u0, coarse_cfg, params);

    SpaceTimeField diff(coarse_grid, Rep::Physical);
    for (std::int64_t j = 0; j < coarse_grid->n_time(); ++j) {
        auto a = slice_of(f_fine, 2 * j);
        auto b = slice_of(f_coarse, j);
        for (size_t k = 0; k < a.size(); ++k) a[k] -= b[k];
        set_slice(diff, j, a);
    }
    double base = xbs_norm(spacetime_transform_forward(f_coarse), 0.5, params.s, params.alpha);
    double dev = xbs_norm(spacetime_transform_forward(diff), 0.5, params.s, params.alpha);
    return base > 0.0 ? dev / base : dev;
}

double z_norm(const SpaceTimeField& u_physical, const PicardConfig& cfg,
              const ModelParams& params, double gamma) {
    auto u_hat = spacetime_transform_forward(u_physical);
    return xbs_norm(u_hat, 0.5, cfg.s_c_plus, params.alpha) +
           gamma * xbs_norm(u_hat, 0.5, params.s, params.alpha);
}

PicardResult picard_solve(const Field& u0, const PicardConfig& cfg, const ModelParams& params) {
    params.validate();
    cfg.validate(params);
    auto st_grid = make_spacetime_grid(u0.grid, cfg.n_time(), cfg.t_box);

    double gamma = cfg.gamma;
    if (!(gamma > 0.0)) {
        SpectralField u0_hat = transform(u0);
        double hs = sobolev_norm(u0_hat, params.s);
        gamma = hs > 0.0 ? sobolev_norm(u0_hat, cfg.s_c_plus) / hs : 1.0;
    }

    PicardResult res;
    SpaceTimeField prev(st_grid, Rep::Physical);
    SpaceTimeField cur = prev;
    for (std::int64_t k = 0; k < cfg.max_iters; ++k) {
        SpaceTimeField next = duhamel_map(cur, u0, cfg, params);
        SpaceTimeField diff = next;
        for (size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= cur.values[i];
        double d = z_norm(diff, cfg, params, gamma);
        res.diffs.push_back(d);
        if (res.diffs.size() >= 2 && res.diffs[res.diffs.size() - 2] > 0.0)
            res.ratios.push_back(d / res.diffs[res.diffs.size() - 2]);
        prev = std::move(cur);
        cur = std::move(next);
        res.iterations = static_cast<int>(k) + 1;
        if (d < 1e-8) {
            res.converged = true;
            break;
        }
    }
    res.fixed_point = std::move(cur);
    return res;
}

double edge_amplitude_ratio(const Field& u) {
    const std::int64_t n = u.grid->n_points();
    const std::int64_t w = std::max<std::int64_t>(1, n / 32);
    double edge = 0.0, all = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
        double a = std::abs(u.values[j]);
        all = std::max(all, a);
        if (j < w || j >= n - w) edge = std::max(edge, a);
    }
    return all > 0.0 ? edge / all : 0.0;
}

void write_trajectory_csv(const Trajectory& traj, double s_probe, std::ostream& os) {
    os << "t,l2_norm,hs_norm,mean\n";
    char buf[128];
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const auto& st = traj.states[i];
        double mean = st.coeffs[st.grid->n_points() / 2].real() / st.grid->domain_length();
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", traj.times[i],
                      sobolev_norm(st, 0.0), sobolev_norm(st, s_probe), mean);
        os << buf;
    }
}

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

void write_snapshot(const SpectralField& state, double t, double alpha, std::ostream& os) {
    const std::uint64_t n = static_cast<std::uint64_t>(state.grid->n_points());
    const double l = state.grid->domain_length();
    os.write(reinterpret_cast<const char*>(&n), 8);
    os.write(reinterpret_cast<const char*>(&l), 8);
    os.write(reinterpret_cast<const char*>(&alpha), 8);
    os.write(reinterpret_cast<const char*>(&t), 8);
    Field u = transform(state);
    os.write(reinterpret_cast<const char*>(u.values.data()),
             static_cast<std::streamsize>(8 * u.values.size()));
}

SpectralField read_snapshot(std::istream& is, double& t, double& alpha) {
    std::uint64_t n = 0;
    double l = 0;
    is.read(reinterpret_cast<char*>(&n), 8);
    is.read(reinterpret_cast<char*>(&l), 8);
    is.read(reinterpret_cast<char*>(&alpha), 8);
    is.read(reinterpret_cast<char*>(&t), 8);
    if (!is) throw validation_error("read_snapshot: truncated header");
    Field u(make_grid(static_cast<std::int64_t>(n), l));
    is.read(reinterpret_cast<char*>(u.values.data()), static_cast<std::streamsize>(8 * n));
    if (!is) throw validation_error("read_snapshot: truncated payload");
    return transform(u);
}

}  // namespace dkdv
