#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "dkdv/evolution.hpp"
#include "dkdv/util.hpp"

using namespace dkdv;

namespace {

Field bump(const GridPtr& g, double amplitude, double width = 2.0) {
    Field u(g);
    const double c = g->domain_length() / 2.0;
    for (std::int64_t j = 0; j < g->n_points(); ++j) {
        double sech = 1.0 / std::cosh((g->point(j) - c) / width);
        u.values[j] = amplitude * sech * sech;
    }
    return u;
}

// zero-mean random data with |u_hat| ~ <xi>^{-s-1/2}
Field rough(const GridPtr& g, double s, double amplitude, std::uint64_t seed) {
    GaussianRng rng(seed);
    SpectralField u_hat(g);
    const std::int64_t n = g->n_points();
    for (std::int64_t k = 1; k < n / 2; ++k) {
        double xi = g->frequency(n / 2 + k);
        double env = std::pow(1.0 + xi * xi, (-s - 0.5) / 2.0);
        cplx z(rng(), rng());
        u_hat.coeffs[n / 2 + k] = env * z;
        u_hat.coeffs[n / 2 - k] = std::conj(env * z);
    }
    double l2 = sobolev_norm(u_hat, 0.0);
    for (auto& c : u_hat.coeffs) c *= amplitude / l2;
    return transform(u_hat);
}

double rel_coeff_dev(const SpectralField& a, const SpectralField& b) {
    double num = 0, den = 0;
    for (size_t i = 0; i < a.coeffs.size(); ++i) {
        num += std::abs(a.coeffs[i] - b.coeffs[i]);
        den += std::abs(b.coeffs[i]);
    }
    return den > 0 ? num / den : num;
}

}  // namespace

TEST_CASE("etdrk4 matches the semigroup exactly when the nonlinearity is off") {
    auto g = make_grid(128, 16.0 * M_PI);
    ModelParams p;
    p.alpha = 0.6;
    auto u0 = transform(bump(g, 0.8));
    EtdrkScheme scheme(g, 0.02, p.alpha);
    auto linear = scheme.step(u0.coeffs, false);
    auto exact = apply_semigroup(u0, 0.02, p.alpha);
    SpectralField lin(g);
    lin.coeffs = linear;
    CHECK(rel_coeff_dev(lin, exact) < 1e-11);
}

TEST_CASE("etdrk4 maps zero to zero") {
    auto g = make_grid(64, 10.0);
    ModelParams p;
    SpectralField z(g);
    auto out = etdrk4_step(z, 1e-2, p);
    for (const auto& c : out.coeffs) CHECK(std::abs(c) == 0.0);
}

TEST_CASE("etdrk4 observed order >= 3.5 (Richardson against fine reference)") {
    auto g = make_grid(256, 32.0 * M_PI);
    ModelParams p;
    p.alpha = 1.0;
    Field u0 = bump(g, 1.0);
    const double T = 0.25;
    auto ref = solve_ivp(u0, T, T / 1024.0, p, 1 << 20).states.back();
    std::vector<double> errs;
    for (double dt : {T / 32.0, T / 64.0}) {
        auto end = solve_ivp(u0, T, dt, p, 1 << 20).states.back();
        double e = 0;
        for (size_t i = 0; i < end.coeffs.size(); ++i) e += std::norm(end.coeffs[i] - ref.coeffs[i]);
        errs.push_back(std::sqrt(e));
    }
    double order = std::log2(errs[0] / errs[1]);
    CHECK(order >= 3.5);
}

TEST_CASE("solve_ivp: zero data stays zero; bump data strictly dissipates") {
    auto g = make_grid(128, 16.0 * M_PI);
    ModelParams p;
    p.alpha = 1.0;
    Field z(g);
    auto tz = solve_ivp(z, 0.1, 1e-2, p, 2);
    for (const auto& st : tz.states)
        for (const auto& c : st.coeffs) CHECK(std::abs(c) == 0.0);

    Field u0 = bump(g, 1.0);
    auto tr = solve_ivp(u0, 1.0, 2e-3, p, 50);
    auto l2 = decay_diagnostic(tr, 0.0);
    CHECK(l2.back() < l2.front());
    for (size_t i = 1; i < l2.size(); ++i) CHECK(l2[i] <= l2[i - 1] * (1 + 1e-9));
}

TEST_CASE("mean is conserved to 1e-12 along trajectories") {
    auto g = make_grid(128, 16.0 * M_PI);
    ModelParams p;
    p.alpha = 0.5;
    Field u0 = bump(g, 0.7);
    for (auto& v : u0.values) v += 0.3;  // nonzero mean
    auto tr = solve_ivp(u0, 0.5, 2e-3, p, 25);
    double m0 = tr.states.front().coeffs[64].real() / g->domain_length();
    for (const auto& st : tr.states) {
        double m = st.coeffs[64].real() / g->domain_length();
        CHECK(std::abs(m - m0) < 1e-12);
    }
}

TEST_CASE("rough-data tail decays on the linear envelope (alpha = 1/4)") {
    auto g = make_grid(256, 32.0 * M_PI);
    ModelParams p;
    p.alpha = 0.25;
    const double t_end = 0.1;
    Field u0 = rough(g, -0.7, 0.01, 99);
    SpectralField u0_hat = transform(u0);
    auto end = solve_ivp(u0, t_end, 1e-3, p, 1 << 20).states.back();

    const std::int64_t n = g->n_points();
    for (std::int64_t i = 0; i < n; ++i) {
        std::int64_t k = std::abs(g->mode(i));
        double xi = g->frequency(i);
        if (std::abs(u0_hat.coeffs[i]) < 1e-14) continue;
        double envelope = std::exp(-std::pow(std::abs(xi), 0.5) * t_end);
        double ratio = std::abs(end.coeffs[i]) / (std::abs(u0_hat.coeffs[i]) * envelope);
        if (k > n / 3) {
            // beyond the dealias band the evolution is purely linear
            CHECK(ratio == doctest::Approx(1.0).epsilon(1e-9));
        } else if (k > n / 6) {
            // nonlinear band: small data stays within a factor 2 of the envelope
            CHECK(ratio > 0.5);
            CHECK(ratio < 2.0);
        }
    }
}

TEST_CASE("energy rate matches the dissipation integral at O(dt^4)") {
    auto g = make_grid(128, 16.0 * M_PI);
    ModelParams p;
    p.alpha = 0.75;
    auto u = transform(bump(g, 0.9));
    auto [lhs_a, rhs_a] = energy_rate_check(u, 1e-3, p);
    CHECK(std::abs(lhs_a - rhs_a) / std::abs(rhs_a) < 1e-6);
    // the residual is dt^4: compare at steps big enough to clear roundoff
    auto [lhs1, rhs1] = energy_rate_check(u, 4e-2, p);
    auto [lhs2, rhs2] = energy_rate_check(u, 2e-2, p);
    double r1 = std::abs(lhs1 - rhs1), r2 = std::abs(lhs2 - rhs2);
    CHECK(r1 / r2 > 6.0);  // ~16 for a clean dt^4 residual
}

TEST_CASE("decay diagnostic: zero trajectory and H^4 smoothing") {
    auto g = make_grid(256, 32.0 * M_PI);
    ModelParams p;
    p.alpha = 0.5;
    Field z(g);
    auto tz = solve_ivp(z, 0.2, 1e-2, p, 5);
    for (double v : decay_diagnostic(tz, 1.5)) CHECK(v == 0.0);

    Field u0 = rough(g, -0.5, 0.05, 7);
    auto tr = solve_ivp(u0, 0.5, 1e-3, p, 100);
    auto h4 = decay_diagnostic(tr, 4.0);
    for (double v : h4) CHECK(std::isfinite(v));
    for (size_t i = 2; i < h4.size(); ++i) CHECK(h4[i] <= h4[i - 1] * (1 + 1e-9));
}

TEST_CASE("duhamel_map: zero input, pure linear part, quadrature resolution") {
    auto g = make_grid(128, 16.0 * M_PI);
    ModelParams p;
    p.alpha = 1.0;
    PicardConfig cfg;
    cfg.n_quad = 129;
    auto st = make_spacetime_grid(g, cfg.n_time(), cfg.t_box);

    Field zero_ic(g);
    SpaceTimeField zero_u(st, Rep::Physical);
    auto f0 = duhamel_map(zero_u, zero_ic, cfg, p);
    for (const auto& v : f0.values) CHECK(std::abs(v) < 1e-15);

    // with u = 0 the quadratic term drops and F is exactly psi(t) W(t) u0
    Field u0 = bump(g, 0.5);
    auto lin = duhamel_map(zero_u, u0, cfg, p);
    SpectralField u0_hat = transform(u0);
    double worst = 0;
    for (std::int64_t j = 0; j < st->n_time(); ++j) {
        double psi = bump_psi(st->time(j), 1.0);
        auto slice = apply_semigroup(u0_hat, st->time(j), p.alpha);
        Field want = transform(slice);
        for (std::int64_t k = 0; k < st->n_x(); ++k)
            worst = std::max(worst, std::abs(lin.at(j, k) - psi * want.values[k]));
    }
    CHECK(worst < 1e-11);

    double change = duhamel_resolution_check(lin, u0, cfg, p);
    CHECK(change < 1e-4);
}

TEST_CASE("picard: zero data converges immediately; small data contracts") {
    auto g = make_grid(256, 32.0 * M_PI);
    ModelParams p;
    p.alpha = 1.0;
    p.s = -0.9;
    PicardConfig cfg;
    cfg.T = 0.5;
    cfg.n_quad = 129;
    cfg.s_c_plus = -0.45;

    Field zero_ic(g);
    auto rz = picard_solve(zero_ic, cfg, p);
    CHECK(rz.converged);
    CHECK(rz.iterations == 1);

    // scale the bump to ||u0||_{H^{-1/2}} = 0.1
    Field u0 = bump(g, 1.0);
    double h = sobolev_norm(transform(u0), -0.5);
    for (auto& v : u0.values) v *= 0.1 / h;

    auto res = picard_solve(u0, cfg, p);
    REQUIRE(res.converged);
    REQUIRE(res.ratios.size() >= 3);
    for (double r : res.ratios) CHECK(r < 1.0);
    // geometric decay: F(F(u0)) vs F(u0) difference shrinks by < 1/2
    CHECK(res.ratios.front() < 0.5);
    // approximately constant after the first few
    double tail0 = res.ratios[res.ratios.size() - 2];
    double tail1 = res.ratios.back();
    if (tail0 > 1e-3) CHECK(std::abs(tail1 - tail0) < 0.25);
}

TEST_CASE("picard fixed point agrees with the direct solver on [0, T/2]") {
    auto g = make_grid(256, 32.0 * M_PI);
    ModelParams p;
    p.alpha = 1.0;
    p.s = -0.9;
    PicardConfig cfg;
    cfg.T = 0.5;
    cfg.n_quad = 129;
    cfg.s_c_plus = -0.45;

    Field u0 = bump(g, 1.0);
    double h = sobolev_norm(transform(u0), -0.5);
    for (auto& v : u0.values) v *= 0.1 / h;

    auto res = picard_solve(u0, cfg, p);
    REQUIRE(res.converged);

    const SpaceTimeGrid& st = *res.fixed_point.st_grid;
    const double lattice_dt = st.dt();
    const std::int64_t n_cmp = static_cast<std::int64_t>(std::floor(0.25 / lattice_dt));
    auto direct = solve_ivp(u0, n_cmp * lattice_dt, lattice_dt / 8.0, p, 8);
    double worst = 0;
    for (std::int64_t i = 0; i <= n_cmp; ++i) {
        Field d = transform(direct.states[i]);
        Field diff(g);
        for (std::int64_t k = 0; k < st.n_x(); ++k)
            diff.values[k] = res.fixed_point.at(st.time_zero_index() + i, k).real() - d.values[k];
        worst = std::max(worst, l2_norm(diff));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("non-convergence for large data is reported with ratio history") {
    auto g = make_grid(128, 16.0 * M_PI);
    ModelParams p;
    p.alpha = 0.25;
    PicardConfig cfg;
    cfg.T = 2.0;
    cfg.t_box = 4.0;
    cfg.n_quad = 65;
    cfg.max_iters = 6;
    cfg.s_c_plus = -0.45;
    Field u0 = bump(g, 40.0);
    auto res = picard_solve(u0, cfg, p);
    CHECK(!res.converged);
    CHECK(res.ratios.size() >= 1);
}

TEST_CASE("trajectory csv layout and snapshot round-trip") {
    auto g = make_grid(64, 8.0 * M_PI);
    ModelParams p;
    Field u0 = bump(g, 0.4);
    auto tr = solve_ivp(u0, 0.05, 1e-2, p, 2);
    std::ostringstream csv;
    write_trajectory_csv(tr, 0.0, csv);
    std::string s = csv.str();
    CHECK(s.rfind("t,l2_norm,hs_norm,mean\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(tr.times.size()) + 1);

    std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
    write_snapshot(tr.states.back(), tr.times.back(), p.alpha, bin);
    double t = 0, a = 0;
    auto rt = read_snapshot(bin, t, a);
    CHECK(t == tr.times.back());
    CHECK(a == p.alpha);
    Field got = transform(rt);
    Field want = transform(tr.states.back());
    double peak = 0, dev = 0;
    for (std::int64_t j = 0; j < g->n_points(); ++j) {
        peak = std::max(peak, std::abs(want.values[j]));
        dev = std::max(dev, std::abs(got.values[j] - want.values[j]));
    }
    CHECK(dev < 1e-12 * peak);
}

TEST_CASE("edge amplitude stays tiny for localized data (domain adequacy)") {
    auto g = make_grid(512, 64.0 * M_PI);
    ModelParams p;
    p.alpha = 1.0;
    auto tr = solve_ivp(bump(g, 1.0), 1.0, 2e-3, p, 250);
    Field final_state = transform(tr.states.back());
    CHECK(edge_amplitude_ratio(final_state) < 1e-8);
}

TEST_CASE("doubling the default domain leaves a localized run unchanged") {
    ModelParams p;
    p.alpha = 1.0;
    auto run = [&](std::int64_t n, double l) {
        auto g = make_grid(n, l);
        Field u0(g);
        for (std::int64_t j = 0; j < n; ++j) {
            double sech = 1.0 / std::cosh(g->point(j) - l / 2.0);
            u0.values[j] = sech * sech;
        }
        return decay_diagnostic(solve_ivp(u0, 1.0, 2e-3, p, 100), 0.0);
    };
    auto base = run(512, 64.0 * M_PI);
    auto twice = run(1024, 128.0 * M_PI);
    REQUIRE(base.size() == twice.size());
    for (size_t i = 0; i < base.size(); ++i)
        CHECK(base[i] == doctest::Approx(twice[i]).epsilon(1e-8));
}

TEST_CASE("violent data is reported as a numerical failure") {
    auto g = make_grid(64, 8.0 * M_PI);
    ModelParams p;
    p.alpha = 0.25;
    Field u0 = bump(g, 500.0);
    CHECK_THROWS_AS(solve_ivp(u0, 1.0, 0.05, p, 10), numerical_error);
}
