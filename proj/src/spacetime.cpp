#include "dkdv/spacetime.hpp"

#include "dkdv/fourier.hpp"

namespace dkdv {

SpaceTimeGrid::SpaceTimeGrid(GridPtr grid_x, std::int64_t n_time, double t_box)
    : gx_(std::move(grid_x)), nt_(n_time), tbox_(t_box) {
    if (!gx_) throw validation_error("SpaceTimeGrid: missing spatial grid");
    if (!is_power_of_two(nt_) || nt_ < 16)
        throw validation_error("SpaceTimeGrid: n_time must be a power of two >= 16");
    if (!(tbox_ >= 2.0))
        throw validation_error("SpaceTimeGrid: T_box must be >= 2 (must contain supp psi)");
}

StGridPtr make_spacetime_grid(GridPtr grid_x, std::int64_t n_time, double t_box) {
    return std::make_shared<const SpaceTimeGrid>(std::move(grid_x), n_time, t_box);
}

// The physical t-origin sits at -T_box, which shows up as an alternating
// phase in tau: exp(+i T_box tau_m) = (-1)^m.
SpaceTimeField spacetime_transform_forward(const SpaceTimeField& u) {
    if (u.rep != Rep::Physical)
        throw validation_error("spacetime_transform_forward: field not in physical representation");
    const SpaceTimeGrid& g = *u.st_grid;
    SpaceTimeField out(u.st_grid, Rep::Frequency);
    out.values = fourier::forward_2d(g.n_time(), g.n_x(), u.values);
    const double w = g.dt() * g.grid_x()->spacing();
    for (std::int64_t m = 0; m < g.n_time(); ++m) {
        double sign = (g.tmode(m) % 2 == 0) ? 1.0 : -1.0;
        for (std::int64_t k = 0; k < g.n_x(); ++k) out.at(m, k) *= w * sign;
    }
    return out;
}

SpaceTimeField spacetime_transform_inverse(const SpaceTimeField& u_hat) {
    if (u_hat.rep != Rep::Frequency)
        throw validation_error("spacetime_transform_inverse: field not in frequency representation");
    const SpaceTimeGrid& g = *u_hat.st_grid;
    std::vector<cplx> tmp = u_hat.values;
    for (std::int64_t m = 0; m < g.n_time(); ++m) {
        if (g.tmode(m) % 2 != 0)
            for (std::int64_t k = 0; k < g.n_x(); ++k) tmp[m * g.n_x() + k] *= -1.0;
    }
    SpaceTimeField out(u_hat.st_grid, Rep::Physical);
    out.values = fourier::inverse_2d(g.n_time(), g.n_x(), tmp);
    const double w = g.dtau() * g.grid_x()->dxi() / (4.0 * M_PI * M_PI);
    for (auto& v : out.values) v *= w;
    return out;
}

double bump_psi(double t, double scale) {
    if (!(scale > 0.0)) throw validation_error("bump_psi: scale must be positive");
    double y = std::abs(t / scale);
    if (y <= 1.0) return 1.0;
    if (y >= 2.0) return 0.0;
    double r = y - 1.0;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

double st_l2_physical(const SpaceTimeField& u) {
    const SpaceTimeGrid& g = *u.st_grid;
    double acc = 0.0;
    for (const auto& v : u.values) acc += std::norm(v);
    return std::sqrt(acc * g.dt() * g.grid_x()->spacing());
}

double st_l2_frequency(const SpaceTimeField& u_hat) {
    const SpaceTimeGrid& g = *u_hat.st_grid;
    double acc = 0.0;
    for (const auto& v : u_hat.values) acc += std::norm(v);
    return std::sqrt(acc * g.dtau() * g.grid_x()->dxi()) / (2.0 * M_PI);
}

double st_l4_physical(const SpaceTimeField& u) {
    const SpaceTimeGrid& g = *u.st_grid;
    double acc = 0.0;
    for (const auto& v : u.values) {
        double a = std::norm(v);
        acc += a * a;
    }
    return std::pow(acc * g.dt() * g.grid_x()->spacing(), 0.25);
}

void st_dealias(SpaceTimeField& u_hat) {
    if (u_hat.rep != Rep::Frequency)
        throw validation_error("st_dealias: frequency representation required");
    const SpaceTimeGrid& g = *u_hat.st_grid;
    const std::int64_t mc = g.n_time() / 3;
    const std::int64_t kc = g.grid_x()->n_points() / 3;
    for (std::int64_t m = 0; m < g.n_time(); ++m)
        for (std::int64_t k = 0; k < g.n_x(); ++k)
            if (std::abs(g.tmode(m)) > mc || std::abs(g.grid_x()->mode(k)) > kc)
                u_hat.at(m, k) = 0.0;
}

}  // namespace dkdv
