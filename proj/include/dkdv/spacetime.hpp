#pragma once

#include "dkdv/grid.hpp"

namespace dkdv {

// Space-time lattice: t_j = -T_box + j*dt on [-T_box, T_box), x on grid_x.
// Dual lattice tau_m = pi*m/T_box for m = -n_time/2 .. n_time/2-1.
class SpaceTimeGrid {
  public:
    SpaceTimeGrid(GridPtr grid_x, std::int64_t n_time, double t_box);

    const GridPtr& grid_x() const { return gx_; }
    std::int64_t n_time() const { return nt_; }
    std::int64_t n_x() const { return gx_->n_points(); }
    double t_box() const { return tbox_; }
    double dt() const { return 2.0 * tbox_ / static_cast<double>(nt_); }
    double dtau() const { return M_PI / tbox_; }

    std::int64_t tmode(std::int64_t i) const { return i - nt_ / 2; }
    double time(std::int64_t j) const { return -tbox_ + dt() * static_cast<double>(j); }
    double tau(std::int64_t i) const { return dtau() * static_cast<double>(tmode(i)); }

    // slot of t = 0 (always on the lattice)
    std::int64_t time_zero_index() const { return nt_ / 2; }

  private:
    GridPtr gx_;
    std::int64_t nt_;
    double tbox_;
};

using StGridPtr = std::shared_ptr<const SpaceTimeGrid>;

StGridPtr make_spacetime_grid(GridPtr grid_x, std::int64_t n_time, double t_box);

enum class Rep { Physical, Frequency };

// Samples u(t_j, x_k) or coefficients u_hat(tau_m, xi_k), row-major with the
// time/tau index slow.
struct SpaceTimeField {
    StGridPtr st_grid;
    std::vector<cplx> values;
    Rep rep = Rep::Physical;

    SpaceTimeField() = default;
    SpaceTimeField(StGridPtr g, Rep r)
        : st_grid(std::move(g)),
          values(static_cast<size_t>(st_grid->n_time() * st_grid->n_x()), cplx{0, 0}),
          rep(r) {}

    cplx& at(std::int64_t it, std::int64_t ix) { return values[it * st_grid->n_x() + ix]; }
    const cplx& at(std::int64_t it, std::int64_t ix) const {
        return values[it * st_grid->n_x() + ix];
    }
};

// u_hat(tau,xi) = dt*dx * sum e^{-i(t tau + x xi)} u(t,x); inverse restores
// samples with the (1/2pi)^2 measure. Round-trip is identity to ~1e-15.
SpaceTimeField spacetime_transform_forward(const SpaceTimeField& u);
SpaceTimeField spacetime_transform_inverse(const SpaceTimeField& u_hat);

// C^inf cutoff: 1 on [-1,1], supported in [-2,2], Psi_T(t) = psi(t/T).
double bump_psi(double t, double scale = 1.0);

// Quadrature norms. Physical: (sum |u|^2 dt dx)^{1/2}; frequency side carries
// the (2pi)^{-2} Plancherel measure so the two agree for transform pairs.
double st_l2_physical(const SpaceTimeField& u);
double st_l2_frequency(const SpaceTimeField& u_hat);
double st_l4_physical(const SpaceTimeField& u);

// Zeroes modes outside the inner-2/3 band in both axes.
void st_dealias(SpaceTimeField& u_hat);

}  // namespace dkdv
