#pragma once

#include <iosfwd>

#include "dkdv/spacetime.hpp"
#include "dkdv/spectral_core.hpp"

namespace dkdv {

struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> states;
    ModelParams params;
};

// ETD-RK4 coefficients for a fixed (grid, dt, alpha). The phi-function
// weights are evaluated as means over a radius-1 circle around each
// dt*Lambda(xi), which stays accurate through Lambda = 0.
class EtdrkScheme {
  public:
    EtdrkScheme(GridPtr grid, double dt, double alpha);

    std::vector<cplx> step(const std::vector<cplx>& coeffs, bool with_nonlinearity = true) const;

    double dt() const { return dt_; }
    const GridPtr& grid() const { return grid_; }

  private:
    GridPtr grid_;
    double dt_;
    double alpha_;
    std::vector<cplx> e_, e2_, q_, f1_, f2_, f3_;
};

// One step; reports a stability violation if the L^2 norm grows by more
// than 1e-9 relative.
SpectralField etdrk4_step(const SpectralField& u, double dt, const ModelParams& params);

Trajectory solve_ivp(const Field& u0, double T, double dt, const ModelParams& params,
                     std::int64_t record_every);

// ||u(t_i)||_{H^{s_probe}} along the trajectory.
std::vector<double> decay_diagnostic(const Trajectory& traj, double s_probe);

// One-step energy balance: returns (dE/dt, Simpson average of -2|||D|^a u||^2)
// over [t, t+dt]; the two agree to O(dt^4).
std::pair<double, double> energy_rate_check(const SpectralField& u, double dt,
                                            const ModelParams& params);

struct PicardConfig {
    double T = 0.5;             // window of the psi_T^2 cutoff
    std::int64_t n_quad = 257;  // Duhamel nodes on [0, T_box]; must be 2^k + 1
    std::int64_t max_iters = 25;
    double s_c_plus = -0.45;    // auxiliary index, must exceed s_alpha(alpha)
    double gamma = 0.0;         // Z-norm weight; <= 0 selects the H^{s_c+}/H^s ratio
    double t_box = 4.0;

    std::int64_t n_time() const { return 2 * (n_quad - 1); }
    void validate(const ModelParams& params) const;
};

// chi_{R+}(t) * int_0^t W_a(t-t') v(t') dt' slice by slice (composite Simpson
// marching on the time lattice; zero for t < 0).
SpaceTimeField duhamel_integral(const SpaceTimeField& v, double alpha);

// F(u) = psi(t)[ W_a(t) u0 - chi_{R+}(t)/2 * int_0^t W_a(t-t') d_x(psi_T^2 u^2) dt' ].
SpaceTimeField duhamel_map(const SpaceTimeField& u, const Field& u0, const PicardConfig& cfg,
                           const ModelParams& params);

// Relative change of F(u) in X^{1/2,s} when the quadrature lattice is halved.
double duhamel_resolution_check(const SpaceTimeField& u, const Field& u0,
                                const PicardConfig& cfg, const ModelParams& params);

struct PicardResult {
    SpaceTimeField fixed_point;
    std::vector<double> diffs;   // ||u^{k+1} - u^k||_Z
    std::vector<double> ratios;  // successive diff quotients
    bool converged = false;
    int iterations = 0;
};

PicardResult picard_solve(const Field& u0, const PicardConfig& cfg, const ModelParams& params);

double z_norm(const SpaceTimeField& u_physical, const PicardConfig& cfg,
              const ModelParams& params, double gamma);

// Fraction of the max amplitude sitting in the outer 1/16 of the domain;
// the wrap-around diagnostic for localized data.
double edge_amplitude_ratio(const Field& u);

// CSV columns: t,l2_norm,hs_norm,mean
void write_trajectory_csv(const Trajectory& traj, double s_probe, std::ostream& os);

// Little-endian binary snapshot: u64 n_points, f64 L, f64 alpha, f64 t,
// then n_points f64 samples.
void write_snapshot(const SpectralField& state, double t, double alpha, std::ostream& os);
SpectralField read_snapshot(std::istream& is, double& t, double& alpha);

}  // namespace dkdv
