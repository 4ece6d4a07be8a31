#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "dkdv/util.hpp"

namespace dkdv {

using cplx = std::complex<double>;

// Periodic collocation lattice on [0, L): x_j = j*L/n. Fourier modes are
// xi_k = 2*pi*k/L for k = -n/2 .. n/2-1, stored in ascending-k order.
class Grid1D {
  public:
    Grid1D(std::int64_t n_points, double domain_length);

    std::int64_t n_points() const { return n_; }
    double domain_length() const { return length_; }
    double spacing() const { return length_ / static_cast<double>(n_); }
    double dxi() const { return 2.0 * M_PI / length_; }

    // mode number k for storage slot i (ascending order)
    std::int64_t mode(std::int64_t i) const { return i - n_ / 2; }
    double frequency(std::int64_t i) const { return dxi() * static_cast<double>(mode(i)); }
    double point(std::int64_t j) const { return spacing() * static_cast<double>(j); }

    const std::vector<double>& frequencies() const { return freqs_; }

  private:
    std::int64_t n_;
    double length_;
    std::vector<double> freqs_;
};

using GridPtr = std::shared_ptr<const Grid1D>;

GridPtr make_grid(std::int64_t n_points, double domain_length);

// The model exponents, in one place.
struct ModelParams {
    double alpha = 1.0;    // dissipation strength, |D_x|^{2*alpha}
    double s = -0.9;       // Sobolev index
    double b = 0.5;        // modulation index
    double delta = 0.01;   // the small loss in the -1/2+delta weight
    double nu_probe = 0.1; // exponent probed for the T^nu factor

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 1.0)) throw validation_error("ModelParams: alpha must be in (0,1]");
        if (!(delta > 0.0 && delta < 0.5)) throw validation_error("ModelParams: delta must be in (0,1/2)");
        if (!(nu_probe > 0.0)) throw validation_error("ModelParams: nu_probe must be positive");
    }
};

// Real samples u(x_j).
struct Field {
    GridPtr grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(GridPtr g) : grid(std::move(g)), values(grid->n_points(), 0.0) {}
};

// Fourier coefficients u_hat(xi_k), ascending-k storage.
struct SpectralField {
    GridPtr grid;
    std::vector<cplx> coeffs;

    SpectralField() = default;
    explicit SpectralField(GridPtr g) : grid(std::move(g)), coeffs(grid->n_points(), cplx{0.0, 0.0}) {}
};

}  // namespace dkdv
