#pragma once

#include "dkdv/grid.hpp"

namespace dkdv {

// Fourier-integral convention: u_hat(xi) = integral e^{-i x xi} u(x) dx,
// discretized with the rectangle rule (spectrally accurate for periodic data):
//   u_hat(xi_k) = dx * sum_j u(x_j) e^{-i x_j xi_k},
//   u(x_j)      = (1/L) * sum_k u_hat(xi_k) e^{+i x_j xi_k}.
// Parseval: sum_j |u_j|^2 dx = (1/2pi) sum_k |u_hat_k|^2 dxi.

SpectralField transform(const Field& u);
Field transform(const SpectralField& u_hat);

// Complex-data variants (used by space-time machinery and tests).
std::vector<cplx> transform_complex(const Grid1D& g, const std::vector<cplx>& phys);
std::vector<cplx> inverse_transform_complex(const Grid1D& g, const std::vector<cplx>& spec);

// Lambda(xi) = i xi^3 - |xi|^{2 alpha}; the free evolution for t >= 0 is
// u_hat(t) = exp(t Lambda) u_hat(0).
cplx linear_symbol(double xi, double alpha);

// Multiplies each coefficient by exp(-|xi|^{2a}|t| + i xi^3 t). Valid for all
// real t; dissipation acts in both time directions through |t|.
SpectralField apply_semigroup(const SpectralField& phi, double t, double alpha);

// -1/2 d/dx (u^2), evaluated pseudospectrally with the 2/3 rule. Equals
// -u u_x for smooth u; exact zero mean.
Field nonlinearity(const Field& u);

// Same operation in coefficient space (the solver's inner loop).
std::vector<cplx> nonlinearity_coeffs(const Grid1D& g, const std::vector<cplx>& coeffs);

// H^s norm: ( (1/2pi) sum_k <xi_k>^{2s} |u_hat_k|^2 dxi )^{1/2}.
double sobolev_norm(const SpectralField& phi, double s);

double l2_norm(const Field& u);

// Zeroes modes |k| > n/3 (the 2/3 rule band).
void dealias(const Grid1D& g, std::vector<cplx>& coeffs);
std::int64_t dealias_cutoff(const Grid1D& g);

// d/dx in coefficient space (i*xi multiplier).
SpectralField spectral_derivative(const SpectralField& u_hat);

}  // namespace dkdv
