#include "dkdv/spectral_core.hpp"

#include <algorithm>

#include "dkdv/fourier.hpp"

namespace dkdv {

std::vector<cplx> transform_complex(const Grid1D& g, const std::vector<cplx>& phys) {
    auto out = fourier::forward_1d(phys);
    const double dx = g.spacing();
    for (auto& c : out) c *= dx;
    return out;
}

std::vector<cplx> inverse_transform_complex(const Grid1D& g, const std::vector<cplx>& spec) {
    auto out = fourier::inverse_1d(spec);
    const double inv_l = 1.0 / g.domain_length();
    for (auto& c : out) c *= inv_l;
    return out;
}

SpectralField transform(const Field& u) {
    if (!u.grid || u.values.size() != static_cast<size_t>(u.grid->n_points()))
        throw validation_error("transform: field length does not match grid");
    std::vector<cplx> phys(u.values.begin(), u.values.end());
    SpectralField out(u.grid);
    out.coeffs = transform_complex(*u.grid, phys);
    return out;
}

Field transform(const SpectralField& u_hat) {
    if (!u_hat.grid || u_hat.coeffs.size() != static_cast<size_t>(u_hat.grid->n_points()))
        throw validation_error("transform: coefficient length does not match grid");
    auto phys = inverse_transform_complex(*u_hat.grid, u_hat.coeffs);
    Field out(u_hat.grid);
    for (size_t j = 0; j < phys.size(); ++j) out.values[j] = phys[j].real();
    return out;
}

cplx linear_symbol(double xi, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw validation_error("linear_symbol: alpha in (0,1]");
    return cplx(-std::pow(std::abs(xi), 2.0 * alpha), xi * xi * xi);
}

SpectralField apply_semigroup(const SpectralField& phi, double t, double alpha) {
    SpectralField out = phi;
    const Grid1D& g = *phi.grid;
    const double at = std::abs(t);
    for (std::int64_t i = 0; i < g.n_points(); ++i) {
        double xi = g.frequency(i);
        double damp = std::exp(-std::pow(std::abs(xi), 2.0 * alpha) * at);
        double phase = xi * xi * xi * t;
        out.coeffs[i] *= damp * cplx(std::cos(phase), std::sin(phase));
    }
    return out;
}

std::int64_t dealias_cutoff(const Grid1D& g) { return g.n_points() / 3; }

void dealias(const Grid1D& g, std::vector<cplx>& coeffs) {
    const std::int64_t kc = dealias_cutoff(g);
    for (std::int64_t i = 0; i < g.n_points(); ++i)
        if (std::abs(g.mode(i)) > kc) coeffs[i] = 0.0;
}

std::vector<cplx> nonlinearity_coeffs(const Grid1D& g, const std::vector<cplx>& coeffs) {
    std::vector<cplx> band = coeffs;
    dealias(g, band);
    auto w = inverse_transform_complex(g, band);
    for (auto& v : w) v *= v;
    auto sq = transform_complex(g, w);
    dealias(g, sq);
    for (std::int64_t i = 0; i < g.n_points(); ++i)
        sq[i] *= cplx(0.0, -0.5 * g.frequency(i));
    return sq;
}

Field nonlinearity(const Field& u) {
    SpectralField u_hat = transform(u);
    SpectralField n_hat(u.grid);
    n_hat.coeffs = nonlinearity_coeffs(*u.grid, u_hat.coeffs);
    return transform(n_hat);
}

double sobolev_norm(const SpectralField& phi, double s) {
    const Grid1D& g = *phi.grid;
    const double w = g.dxi() / (2.0 * M_PI);
    double acc = 0.0;
    for (std::int64_t i = 0; i < g.n_points(); ++i) {
        double xi = g.frequency(i);
        acc += std::pow(1.0 + xi * xi, s) * std::norm(phi.coeffs[i]);
    }
    return std::sqrt(acc * w);
}

double l2_norm(const Field& u) {
    double acc = 0.0;
    for (double v : u.values) acc += v * v;
    return std::sqrt(acc * u.grid->spacing());
}

SpectralField spectral_derivative(const SpectralField& u_hat) {
    SpectralField out = u_hat;
    const Grid1D& g = *u_hat.grid;
    for (std::int64_t i = 0; i < g.n_points(); ++i)
        out.coeffs[i] *= cplx(0.0, g.frequency(i));
    return out;
}

}  // namespace dkdv
