#include "dkdv/grid.hpp"

namespace dkdv {

Grid1D::Grid1D(std::int64_t n_points, double domain_length)
    : n_(n_points), length_(domain_length) {
    if (!is_power_of_two(n_points) || n_points < 8)
        throw validation_error("Grid1D: n_points must be a power of two >= 8");
    if (!(domain_length > 0.0))
        throw validation_error("Grid1D: domain_length must be positive");
    freqs_.resize(n_);
    for (std::int64_t i = 0; i < n_; ++i) freqs_[i] = frequency(i);
}

GridPtr make_grid(std::int64_t n_points, double domain_length) {
    return std::make_shared<const Grid1D>(n_points, domain_length);
}

}  // namespace dkdv
