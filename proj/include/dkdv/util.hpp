#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dkdv {

// Thrown for bad parameters / malformed configuration (CLI exit code 2).
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a computation goes numerically bad: blow-up, non-convergence,
// under-resolved lattice (CLI exit code 3).
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool is_power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

// Nearest power of two (ties round up), for dyadic rounding of block data.
inline double dyadic_round(double x) {
    if (x <= 0.0) throw validation_error("dyadic_round: positive input required");
    return std::exp2(std::round(std::log2(x)));
}

inline double dyadic_ceil(double x) { return std::exp2(std::ceil(std::log2(x))); }

inline bool is_dyadic(double x) {
    if (x <= 0.0 || !std::isfinite(x)) return false;
    int e;
    return std::frexp(x, &e) == 0.5;
}

// Japanese bracket <x> = sqrt(1+x^2).
inline double jbracket(double x) { return std::sqrt(1.0 + x * x); }

// Bracket of the complex symbol i*sigma + |xi|^{2a}:
// <z> = (1 + sigma^2 + |xi|^{4a})^{1/2} since |z|^2 = sigma^2 + |xi|^{4a}.
inline double symbol_bracket(double sigma, double xi, double alpha) {
    double d = std::pow(std::abs(xi), 2.0 * alpha);
    return std::sqrt(1.0 + sigma * sigma + d * d);
}

// Deterministic Gaussian stream (Box-Muller over mt19937_64), independent of
// libstdc++'s distribution internals so outputs are stable across platforms.
class GaussianRng {
  public:
    explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        have_spare_ = true;
        spare_ = r * std::sin(2.0 * M_PI * u2);
        return r * std::cos(2.0 * M_PI * u2);
    }

    double uniform01() {
        // in (0,1]: avoids log(0) above
        return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

// Ordinary least squares y = a + b x.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw validation_error("fit_line: need >= 2 points");
    const size_t n = x.size();
    double sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw validation_error("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (n > 2) {
        double ss = 0;
        for (size_t i = 0; i < n; ++i) {
            double r = y[i] - (f.intercept + f.slope * x[i]);
            ss += r * r;
        }
        f.slope_stderr = std::sqrt(ss / ((n - 2) * sxx));
    }
    return f;
}

}  // namespace dkdv
