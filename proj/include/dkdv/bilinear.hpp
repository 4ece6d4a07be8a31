#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dkdv/spacetime.hpp"

namespace dkdv {

// Critical Sobolev index: -3/4 for alpha <= 1/2, -3/(5-2 alpha) above.
double s_alpha(double alpha);

// Frequency/modulation magnitudes of a dyadic block; every entry a power of
// two. Indices follow the extremizer convention: 1 is the low-frequency
// factor, 2 and 3 the comparable high-frequency ones.
struct DyadicBlock {
    double n1, n2, n3;
    double l1, l2, l3;

    void validate() const;

    double n_max() const { return std::max({n1, n2, n3}); }
    double n_min() const { return std::min({n1, n2, n3}); }
    double n_med() const { return n1 + n2 + n3 - n_max() - n_min(); }
    double l_max() const { return std::max({l1, l2, l3}); }
    double l_min() const { return std::min({l1, l2, l3}); }
    double l_med() const { return l1 + l2 + l3 - l_max() - l_min(); }
    double n_product() const { return n1 * n2 * n3; }
};

struct Modulations {
    double sigma, sigma1, sigma2;
};

// sigma = tau - xi^3 and its two convolution partners; satisfies
// sigma1 + sigma2 - sigma = 3 xi xi1 (xi - xi1).
Modulations modulations(double tau, double tau1, double xi, double xi1);

// The three-factor kernel of the dual form of the bilinear estimate.
double kernel_K(double tau, double tau1, double xi, double xi1, const ModelParams& params);

// Same with explicit bracket exponents (out_exp on the product factor,
// in_exp on the two input factors); (1/2-delta, 1/2) recovers kernel_K and
// (0, 0) reduces to |xi| <xi>^s <xi1>^{-s} <xi-xi1>^{-s}.
double kernel_K_general(double tau, double tau1, double xi, double xi1,
                        const ModelParams& params, double out_exp, double in_exp);

enum class CoherenceCase { PlusPlus, PlusMinus, Other };

// Closed-form dyadic block bounds; hypothesis violations throw with the
// failed condition named. Comparability conventions: A ~ B means
// B/2 <= A <= 2B, A <~ B means A <= 4B, A >> B means A >= 4B.
double dyadic_block_bound(const DyadicBlock& block, CoherenceCase which);

// {0,1} profile on the (tau, xi) mode lattice, stored as tau-index intervals
// per xi column. Mode indices are integers (tau = m*dtau, xi = k*dxi); the
// declared SpaceTimeGrid fixes spacing and admissible range, nothing is
// materialized densely.
struct TauInterval {
    std::int64_t lo, hi;  // inclusive mode range
    std::int64_t count() const { return hi - lo + 1; }
};

struct IndicatorColumn {
    std::int64_t k;  // xi mode
    std::vector<TauInterval> intervals;
};

struct IndicatorProfile {
    StGridPtr st_grid;
    std::vector<IndicatorColumn> columns;  // ascending k

    std::int64_t cell_count() const;
    double measure() const;  // cell_count * dtau * dxi
    double l2_norm() const { return std::sqrt(measure()); }
    bool empty() const;
};

// Converts a dense {0,1} space-time field (frequency representation) to the
// interval form. Values must be 0 or 1 up to 1e-9.
IndicatorProfile indicator_from_field(const SpaceTimeField& f);

struct ExtremizerTriple {
    IndicatorProfile f1, f2, f3;
    DyadicBlock block;
};

// The saturating characteristic profiles:
//   f1: |xi| in [n1/2, n1],    |tau - 3 n2^2 xi| <= n1^2 n2
//   f2: |xi - n2| <= n1,       |tau - xi^3| <= l2
//   f3: |xi + n2| <= n1,       |tau - xi^3| <= l3
// Requires the (+-) regime n2 ~ n3 >~ n1, l1 ~ n1 n2 n3 >= l2 >= l3 and a
// lattice that resolves the thinnest slab.
ExtremizerTriple extremizer_triple(const DyadicBlock& block, const StGridPtr& st_grid);

enum class TrilinearMultiplier { Unit, BlockCharacteristic, KernelWeighted };

// Constrained lattice sum  (dtau*dxi)^2 * sum f1(z1) f2(z2) f3(-z1-z2) m(...)
// over mode pairs. Unit and BlockCharacteristic run in closed form per column
// pair; KernelWeighted walks cells (meant for small profiles).
double trilinear_integral(const ExtremizerTriple& triple, TrilinearMultiplier multiplier,
                          const ModelParams& params);

double trilinear_integral(const IndicatorProfile& f1, const IndicatorProfile& f2,
                          const IndicatorProfile& f3, TrilinearMultiplier multiplier,
                          const DyadicBlock* block, const ModelParams& params);

// The dual pairing (dtau*dxi)^2 sum K(tau,tau1,xi,xi1) h(tau,xi)
// f(tau1,xi1) g(tau-tau1,xi-xi1) over dense frequency-side fields.
cplx kernel_trilinear_form(const SpaceTimeField& h_hat, const SpaceTimeField& f_hat,
                           const SpaceTimeField& g_hat, const ModelParams& params);

// Quadrature L^2 norm over (tau,xi) of C(z) = dtau*dxi * sum_{z1} K(z,z1)
// f(z1) g(z-z1): the supremum of the pairing over unit-norm h.
double kernel_convolution_norm(const SpaceTimeField& f_hat, const SpaceTimeField& g_hat,
                               const ModelParams& params);

// Normalized extremizer value: a certified lower bound on the block
// multiplier norm.
double block_lower_bound(const DyadicBlock& block, const StGridPtr& st_grid,
                         const ModelParams& params);

// Lattice sized for one block: tau spacing <= l_min/16, xi spacing <= n1/16,
// coverage for every profile cell. The grid is a descriptor; profiles stay
// sparse.
StGridPtr sweep_lattice_for(const DyadicBlock& block);

// ||d_x(uv)||_{X^{-1/2+delta,s}} / (||u||_{X^{1/2,s}} ||v||_{X^{1/2,s}});
// the product is formed in physical space on the dealiased band.
double bilinear_ratio(const SpaceTimeField& u, const SpaceTimeField& v,
                      const ModelParams& params);

enum class SweepVerdict { Bounded, Divergent };

struct SweepReport {
    double s = 0.0;
    double alpha = 1.0;
    std::vector<double> n1_values;
    std::vector<double> ratios;
    double fitted_slope = 0.0;
    double slope_stderr = 0.0;
    double predicted_slope = 0.0;
    SweepVerdict verdict = SweepVerdict::Bounded;
};

double predicted_sweep_slope(double s, double alpha);

// Reproduces the critical-region supremand: for each N1 assembles the block
// family (alpha <= 1/2: N3 = 1, L1 = L2 = N3^2 N1; alpha > 1/2: N3 ~
// N1^{alpha-1/2}, L1 = L2 ~ N1^{2 alpha}; L3 = N3 N1^2), weighs the measured
// block lower bound and fits the log-log slope. Divergent iff slope > 0.05.
SweepReport sharpness_sweep(double s, double alpha, const std::vector<double>& n1_list,
                            const ModelParams& params);

struct BlockSharpness {
    DyadicBlock block;
    double bound = 0.0;     // closed-form (+-) value
    double measured = 0.0;  // extremizer lower bound
    double ratio() const { return measured / bound; }
};

// (+-) blocks with N_max spanning [4, 128] for the uniformity study.
std::vector<DyadicBlock> plus_minus_block_family();

BlockSharpness block_sharpness(const DyadicBlock& block, const ModelParams& params);

}  // namespace dkdv
