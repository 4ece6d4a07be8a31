#pragma once

#include <optional>
#include <string>

#include "dkdv/spacetime.hpp"

namespace dkdv {

// || <i(tau - xi^3) + |xi|^{2a}>^b <xi>^s u_hat ||_{L^2(tau,xi)} with the
// same quadrature measure as st_l2_frequency.
double xbs_norm(const SpaceTimeField& u_hat, double b, double s, double alpha);

enum class LemmaKind {
    LinFree,       // ||psi W_a(t) phi||_{X^{1/2,s}} <~ ||phi||_{H^s}
    LinDuhamel,    // Duhamel term bounded by X^{-1/2+delta,s}
    Smoothing,     // Duhamel term continuous into H^{s+2 a delta}
    L4Strichartz,  // L^4 bound with <xi>^theta / <tau-xi^3>^rho, T^nu gain
    L2Contract,    // L^2 bound with 1/<tau-xi^3>^theta, T^nu gain
    CalcA,         // int dx / (<x-a>^{2b} <x-b'>^{2b''}) tail inequality
    CalcB,         // weighted square-root singular integral inequality
};

std::string lemma_kind_name(LemmaKind k);

struct LemmaVerdict {
    LemmaKind lemma_id;
    int trials = 0;
    double worst_ratio = 0.0;
    std::optional<double> t_scaling_slope;
    bool pass = false;
    // ratio growth under resolution doubling, recorded for reporting
    double resolution_growth = 0.0;
};

struct LemmaCheckOptions {
    // base lattice for the space-time kinds; doubling extends both axes
    std::int64_t n_x = 64;
    std::int64_t n_time = 256;
    double t_box = 4.0;
    double domain_length = 16.0 * M_PI;
    // admissible exponents for the Strichartz / contraction kinds; a
    // non-positive theta_contract falls back to ModelParams::nu_probe
    double theta_stri = 0.125;
    double rho_stri = 0.4;
    double theta_contract = 0.0;
};

// Monte-Carlo check of one lemma: worst LHS/RHS ratio over `trials` random
// inputs, re-run on a doubled lattice; pass = finite ratios, growth < 10%,
// and (for the T^nu kinds) positive fitted T-scaling slope.
LemmaVerdict lemma_check(LemmaKind kind, int trials, const ModelParams& params,
                         std::uint64_t rng_seed, const LemmaCheckOptions& opts = {});

std::string lemma_verdict_json(const LemmaVerdict& v);

// The two sides of the norm-equivalence comparison for b = 1/2:
// X-norm versus ||U(-t)u||_{H^{b,s}} + ||u||_{L^2_t H^{s+2ab}_x}.
struct NormEquivalence {
    double xbs = 0.0;
    double airy_conjugated = 0.0;  // lattice form: weight <tau-xi^3>^b <xi>^s
    double l2_sobolev = 0.0;       // weight <xi>^{s+2ab}
    double ratio() const { return xbs / (airy_conjugated + l2_sobolev); }
};

NormEquivalence norm_equivalence_sides(const SpaceTimeField& u_hat, double b, double s,
                                       double alpha);

}  // namespace dkdv
