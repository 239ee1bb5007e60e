#pragma once

// Large-S behaviour of the squeezing: the approximate minor-axis variance,
// the characteristic strengths mu_half and mu_min, and power-law fits over S.
//
// "Exact" below means the closed-form observables (exact for the model,
// any S). "Approx" means the asymptotic formulas.

#include <span>
#include <string>
#include <vector>

#include "twistlab/spin_core.hpp"
#include "twistlab/twist.hpp"

namespace twistlab {

// gamma = S mu / 2, gamma' = S mu' / 2, beta = S mu^2 / 4.
struct TwistScaledParams {
    double gamma = 0.0;
    double gamma_prime = 0.0;
    double beta = 0.0;

    static TwistScaledParams from(SpinMagnitude spin, double mu, double mu_prime);
};

struct ApproxVariance {
    double var_zprime = 0.0;  // (S/2)(gamma'/(gamma^2 + gamma') + (2/3) beta^2)
    double mean_x = 0.0;      // S (1 - beta)
    TwistScaledParams scaled;
    // S >= 100 and 3/S <= mu, mu' <= 1/(3 sqrt S), mu' within 3x of |mu|.
    bool in_regime = false;
};

ApproxVariance approx_var_zprime(SpinMagnitude spin, const TwistParameters& params);

enum class ScalingSource { exact_numeric, approx_formula };

struct ScalingPoint {
    double spin = 0.0;
    double mu_half = 0.0;
    double mu_min = 0.0;
    double zeta_min = 0.0;
    ScalingSource source = ScalingSource::exact_numeric;
};

struct MuMin {
    double mu = 0.0;
    double var_zprime = 0.0;
    double zeta = 0.0;
};

// Minimiser of var_zprime over mu in (0, pi/2) with mu' = mu.
MuMin find_mu_min(SpinMagnitude spin);
// Same with mu' = 0 (ideal one-axis twisting).
MuMin find_mu_min_ideal(SpinMagnitude spin);
// Root of var_zprime(mu, mu' = mu) = S/4 below mu_min. Throws NumericError
// when the minimum never reaches S/4 (small S).
double find_mu_half(SpinMagnitude spin);

// mu_half ~ 2/S, mu_min ~ 2 (3/2)^{1/5} S^{-3/5}, zeta_min ~ (2/3)^{1/5} S^{-2/5}.
ScalingPoint approx_scaling(SpinMagnitude spin);
ScalingPoint exact_scaling(SpinMagnitude spin);

// Ideal one-axis twisting reference, (1/3)^{1/3} S^{-2/3}.
double approx_zeta_min_ideal(SpinMagnitude spin);

// Optimum of the approximate variance with mu = mu' taken at face value
// (dropping gamma' against gamma^2): mu_min = 12^{1/5} S^{-3/5} and
// 2 var/S = 2.5 * 12^{-1/5} S^{-2/5}. Reported next to the formulas above,
// whose prefactors differ.
struct ApproxOptimum {
    double mu_min = 0.0;
    double var_norm = 0.0;
};
ApproxOptimum approx_variance_optimum(SpinMagnitude spin);

struct ScalingSweepRow {
    ScalingPoint exact;
    ScalingPoint approx;
    double zeta_min_ideal = 0.0;
    double mu_min_ideal = 0.0;
};

// Exact and approximate points for each spin, in input order. Parallel
// over spins.
std::vector<ScalingSweepRow> scaling_sweep(std::span<const SpinMagnitude> spins);

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
};

// Least-squares line through (ln x, ln y).
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

std::string to_string(ScalingSource s);

}  // namespace twistlab
