#include "twistlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "twistlab/errors.hpp"
#include "twistlab/observables.hpp"

namespace twistlab {

TwistScaledParams TwistScaledParams::from(SpinMagnitude spin, double mu, double mu_prime) {
    const double s = spin.value();
    return {0.5 * s * mu, 0.5 * s * mu_prime, 0.25 * s * mu * mu};
}

ApproxVariance approx_var_zprime(SpinMagnitude spin, const TwistParameters& params) {
    const double s = spin.value();
    ApproxVariance out;
    out.scaled = TwistScaledParams::from(spin, params.mu(), params.mu_prime());
    const auto& [g, gp, beta] = out.scaled;
    const double denom = g * g + gp;
    const double noise = denom > 0.0 ? gp / denom : 1.0;
    out.var_zprime = 0.5 * s * (noise + (2.0 / 3.0) * beta * beta);
    out.mean_x = s * (1.0 - beta);

    const double lo = 3.0 / s;
    const double hi = 1.0 / (3.0 * std::sqrt(s));
    const double mu = std::abs(params.mu());
    const double mu_p = params.mu_prime();
    out.in_regime = s >= 100.0 && mu >= lo && mu <= hi && mu_p >= lo && mu_p <= hi &&
                    mu_p <= 3.0 * mu && mu <= 3.0 * mu_p;
    return out;
}

namespace {

constexpr double kMuUpper = 0.5 * std::numbers::pi;

// Log-spaced scan to bracket the minimum, then Brent refinement inside the
// bracket. A plain bracket of (0, pi/2) is unsafe at large S: the minimum
// sits near S^{-3/5} and the function is flat at S/2 over most of the range.
MuMin minimise_var(SpinMagnitude spin, bool ideal) {
    auto var = [spin, ideal](double mu) {
        return closed_form_var_zprime(spin, mu, ideal ? 0.0 : mu);
    };
    const double s = spin.value();
    const double lo = std::min(1e-3, 1e-2 / s);
    const double hi = kMuUpper * (1.0 - 1e-9);
    constexpr int kScan = 241;
    const double step = std::log(hi / lo) / (kScan - 1);

    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kScan; ++k) {
        const double v = var(lo * std::exp(step * k));
        if (v < best_val) {
            best_val = v;
            best = k;
        }
    }
    const double left = best == 0 ? 0.0 : lo * std::exp(step * (best - 1));
    const double right = lo * std::exp(step * std::min(best + 1, kScan - 1));

    constexpr int kBits = std::numeric_limits<double>::digits / 2;
    std::uintmax_t max_iter = 500;
    const auto [mu, v] = boost::math::tools::brent_find_minima(var, left, right, kBits, max_iter);

    MuMin out;
    out.mu = mu;
    out.var_zprime = v;
    const auto report =
        closed_form_report(spin, TwistParameters::reference_only(mu, ideal ? 0.0 : mu));
    out.zeta = report.zeta;
    return out;
}

}  // namespace

MuMin find_mu_min(SpinMagnitude spin) { return minimise_var(spin, false); }

MuMin find_mu_min_ideal(SpinMagnitude spin) { return minimise_var(spin, true); }

double find_mu_half(SpinMagnitude spin) {
    const double s = spin.value();
    const MuMin min = find_mu_min(spin);
    auto excess = [spin, s](double mu) { return closed_form_var_zprime(spin, mu, mu) - 0.25 * s; };
    if (!(min.var_zprime < 0.25 * s)) {
        throw NumericError("mu_half not bracketed: minimum variance " + std::to_string(min.var_zprime) +
                           " never reaches S/4 = " + std::to_string(0.25 * s));
    }
    std::uintmax_t max_iter = 200;
    boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 4);
    const auto [a, b] = boost::math::tools::toms748_solve(excess, 0.0, min.mu, 0.25 * s,
                                                          excess(min.mu), tol, max_iter);
    return 0.5 * (a + b);
}

ScalingPoint approx_scaling(SpinMagnitude spin) {
    const double s = spin.value();
    ScalingPoint p;
    p.spin = s;
    p.mu_half = 2.0 / s;
    p.mu_min = 2.0 * std::pow(1.5, 0.2) * std::pow(s, -0.6);
    p.zeta_min = std::pow(2.0 / 3.0, 0.2) * std::pow(s, -0.4);
    p.source = ScalingSource::approx_formula;
    return p;
}

ScalingPoint exact_scaling(SpinMagnitude spin) {
    const MuMin min = find_mu_min(spin);
    ScalingPoint p;
    p.spin = spin.value();
    p.mu_min = min.mu;
    p.zeta_min = min.zeta;
    p.mu_half = find_mu_half(spin);
    p.source = ScalingSource::exact_numeric;
    return p;
}

double approx_zeta_min_ideal(SpinMagnitude spin) {
    return std::cbrt(1.0 / 3.0) * std::pow(spin.value(), -2.0 / 3.0);
}

ApproxOptimum approx_variance_optimum(SpinMagnitude spin) {
    const double s = spin.value();
    const double twelfth_root = std::pow(12.0, 0.2);
    return {twelfth_root * std::pow(s, -0.6), 2.5 / twelfth_root * std::pow(s, -0.4)};
}

std::vector<ScalingSweepRow> scaling_sweep(std::span<const SpinMagnitude> spins) {
    std::vector<ScalingSweepRow> rows(spins.size());
    const long long n = static_cast<long long>(spins.size());
    // Exceptions cannot cross the parallel region; collect and rethrow.
    std::vector<std::string> errors(spins.size());

#pragma omp parallel for schedule(dynamic, 1)
    for (long long k = 0; k < n; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        try {
            auto& row = rows[idx];
            row.exact = exact_scaling(spins[idx]);
            row.approx = approx_scaling(spins[idx]);
            const MuMin ideal = find_mu_min_ideal(spins[idx]);
            row.zeta_min_ideal = ideal.zeta;
            row.mu_min_ideal = ideal.mu;
        } catch (const std::exception& e) {
            errors[idx] = e.what();
        }
    }
    for (std::size_t k = 0; k < errors.size(); ++k) {
        if (!errors[k].empty()) {
            throw NumericError("scaling sweep failed at S = " + std::to_string(spins[k].value()) +
                               ": " + errors[k]);
        }
    }
    return rows;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidArgument("power-law fit needs at least two (x, y) pairs of equal length");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0 && y[k] > 0.0)) throw InvalidArgument("power-law fit needs positive data");
        const double lx = std::log(x[k]);
        const double ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw InvalidArgument("power-law fit needs distinct x values");
    const double slope = (n * sxy - sx * sy) / den;
    const double intercept = (sy - slope * sx) / n;
    return {slope, std::exp(intercept)};
}

std::string to_string(ScalingSource s) {
    return s == ScalingSource::exact_numeric ? "exact-numeric" : "approx-formula";
}

}  // namespace twistlab
