#include "twistlab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "twistlab/errors.hpp"
#include "twistlab/kernels.hpp"

namespace twistlab {

namespace {

// ln cos(x) without the cancellation in log(cos x) for small x.
double log_abs_cos(double x) {
    if (std::abs(x) <= 0.5 * std::numbers::pi) {
        const double s = std::sin(0.5 * x);
        return std::log1p(-2.0 * s * s);
    }
    return std::log(std::abs(std::cos(x)));
}

// Coefficient S (S - 1/2) / 4 multiplying the anisotropic part of the
// transverse variances.
double ellipse_coefficient(SpinMagnitude spin) {
    const double n = spin.two_s();
    return n * (n - 1.0) / 16.0;
}

}  // namespace

SqueezingReport closed_form_report(SpinMagnitude spin, const TwistParameters& params) {
    const double mu = params.mu();
    const double mu_prime = params.mu_prime();
    if (!(std::abs(mu) < std::numbers::pi)) {
        throw InvalidArgument("closed form requires |mu| < pi, got mu = " + std::to_string(mu));
    }
    const double cos_mu = std::cos(mu);
    if (cos_mu == 0.0) {
        throw InvalidArgument("closed form is singular at cos(mu) = 0 exactly (mu = " +
                              std::to_string(mu) + ")");
    }

    const double s = spin.value();
    const int two_s = spin.two_s();
    const int e = two_s - 2;  // exponent 2S - 2
    const double log_cos_half = log_abs_cos(0.5 * mu);  // cos(mu/2) > 0 on (-pi, pi)
    const double log_cos = log_abs_cos(mu);
    const bool negative_power = cos_mu < 0.0 && (e % 2 != 0);

    // A = 1 - e^{-2mu'} cos^{2S-2}(mu)
    const double expo_a = -2.0 * mu_prime + e * log_cos;
    const double a = negative_power ? 1.0 + std::exp(expo_a) : -std::expm1(expo_a);
    // B = 4 e^{-mu'/2} sin(mu/2) cos^{2S-2}(mu/2)
    const double b = 4.0 * std::sin(0.5 * mu) * std::exp(-0.5 * mu_prime + e * log_cos_half);

    SqueezingReport r;
    r.mean_x = s * std::exp(-0.5 * mu_prime + (two_s - 1) * log_cos_half);
    r.a_term = a;
    r.b_term = b;

    const double c = ellipse_coefficient(spin);
    const double root = std::hypot(a, b);
    double minor = 0.0;  // A - sqrt(A^2 + B^2)
    double major = 0.0;  // A + sqrt(A^2 + B^2)
    if (root > 0.0) {
        if (a >= 0.0) {
            major = a + root;
            minor = -(b * b) / major;
        } else {
            minor = a - root;
            major = (b * b) / (root - a);
        }
    }
    r.var_zprime = 0.5 * s + c * minor;
    r.var_yprime = 0.5 * s + c * major;
    r.var_x = s * s - r.mean_x * r.mean_x - 0.5 * s * (s - 0.5) * a;
    // At S = 1/2 (c = 0) the transverse distribution is isotropic.
    r.delta = (c > 0.0) ? 0.5 * std::atan2(b, a) : 0.0;
    r.zeta = 2.0 * r.var_zprime / std::abs(r.mean_x);
    return r;
}

double closed_form_var_zprime(SpinMagnitude spin, double mu, double mu_prime) {
    return closed_form_report(spin, TwistParameters::reference_only(mu, mu_prime)).var_zprime;
}

SqueezingReport matrix_report(const SpinDensityMatrix& rho) {
    const SpinMomentSet m = moments(rho);
    const double s = rho.spin().value();
    if (std::abs(m.mean[1]) > 1e-9 * s || std::abs(m.mean[2]) > 1e-9 * s) {
        throw NumericError("ellipse model invalid: transverse mean (" + std::to_string(m.mean[1]) +
                           ", " + std::to_string(m.mean[2]) + ") is not centred on the x axis");
    }
    const double vyy = m.variance(1);
    const double vzz = m.variance(2);
    const double vyz = m.covariance(1, 2);
    const double half_sum = 0.5 * (vyy + vzz);
    const double half_gap = std::hypot(0.5 * (vyy - vzz), vyz);

    SqueezingReport r;
    r.mean_x = m.mean[0];
    r.var_x = m.variance(0);
    r.var_zprime = half_sum - half_gap;
    r.var_yprime = half_sum + half_gap;
    // A round-off sized gap means a circular ellipse with no preferred axis.
    const bool isotropic = half_gap <= 1e-12 * s * (s + 1.0);
    r.delta = isotropic ? 0.0 : 0.5 * std::atan2(2.0 * vyz, vyy - vzz);
    r.zeta = 2.0 * r.var_zprime / std::abs(r.mean_x);

    const double c = ellipse_coefficient(rho.spin());
    if (c > 0.0) {
        r.a_term = (vyy - vzz) / (2.0 * c);
        r.b_term = vyz / c;
    }
    return r;
}

QpdGridSpec uniform_qpd_grid(std::size_t n_theta, std::size_t n_phi,
                             QpdNormalization normalization) {
    if (n_theta < 2 || n_phi < 2) throw InvalidArgument("QPD grid must be at least 2x2");
    QpdGridSpec spec;
    spec.normalization = normalization;
    spec.theta_samples.resize(n_theta + 1);
    for (std::size_t k = 0; k <= n_theta; ++k) {
        spec.theta_samples[k] = std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_theta);
    }
    spec.theta_samples.back() = std::numbers::pi;
    spec.phi_samples.resize(n_phi);
    for (std::size_t k = 0; k < n_phi; ++k) {
        spec.phi_samples[k] =
            -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_phi);
    }
    return spec;
}

QpdGrid qpd(const SpinDensityMatrix& rho, const QpdGridSpec& spec) {
    if (spec.theta_samples.size() < 2 || spec.phi_samples.size() < 2) {
        throw InvalidArgument("QPD grid must be at least 2x2");
    }
    QpdGrid grid;
    grid.theta_samples = spec.theta_samples;
    grid.phi_samples = spec.phi_samples;
    grid.values = kernels::qpd_parallel(rho, grid.theta_samples, grid.phi_samples);
    // Q is a diagonal element of a PSD operator; clip negative round-off.
    for (auto& v : grid.values) v = std::max(v, 0.0);
    grid.raw_maximum = *std::max_element(grid.values.begin(), grid.values.end());
    grid.normalization = spec.normalization;
    if (spec.normalization == QpdNormalization::max) {
        if (!(grid.raw_maximum > 0.0)) throw NumericError("QPD vanishes on the whole grid");
        for (auto& v : grid.values) v /= grid.raw_maximum;
    }
    return grid;
}

std::string to_string(QpdNormalization n) {
    return n == QpdNormalization::max ? "max" : "raw";
}

}  // namespace twistlab
