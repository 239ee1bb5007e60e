#include "twistlab/spin_core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "twistlab/errors.hpp"

namespace twistlab {

SpinMagnitude::SpinMagnitude(int two_s) : two_s_(two_s) {
    if (two_s < 1) {
        throw InvalidArgument("spin must satisfy 2S >= 1, got 2S = " + std::to_string(two_s));
    }
}

SpinMagnitude SpinMagnitude::from_spin(double s) {
    const double twice = 2.0 * s;
    const double rounded = std::round(twice);
    if (!std::isfinite(s) || std::abs(twice - rounded) > 1e-9 || rounded < 1.0 ||
        rounded > static_cast<double>(std::numeric_limits<int>::max())) {
        throw InvalidArgument("spin must be a positive multiple of 1/2, got " + std::to_string(s));
    }
    return SpinMagnitude(static_cast<int>(rounded));
}

std::size_t SpinMagnitude::index_of(int two_m) const {
    if (two_m < -two_s_ || two_m > two_s_ || ((two_m + two_s_) & 1) != 0) {
        throw InvalidArgument("2M = " + std::to_string(two_m) + " is not a magnetic level of 2S = " +
                              std::to_string(two_s_));
    }
    return static_cast<std::size_t>((two_m + two_s_) / 2);
}

SpinDensityMatrix::SpinDensityMatrix(SpinMagnitude spin)
    : spin_(spin), elements_(spin.dim() * spin.dim()) {}

SpinDensityMatrix::SpinDensityMatrix(SpinMagnitude spin, std::vector<Complex> elements)
    : spin_(spin), elements_(std::move(elements)) {
    if (elements_.size() != spin.dim() * spin.dim()) {
        throw InvalidArgument("density matrix needs " + std::to_string(spin.dim() * spin.dim()) +
                              " elements, got " + std::to_string(elements_.size()));
    }
}

Complex SpinDensityMatrix::element(int two_m, int two_m_prime) const {
    return (*this)(spin_.index_of(two_m), spin_.index_of(two_m_prime));
}

Complex SpinDensityMatrix::trace() const noexcept {
    Complex sum{};
    for (std::size_t i = 0; i < dim(); ++i) sum += (*this)(i, i);
    return sum;
}

double SpinDensityMatrix::hermiticity_error() const noexcept {
    double worst = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        for (std::size_t j = i; j < dim(); ++j) {
            worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        }
    }
    return worst;
}

double SpinDensityMatrix::purity() const noexcept {
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    double sum = 0.0;
    for (const auto& e : elements_) sum += std::norm(e);
    return sum;
}

std::vector<double> SpinDensityMatrix::diagonal() const {
    std::vector<double> d(dim());
    for (std::size_t i = 0; i < dim(); ++i) d[i] = (*this)(i, i).real();
    return d;
}

void SpinDensityMatrix::check_invariants(double tol) const {
    const Complex tr = trace();
    if (std::abs(tr - Complex{1.0, 0.0}) > tol) {
        throw NumericError("density matrix trace deviates from 1 by " +
                           std::to_string(std::abs(tr - Complex{1.0, 0.0})));
    }
    const double herm = hermiticity_error();
    if (herm > tol) {
        throw NumericError("density matrix is not Hermitian (error " + std::to_string(herm) + ")");
    }
}

std::vector<double> log_binomials(SpinMagnitude spin) {
    const int n = spin.two_s();
    const double log_n_fact = std::lgamma(n + 1.0);
    std::vector<double> out(spin.dim());
    for (int k = 0; k <= n; ++k) {
        out[static_cast<std::size_t>(k)] = log_n_fact - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    }
    return out;
}

namespace {

// k * ln(base) with the convention 0^0 = 1.
double log_power(double log_base, int k) {
    if (k == 0) return 0.0;
    return k * log_base;
}

void check_dim(SpinMagnitude spin, std::size_t max_dim) {
    if (spin.dim() > max_dim) {
        throw DimensionOverflow("dense state with 2S+1 = " + std::to_string(spin.dim()) +
                                " exceeds the cap of " + std::to_string(max_dim) +
                                "; use the closed-form observables instead");
    }
}

}  // namespace

std::vector<Complex> coherent_amplitudes(SpinMagnitude spin, double theta, double phi) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
        throw InvalidArgument("polar angle must lie in [0, pi], got " + std::to_string(theta));
    }
    const auto log_binom = log_binomials(spin);
    const double log_cos = std::log(std::cos(0.5 * theta));
    const double log_sin = std::log(std::sin(0.5 * theta));
    const int n = spin.two_s();

    std::vector<Complex> amp(spin.dim());
    for (int k = 0; k <= n; ++k) {
        // k = S + M, n - k = S - M
        const double log_mag = 0.5 * log_binom[static_cast<std::size_t>(k)] +
                               log_power(log_cos, k) + log_power(log_sin, n - k);
        const double m = 0.5 * spin.two_m_at(static_cast<std::size_t>(k));
        amp[static_cast<std::size_t>(k)] = std::polar(std::exp(log_mag), -m * phi);
    }
    // lgamma rounding grows with 2S; renormalize so the norm is 1 to a few ulps.
    double norm = 0.0;
    for (const auto& a : amp) norm += std::norm(a);
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& a : amp) a *= scale;
    return amp;
}

SpinDensityMatrix make_css(SpinMagnitude spin, double theta, double phi, std::size_t max_dim) {
    check_dim(spin, max_dim);
    const auto amp = coherent_amplitudes(spin, theta, phi);
    SpinDensityMatrix rho(spin);
    const std::size_t d = spin.dim();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) rho(i, j) = amp[i] * std::conj(amp[j]);
    }
    return rho;
}

SpinDensityMatrix make_css_x(SpinMagnitude spin, std::size_t max_dim) {
    check_dim(spin, max_dim);
    // binom(2S,S+M)^{1/2} binom(2S,S+M')^{1/2} / 2^{2S}
    const auto log_binom = log_binomials(spin);
    const double log_norm = spin.two_s() * std::numbers::ln2;
    const std::size_t d = spin.dim();
    std::vector<double> amp(d);
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        amp[i] = std::exp(0.5 * log_binom[i] - 0.5 * log_norm);
        norm += amp[i] * amp[i];
    }
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& a : amp) a *= scale;
    SpinDensityMatrix rho(spin);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) rho(i, j) = amp[i] * amp[j];
    }
    return rho;
}

SpinMomentSet moments(const SpinDensityMatrix& rho) {
    const SpinMagnitude spin = rho.spin();
    const std::size_t d = rho.dim();
    const double two_s = spin.two_s();

    // S+ |i> = a_i |i+1>, a_i = sqrt((S - M)(S + M + 1)) = sqrt((2S - i)(i + 1))
    auto raise = [two_s](std::size_t i) {
        return std::sqrt((two_s - static_cast<double>(i)) * (static_cast<double>(i) + 1.0));
    };

    double sz = 0.0, sz2 = 0.0, sp_sm = 0.0, sm_sp = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double p = rho(i, i).real();
        const double m = spin.m_at(i);
        const double k = static_cast<double>(i);
        sz += m * p;
        sz2 += m * m * p;
        sp_sm += p * k * (two_s - k + 1.0);
        sm_sp += p * (two_s - k) * (k + 1.0);
    }

    Complex sp{}, sp_sz_sym{}, sp2{};
    for (std::size_t i = 0; i + 1 < d; ++i) {
        const Complex r = rho(i, i + 1) * raise(i);
        sp += r;
        sp_sz_sym += (2.0 * spin.m_at(i) + 1.0) * r;
    }
    for (std::size_t i = 0; i + 2 < d; ++i) {
        sp2 += rho(i, i + 2) * (raise(i) * raise(i + 1));
    }

    SpinMomentSet out;
    out.mean = {sp.real(), sp.imag(), sz};
    auto& q = out.second;
    const double ladder = sp_sm + sm_sp;
    q[0][0] = 0.25 * (2.0 * sp2.real() + ladder);
    q[1][1] = 0.25 * (-2.0 * sp2.real() + ladder);
    q[2][2] = sz2;
    q[0][1] = q[1][0] = 0.5 * sp2.imag();
    q[0][2] = q[2][0] = 0.5 * sp_sz_sym.real();
    q[1][2] = q[2][1] = 0.5 * sp_sz_sym.imag();
    return out;
}

}  // namespace twistlab
