#include "twistlab/twist.hpp"

#include <cmath>
#include <string>

#include "twistlab/errors.hpp"
#include "twistlab/kernels.hpp"

namespace twistlab {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be finite");
}

}  // namespace

TwistParameters::TwistParameters(double mu, double mu_prime, bool physical)
    : mu_(mu), mu_prime_(mu_prime), physical_(physical) {}

TwistParameters TwistParameters::from_pulse(double alpha_t1, double alpha_t2, double j_half) {
    require_finite(alpha_t1, "alpha*t1");
    require_finite(alpha_t2, "alpha*t2");
    require_finite(j_half, "J");
    if (j_half < 0.0) throw InvalidArgument("photon half-number J must be >= 0");
    TwistParameters p(alpha_t1 * alpha_t2 * j_half,
                      0.5 * (alpha_t1 * alpha_t1 + alpha_t2 * alpha_t2) * j_half, true);
    p.alpha_t1_ = alpha_t1;
    p.alpha_t2_ = alpha_t2;
    p.j_half_ = j_half;
    return p;
}

TwistParameters TwistParameters::symmetric(double alpha_t, double j_half) {
    auto p = from_pulse(alpha_t, alpha_t, j_half);
    // Equal strengths give mu = mu' exactly; avoid a rounding split.
    p.mu_prime_ = p.mu_;
    return p;
}

TwistParameters TwistParameters::from_mu(double mu, double mu_prime) {
    require_finite(mu, "mu");
    require_finite(mu_prime, "mu'");
    if (mu_prime < std::abs(mu) * (1.0 - 1e-12)) {
        throw InvalidArgument("coherent light requires mu' >= |mu| (mu = " + std::to_string(mu) +
                              ", mu' = " + std::to_string(mu_prime) + ")");
    }
    return TwistParameters(mu, mu_prime, true);
}

TwistParameters TwistParameters::reference_only(double mu, double mu_prime) {
    require_finite(mu, "mu");
    require_finite(mu_prime, "mu'");
    if (mu_prime < 0.0) throw InvalidArgument("mu' must be >= 0");
    return TwistParameters(mu, mu_prime, mu_prime >= std::abs(mu));
}

TwistParameters operator+(const TwistParameters& a, const TwistParameters& b) {
    return TwistParameters(a.mu_ + b.mu_, a.mu_prime_ + b.mu_prime_, a.physical_ && b.physical_);
}

PulseTrain::PulseTrain(std::vector<TwistParameters> pulses) : pulses_(std::move(pulses)) {
    if (pulses_.empty()) throw InvalidArgument("pulse train must contain at least one pulse");
}

TwistParameters PulseTrain::total() const {
    TwistParameters sum = pulses_.front();
    for (std::size_t k = 1; k < pulses_.size(); ++k) sum = sum + pulses_[k];
    return sum;
}

Complex sigma(int two_m, int two_m_prime, const TwistParameters& params) {
    if (((two_m - two_m_prime) & 1) != 0) {
        throw InvalidArgument("2M and 2M' must share parity");
    }
    return kernels::sigma_factor(two_m, two_m_prime, params.mu(), params.mu_prime());
}

SpinDensityMatrix evolve(const SpinDensityMatrix& rho, const TwistParameters& params) {
    SpinDensityMatrix out(rho.spin());
    kernels::twist_map_parallel(rho.spin(), params.mu(), params.mu_prime(), rho.elements(),
                                out.elements());
    return out;
}

SpinDensityMatrix evolve_train(const SpinDensityMatrix& rho, const PulseTrain& train) {
    SpinDensityMatrix state = rho;
    for (const auto& pulse : train.pulses()) {
        kernels::twist_map_parallel(state.spin(), pulse.mu(), pulse.mu_prime(), state.elements(),
                                    state.elements());
    }
    return state;
}

SpinDensityMatrix ideal_one_axis(const SpinDensityMatrix& rho, double mu) {
    return evolve(rho, TwistParameters::reference_only(mu, 0.0));
}

}  // namespace twistlab
