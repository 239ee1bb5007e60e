#pragma once

// Reduced spin dynamics of the double-pass scheme: first interaction,
// polarization local operation, second interaction. The light is traced out
// analytically, which leaves an elementwise map on the Dicke-basis matrix.

#include <vector>

#include "twistlab/spin_core.hpp"

namespace twistlab {

class TwistParameters {
public:
    // From the pass strengths alpha*t1, alpha*t2 and photon half-number J:
    //   mu = (a t1)(a t2) J,  mu' = ((a t1)^2 + (a t2)^2) J / 2.
    static TwistParameters from_pulse(double alpha_t1, double alpha_t2, double j_half);
    // Equal pass durations, mu = mu'.
    static TwistParameters symmetric(double alpha_t, double j_half);
    // Direct (mu, mu'); requires mu' >= |mu|.
    static TwistParameters from_mu(double mu, double mu_prime);
    // No physicality check. Used for the ideal one-axis twisting reference
    // (mu' = 0) and similar comparisons that no light pulse can realise.
    static TwistParameters reference_only(double mu, double mu_prime);

    double mu() const noexcept { return mu_; }
    double mu_prime() const noexcept { return mu_prime_; }
    bool physical() const noexcept { return physical_; }

    // Pulse description when built from_pulse / symmetric.
    double alpha_t1() const noexcept { return alpha_t1_; }
    double alpha_t2() const noexcept { return alpha_t2_; }
    double j_half() const noexcept { return j_half_; }

    // Componentwise sum of (mu, mu'): the effect of two pulses in sequence.
    friend TwistParameters operator+(const TwistParameters& a, const TwistParameters& b);

private:
    TwistParameters(double mu, double mu_prime, bool physical);

    double mu_ = 0.0;
    double mu_prime_ = 0.0;
    bool physical_ = true;
    double alpha_t1_ = 0.0;
    double alpha_t2_ = 0.0;
    double j_half_ = 0.0;
};

class PulseTrain {
public:
    explicit PulseTrain(std::vector<TwistParameters> pulses);

    const std::vector<TwistParameters>& pulses() const noexcept { return pulses_; }
    std::size_t size() const noexcept { return pulses_.size(); }
    TwistParameters total() const;

private:
    std::vector<TwistParameters> pulses_;
};

Complex sigma(int two_m, int two_m_prime, const TwistParameters& params);

SpinDensityMatrix evolve(const SpinDensityMatrix& rho, const TwistParameters& params);

// Pulses applied one after another.
SpinDensityMatrix evolve_train(const SpinDensityMatrix& rho, const PulseTrain& train);

// Kitagawa-Ueda one-axis twisting: the map with mu' = 0.
SpinDensityMatrix ideal_one_axis(const SpinDensityMatrix& rho, double mu);

}  // namespace twistlab
