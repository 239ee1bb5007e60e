#include "twistlab/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "twistlab/errors.hpp"
#include "twistlab/observables.hpp"

namespace twistlab::feasibility {

namespace {

constexpr double kPi = std::numbers::pi;

// "much less / greater than" is taken as a factor of 10, except for the two
// detuning ratios which carry explicit thresholds.
constexpr double kMuchLess = 0.1;
constexpr double kDetuningRatio = 100.0;
constexpr double kRabiRatio = 0.01;
constexpr double kMinPhotonHalfNumber = 100.0;
constexpr double kHalfCondition = 8.0;
constexpr double kModeMatchLow = 0.3;
constexpr double kModeMatchHigh = 3.0;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidArgument(std::string(name) + " must be finite and > 0, got " + std::to_string(v));
    }
}

Flag upper_bound(std::string name, std::string condition, double value, double bound) {
    return {std::move(name), std::move(condition), value <= bound, value, bound, bound / value};
}

Flag lower_bound(std::string name, std::string condition, double value, double bound) {
    return {std::move(name), std::move(condition), value >= bound, value, bound, value / bound};
}

double sigma0_of(const OpticalSetup& s) { return 3.0 * s.lambda0 * s.lambda0 / (2.0 * kPi); }

double beam_area(const OpticalSetup& s) { return kPi * s.waist * s.waist; }

double saturation_intensity(const OpticalSetup& s) {
    using namespace constants;
    return kPi * planck * speed_of_light * s.gamma_natural / (3.0 * std::pow(s.lambda0, 3));
}

// Omega^2 per watt of peak power.
double rabi_sq_per_watt(const OpticalSetup& s) {
    return s.gamma_natural * s.gamma_natural / (2.0 * saturation_intensity(s) * beam_area(s));
}

double scatter_rate(const OpticalSetup& s, double rabi_sq) {
    const double excited = 0.25 * rabi_sq /
                           (s.detuning * s.detuning + 0.25 * s.gamma_natural * s.gamma_natural + 0.5 * rabi_sq);
    return 0.5 * s.gamma_natural * excited;
}

// The flags fixed by (S, mu, rT) and the geometry.
std::vector<Flag> intrinsic_flags(const OpticalSetup& s, double mu, double rT, double d0) {
    const double s_mu = s.total_spin * mu;
    std::vector<Flag> flags;
    flags.push_back(upper_bound(flag_names::scatter_vs_coupling, "rT <= 0.1 / (S mu)", rT, kMuchLess / s_mu));
    flags.push_back(upper_bound(flag_names::weak_coupling, "1 / (S mu) <= 0.1", 1.0 / s_mu, kMuchLess));
    flags.push_back(lower_bound(flag_names::half_condition, "d0 rT >= 8", d0 * rT, kHalfCondition));
    flags.push_back(lower_bound(flag_names::detuning, "|Delta| / Gamma >= 100",
                                std::abs(s.detuning) / s.gamma_natural, kDetuningRatio));
    return flags;
}

}  // namespace

void OpticalSetup::validate() const {
    require_positive(lambda0, "lambda0");
    require_positive(gamma_natural, "gamma_natural");
    require_positive(power, "power");
    require_positive(duration, "duration");
    require_positive(waist, "waist");
    require_positive(total_spin, "total_spin");
    if (!std::isfinite(detuning) || detuning == 0.0) {
        throw InvalidArgument("detuning must be finite and nonzero");
    }
    if (sample_length) require_positive(*sample_length, "sample_length");
}

OpticalSetup ytterbium_171_example() {
    OpticalSetup s;
    s.lambda0 = 399e-9;
    s.gamma_natural = 2.0 * kPi * 29e6;
    s.detuning = 2.0 * kPi * 24e9;
    s.power = 17e-9;
    s.duration = 0.24e-3;
    s.waist = 3e-6;
    s.total_spin = 4e6;
    s.sample_length = 70e-6;
    return s;
}

bool FeasibilityReport::all_pass() const {
    return std::all_of(flags.begin(), flags.end(), [](const Flag& f) { return f.pass; });
}

const Flag* FeasibilityReport::find(const std::string& name) const {
    for (const auto& f : flags) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

FeasibilityReport analyze(const OpticalSetup& setup) {
    using namespace constants;
    setup.validate();
    FeasibilityReport r;
    const double area = beam_area(setup);
    r.sigma0 = sigma0_of(setup);
    r.d0 = 2.0 * setup.total_spin * r.sigma0 / area;
    r.intensity = setup.power / area;
    r.saturation_intensity = saturation_intensity(setup);
    const double rabi_sq = setup.gamma_natural * setup.gamma_natural * r.intensity / (2.0 * r.saturation_intensity);
    r.rabi = std::sqrt(rabi_sq);
    r.scatter_rate = scatter_rate(setup, rabi_sq);
    r.rT = r.scatter_rate * setup.duration;
    r.mu = r.rT * r.sigma0 / (2.0 * kPi * setup.waist * setup.waist);
    r.j_half = setup.power * setup.duration * setup.lambda0 / (2.0 * planck * speed_of_light);
    r.kappa = std::sqrt(setup.total_spin * r.mu);

    const SpinMagnitude spin = SpinMagnitude::from_spin(std::round(2.0 * setup.total_spin) / 2.0);
    r.zeta_predicted = r.mu < kPi
                           ? closed_form_report(spin, TwistParameters::from_mu(r.mu, r.mu)).zeta
                           : std::numeric_limits<double>::quiet_NaN();

    r.flags = intrinsic_flags(setup, r.mu, r.rT, r.d0);
    r.flags.push_back(upper_bound(flag_names::rabi, "Omega / |Delta| <= 0.01",
                                  r.rabi / std::abs(setup.detuning), kRabiRatio));
    r.flags.push_back(lower_bound(flag_names::photons, "J >= 100", r.j_half, kMinPhotonHalfNumber));
    if (setup.sample_length) {
        const double fresnel = area / (setup.lambda0 * *setup.sample_length);
        Flag f{flag_names::mode_matching, "0.3 <= pi w^2 / (lambda0 L) <= 3",
               fresnel >= kModeMatchLow && fresnel <= kModeMatchHigh, fresnel, 1.0,
               std::min(fresnel / kModeMatchLow, kModeMatchHigh / fresnel)};
        r.flags.push_back(std::move(f));
    }
    return r;
}

double PulseFamily::power_for(double duration) const {
    if (!(duration > 0.0)) throw InvalidArgument("pulse duration must be > 0");
    if (rT == 0.0) return 0.0;
    // r(P) = (G/2) (k P / 4) / (D + k P / 2) solved for P.
    const double r = rT / duration;
    const double limit = 0.25 * gamma_natural;
    if (r >= limit) return std::numeric_limits<double>::infinity();
    const double d = detuning * detuning + 0.25 * gamma_natural * gamma_natural;
    return r * d / (rabi_sq_per_watt * (0.125 * gamma_natural - 0.5 * r));
}

PulseFamily required_pulse(const OpticalSetup& setup, double target_mu) {
    if (!(target_mu >= 0.0) || !std::isfinite(target_mu)) {
        throw InvalidArgument("target mu must be finite and >= 0");
    }
    OpticalSetup probe = setup;
    probe.power = 1.0;  // placeholder so validate() checks the rest
    probe.validate();

    PulseFamily fam;
    fam.target_mu = target_mu;
    fam.gamma_natural = setup.gamma_natural;
    fam.detuning = setup.detuning;
    fam.rabi_sq_per_watt = rabi_sq_per_watt(setup);
    fam.reference_duration = setup.duration;

    const double sigma0 = sigma0_of(setup);
    fam.rT = target_mu * 2.0 * kPi * setup.waist * setup.waist / sigma0;
    const double d = setup.detuning * setup.detuning + 0.25 * setup.gamma_natural * setup.gamma_natural;
    fam.energy_low_power = fam.rT * d / (fam.rabi_sq_per_watt * 0.125 * setup.gamma_natural);

    if (target_mu == 0.0) {
        fam.feasible = true;
        return fam;
    }

    const double d0 = 2.0 * setup.total_spin * sigma0 / beam_area(setup);
    for (const auto& f : intrinsic_flags(setup, target_mu, fam.rT, d0)) {
        if (!f.pass) fam.failing_flags.push_back(f.name);
    }

    fam.reference_power = fam.power_for(fam.reference_duration);
    if (std::isfinite(fam.reference_power)) {
        OpticalSetup pulse = setup;
        pulse.power = fam.reference_power;
        fam.reference_report = analyze(pulse);
        for (const auto& f : fam.reference_report->flags) {
            const bool listed = std::find(fam.failing_flags.begin(), fam.failing_flags.end(), f.name) !=
                                fam.failing_flags.end();
            if (!f.pass && !listed) fam.failing_flags.push_back(f.name);
        }
    } else {
        fam.failing_flags.push_back("scatter_rate_saturated");
    }
    fam.feasible = fam.failing_flags.empty();
    return fam;
}

}  // namespace twistlab::feasibility
