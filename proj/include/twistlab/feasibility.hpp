#pragma once

// From laboratory parameters to (mu, J) plus the assumption checks the model
// relies on.
//
// Conventions (chosen so the Yb-171 worked example comes out right):
//   sigma0 = 3 lambda0^2 / (2 pi)
//   d0     = 2 S sigma0 / (pi w^2)
//   I      = P / (pi w^2)                     beam-averaged intensity
//   I_sat  = pi h c Gamma / (3 lambda0^3)
//   Omega  = Gamma sqrt(I / (2 I_sat))
//   rho_ee = (Omega^2/4) / (Delta^2 + Gamma^2/4 + Omega^2/2)
//   r      = (Gamma/2) rho_ee
//   mu     = mu' = r T sigma0 / (2 pi w^2)
//   J      = P T lambda0 / (2 h c)
// The textbook alternatives (peak intensity 2P/(pi w^2), r = Gamma rho_ee)
// give Omega larger by sqrt(2) and r T larger by 4 on that example.

#include <optional>
#include <string>
#include <vector>

#include "twistlab/spin_core.hpp"

namespace twistlab::feasibility {

namespace constants {
inline constexpr double planck = 6.62607015e-34;      // J s
inline constexpr double speed_of_light = 299792458.0;  // m / s
}  // namespace constants

struct OpticalSetup {
    double lambda0 = 0.0;        // m
    double gamma_natural = 0.0;  // rad/s, full natural linewidth
    double detuning = 0.0;       // rad/s, signed
    double power = 0.0;          // W, square-pulse peak
    double duration = 0.0;       // s
    double waist = 0.0;          // m
    double total_spin = 0.0;     // S
    std::optional<double> sample_length;  // m

    void validate() const;
};

// 171Yb in an optical trap, as in the reference design.
OpticalSetup ytterbium_171_example();

struct Flag {
    std::string name;
    std::string condition;
    bool pass = false;
    double value = 0.0;      // the quantity tested
    double threshold = 0.0;  // bound it is tested against
    double margin = 0.0;     // >1 passes with room; <1 fails
};

struct FeasibilityReport {
    double sigma0 = 0.0;
    double d0 = 0.0;
    double intensity = 0.0;
    double saturation_intensity = 0.0;
    double rabi = 0.0;
    double scatter_rate = 0.0;
    double rT = 0.0;
    double mu = 0.0;
    double j_half = 0.0;
    double kappa = 0.0;
    double zeta_predicted = 0.0;
    std::vector<Flag> flags;

    bool all_pass() const;
    const Flag* find(const std::string& name) const;
};

FeasibilityReport analyze(const OpticalSetup& setup);

// Flags in the order reported; the first four depend only on (S, mu) and the
// geometry, the rest also on how the pulse energy is split into P and T.
namespace flag_names {
inline constexpr const char* scatter_vs_coupling = "rT_much_less_than_inverse_kappa_sq";
inline constexpr const char* weak_coupling = "inverse_kappa_sq_much_less_than_one";
inline constexpr const char* half_condition = "optical_depth_half_condition";
inline constexpr const char* detuning = "detuning_much_greater_than_linewidth";
inline constexpr const char* rabi = "rabi_much_less_than_detuning";
inline constexpr const char* photons = "photon_number_much_greater_than_one";
inline constexpr const char* mode_matching = "mode_matching";
}  // namespace flag_names

struct PulseFamily {
    double target_mu = 0.0;
    double rT = 0.0;                // required r T
    double energy_low_power = 0.0;  // P T in the unsaturated limit, J
    // The pulse at the reference duration, and its analysis.
    double reference_duration = 0.0;
    double reference_power = 0.0;
    std::optional<FeasibilityReport> reference_report;
    bool feasible = false;
    std::vector<std::string> failing_flags;  // in report order

    // Peak power giving the target mu for a pulse of this duration.
    double power_for(double duration) const;

    double gamma_natural = 0.0;
    double detuning = 0.0;
    double rabi_sq_per_watt = 0.0;
};

// Every (P, T) with r(P) T equal to the required value. setup.power is
// ignored; setup.duration is used as the reference duration.
PulseFamily required_pulse(const OpticalSetup& setup, double target_mu);

}  // namespace twistlab::feasibility
