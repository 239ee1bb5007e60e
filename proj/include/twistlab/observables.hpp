#pragma once

// Squeezing diagnostics for states whose mean spin points along x.
//
// Two independent routes produce a SqueezingReport: closed-form expressions
// in (S, mu, mu') that work for any S, and moments of an explicit density
// matrix. The transverse ellipse is described by its minor (z') and major
// (y') axes in the y-z plane; delta is the angle from z to z'.

#include <optional>
#include <string>
#include <vector>

#include "twistlab/spin_core.hpp"
#include "twistlab/twist.hpp"

namespace twistlab {

struct SqueezingReport {
    double mean_x = 0.0;
    double var_x = 0.0;
    double var_yprime = 0.0;  // major axis
    double var_zprime = 0.0;  // minor axis
    double delta = 0.0;       // radians, in [-pi/4, pi/4] for reachable states
    double zeta = 0.0;        // 2 var_zprime / |mean_x|
    // Closed-form intermediates A, B. The matrix route recovers them from
    // the variances when S >= 1; at S = 1/2 the ellipse is a circle and
    // they carry no information there, so they are left empty.
    std::optional<double> a_term;
    std::optional<double> b_term;
};

// Powers of cos(mu) and cos(mu/2) are evaluated in the log domain, so S up
// to ~1e7 is fine. Rejects |mu| >= pi and cos(mu) == 0.
SqueezingReport closed_form_report(SpinMagnitude spin, const TwistParameters& params);

// Minor-axis variance only; same evaluation as closed_form_report.
double closed_form_var_zprime(SpinMagnitude spin, double mu, double mu_prime);

// Throws NumericError("ellipse model invalid") when <Sy> or <Sz> exceed
// 1e-9 S in magnitude.
SqueezingReport matrix_report(const SpinDensityMatrix& rho);

enum class QpdNormalization { raw, max };

struct QpdGridSpec {
    std::vector<double> theta_samples;
    std::vector<double> phi_samples;
    QpdNormalization normalization = QpdNormalization::max;
};

// n_theta + 1 polar samples k pi / n_theta (both poles included) and n_phi
// azimuthal samples -pi + 2 pi k / n_phi. Even n_theta and n_phi put a
// sample exactly on (pi/2, 0).
QpdGridSpec uniform_qpd_grid(std::size_t n_theta, std::size_t n_phi,
                             QpdNormalization normalization = QpdNormalization::max);

struct QpdGrid {
    std::vector<double> theta_samples;
    std::vector<double> phi_samples;
    std::vector<double> values;  // row-major, theta outer
    QpdNormalization normalization = QpdNormalization::raw;
    double raw_maximum = 0.0;    // largest raw Q before any rescaling

    double at(std::size_t theta_index, std::size_t phi_index) const {
        return values[theta_index * phi_samples.size() + phi_index];
    }
};

QpdGrid qpd(const SpinDensityMatrix& rho, const QpdGridSpec& spec);

std::string to_string(QpdNormalization n);

}  // namespace twistlab
