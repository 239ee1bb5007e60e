#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dense_reference.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/observables.hpp"
#include "twistlab/spin_core.hpp"
#include "twistlab/twist.hpp"

using namespace twistlab;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// Relative agreement with an absolute floor scaled to the field.
bool close(double a, double b, double rel, double floor) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + floor;
}

}  // namespace

TEST_CASE("closed form without evolution is the SQL") {
    const auto r = closed_form_report(SpinMagnitude(40), TwistParameters::from_mu(0.0, 0.0));
    CHECK(r.mean_x == 20.0);
    CHECK(r.var_yprime == Approx(10.0).epsilon(1e-15));
    CHECK(r.var_zprime == Approx(10.0).epsilon(1e-15));
    CHECK(r.zeta == 1.0);
    CHECK(r.delta == 0.0);
}

TEST_CASE("closed form reference values at S = 20, mu = mu' = 0.2") {
    // Frozen from a dense 41x41 evolution with explicit spin matrices.
    const auto r = closed_form_report(SpinMagnitude(40), TwistParameters::from_mu(0.2, 0.2));
    CHECK(r.mean_x == Approx(14.885780140019).epsilon(1e-11));
    CHECK(r.var_zprime == Approx(3.95119434542).epsilon(1e-10));
    CHECK(r.var_yprime == Approx(150.231268795).epsilon(1e-10));
    CHECK(r.var_x == Approx(44.2310864825).epsilon(1e-10));
    CHECK(r.delta == Approx(0.204777269475).epsilon(1e-10));
    CHECK(r.zeta == Approx(0.530868292861).epsilon(1e-10));
    REQUIRE(r.a_term);
    REQUIRE(r.b_term);
    CHECK(*r.a_term == Approx(0.688115195592).epsilon(1e-10));
    CHECK(*r.b_term == Approx(0.298711973817).epsilon(1e-10));
}

TEST_CASE("closed form agrees with explicit spin matrices") {
    for (int two_s : {1, 2, 3, 10, 40}) {
        const SpinMagnitude s(two_s);
        for (double mu : {0.0, 0.05, 0.3, 0.9}) {
            for (double ratio : {1.0, 1.5}) {
                const auto p = TwistParameters::from_mu(mu, ratio * mu);
                const auto rho = evolve(make_css_x(s), p);
                const auto m = testref::dense_moments(rho);
                const auto r = closed_form_report(s, p);
                const double vyy = m.variance(1);
                const double vzz = m.variance(2);
                const double vyz = m.covariance(1, 2);
                const double minor = 0.5 * (vyy + vzz) - std::hypot(0.5 * (vyy - vzz), vyz);
                const double S2 = s.value() * s.value();
                CHECK(close(r.mean_x, m.mean[0], 1e-10, 1e-12 * s.value()));
                CHECK(close(r.var_x, m.variance(0), 1e-9, 1e-12 * S2));
                CHECK(close(r.var_zprime, minor, 1e-9, 1e-12 * S2));
            }
        }
    }
}

TEST_CASE("excess noise only: z' is z and y broadens") {
    const SpinMagnitude s(40);
    const auto r = closed_form_report(s, TwistParameters::from_mu(0.0, 0.1));
    CHECK(r.var_zprime == Approx(10.0).epsilon(1e-12));
    // 10 + S (S - 1/2) (1 - e^{-2 mu'}) / 2, checked against dense moments.
    const double expect = 10.0 + 195.0 * (1.0 - std::exp(-0.2));
    CHECK(r.var_yprime == Approx(expect).epsilon(1e-12));
    CHECK(r.delta == 0.0);
    const auto m = testref::dense_moments(evolve(make_css_x(s), TwistParameters::from_mu(0.0, 0.1)));
    CHECK(m.variance(1) == Approx(expect).epsilon(1e-10));
}

TEST_CASE("spin one half") {
    const SpinMagnitude s(1);
    const auto p = TwistParameters::from_mu(0.0, 0.3);
    const auto rho = evolve(make_css_x(s), p);
    const auto r = matrix_report(rho);
    CHECK(r.mean_x == Approx(0.5 * std::exp(-0.15)).epsilon(1e-14));
    CHECK(r.mean_x == Approx(0.430354).epsilon(1e-6));
    CHECK(r.var_zprime == Approx(0.25).epsilon(1e-14));
    CHECK(r.delta == 0.0);
    CHECK_FALSE(r.a_term.has_value());
    CHECK_FALSE(r.b_term.has_value());
    const auto c = closed_form_report(s, p);
    CHECK(c.mean_x == Approx(r.mean_x).epsilon(1e-14));
    CHECK(c.delta == 0.0);
}

TEST_CASE("matrix route equals closed form on a parameter grid") {
    for (int two_s : {1, 2, 10, 40, 80}) {
        const SpinMagnitude s(two_s);
        const double S = s.value();
        for (double mu : {0.0, 0.01, 0.117, 0.2, 0.236, 0.5, 0.8}) {
            const auto p = TwistParameters::from_mu(mu, mu);
            const auto a = closed_form_report(s, p);
            const auto b = matrix_report(evolve(make_css_x(s), p));
            CHECK(close(a.mean_x, b.mean_x, 1e-9, 1e-12 * S));
            CHECK(close(a.var_x, b.var_x, 1e-9, 1e-12 * S * S));
            CHECK(close(a.var_yprime, b.var_yprime, 1e-9, 1e-12 * S * S));
            CHECK(close(a.var_zprime, b.var_zprime, 1e-9, 1e-12 * S * S));
            CHECK(close(a.delta, b.delta, 1e-9, 1e-12));
            CHECK(close(a.zeta, b.zeta, 1e-9, 1e-12));
        }
    }
}

TEST_CASE("report invariants") {
    for (int two_s : {2, 9, 40, 1000, 200000}) {
        const SpinMagnitude s(two_s);
        const double S = s.value();
        for (double mu : {1e-4, 0.01, 0.1, 0.5, 1.4}) {
            const auto r = closed_form_report(s, TwistParameters::from_mu(mu, 1.2 * mu));
            CHECK(r.var_zprime <= r.var_yprime);
            CHECK(r.var_zprime * r.var_yprime >= r.mean_x * r.mean_x / 4.0 - 1e-9 * S * S * S * S);
            if (r.mean_x > 0.0) CHECK(r.zeta == Approx(2.0 * r.var_zprime / std::abs(r.mean_x)).epsilon(1e-15));
            CHECK(std::abs(r.delta) <= kPi / 4 + 1e-15);
        }
    }
}

TEST_CASE("delta vanishes with mu and grows on a small-mu grid") {
    const SpinMagnitude s(40);
    double prev = 0.0;
    for (int k = 1; k <= 40; ++k) {
        const double mu = 0.0025 * k;
        const double d = closed_form_report(s, TwistParameters::from_mu(mu, 0.2)).delta;
        CHECK(d > prev);
        prev = d;
    }
    CHECK(std::abs(closed_form_report(s, TwistParameters::from_mu(1e-12, 0.2)).delta) < 1e-9);
}

TEST_CASE("closed form works at very large spin") {
    const SpinMagnitude s(8'000'000);
    const auto r = closed_form_report(s, TwistParameters::from_mu(5.4e-6, 5.4e-6));
    CHECK(std::isfinite(r.zeta));
    CHECK(r.zeta > 0.0);
    CHECK(r.zeta < 0.2);
}

TEST_CASE("closed form domain") {
    const SpinMagnitude s(40);
    CHECK_THROWS_AS(closed_form_report(s, TwistParameters::from_mu(kPi, kPi)), InvalidArgument);
    CHECK_THROWS_AS(closed_form_report(s, TwistParameters::from_mu(-3.5, 3.5)), InvalidArgument);
}

TEST_CASE("matrix route rejects off-centre states") {
    const auto rho = make_css(SpinMagnitude(10), 1.0, 0.7);
    CHECK_THROWS_AS(matrix_report(rho), NumericError);
}

TEST_CASE("QPD of a coherent state peaks at its direction") {
    const SpinMagnitude s(40);
    const auto raw = qpd(make_css_x(s), uniform_qpd_grid(32, 64, QpdNormalization::raw));
    std::size_t arg = 0;
    for (std::size_t k = 1; k < raw.values.size(); ++k) {
        if (raw.values[k] > raw.values[arg]) arg = k;
    }
    CHECK(raw.theta_samples[arg / raw.phi_samples.size()] == Approx(kPi / 2));
    CHECK(raw.phi_samples[arg % raw.phi_samples.size()] == 0.0);
    CHECK(raw.values[arg] == Approx(1.0).epsilon(1e-12));

    for (double th : {0.6, 2.0}) {
        for (double ph : {-1.5, 0.75}) {
            // Grid 8 x 16 puts samples exactly on multiples of pi/8.
            const double theta0 = std::round(th / (kPi / 8)) * kPi / 8;
            const double phi0 = std::round(ph / (kPi / 8)) * kPi / 8;
            const auto g = qpd(make_css(SpinMagnitude(12), theta0, phi0), uniform_qpd_grid(8, 16));
            std::size_t best = 0;
            for (std::size_t k = 1; k < g.values.size(); ++k) {
                if (g.values[k] > g.values[best]) best = k;
            }
            CHECK(g.theta_samples[best / g.phi_samples.size()] == Approx(theta0));
            CHECK(g.phi_samples[best % g.phi_samples.size()] == Approx(phi0));
        }
    }
}

TEST_CASE("QPD max normalization and nonnegativity") {
    const auto rho = evolve(make_css_x(SpinMagnitude(40)), TwistParameters::from_mu(0.2, 0.2));
    const auto g = qpd(rho, uniform_qpd_grid(32, 64));
    double top = 0.0;
    for (double v : g.values) {
        CHECK(v >= 0.0);
        top = std::max(top, v);
    }
    CHECK(top == 1.0);
    CHECK(g.raw_maximum > 0.0);
    CHECK(g.raw_maximum < 1.0);
    CHECK(to_string(QpdNormalization::max) == "max");
}

TEST_CASE("QPD resolution of identity") {
    // (2S+1)/(4 pi) * integral Q dOmega = 1. Trapezoid in theta with both
    // poles, periodic rectangle rule in phi.
    const SpinMagnitude s(40);
    const auto rho = evolve(make_css_x(s), TwistParameters::from_mu(0.2, 0.2));
    const std::size_t nt = 256;
    const std::size_t np = 512;
    const auto g = qpd(rho, uniform_qpd_grid(nt, np, QpdNormalization::raw));
    const double dt = kPi / static_cast<double>(nt);
    const double dp = 2.0 * kPi / static_cast<double>(np);
    double sum = 0.0;
    for (std::size_t i = 0; i <= nt; ++i) {
        const double w = (i == 0 || i == nt) ? 0.5 : 1.0;
        double row = 0.0;
        for (std::size_t j = 0; j < np; ++j) row += g.at(i, j);
        sum += w * row * std::sin(g.theta_samples[i]);
    }
    const double integral = sum * dt * dp * static_cast<double>(s.dim()) / (4.0 * kPi);
    CHECK(std::abs(integral - 1.0) <= 1e-6);
}
