// One PASS/FAIL line per primary acceptance criterion. Exit status is the
// number of failed criteria (capped at 1).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cli/commands.hpp"
#include "twistlab/asymptotics.hpp"
#include "twistlab/feasibility.hpp"
#include "twistlab/observables.hpp"
#include "twistlab/oracle.hpp"
#include "twistlab/spin_core.hpp"
#include "twistlab/twist.hpp"

using namespace twistlab;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    std::string name;
    double time_limit_s;
    std::function<Outcome()> body;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

bool close(double a, double b, double rel, double floor) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + floor;
}

Outcome s20_anchors() {
    const SpinMagnitude s(40);
    const auto t0 = std::chrono::steady_clock::now();
    const double half = find_mu_half(s);
    const auto t1 = std::chrono::steady_clock::now();
    const double min = find_mu_min(s).mu;
    const auto t2 = std::chrono::steady_clock::now();
    const double dt_half = std::chrono::duration<double>(t1 - t0).count();
    const double dt_min = std::chrono::duration<double>(t2 - t1).count();
    const bool ok = std::abs(half - 0.117) <= 0.002 && std::abs(min - 0.236) <= 0.005 && dt_half < 1.0 &&
                    dt_min < 1.0;
    return {ok, "mu_half=" + fmt("%.6f", half) + " mu_min=" + fmt("%.6f", min) + " t_half=" +
                    fmt("%.2es", dt_half) + " t_min=" + fmt("%.2es", dt_min)};
}

Outcome cross_path() {
    double worst = 0.0;
    int failures = 0;
    for (int two_s : {1, 2, 10, 40, 80}) {
        const SpinMagnitude s(two_s);
        const double S = s.value();
        for (double mu : {0.0, 0.01, 0.117, 0.2, 0.236, 0.5}) {
            const auto p = TwistParameters::from_mu(mu, mu);
            const auto a = closed_form_report(s, p);
            const auto b = matrix_report(evolve(make_css_x(s), p));
            const struct {
                double x, y, scale;
            } fields[] = {{a.mean_x, b.mean_x, S},         {a.var_x, b.var_x, S * S},
                          {a.var_yprime, b.var_yprime, S * S}, {a.var_zprime, b.var_zprime, S * S},
                          {a.delta, b.delta, 1.0},         {a.zeta, b.zeta, 1.0}};
            for (const auto& f : fields) {
                if (!close(f.x, f.y, 1e-9, 1e-12 * f.scale)) ++failures;
                const double denom = std::max({std::abs(f.x), std::abs(f.y), 1e-300});
                if (std::abs(f.x - f.y) > 1e-12 * f.scale) worst = std::max(worst, std::abs(f.x - f.y) / denom);
            }
            if (a.a_term && b.a_term) {
                if (!close(*a.a_term, *b.a_term, 1e-9, 1e-12) || !close(*a.b_term, *b.b_term, 1e-9, 1e-12)) {
                    ++failures;
                }
            }
        }
    }
    return {failures == 0, "30 cases, field mismatches=" + std::to_string(failures) + " worst_rel=" +
                               fmt("%.2e", worst)};
}

Outcome oracle_equivalence() {
    const SpinMagnitude s1(2);
    const auto fock = oracle::fock_evolve(s1, 8.0, 32, 1e-2, 1e-2);
    const auto branch = oracle::coherent_branch_evolve(s1, 4.0, 1e-2, 1e-2);
    const double dev = oracle::max_abs_deviation(fock.rho, branch);

    const auto study = oracle::convergence_study(SpinMagnitude(4), 0.1, {1e-1, 1e-2, 1e-3});
    bool monotone = true;
    for (std::size_t k = 1; k < study.size(); ++k) {
        monotone = monotone && study[k].max_abs_deviation < study[k - 1].max_abs_deviation;
    }
    const double final_dev = study.back().max_abs_deviation;
    return {dev <= 1e-6 && monotone && final_dev <= 1e-3,
            "fock_vs_branch=" + fmt("%.2e", dev) + " convergence=" + fmt("%.2e", study[0].max_abs_deviation) +
                "," + fmt("%.2e", study[1].max_abs_deviation) + "," + fmt("%.2e", final_dev) +
                (monotone ? " monotone" : " NOT monotone")};
}

Outcome scaling_laws() {
    std::vector<SpinMagnitude> spins;
    for (int k = 0; k < 13; ++k) {
        const double S = 100.0 * std::pow(1000.0, k / 12.0);
        spins.push_back(SpinMagnitude::from_spin(std::round(2.0 * S) / 2.0));
    }
    const auto rows = scaling_sweep(spins);
    std::vector<double> x, half, min, zeta, ideal;
    for (const auto& r : rows) {
        x.push_back(r.exact.spin);
        half.push_back(r.exact.mu_half);
        min.push_back(r.exact.mu_min);
        zeta.push_back(r.exact.zeta_min);
        ideal.push_back(r.zeta_min_ideal);
    }
    const double e_half = fit_power_law(x, half).exponent;
    const double e_min = fit_power_law(x, min).exponent;
    const double e_zeta = fit_power_law(x, zeta).exponent;
    const double e_ideal = fit_power_law(x, ideal).exponent;
    const bool ok = std::abs(e_half + 1.0) <= 0.05 && std::abs(e_min + 0.6) <= 0.05 &&
                    std::abs(e_zeta + 0.4) <= 0.05 && std::abs(e_ideal + 2.0 / 3.0) <= 0.05;
    return {ok, "mu_half=" + fmt("%.4f", e_half) + " mu_min=" + fmt("%.4f", e_min) + " zeta_min=" +
                    fmt("%.4f", e_zeta) + " ideal=" + fmt("%.4f", e_ideal)};
}

Outcome feasibility_calibration() {
    const auto r = feasibility::analyze(feasibility::ytterbium_171_example());
    // The closed-form path at S = 4e6.
    const double zeta = closed_form_report(SpinMagnitude(8'000'000), TwistParameters::from_mu(r.mu, r.mu)).zeta;
    const double rabi_hz = r.rabi / (2.0 * kPi);
    const bool ok = close(r.mu, 5.4e-6, 0.0, 0.2 * 5.4e-6) && close(r.rT, 4.0e-3, 0.0, 0.2 * 4.0e-3) &&
                    close(rabi_hz, 21e6, 0.0, 0.2 * 21e6) && close(r.j_half, 4.0e6, 0.0, 0.1 * 4.0e6) &&
                    std::abs(zeta - 0.08) <= 0.02 && zeta == r.zeta_predicted;
    return {ok, "mu=" + fmt("%.4e", r.mu) + " rT=" + fmt("%.4e", r.rT) + " Omega/2pi=" + fmt("%.4eHz", rabi_hz) +
                    " J=" + fmt("%.4e", r.j_half) + " zeta=" + fmt("%.4f", zeta)};
}

double min_eigenvalue(const SpinDensityMatrix& rho) {
    const auto d = static_cast<Eigen::Index>(rho.dim());
    Eigen::MatrixXcd m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = rho(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

double max_abs_diff(const SpinDensityMatrix& a, const SpinDensityMatrix& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.elements().size(); ++k) {
        worst = std::max(worst, std::abs(a.elements()[k] - b.elements()[k]));
    }
    return worst;
}

double qpd_integral(const SpinDensityMatrix& rho) {
    const std::size_t nt = 256;
    const std::size_t np = 512;
    const auto g = qpd(rho, uniform_qpd_grid(nt, np, QpdNormalization::raw));
    double sum = 0.0;
    for (std::size_t i = 0; i <= nt; ++i) {
        const double w = (i == 0 || i == nt) ? 0.5 : 1.0;
        double row = 0.0;
        for (std::size_t j = 0; j < np; ++j) row += g.at(i, j);
        sum += w * row * std::sin(g.theta_samples[i]);
    }
    return sum * (kPi / nt) * (2.0 * kPi / np) * static_cast<double>(rho.dim()) / (4.0 * kPi);
}

Outcome invariant_suite() {
    int checks = 0;
    int failures = 0;
    double worst_trace = 0.0, worst_herm = 0.0, worst_eig = 0.0, worst_comp = 0.0, worst_casimir = 0.0,
           worst_qpd = 0.0;
    auto expect = [&](bool ok) {
        ++checks;
        if (!ok) ++failures;
    };
    const double thetas[] = {0.0, 0.7, kPi / 2, 2.4};
    const double phis[] = {0.0, -1.9, 2.2};
    for (int two_s : {1, 2, 3, 8, 21, 40, 99, 199}) {
        const SpinMagnitude s(two_s);
        const double casimir = s.value() * (s.value() + 1.0);
        for (double theta : thetas) {
            for (double phi : phis) {
                const auto rho = make_css(s, theta, phi);
                for (double mu : {0.0, 0.03, 0.236, 1.1}) {
                    for (double ratio : {1.0, 1.6}) {
                        const auto p1 = TwistParameters::from_mu(mu, ratio * mu);
                        const auto p2 = TwistParameters::from_mu(-0.5 * mu, 0.9 * mu);
                        const auto out = evolve(rho, p1);
                        expect(out.diagonal() == rho.diagonal());
                        const double tr = std::abs(out.trace() - Complex(1.0, 0.0));
                        const double herm = out.hermiticity_error();
                        worst_trace = std::max(worst_trace, tr);
                        worst_herm = std::max(worst_herm, herm);
                        expect(tr <= 1e-12 && herm <= 1e-12);
                        if (s.dim() <= 200 && theta == 0.7 && phi == 0.0) {
                            const double e = min_eigenvalue(out);
                            worst_eig = std::min(worst_eig, e);
                            expect(e >= -1e-10);
                        }
                        const double comp = max_abs_diff(evolve(out, p2), evolve(rho, p1 + p2));
                        worst_comp = std::max(worst_comp, comp);
                        expect(comp <= 1e-12);
                        const double cas = std::abs(moments(out).casimir() - casimir) / casimir;
                        worst_casimir = std::max(worst_casimir, cas);
                        expect(cas <= 1e-9);
                    }
                }
            }
        }
    }
    for (double mu : {0.0, 0.2}) {
        const double q = std::abs(qpd_integral(evolve(make_css_x(SpinMagnitude(40)), TwistParameters::from_mu(mu, mu))) - 1.0);
        worst_qpd = std::max(worst_qpd, q);
        expect(q <= 1e-6);
    }
    return {failures == 0,
            std::to_string(checks) + " checks, failures=" + std::to_string(failures) + " trace=" +
                fmt("%.1e", worst_trace) + " herm=" + fmt("%.1e", worst_herm) + " min_eig=" +
                fmt("%.1e", worst_eig) + " compose=" + fmt("%.1e", worst_comp) + " casimir=" +
                fmt("%.1e", worst_casimir) + " qpd_norm=" + fmt("%.1e", worst_qpd)};
}

struct QpdCsv {
    std::vector<double> theta, phi;  // unique, ascending
    std::vector<double> q;           // row-major, theta outer
    double at(std::size_t i, std::size_t j) const { return q[i * phi.size() + j]; }
};

QpdCsv read_qpd(const fs::path& path) {
    std::ifstream in(path);
    std::string line;
    QpdCsv out;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        std::istringstream ss(line);
        std::string a, b, c;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        std::getline(ss, c, ',');
        const double th = std::stod(a);
        const double ph = std::stod(b);
        if (out.theta.empty() || out.theta.back() != th) out.theta.push_back(th);
        if (out.theta.size() == 1) out.phi.push_back(ph);
        out.q.push_back(std::stod(c));
    }
    return out;
}

// Angles are measured from +z toward -y, folded into (-pi/2, pi/2]; the
// squeezed axis z' of the moment ellipse has this orientation at angle delta.
double fold(double a) {
    while (a > kPi / 2) a -= kPi;
    while (a <= -kPi / 2) a += kPi;
    return a;
}

// Narrowest width of the distribution in the y-z plane: Q-weighted spread
// of (y, z) = (sin th sin ph, cos th) along each direction, by grid search
// over the angle.
double narrowest_projection_angle(const QpdCsv& g, double step) {
    double w = 0.0, syy = 0.0, szz = 0.0, syz = 0.0;
    for (std::size_t i = 0; i < g.theta.size(); ++i) {
        for (std::size_t j = 0; j < g.phi.size(); ++j) {
            const double q = g.at(i, j) * std::sin(g.theta[i]);
            const double y = std::sin(g.theta[i]) * std::sin(g.phi[j]);
            const double z = std::cos(g.theta[i]);
            w += q;
            syy += q * y * y;
            szz += q * z * z;
            syz += q * y * z;
        }
    }
    double best_angle = 0.0;
    double best = 1e300;
    for (double a = -kPi / 2 + step; a <= kPi / 2 + 1e-12; a += step) {
        const double uy = -std::sin(a);
        const double uz = std::cos(a);
        const double spread = (uy * uy * syy + 2.0 * uy * uz * syz + uz * uz * szz) / w;
        if (spread < best) {
            best = spread;
            best_angle = a;
        }
    }
    return fold(best_angle);
}

Outcome qpd_panel_data(const fs::path& dir) {
    struct Panel {
        const char* name;
        const char* mu;
        const char* mu_prime;
    };
    const Panel panels[] = {{"qpd_a", "0", "0"}, {"qpd_b", "0", "0.1"}, {"qpd_c", "0.2", "0.2"}};
    std::string detail;
    bool ok = true;
    for (const auto& p : panels) {
        std::ostringstream out, err;
        const int code = cli::run({"twistlab", "qpd", "--spin", "20", "--mu", p.mu, "--mu-prime", p.mu_prime,
                                   "--grid", "128x256", "--name", p.name, "--out", dir.string()},
                                  out, err);
        const fs::path csv = dir / (std::string(p.name) + ".csv");
        if (code != 0 || !fs::exists(csv)) {
            ok = false;
            detail += std::string(p.name) + ": run failed; ";
            continue;
        }
        const QpdCsv g = read_qpd(csv);
        const auto top = std::max_element(g.q.begin(), g.q.end());
        const std::size_t k = static_cast<std::size_t>(top - g.q.begin());
        const double th = g.theta[k / g.phi.size()];
        const double ph = g.phi[k % g.phi.size()];
        const bool peak_ok = std::abs(th - kPi / 2) < 1e-12 && std::abs(ph) < 1e-12 && *top == 1.0;
        ok = ok && peak_ok;
        detail += std::string(p.name) + " peak=(" + fmt("%.4f", th) + "," + fmt("%.4f", ph) + ") ";
        if (std::string(p.name) == "qpd_c") {
            const double delta =
                matrix_report(evolve(make_css_x(SpinMagnitude(40)), TwistParameters::from_mu(0.2, 0.2))).delta;
            const double resolution = g.theta[1] - g.theta[0];
            const double angle = narrowest_projection_angle(g, resolution / 8.0);
            const bool angle_ok = std::abs(angle - delta) <= resolution;
            ok = ok && angle_ok;
            detail += "narrowest=" + fmt("%.4f", angle) + " delta=" + fmt("%.4f", delta) + " res=" +
                      fmt("%.4f", resolution);
        }
    }
    return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path out_dir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
    fs::create_directories(out_dir);

    const std::vector<Criterion> criteria = {
        {"S=20 anchors", 2.0, s20_anchors},
        {"cross-path equivalence", 10.0, cross_path},
        {"oracle equivalence", 30.0, oracle_equivalence},
        {"scaling laws", 60.0, scaling_laws},
        {"feasibility calibration", 1.0, feasibility_calibration},
        {"invariant suite", 120.0, invariant_suite},
        {"QPD panel data", 60.0, [&] { return qpd_panel_data(out_dir); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && dt < c.time_limit_s;
        if (!pass) ++failed;
        std::printf("%s  %-26s %s (%.2fs, limit %.0fs)\n", pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(),
                    dt, c.time_limit_s);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
