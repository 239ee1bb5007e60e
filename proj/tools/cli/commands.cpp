#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "output.hpp"
#include "twistlab/asymptotics.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/feasibility.hpp"
#include "twistlab/kernels.hpp"
#include "twistlab/observables.hpp"
#include "twistlab/oracle.hpp"
#include "twistlab/spin_core.hpp"
#include "twistlab/twist.hpp"

namespace twistlab::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum class Kind { number, optional_number, integer, text, spin, flag };

struct OptionSpec {
    std::string key;
    Kind kind;
    json default_value;
    std::string help;
};

using Schema = std::vector<OptionSpec>;

Schema common_options() {
    return {{"out", Kind::text, ".", "output directory"},
            {"threads", Kind::integer, 0, "worker threads (0: TWISTLAB_THREADS or all cores)"}};
}

Schema twist_options() {
    return {{"spin", Kind::spin, "20", "total spin S (e.g. 20, 0.5, 1/2)"},
            {"mu", Kind::number, 0.0, "twisting strength mu"},
            {"mu-prime", Kind::number, 0.0, "excess-noise strength mu'"},
            {"ideal", Kind::flag, false, "ideal one-axis twisting (forces mu' = 0)"}};
}

const std::map<std::string, Schema>& schemas() {
    static const std::map<std::string, Schema> table = [] {
        std::map<std::string, Schema> t;
        auto with_common = [](Schema s) {
            auto c = common_options();
            s.insert(s.end(), c.begin(), c.end());
            return s;
        };
        {
            Schema s = twist_options();
            s.push_back({"dump-matrix", Kind::flag, false, "also write the density matrix"});
            t["evolve"] = with_common(s);
        }
        {
            Schema s = twist_options();
            s.push_back({"grid", Kind::text, "128x256", "n_theta x n_phi"});
            s.push_back({"normalization", Kind::text, "max", "max | raw"});
            s.push_back({"name", Kind::text, "qpd", "output file stem"});
            t["qpd"] = with_common(s);
        }
        t["sweep-mu"] = with_common({
            {"spin", Kind::spin, "20", "total spin S"},
            {"mu-grid", Kind::text, "0:0.5:200", "start:stop:count, inclusive"},
            {"equal-mu-prime", Kind::flag, false, "set mu' = mu at every point"},
            {"mu-prime", Kind::number, 0.0, "fixed mu' when not equal to mu"},
        });
        t["sweep-s"] = with_common({
            {"log-range", Kind::text, "100:100000:13", "lo:hi:count, log-spaced S"},
        });
        t["feasibility"] = with_common({
            {"preset", Kind::text, "yb171", "yb171 | none"},
            {"lambda0", Kind::optional_number, nullptr, "resonance wavelength, m"},
            {"gamma", Kind::optional_number, nullptr, "natural linewidth, rad/s"},
            {"detuning", Kind::optional_number, nullptr, "detuning, rad/s"},
            {"power", Kind::optional_number, nullptr, "peak power, W"},
            {"duration", Kind::optional_number, nullptr, "pulse duration, s"},
            {"waist", Kind::optional_number, nullptr, "beam waist, m"},
            {"spin", Kind::optional_number, nullptr, "total spin S"},
            {"length", Kind::optional_number, nullptr, "sample length, m"},
            {"target-mu", Kind::optional_number, nullptr, "also plan a pulse for this mu"},
        });
        t["verify-oracle"] = with_common({});
        return t;
    }();
    return table;
}

const Schema& schema_for(const std::string& command) {
    const auto it = schemas().find(command);
    if (it == schemas().end()) throw UsageError("unknown command '" + command + "'");
    return it->second;
}

double parse_double_strict(const std::string& text, const std::string& what) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw UsageError("invalid number for " + what + ": '" + text + "'");
    }
    return v;
}

long long parse_int_strict(const std::string& text, const std::string& what) {
    long long v = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw UsageError("invalid integer for " + what + ": '" + text + "'");
    }
    return v;
}

void check_kind(const OptionSpec& spec, const json& v) {
    const std::string where = "option '" + spec.key + "'";
    switch (spec.kind) {
        case Kind::number:
            if (!v.is_number()) throw UsageError(where + " must be a number");
            break;
        case Kind::optional_number:
            if (!v.is_number() && !v.is_null()) throw UsageError(where + " must be a number or null");
            break;
        case Kind::integer:
            if (!v.is_number_integer()) throw UsageError(where + " must be an integer");
            break;
        case Kind::text:
            if (!v.is_string()) throw UsageError(where + " must be a string");
            break;
        case Kind::spin:
            if (!v.is_string() && !v.is_number()) throw UsageError(where + " must be a number or string");
            parse_two_s(v);
            break;
        case Kind::flag:
            if (!v.is_boolean()) throw UsageError(where + " must be true or false");
            break;
    }
}

// The parts of a config that affect results; provenance hashes this.
json result_config(const json& config) {
    json c = config;
    c.erase("out");
    c.erase("threads");
    return c;
}

fs::path prepare_out_dir(const json& config) {
    fs::path dir = config.at("out").get<std::string>();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw NumericError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

SpinMagnitude spin_of(const json& config) { return SpinMagnitude(parse_two_s(config.at("spin"))); }

TwistParameters twist_of(const json& config) {
    const double mu = config.at("mu").get<double>();
    if (config.at("ideal").get<bool>()) return TwistParameters::reference_only(mu, 0.0);
    return TwistParameters::from_mu(mu, config.at("mu-prime").get<double>());
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json report_json(const SqueezingReport& r) {
    return {{"mean_x", r.mean_x},         {"var_x", r.var_x},   {"var_yprime", r.var_yprime},
            {"var_zprime", r.var_zprime}, {"delta", r.delta},   {"zeta", r.zeta},
            {"a_term", optional_json(r.a_term)}, {"b_term", optional_json(r.b_term)}};
}

json twist_json(SpinMagnitude spin, const TwistParameters& p) {
    return {{"spin", spin.value()}, {"two_s", spin.two_s()}, {"mu", p.mu()}, {"mu_prime", p.mu_prime()},
            {"physical", p.physical()}};
}

}  // namespace

int parse_two_s(const json& value) {
    double s = 0.0;
    if (value.is_number()) {
        s = value.get<double>();
    } else if (value.is_string()) {
        const std::string text = value.get<std::string>();
        const auto slash = text.find('/');
        if (slash != std::string::npos) {
            if (text.substr(slash + 1) != "2") throw UsageError("spin fraction must have denominator 2");
            const long long num = parse_int_strict(text.substr(0, slash), "spin");
            s = 0.5 * static_cast<double>(num);
        } else {
            s = parse_double_strict(text, "spin");
        }
    } else {
        throw UsageError("spin must be a number or string");
    }
    try {
        return SpinMagnitude::from_spin(s).two_s();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
}

std::vector<double> LinearGrid::values() const {
    std::vector<double> v(count);
    for (std::size_t k = 0; k < count; ++k) {
        v[k] = count == 1 ? start
                          : start + (stop - start) * static_cast<double>(k) / static_cast<double>(count - 1);
    }
    if (count > 1) v.back() = stop;
    return v;
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

}  // namespace

LinearGrid parse_linear_grid(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("grid must be start:stop:count, got '" + text + "'");
    LinearGrid g;
    g.start = parse_double_strict(parts[0], "grid start");
    g.stop = parse_double_strict(parts[1], "grid stop");
    const long long n = parse_int_strict(parts[2], "grid count");
    if (n < 1) throw UsageError("grid count must be >= 1");
    g.count = static_cast<std::size_t>(n);
    return g;
}

std::vector<double> parse_log_range(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("log range must be lo:hi:count, got '" + text + "'");
    const double lo = parse_double_strict(parts[0], "range start");
    const double hi = parse_double_strict(parts[1], "range stop");
    const long long n = parse_int_strict(parts[2], "range count");
    if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw UsageError("log range needs 0 < lo <= hi and count >= 1");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (long long k = 0; k < n; ++k) {
        v[static_cast<std::size_t>(k)] =
            n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(n - 1));
    }
    return v;
}

std::pair<std::size_t, std::size_t> parse_grid_shape(const std::string& text) {
    const auto parts = split(text, 'x');
    if (parts.size() != 2) throw UsageError("grid shape must be NxM, got '" + text + "'");
    const long long a = parse_int_strict(parts[0], "grid rows");
    const long long b = parse_int_strict(parts[1], "grid columns");
    if (a < 2 || b < 2) throw UsageError("QPD grid must be at least 2x2");
    return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
}

json resolve_config(const std::string& command, const json& overrides) {
    const Schema& schema = schema_for(command);
    if (!overrides.is_object()) throw UsageError("configuration must be a JSON object");
    json config = json::object();
    for (const auto& spec : schema) config[spec.key] = spec.default_value;
    for (const auto& [key, value] : overrides.items()) {
        const auto it = std::find_if(schema.begin(), schema.end(),
                                     [&](const OptionSpec& s) { return s.key == key; });
        if (it == schema.end()) throw UsageError("unknown key '" + key + "' for command " + command);
        check_kind(*it, value);
        config[key] = value;
    }
    if (config.at("threads").get<long long>() < 0) throw UsageError("threads must be >= 0");
    return config;
}

json cmd_evolve(const json& config) {
    const SpinMagnitude spin = spin_of(config);
    const TwistParameters params = twist_of(config);
    const fs::path dir = prepare_out_dir(config);

    const SpinDensityMatrix rho = evolve(make_css_x(spin), params);
    rho.check_invariants(1e-10);
    const SqueezingReport from_matrix = matrix_report(rho);
    const SqueezingReport closed = closed_form_report(spin, params);

    json summary = {{"command", "evolve"},
                    {"parameters", twist_json(spin, params)},
                    {"report", report_json(from_matrix)},
                    {"report_closed_form", report_json(closed)}};
    // Headline value from the closed form; the matrix report cross-checks it.
    summary["zeta"] = closed.zeta;

    const auto prov = provenance_lines("evolve", result_config(config));
    if (config.at("dump-matrix").get<bool>()) {
        // Row-major, M and M' ascending from -S.
        CsvWriter csv(dir / "density_matrix.csv", prov, {"two_m", "two_m_prime", "re", "im"});
        for (std::size_t i = 0; i < rho.dim(); ++i) {
            for (std::size_t j = 0; j < rho.dim(); ++j) {
                const double row[] = {static_cast<double>(spin.two_m_at(i)),
                                      static_cast<double>(spin.two_m_at(j)), rho(i, j).real(), rho(i, j).imag()};
                csv.row(row);
            }
        }
        summary["density_matrix"] = (dir / "density_matrix.csv").string();
    }
    summary["provenance"] = {{"version", kToolVersion}, {"config_hash", config_hash(result_config(config))}};
    write_json(dir / "report.json", summary);
    return summary;
}

json cmd_qpd(const json& config) {
    const SpinMagnitude spin = spin_of(config);
    const TwistParameters params = twist_of(config);
    const auto [n_theta, n_phi] = parse_grid_shape(config.at("grid").get<std::string>());
    const std::string norm_text = config.at("normalization").get<std::string>();
    if (norm_text != "max" && norm_text != "raw") throw UsageError("normalization must be max or raw");
    const QpdNormalization norm = norm_text == "max" ? QpdNormalization::max : QpdNormalization::raw;
    const std::string name = config.at("name").get<std::string>();
    if (name.empty() || name.find('/') != std::string::npos) throw UsageError("name must be a plain file stem");
    const fs::path dir = prepare_out_dir(config);

    const SpinDensityMatrix rho = evolve(make_css_x(spin), params);
    const QpdGrid grid = qpd(rho, uniform_qpd_grid(n_theta, n_phi, norm));
    const SqueezingReport report = matrix_report(rho);

    const auto prov = provenance_lines("qpd", result_config(config));
    const fs::path csv_path = dir / (name + ".csv");
    {
        CsvWriter csv(csv_path, prov, {"theta", "phi", "q_normalized"});
        for (std::size_t i = 0; i < grid.theta_samples.size(); ++i) {
            for (std::size_t j = 0; j < grid.phi_samples.size(); ++j) {
                const double row[] = {grid.theta_samples[i], grid.phi_samples[j], grid.at(i, j)};
                csv.row(row);
            }
        }
    }
    std::size_t arg = 0;
    for (std::size_t k = 1; k < grid.values.size(); ++k) {
        if (grid.values[k] > grid.values[arg]) arg = k;
    }
    json summary = {{"command", "qpd"},
                    {"parameters", twist_json(spin, params)},
                    {"report", report_json(report)},
                    {"grid", {{"n_theta", grid.theta_samples.size()}, {"n_phi", grid.phi_samples.size()}}},
                    {"normalization", to_string(norm)},
                    {"raw_maximum", grid.raw_maximum},
                    {"peak", {{"theta", grid.theta_samples[arg / grid.phi_samples.size()]},
                              {"phi", grid.phi_samples[arg % grid.phi_samples.size()]}}},
                    {"csv", csv_path.string()},
                    {"provenance", {{"version", kToolVersion}, {"config_hash", config_hash(result_config(config))}}}};
    write_json(dir / (name + "_report.json"), summary);
    return summary;
}

json cmd_sweep_mu(const json& config) {
    const SpinMagnitude spin = spin_of(config);
    const LinearGrid grid = parse_linear_grid(config.at("mu-grid").get<std::string>());
    const bool equal = config.at("equal-mu-prime").get<bool>();
    const double fixed_mu_prime = config.at("mu-prime").get<double>();
    const fs::path dir = prepare_out_dir(config);
    const double s = spin.value();

    const auto mus = grid.values();
    struct Row {
        double values[7];
    };
    std::vector<Row> rows(mus.size());
    std::vector<std::string> errors(mus.size());
    const long long n = static_cast<long long>(mus.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (long long k = 0; k < n; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        try {
            const double mu = mus[idx];
            const auto params = TwistParameters::reference_only(mu, equal ? mu : fixed_mu_prime);
            const SqueezingReport r = closed_form_report(spin, params);
            const ApproxVariance approx = approx_var_zprime(spin, params);
            rows[idx] = {{mu, 2.0 * r.var_zprime / s, 2.0 * r.var_yprime / s, 2.0 * approx.var_zprime / s,
                          r.mean_x, r.zeta, r.delta}};
        } catch (const std::exception& e) {
            errors[idx] = e.what();
        }
    }
    for (std::size_t k = 0; k < errors.size(); ++k) {
        if (!errors[k].empty()) throw InvalidArgument("sweep point mu = " + format_number(mus[k]) + ": " + errors[k]);
    }

    const auto prov = provenance_lines("sweep-mu", result_config(config));
    const fs::path csv_path = dir / "sweep_mu.csv";
    {
        CsvWriter csv(csv_path, prov,
                      {"mu", "var_zprime_norm", "var_yprime_norm", "approx_var_zprime_norm", "mean_x", "zeta", "delta"});
        for (const auto& r : rows) csv.row(r.values);
    }

    json summary = {{"command", "sweep-mu"}, {"spin", s}, {"points", rows.size()}, {"csv", csv_path.string()}};
    // First downward crossing of the half-SQL level, linearly interpolated.
    json crossing = nullptr;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double a = rows[k - 1].values[1] - 0.5;
        const double b = rows[k].values[1] - 0.5;
        if (a > 0.0 && b <= 0.0) {
            const double t = a / (a - b);
            crossing = rows[k - 1].values[0] + t * (rows[k].values[0] - rows[k - 1].values[0]);
            break;
        }
    }
    summary["half_sql_crossing_mu"] = crossing;
    const auto best = std::min_element(rows.begin(), rows.end(),
                                       [](const Row& a, const Row& b) { return a.values[1] < b.values[1]; });
    if (best != rows.end()) {
        summary["grid_minimum"] = {{"mu", best->values[0]}, {"var_zprime_norm", best->values[1]}};
    }
    if (equal && spin.two_s() >= 4) {
        try {
            const MuMin min = find_mu_min(spin);
            summary["mu_min_exact"] = min.mu;
            summary["mu_half_exact"] = find_mu_half(spin);
        } catch (const NumericError&) {
            summary["mu_half_exact"] = nullptr;
        }
    }
    summary["provenance"] = {{"version", kToolVersion}, {"config_hash", config_hash(result_config(config))}};
    write_json(dir / "sweep_mu_summary.json", summary);
    return summary;
}

json cmd_sweep_s(const json& config) {
    const auto spins_raw = parse_log_range(config.at("log-range").get<std::string>());
    std::vector<SpinMagnitude> spins;
    for (double s : spins_raw) {
        const double rounded = std::max(0.5, std::round(2.0 * s) / 2.0);
        spins.push_back(SpinMagnitude::from_spin(rounded));
    }
    const fs::path dir = prepare_out_dir(config);
    const auto rows = scaling_sweep(spins);

    const auto prov = provenance_lines("sweep-s", result_config(config));
    const fs::path csv_path = dir / "sweep_s.csv";
    std::vector<double> xs, half, min, zeta, ideal;
    {
        CsvWriter csv(csv_path, prov,
                      {"spin", "mu_half_exact", "mu_min_exact", "mu_half_approx", "mu_min_approx", "zeta_min_exact",
                       "zeta_min_approx"});
        for (const auto& r : rows) {
            const double row[] = {r.exact.spin,    r.exact.mu_half,  r.exact.mu_min,  r.approx.mu_half,
                                  r.approx.mu_min, r.exact.zeta_min, r.approx.zeta_min};
            csv.row(row);
            xs.push_back(r.exact.spin);
            half.push_back(r.exact.mu_half);
            min.push_back(r.exact.mu_min);
            zeta.push_back(r.exact.zeta_min);
            ideal.push_back(r.zeta_min_ideal);
        }
    }

    auto fit_json = [&](const std::vector<double>& ys) -> json {
        if (xs.size() < 2) return nullptr;
        const auto f = fit_power_law(xs, ys);
        return {{"exponent", f.exponent}, {"prefactor", f.prefactor}};
    };
    json summary = {{"command", "sweep-s"},
                    {"points", rows.size()},
                    {"csv", csv_path.string()},
                    {"fits",
                     {{"mu_half", fit_json(half)},
                      {"mu_min", fit_json(min)},
                      {"zeta_min", fit_json(zeta)},
                      {"zeta_min_ideal", fit_json(ideal)}}},
                    {"formula_prefactors",
                     {{"mu_half", 2.0},
                      {"mu_min", 2.0 * std::pow(1.5, 0.2)},
                      {"zeta_min", std::pow(2.0 / 3.0, 0.2)},
                      {"zeta_min_ideal", std::cbrt(1.0 / 3.0)}}},
                    {"approx_variance_optimum_prefactors",
                     {{"mu_min", std::pow(12.0, 0.2)}, {"var_norm", 2.5 / std::pow(12.0, 0.2)}}}};
    summary["provenance"] = {{"version", kToolVersion}, {"config_hash", config_hash(result_config(config))}};
    write_json(dir / "sweep_s_summary.json", summary);
    return summary;
}

namespace {

feasibility::OpticalSetup setup_from(const json& config) {
    const std::string preset = config.at("preset").get<std::string>();
    feasibility::OpticalSetup s;
    if (preset == "yb171") {
        s = feasibility::ytterbium_171_example();
    } else if (preset != "none") {
        throw UsageError("preset must be yb171 or none");
    }
    auto take = [&](const char* key, double& field) {
        if (!config.at(key).is_null()) field = config.at(key).get<double>();
    };
    take("lambda0", s.lambda0);
    take("gamma", s.gamma_natural);
    take("detuning", s.detuning);
    take("power", s.power);
    take("duration", s.duration);
    take("waist", s.waist);
    take("spin", s.total_spin);
    if (!config.at("length").is_null()) s.sample_length = config.at("length").get<double>();
    return s;
}

json flags_json(const std::vector<feasibility::Flag>& flags) {
    json out = json::array();
    for (const auto& f : flags) {
        out.push_back({{"name", f.name}, {"condition", f.condition}, {"pass", f.pass}, {"value", f.value},
                       {"threshold", f.threshold}, {"margin", f.margin}});
    }
    return out;
}

json feasibility_json(const feasibility::FeasibilityReport& r) {
    return {{"sigma0", r.sigma0},
            {"d0", r.d0},
            {"intensity", r.intensity},
            {"saturation_intensity", r.saturation_intensity},
            {"rabi", r.rabi},
            {"rabi_over_2pi_hz", r.rabi / (2.0 * std::numbers::pi)},
            {"scatter_rate", r.scatter_rate},
            {"rT", r.rT},
            {"mu", r.mu},
            {"mu_prime", r.mu},
            {"j_half", r.j_half},
            {"kappa", r.kappa},
            {"inverse_kappa_sq", 1.0 / (r.kappa * r.kappa)},
            {"zeta_predicted", r.zeta_predicted},
            {"all_pass", r.all_pass()},
            {"flags", flags_json(r.flags)}};
}

}  // namespace

json cmd_feasibility(const json& config) {
    const feasibility::OpticalSetup setup = setup_from(config);
    const fs::path dir = prepare_out_dir(config);
    const auto report = feasibility::analyze(setup);
    json summary = {{"command", "feasibility"},
                    {"setup",
                     {{"lambda0", setup.lambda0},
                      {"gamma", setup.gamma_natural},
                      {"detuning", setup.detuning},
                      {"power", setup.power},
                      {"duration", setup.duration},
                      {"waist", setup.waist},
                      {"spin", setup.total_spin},
                      {"length", setup.sample_length ? json(*setup.sample_length) : json(nullptr)}}},
                    {"report", feasibility_json(report)}};
    if (!config.at("target-mu").is_null()) {
        const auto fam = feasibility::required_pulse(setup, config.at("target-mu").get<double>());
        summary["pulse_plan"] = {{"target_mu", fam.target_mu},
                                 {"rT", fam.rT},
                                 {"energy_low_power", fam.energy_low_power},
                                 {"reference_duration", fam.reference_duration},
                                 {"reference_power", fam.reference_power},
                                 {"feasible", fam.feasible},
                                 {"failing_flags", fam.failing_flags}};
    }
    summary["provenance"] = {{"version", kToolVersion}, {"config_hash", config_hash(result_config(config))}};
    write_json(dir / "feasibility.json", summary);
    return summary;
}

json cmd_verify_oracle(const json& config) {
    const fs::path dir = prepare_out_dir(config);
    struct Case {
        std::string id;
        double deviation;
        double leakage;
    };
    std::vector<Case> cases;

    {
        const SpinMagnitude spin(2);
        const auto fock = oracle::fock_evolve(spin, 8.0, 32, 1e-2, 1e-2);
        const auto branch = oracle::coherent_branch_evolve(spin, 4.0, 1e-2, 1e-2);
        cases.push_back({"fock_vs_branch_s1_n8_cut32", oracle::max_abs_deviation(fock.rho, branch), fock.leakage});
    }
    {
        const SpinMagnitude spin(2);
        const auto fock = oracle::fock_evolve(spin, 8.0, 32, 0.0, 0.0);
        cases.push_back({"fock_identity_s1", oracle::max_abs_deviation(fock.rho, make_css_x(spin)), fock.leakage});
    }
    const auto study = oracle::convergence_study(SpinMagnitude(4), 0.1, {1e-1, 1e-2, 1e-3});
    for (const auto& p : study) {
        char id[64];
        std::snprintf(id, sizeof id, "branch_vs_map_s2_mu0.1_at%g", p.alpha_t);
        cases.push_back({id, p.max_abs_deviation, 0.0});
    }
    bool monotone = true;
    for (std::size_t k = 1; k < study.size(); ++k) {
        monotone = monotone && study[k].max_abs_deviation < study[k - 1].max_abs_deviation;
    }

    const auto prov = provenance_lines("verify-oracle", result_config(config));
    const fs::path csv_path = dir / "verify_oracle.csv";
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw NumericError("cannot open " + csv_path.string());
        for (const auto& line : prov) out << "# " << line << '\n';
        out << "case_id,max_abs_deviation,leakage\n";
        for (const auto& c : cases) {
            out << c.id << ',' << format_number(c.deviation) << ',' << format_number(c.leakage) << '\n';
        }
    }
    json summary = {{"command", "verify-oracle"},
                    {"csv", csv_path.string()},
                    {"convergence_monotone", monotone},
                    {"final_deviation", study.back().max_abs_deviation},
                    {"fock_vs_branch", cases.front().deviation}};
    summary["provenance"] = {{"version", kToolVersion}, {"config_hash", config_hash(result_config(config))}};
    write_json(dir / "verify_oracle_summary.json", summary);
    return summary;
}

namespace {

json dispatch(const std::string& command, const json& config) {
    if (command == "evolve") return cmd_evolve(config);
    if (command == "qpd") return cmd_qpd(config);
    if (command == "sweep-mu") return cmd_sweep_mu(config);
    if (command == "sweep-s") return cmd_sweep_s(config);
    if (command == "feasibility") return cmd_feasibility(config);
    if (command == "verify-oracle") return cmd_verify_oracle(config);
    throw UsageError("unknown command '" + command + "'");
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("config file " + path + " is not valid JSON: " + e.what());
    }
}

void apply_threads(const json& config) {
    long long threads = config.at("threads").get<long long>();
    if (threads == 0) {
        if (const char* env = std::getenv("TWISTLAB_THREADS"); env && *env) {
            threads = parse_int_strict(env, "TWISTLAB_THREADS");
            if (threads < 1) throw UsageError("TWISTLAB_THREADS must be >= 1");
        }
    }
    if (threads > 0) kernels::set_threads(static_cast<int>(threads));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"twistlab: spin squeezing by one-axis twisting with coherent light", "twistlab"};
    static const std::map<std::string, std::string> descriptions = {
        {"evolve", "evolve the x-polarized coherent state; squeezing report"},
        {"qpd", "quasiprobability distribution Q(theta, phi) on a grid"},
        {"sweep-mu", "closed-form variances over a grid of mu"},
        {"sweep-s", "mu_half, mu_min, zeta_min over log-spaced S with power-law fits"},
        {"feasibility", "laboratory parameters to (mu, J) with assumption flags"},
        {"verify-oracle", "brute-force atom-light checks of the reduced map"},
    };
    app.require_subcommand(1);

    struct Bound {
        const OptionSpec* spec;
        CLI::Option* option;
        std::string text;
        bool flag = false;
    };
    std::map<std::string, std::vector<std::unique_ptr<Bound>>> bound;
    std::map<std::string, std::string> config_paths;

    for (const auto& [name, schema] : schemas()) {
        CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
        config_paths[name];
        sub->add_option("--config", config_paths[name], "JSON file; its keys override flags");
        for (const auto& spec : schema) {
            auto b = std::make_unique<Bound>();
            b->spec = &spec;
            if (spec.kind == Kind::flag) {
                b->option = sub->add_flag("--" + spec.key, b->flag, spec.help);
            } else {
                b->option = sub->add_option("--" + spec.key, b->text, spec.help);
            }
            bound[name].push_back(std::move(b));
        }
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();  // program name
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        json overrides = json::object();
        for (const auto& b : bound[command]) {
            if (b->option->count() == 0) continue;
            const OptionSpec& spec = *b->spec;
            switch (spec.kind) {
                case Kind::flag: overrides[spec.key] = b->flag; break;
                case Kind::number:
                case Kind::optional_number: overrides[spec.key] = parse_double_strict(b->text, "--" + spec.key); break;
                case Kind::integer: overrides[spec.key] = parse_int_strict(b->text, "--" + spec.key); break;
                case Kind::text:
                case Kind::spin: overrides[spec.key] = b->text; break;
            }
        }
        if (!config_paths[command].empty()) {
            const json file = load_config_file(config_paths[command]);
            if (!file.is_object()) throw UsageError("config file must hold a JSON object");
            for (const auto& [key, value] : file.items()) overrides[key] = value;
        }
        const json config = resolve_config(command, overrides);
        apply_threads(config);
        const json summary = dispatch(command, config);
        out << summary.dump(2) << '\n';
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace twistlab::cli
