#pragma once

// twistlab command-line front end. Each subcommand has a fixed option
// schema; values come from flags and from an optional --config JSON file
// whose entries take precedence over the flags. Exit codes: 0 success,
// 1 numeric or invariant failure, 2 usage or schema error.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace twistlab::cli {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitUsage = 2;

// argv[0] is the program name, argv[1] the subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Fully resolved configuration -> files in config["out"]; returns the JSON
// summary that is also printed. Throws UsageError / library exceptions.
nlohmann::json cmd_evolve(const nlohmann::json& config);
nlohmann::json cmd_qpd(const nlohmann::json& config);
nlohmann::json cmd_sweep_mu(const nlohmann::json& config);
nlohmann::json cmd_sweep_s(const nlohmann::json& config);
nlohmann::json cmd_feasibility(const nlohmann::json& config);
nlohmann::json cmd_verify_oracle(const nlohmann::json& config);

// Defaults merged with the given overrides, validated against the
// subcommand schema.
nlohmann::json resolve_config(const std::string& command, const nlohmann::json& overrides);

// "20", "0.5", "1/2", or a JSON number.
int parse_two_s(const nlohmann::json& value);

struct LinearGrid {
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 0;
    std::vector<double> values() const;
};
LinearGrid parse_linear_grid(const std::string& text);  // start:stop:count
std::vector<double> parse_log_range(const std::string& text);  // lo:hi:count
std::pair<std::size_t, std::size_t> parse_grid_shape(const std::string& text);  // 128x256

}  // namespace twistlab::cli
