#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace twistlab::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Shortest round-trip form is not used; every number is printed with 17
// significant digits so identical runs give identical bytes.
std::string format_number(double v);

// FNV-1a 64 of the canonical (key-sorted, compact) dump.
std::string config_hash(const nlohmann::json& config);

std::vector<std::string> provenance_lines(const std::string& command, const nlohmann::json& config);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& provenance,
              const std::vector<std::string>& columns);

    void row(std::span<const double> values);

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace twistlab::cli
