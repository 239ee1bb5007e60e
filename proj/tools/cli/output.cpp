#include "output.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>

#include "twistlab/errors.hpp"

namespace twistlab::cli {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);  // no "-0"
    return buf;
}

std::string config_hash(const nlohmann::json& config) {
    const std::string text = config.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return std::string("fnv1a64:") + buf;
}

std::vector<std::string> provenance_lines(const std::string& command, const nlohmann::json& config) {
    return {std::string("twistlab ") + kToolVersion, "command: " + command,
            "config_hash: " + config_hash(config), "config: " + config.dump()};
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& provenance,
                     const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::binary), columns_(columns.size()) {
    if (!out_) throw NumericError("cannot open " + path.string() + " for writing");
    for (const auto& line : provenance) out_ << "# " << line << '\n';
    for (std::size_t k = 0; k < columns.size(); ++k) out_ << (k ? "," : "") << columns[k];
    out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
    if (values.size() != columns_) throw NumericError("CSV row width mismatch in " + path_.string());
    for (std::size_t k = 0; k < values.size(); ++k) out_ << (k ? "," : "") << format_number(values[k]);
    out_ << '\n';
    if (!out_) throw NumericError("write failed for " + path_.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericError("cannot open " + path.string() + " for writing");
    out << value.dump(2) << '\n';
    if (!out) throw NumericError("write failed for " + path.string());
}

}  // namespace twistlab::cli
