#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace spc::artifacts {

// Shortest text that reads back to the same double ('.' decimal, no locale).
std::string format_number(double x);

// RFC 4180 CSV with LF line endings; fields are quoted only when needed.
using Row = std::vector<std::string>;
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<Row>& rows);
std::string csv_field(const std::string& s);

// UTF-8 JSON with sorted keys, two-space indent, trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Output directory that also keeps manifest.json: each written file with the
// config hash it was produced from.
class OutputDir {
public:
    OutputDir(std::filesystem::path dir, std::string hash);
    std::filesystem::path path(const std::string& name) const { return dir_ / name; }
    void csv(const std::string& name, const std::vector<std::string>& header, const std::vector<Row>& rows);
    void json(const std::string& name, nlohmann::json j);   // adds "config_hash"
    void finish(const std::string& command);
    const std::string& hash() const { return hash_; }

private:
    std::filesystem::path dir_;
    std::string hash_;
    std::vector<std::string> files_;
};

} // namespace spc::artifacts
