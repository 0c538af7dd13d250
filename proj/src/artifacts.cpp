#include "spc/artifacts.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "spc/error.hpp"

namespace spc::artifacts {

std::string format_number(double x)
{
    if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

namespace {

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::configuration, "cannot write '" + path.string() + "'");
    return out;
}

} // namespace

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header, const std::vector<Row>& rows)
{
    std::ofstream out = open_out(path);
    auto line = [&](const Row& r) {
        for (size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_field(r[i]);
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) {
        if (r.size() != header.size()) throw Error(ErrorKind::usage, "csv row width does not match header");
        line(r);
    }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j)
{
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

OutputDir::OutputDir(std::filesystem::path dir, std::string hash) : dir_(std::move(dir)), hash_(std::move(hash))
{
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::configuration, "cannot create output directory '" + dir_.string() + "'");
}

void OutputDir::csv(const std::string& name, const std::vector<std::string>& header, const std::vector<Row>& rows)
{
    std::filesystem::create_directories((dir_ / name).parent_path());
    write_csv(dir_ / name, header, rows);
    files_.push_back(name);
}

void OutputDir::json(const std::string& name, nlohmann::json j)
{
    j["config_hash"] = hash_;
    write_json(dir_ / name, j);
    files_.push_back(name);
}

void OutputDir::finish(const std::string& command)
{
    std::sort(files_.begin(), files_.end());
    nlohmann::json m;
    m["command"] = command;
    m["config_hash"] = hash_;
    m["files"] = files_;
    write_json(dir_ / "manifest.json", m);
}

} // namespace spc::artifacts
