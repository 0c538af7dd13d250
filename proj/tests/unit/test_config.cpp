#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spc/artifacts.hpp"
#include "spc/config.hpp"

using namespace spc;
using nlohmann::json;

namespace {
json minimal()
{
    return json::parse(R"({"model": {"shape": "well", "radius": 0.5, "lambda_c": 7.6}, "grid": {"r_max": 40, "n": 400}})");
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
} // namespace

TEST_CASE("config: minimal and auto coupling")
{
    auto c = parse_config(minimal());
    CHECK(c.model.lambda_c == doctest::Approx(7.6));
    CHECK_FALSE(c.lambda_auto);
    CHECK(c.grid.n == 400);
    json j = minimal();
    j["model"]["lambda_c"] = "auto";
    CHECK(parse_config(j).lambda_auto);
    j["model"].erase("lambda_c");
    CHECK(parse_config(j).lambda_auto);
}

TEST_CASE("config: all problems reported at once")
{
    json j = minimal();
    j["model"]["colour"] = "red";
    j["grid"]["n"] = -3;
    j["bogus"] = 1;
    j["fit"] = {{"sigmas", {0.01, 0.02}}};
    try {
        parse_config(j);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::configuration);
        std::string m = e.what();
        CHECK(m.find("colour") != std::string::npos);
        CHECK(m.find("bogus") != std::string::npos);
        CHECK(m.find("grid.n") != std::string::npos);
        CHECK(m.find("fit.sigmas") != std::string::npos);
    }
    json g = minimal();
    g.erase("grid");
    CHECK_THROWS_AS(parse_config(g), Error);
    json s = minimal();
    s["evolve"] = {{"schedule", "linear"}};   // epsilon missing
    CHECK_THROWS_AS(parse_config(s), Error);
}

TEST_CASE("config: missing file")
{
    try {
        load_config("/nonexistent/config.json");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::configuration);
    }
}

TEST_CASE("config hash is canonical")
{
    json a = json::parse(R"({"grid": {"n": 400, "r_max": 40}, "model": {"radius": 0.5}})");
    json b = json::parse(R"({"model": {"radius": 0.5}, "grid": {"r_max": 40, "n": 400}})");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b["grid"]["n"] = 401;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("artifacts: numbers, csv quoting, manifest")
{
    for (double x : {0.1, 1e-300, 7.608074844654855, -2.5e17}) CHECK(std::stod(artifacts::format_number(x)) == x);
    CHECK(artifacts::format_number(0.5) == "0.5");
    CHECK(artifacts::csv_field("plain") == "plain");
    CHECK(artifacts::csv_field("a,b") == "\"a,b\"");
    CHECK(artifacts::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");

    auto dir = std::filesystem::temp_directory_path() / "spclab_artifacts_test";
    std::filesystem::remove_all(dir);
    artifacts::OutputDir out(dir, "0123456789abcdef");
    out.csv("t.csv", {"sigma", "k", "phi_out_sq"}, {{"0.1", "0.2", "0.3"}});
    out.json("r.json", {{"b", 1}, {"a", 2}});
    out.finish("test");
    CHECK(slurp(dir / "t.csv") == "sigma,k,phi_out_sq\n0.1,0.2,0.3\n");
    auto r = json::parse(slurp(dir / "r.json"));
    CHECK(r["config_hash"] == "0123456789abcdef");
    CHECK(slurp(dir / "r.json").find("\"a\"") < slurp(dir / "r.json").find("\"b\""));
    auto m = json::parse(slurp(dir / "manifest.json"));
    CHECK(m["files"].size() == 2);
    CHECK(m["config_hash"] == "0123456789abcdef");
    CHECK_THROWS_AS(out.csv("bad.csv", {"a", "b"}, {{"1"}}), Error);
    std::filesystem::remove_all(dir);
}
