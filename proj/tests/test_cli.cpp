#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_commands.hpp"
#include "neumag/error.hpp"

using namespace neumag;
using namespace neumag::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "neumag");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("neumag_cli_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("constants with defaults") {
    const auto dir = scratch("constants");
    const auto r = run({"constants", "--out", dir.string()});
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(slurp(dir / "constants.json"));
    for (const char* key : {"theta0", "xi0", "alpha0", "theta0_m2", "xi0_m2", "curv_m2"}) CHECK(j.contains(key));
    CHECK(j["theta0"].get<double>() == doctest::Approx(0.590106124954).epsilon(1e-11));
    CHECK(j["meta"]["version"] == "1.0.0");
    CHECK(j["meta"]["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("validate on the reference ellipsoid") {
    const auto dir = scratch("validate");
    const auto r = run({"validate", "--surface", "ellipsoid", "--out", dir.string()});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("PASS") != std::string::npos);
    CHECK(r.out.find("all checks passed") != std::string::npos);
    const auto j = nlohmann::json::parse(slurp(dir / "validate.json"));
    CHECK(j["failures"] == 0);
}

TEST_CASE("usage errors") {
    CHECK(run({"predict", "--surface", "egg", "--h", ""}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"band", "--surface", "torus"}).code == kExitUsage);
    CHECK(run({"band", "--surface", "{\"kind\": \"ellipsoid\", \"a\": 2"}).code == kExitUsage);
    CHECK(run({"quantize", "--epsilon", "0.02,abc"}).code == kExitUsage);
    CHECK(run({"quantize", "--epsilon", "-0.02"}).code == kExitUsage);
    CHECK(run({"constants", "--resolution", "2"}).code == kExitUsage);
    CHECK(run({"constants", "--config", "/nonexistent/config.json"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
    const auto v = run({"--version"});
    CHECK(v.code == kExitOk);
    CHECK(v.out.find("1.0.0") != std::string::npos);
}

TEST_CASE("numerical failure carries the module message") {
    const auto dir = scratch("predict_fail");
    const auto r = run({"predict", "--surface", "ellipsoid", "--out", dir.string()});
    CHECK(r.code == kExitNumerical);
    CHECK(r.err.find("asymptotics: expansion hypotheses violated") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "predict.csv"));
}

TEST_CASE("geometry output and determinism") {
    const auto a = scratch("geometry_a");
    const auto b = scratch("geometry_b");
    REQUIRE(run({"geometry", "--surface", "egg", "--out", a.string()}).code == kExitOk);
    REQUIRE(run({"geometry", "--surface", "egg", "--out", b.string()}).code == kExitOk);
    const auto csv = slurp(a / "geometry.csv");
    CHECK(csv == slurp(b / "geometry.csv"));
    CHECK(slurp(a / "geometry.json") == slurp(b / "geometry.json"));
    CHECK(csv.rfind("# tool: neumag 1.0.0\n# config_hash: ", 0) == 0);
    CHECK(csv.find("\ns,phi,beta,kappa_g,E,K\n") != std::string::npos);
    const auto j = nlohmann::json::parse(slurp(a / "geometry.json"));
    CHECK(j["L"].get<double>() == doctest::Approx(4.84422411027).epsilon(1e-10));
    CHECK(j["assumptions_report"]["K_unique_nondegenerate_min"] == true);
    CHECK(j.contains("s_min"));
    CHECK(j.contains("K_min"));
}

TEST_CASE("predict from a config file") {
    const auto dir = scratch("predict");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "config.json");
        f << R"({"surface": {"kind": "egg"}, "h_list": [0.001, 0.01], "n_max": 2})";
    }
    const auto r = run({"predict", "--config", (dir / "config.json").string(), "--out", dir.string()});
    REQUIRE(r.code == kExitOk);
    const auto csv = slurp(dir / "predict.csv");
    CHECK(csv.find("n,h,term_h,term_h43,term_h53,gap\n") != std::string::npos);
    CHECK(csv.find("# config_hash: ") != std::string::npos);
    // h sorted descending: 0.01 rows come first
    CHECK(csv.find("1,0.01,") < csv.find("1,0.001,"));
    CHECK(fs::exists(dir / "profile_n1.bin"));
    CHECK(fs::exists(dir / "profile_n2.bin"));
    std::ifstream bin(dir / "profile_n2.bin", std::ios::binary);
    std::string header_line;
    std::getline(bin, header_line);
    const auto header = nlohmann::json::parse(header_line);
    const auto shape = header["shape"].get<std::vector<std::size_t>>();
    REQUIRE(shape.size() == 3);
    CHECK(header["meta"]["config_hash"].get<std::string>().size() == 16);
    CHECK(header["t"].size() == shape[0]);
    std::vector<double> values(shape[0] * shape[1] * shape[2]);
    bin.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
    CHECK(bin.gcount() == static_cast<std::streamsize>(values.size() * sizeof(double)));
}

TEST_CASE("band and quantize outputs") {
    const auto dir = scratch("band");
    REQUIRE(run({"band", "--surface", "egg", "--out", dir.string(), "--resolution", "2000"}).code == kExitOk);
    const auto j = nlohmann::json::parse(slurp(dir / "band.json"));
    CHECK(j["det_hess"].get<double>() > 0.0);
    CHECK(j["hess"].size() == 2);
    CHECK(slurp(dir / "band.csv").find("\ns,sigma,b\n") != std::string::npos);
    REQUIRE(run({"quantize", "--surface", "egg", "--epsilon", "0.04", "--out", dir.string(), "--resolution", "2000"})
                .code == kExitOk);
    const auto q = nlohmann::json::parse(slurp(dir / "quantize.json"));
    CHECK(q["runs"][0]["epsilon"] == 0.04);
    CHECK(q["runs"][0]["eigenvalues"].size() >= 6);
}

TEST_CASE("curve output") {
    const auto dir = scratch("curve");
    REQUIRE(run({"curve", "--out", dir.string(), "--resolution", "500"}).code == kExitOk);
    const auto csv = slurp(dir / "curve.csv");
    CHECK(csv.find("\nxi,mu1_dg,mu1_montgomery\n") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3 + 1 + 81);
}

TEST_CASE("run config") {
    RunConfig cfg;
    cfg.epsilon = {0.01, 0.04, 0.02};
    cfg.h = {0.001, 0.1};
    cfg.validate();
    CHECK(cfg.epsilon == std::vector<double>{0.04, 0.02, 0.01});
    CHECK(cfg.h == std::vector<double>{0.1, 0.001});
    const std::string h1 = cfg.hash();
    CHECK(h1 == cfg.hash());
    cfg.n_max = 4;
    CHECK(h1 != cfg.hash());
    RunConfig bad;
    bad.n_max = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = RunConfig{};
    bad.h.clear();
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = RunConfig{};
    bad.quantize_points = 300;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("surface specs") {
    CHECK(surface_from_json("sphere").kind() == geometry::SurfaceKind::ellipsoid);
    const auto e = surface_from_json(nlohmann::json{{"kind", "ellipsoid"}, {"a", 3.0}, {"b", 2.0}, {"c", 1.0}});
    CHECK(e.axes()[0] == 3.0);
    CHECK(surface_from_json(nlohmann::json{{"kind", "egg"}, {"k", 0.1}}).kind() == geometry::SurfaceKind::implicit);
    CHECK(surface_from_json(nlohmann::json{{"kind", "preset"}, {"name", "tilted_ellipsoid"}}).kind() ==
          geometry::SurfaceKind::ellipsoid);
    CHECK_THROWS_AS(surface_from_json(nlohmann::json{{"kind", "ellipsoid"}, {"a", 3.0}}), InvalidArgument);
    CHECK_THROWS_AS(surface_from_json(nlohmann::json{{"kind", "klein"}}), InvalidArgument);
    CHECK_THROWS_AS(surface_from_json(nlohmann::json{{"a", 1.0}}), InvalidArgument);
}
