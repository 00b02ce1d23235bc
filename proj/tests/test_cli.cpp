#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(RIL_BINARY) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    std::array<char, 512> buf{};
    while (fgets(buf.data(), buf.size(), p)) out += buf.data();
    const int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("ril_cli_test_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("capacity of the origin") {
    const fs::path d = scratch("cap");
    const Run r = run("capacity --set tilt.u_starstar=0.4 --out " + d.string());
    CHECK(r.status == 0);
    const auto at = r.out.find("cap=");
    REQUIRE(at != std::string::npos);
    CHECK(std::stod(r.out.substr(at + 4)) == doctest::Approx(0.659463).epsilon(2e-6));
    const std::string csv = slurp(d / "results.csv");
    CHECK(csv.rfind("# manifest ", 0) == 0);
    CHECK(csv.find("units:") != std::string::npos);
    CHECK(fs::exists(d / "manifest.json"));
}

TEST_CASE("entropy of the degenerate tilt is zero") {
    const fs::path d = scratch("ent");
    const Run r = run("entropy --set tilt.u_starstar=0.4 --set tilt.epsilon=0.2 --set tilt.u=0.6 --out " + d.string());
    CHECK(r.status == 0);
    CHECK(r.out.find("entropy H=0 ") != std::string::npos);
}

TEST_CASE("missing u_** is rejected before any computation") {
    const fs::path d = scratch("missing");
    const Run r = run("capacity --out " + d.string());
    CHECK(r.status == 1);
    CHECK(r.out.find("u_starstar") != std::string::npos);
    CHECK_FALSE(fs::exists(d / "results.csv"));
}

TEST_CASE("invalid exponents name the ordering") {
    const Run r = run("capacity --set tilt.u_starstar=0.4 --set experiment.r3=0.2");
    CHECK(r.status == 1);
    CHECK(r.out.find("exponent ordering") != std::string::npos);
}

TEST_CASE("unknown keys are rejected") {
    const Run r = run("capacity --set tilt.u_starstar=0.4 --set tilt.colour=red");
    CHECK(r.status == 1);
    CHECK(r.out.find("tilt.colour") != std::string::npos);
}

TEST_CASE("config files and byte-identical reruns across thread counts") {
    const fs::path d = scratch("repro");
    fs::create_directories(d);
    {
        std::ofstream cfg(d / "run.ini");
        cfg << "[tilt]\nu = 0.4\nu_starstar = 0.4\nepsilon = 0.2\nN = 10\n\n[experiment]\nwindow_radius = 12\nreplicas = 300\nseed = 17\n";
    }
    const Run a = run("disconnect-direct --config " + (d / "run.ini").string() + " --set experiment.levels=2,4 --out " + (d / "a").string());
    const Run b = run("disconnect-direct --config " + (d / "run.ini").string() +
                      " --set experiment.levels=2,4 --threads 2 --out " + (d / "b").string());
    REQUIRE(a.status == 0);
    REQUIRE(b.status == 0);
    CHECK(slurp(d / "a" / "results.csv") == slurp(d / "b" / "results.csv"));
    const Run c = run("disconnect-direct --config " + (d / "run.ini").string() + " --seed 18 --set experiment.levels=2,4 --out " +
                      (d / "c").string());
    CHECK(slurp(d / "a" / "results.csv") != slurp(d / "c" / "results.csv"));
}
