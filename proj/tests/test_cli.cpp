#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef ODLAB_CLI_PATH
#error "ODLAB_CLI_PATH must point at the odlab binary"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

CommandResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string command =
        std::string(ODLAB_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(command.c_str());
    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("odlab-cli-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("simulate writes identical bytes on rerun") {
    const fs::path dir = fresh_dir("simulate");
    const std::string flags = "simulate --protocol 3maj --n 1000 --k 5 --init balanced --seed 7 --out ";
    const CommandResult first = run_cli(flags + (dir / "a").string(), dir);
    REQUIRE(first.exit_code == 0);
    const CommandResult second = run_cli(flags + (dir / "b").string(), dir);
    REQUIRE(second.exit_code == 0);

    CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));
    CHECK(slurp(dir / "a" / "result.json") == slurp(dir / "b" / "result.json"));

    const json result = json::parse(slurp(dir / "a" / "result.json"));
    CHECK(result["spec_version"] == 1);
    CHECK(result["seed"] == 7);
    CHECK(result["n"] == 1000);
    const std::string trace = slurp(dir / "a" / "trace.csv");
    CHECK(trace.rfind("t,gamma,max_alpha,remaining,delta,eta,weak_count\n", 0) == 0);
}

TEST_CASE("bounds subcommand prints the frozen tail") {
    const fs::path dir = fresh_dir("bounds");
    const CommandResult result = run_cli("bounds freedman --h 0.1 --T 100 --s 1e-4 --D 0.01", dir);
    REQUIRE(result.exit_code == 0);
    const json out = json::parse(result.out);
    CHECK(out["tail"].get<double>() == doctest::Approx(0.6163927313272270).epsilon(1e-9));

    const CommandResult bern = run_cli("bounds bernstein --lambda 10 --s 0.006 --D 0.02", dir);
    REQUIRE(bern.exit_code == 0);
    CHECK(json::parse(bern.out)["bound"].get<double>() == doctest::Approx(1.3790964956153898).epsilon(1e-9));

    const CommandResult drift = run_cli("bounds drift --R -0.01 --h 1 --T 200 --s 1e-4 --D 0.01", dir);
    REQUIRE(drift.exit_code == 0);
    CHECK(json::parse(drift.out)["tail"].get<double>() == doctest::Approx(4.9395760188312101e-10).epsilon(1e-6));
}

TEST_CASE("sweep outputs reproduce byte-for-byte and echo the spec") {
    const fs::path dir = fresh_dir("sweep");
    const std::string flags = "sweep --protocol 3maj --n 512 --k 2,4 --trials 8 --seed 9 --threads 2 --out ";
    REQUIRE(run_cli(flags + (dir / "a").string(), dir).exit_code == 0);
    REQUIRE(run_cli(flags + (dir / "b").string(), dir).exit_code == 0);
    CHECK(slurp(dir / "a" / "trials.csv") == slurp(dir / "b" / "trials.csv"));
    CHECK(slurp(dir / "a" / "summary.csv") == slurp(dir / "b" / "summary.csv"));

    // the echoed spec reproduces the same outputs when fed back in
    const CommandResult from_spec =
        run_cli("sweep --spec " + (dir / "a" / "spec.json").string() + " --out " + (dir / "c").string(), dir);
    REQUIRE(from_spec.exit_code == 0);
    CHECK(slurp(dir / "a" / "trials.csv") == slurp(dir / "c" / "trials.csv"));
    CHECK(slurp(dir / "a" / "spec.json") == slurp(dir / "c" / "spec.json"));
}

TEST_CASE("malformed input exits 1 with a JSON error and no partial outputs") {
    const fs::path dir = fresh_dir("badspec");
    const fs::path spec = dir / "bad.json";
    std::ofstream(spec) << "{\"experiment\": \"scaling\", \"protocol\": \"3maj\", \"n_values\": [8], \"k_values\": [32]}";
    const fs::path out = dir / "out";
    const CommandResult result = run_cli("sweep --spec " + spec.string() + " --out " + out.string(), dir);
    CHECK(result.exit_code == 1);
    const json err = json::parse(result.err);
    CHECK(err.contains("error"));
    CHECK_FALSE(fs::exists(out / "trials.csv"));

    const CommandResult unknown = run_cli("sweep --protocol 5maj --n 64 --k 2", dir);
    CHECK(unknown.exit_code == 1);
}

TEST_CASE("verify small budget passes") {
    const fs::path dir = fresh_dir("verify");
    const CommandResult result = run_cli("verify --budget small", dir);
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("FAIL") == std::string::npos);
    CHECK(result.out.find("law-equivalence") != std::string::npos);
}
