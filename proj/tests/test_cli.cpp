#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch_dir() {
    static int counter = 0;
    const fs::path dir =
        fs::temp_directory_path() / ("nonauto_cli_test_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunResult run_cli(const std::string& args, const fs::path& dir,
                  const std::string& env_prefix = {}) {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = env_prefix + std::string(NONAUTO_CLI_PATH) + " " + args +
                            " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::size_t count_lines(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++n;
    return n;
}

}  // namespace

TEST_CASE("simulate writes trajectories and a manifest") {
    const fs::path dir = scratch_dir();
    const auto r =
        run_cli("simulate --preset fig2-left --epsilon 0.2 --out " + dir.string(), dir);
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "slow.csv"));
    CHECK(fs::exists(dir / "fast.csv"));
    CHECK(fs::exists(dir / "manifest.json"));
    std::ifstream fast(dir / "fast.csv");
    std::string header;
    std::getline(fast, header);
    CHECK(header == "epsilon,tau,y,blew_up");
    const std::string manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("\"preset\": \"fig2-left\"") != std::string::npos);
    CHECK(manifest.find("resolved_config") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("a missing config exits 1 and names the path") {
    const fs::path dir = scratch_dir();
    const auto r = run_cli("simulate --config /no/such/config.json", dir);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("/no/such/config.json") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("an unknown config key exits 1 with its field path") {
    const fs::path dir = scratch_dir();
    {
        std::ofstream cfg(dir / "bad.json");
        cfg << R"({"horizon": {"t0": 5}})";
    }
    const auto r = run_cli("simulate --config " + (dir / "bad.json").string(), dir);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("horizon") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("blow-up exits 2 with partial flagged output") {
    const fs::path dir = scratch_dir();
    {
        std::ofstream cfg(dir / "blow.json");
        cfg << R"({"initial": {"x0": 0.0, "y0": -1.5}, "epsilon_grid": [0.2]})";
    }
    const auto r = run_cli(
        "simulate --config " + (dir / "blow.json").string() + " --out " + dir.string(),
        dir);
    CHECK(r.exit_code == 2);
    REQUIRE(fs::exists(dir / "fast.csv"));
    std::ifstream fast(dir / "fast.csv");
    std::string line, last;
    std::getline(fast, line);  // header
    while (std::getline(fast, line))
        if (!line.empty()) last = line;
    CHECK(last.substr(last.size() - 2) == ",1");  // final row flagged
    fs::remove_all(dir);
}

TEST_CASE("deltak emits one row per epsilon") {
    const fs::path dir = scratch_dir();
    {
        std::ofstream cfg(dir / "dk.json");
        cfg << R"({"epsilon_grid": [0.4, 0.2, 0.1], "fiber": {"t_pull": 10.0}})";
    }
    const auto r = run_cli(
        "deltak --config " + (dir / "dk.json").string() + " --out " + dir.string(), dir);
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(dir / "deltak.csv"));
    CHECK(count_lines(dir / "deltak.csv") == 4);  // header + 3 rows
    fs::remove_all(dir);
}

TEST_CASE("fiber command writes the fiber schema") {
    const fs::path dir = scratch_dir();
    {
        std::ofstream cfg(dir / "f.json");
        cfg << R"({"fiber": {"t_pull": 10.0}})";
    }
    const auto r = run_cli(
        "fiber --config " + (dir / "f.json").string() + " --out " + dir.string(), dir);
    CHECK(r.exit_code == 0);
    std::ifstream f(dir / "fiber.csv");
    std::string header;
    std::getline(f, header);
    CHECK(header == "theta_1,theta_2,x_1,y_1,pullback_time,converged");
    fs::remove_all(dir);
}

TEST_CASE("figure fig1 reports the pair summary in the manifest") {
    const fs::path dir = scratch_dir();
    const auto r = run_cli("figure fig1 --out " + dir.string(), dir);
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "fig1_pair.csv"));
    const std::string manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("beta_attractor") != std::string::npos);
    CHECK(manifest.find("beta_repeller") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("tipscan classifies the canonical figure rate as tracking") {
    const fs::path dir = scratch_dir();
    const auto r = run_cli("tipscan --preset fig3 --out " + dir.string(), dir);
    CHECK(r.exit_code == 0);
    const std::string csv = slurp(dir / "tipscan.csv");
    CHECK(csv.find("tracks") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("presets are frozen against conflicting configs") {
    const fs::path dir = scratch_dir();
    {
        std::ofstream cfg(dir / "override.json");
        cfg << R"({"horizons": {"t0": 3.0}, "epsilon_grid": [0.5]})";
    }
    const auto r = run_cli("simulate --preset fig2-left --epsilon 0.5 --config " +
                               (dir / "override.json").string() + " --out " + dir.string(),
                           dir);
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("ignores config section") != std::string::npos);
    const std::string manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("\"t0\": 20.0") != std::string::npos);  // preset value kept
    fs::remove_all(dir);
}

TEST_CASE("a non-converged fiber exits 3") {
    const fs::path dir = scratch_dir();
    {
        std::ofstream cfg(dir / "short.json");
        cfg << R"({"fiber": {"t_pull": 2.0}})";  // certificate cannot settle
    }
    const auto r = run_cli(
        "fiber --config " + (dir / "short.json").string() + " --out " + dir.string(),
        dir);
    CHECK(r.exit_code == 3);
    CHECK(fs::exists(dir / "fiber.csv"));  // output still written
    fs::remove_all(dir);
}

TEST_CASE("worker count falls back to the environment") {
    const fs::path dir = scratch_dir();
    {
        std::ofstream cfg(dir / "f.json");
        cfg << R"({"fiber": {"t_pull": 10.0}})";
    }
    const auto r = run_cli("fiber --config " + (dir / "f.json").string() + " --out " +
                               dir.string(),
                           dir, "NONAUTO_SLOWFAST_WORKERS=3 ");
    CHECK(r.exit_code == 0);
    const std::string manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("\"workers\": 3") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("equi writes attraction times over the grid") {
    const fs::path dir = scratch_dir();
    const auto r = run_cli(
        "equi --x-lo 0 --x-hi 0.2 --x-count 3 --horizon 30 --out " + dir.string(), dir);
    CHECK(r.exit_code == 0);
    std::ifstream f(dir / "equi.csv");
    std::string header;
    std::getline(f, header);
    CHECK(header == "x,tol,T");
    CHECK(count_lines(dir / "equi.csv") == 1 + 3 * 2);  // two default tolerances
    fs::remove_all(dir);
}

TEST_CASE("figure fig3 exports the surface and the transition curve") {
    const fs::path dir = scratch_dir();
    const auto r = run_cli("figure fig3 --out " + dir.string(), dir);
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "fig3_surface.csv"));
    CHECK(fs::exists(dir / "fig3_transition.csv"));
    std::ifstream f(dir / "fig3_surface.csv");
    std::string header;
    std::getline(f, header);
    CHECK(header == "gamma,tau,attractor_value");
    fs::remove_all(dir);
}

TEST_CASE("track writes the tracking schema") {
    const fs::path dir = scratch_dir();
    const auto r = run_cli("track --preset fig2-left --epsilon 0.5 --metric proxy --out " +
                               dir.string(),
                           dir);
    CHECK(r.exit_code == 0);
    std::ifstream f(dir / "tracking.csv");
    std::string header, row;
    std::getline(f, header);
    CHECK(header == "epsilon,tau,dist,mode");
    std::getline(f, row);
    CHECK(row.find("eta-curve") != std::string::npos);
    fs::remove_all(dir);
}
