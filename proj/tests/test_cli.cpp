// End-to-end tests of the command-line driver: exit codes, report
// determinism, and each subcommand's output contract.

#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kCli = OTGEOM_CLI_PATH;
const std::string kDataDir = OTGEOM_TEST_DATA_DIR;

int run_cli(const std::string& args, const fs::path& stdout_path = {},
            const fs::path& stderr_path = {}) {
    std::string cmd = kCli + " " + args;
    if (!stdout_path.empty()) cmd += " > " + stdout_path.string();
    if (!stderr_path.empty())
        cmd += " 2> " + stderr_path.string();
    else
        cmd += " 2> /dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& label) {
    const fs::path dir = fs::temp_directory_path() / ("otgeom-cli-" + label);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

json slurp_json(const fs::path& path) { return json::parse(slurp(path)); }

double num(const json& j) { return std::stod(j.get<std::string>()); }

}  // namespace

TEST_CASE("running without a subcommand is a usage error", "[cli]") {
    REQUIRE(run_cli("") == 2);
}

TEST_CASE("verify reports are deterministic across reruns and job counts", "[cli]") {
    const fs::path dir = fresh_dir("determinism");
    const std::string base = "verify --section signature --seed 777 --out ";
    REQUIRE(run_cli(base + (dir / "r1.json").string(), dir / "o1.txt") == 0);
    REQUIRE(run_cli(base + (dir / "r2.json").string(), dir / "o2.txt") == 0);
    REQUIRE(run_cli(base + (dir / "r3.json").string() + " --jobs 2", dir / "o3.txt") == 0);
    const std::string r1 = slurp(dir / "r1.json");
    REQUIRE(r1 == slurp(dir / "r2.json"));
    REQUIRE(r1 == slurp(dir / "r3.json"));

    const json rep = json::parse(r1);
    REQUIRE(rep.at("seed").get<std::uint64_t>() == 777);
    REQUIRE(rep.at("failures").get<int>() == 0);
    REQUIRE(rep.at("total").get<std::size_t>() > 0);
    REQUIRE(rep.at("checks").is_array());
    REQUIRE_FALSE(rep.at("config_digest").get<std::string>().empty());
}

TEST_CASE("verify fails under a crushing tolerance scale", "[cli]") {
    const fs::path dir = fresh_dir("tolscale");
    const int code = run_cli("verify --section metric-restriction --tol-scale 1e-15 --out " +
                                 (dir / "r.json").string(),
                             dir / "out.txt");
    REQUIRE(code == 1);
    const json rep = slurp_json(dir / "r.json");
    REQUIRE(rep.at("failures").get<int>() > 0);
}

TEST_CASE("unknown section names are configuration errors", "[cli]") {
    const fs::path dir = fresh_dir("badsection");
    REQUIRE(run_cli("verify --section no-such-thing --out " + (dir / "r.json").string()) == 2);
}

TEST_CASE("unknown configuration keys are rejected", "[cli]") {
    const fs::path dir = fresh_dir("badkey");
    spit(dir / "cfg.json", R"({"sections": ["signature"], "bogus": 1})");
    REQUIRE(run_cli("verify --config " + (dir / "cfg.json").string()) == 2);
}

TEST_CASE("config seed applies and command-line flags override it", "[cli]") {
    const fs::path dir = fresh_dir("seeds");
    spit(dir / "cfg.json", R"({"seed": 123, "sections": ["signature"]})");
    REQUIRE(run_cli("verify --config " + (dir / "cfg.json").string() + " --out " +
                    (dir / "a.json").string()) == 0);
    REQUIRE(slurp_json(dir / "a.json").at("seed").get<std::uint64_t>() == 123);

    REQUIRE(run_cli("verify --config " + (dir / "cfg.json").string() + " --seed 999 --out " +
                    (dir / "b.json").string()) == 0);
    REQUIRE(slurp_json(dir / "b.json").at("seed").get<std::uint64_t>() == 999);
}

TEST_CASE("eval reports value, spectrum, signature, curvature", "[cli]") {
    const fs::path dir = fresh_dir("eval");
    spit(dir / "cfg.json",
         R"({"cost": {"type": "log", "n": 1, "alpha": 1.0}, "xi": [1.0], "eta": [1.0]})");
    REQUIRE(run_cli("eval --config " + (dir / "cfg.json").string() + " --out " +
                    (dir / "eval.json").string()) == 0);
    const json out = slurp_json(dir / "eval.json");
    REQUIRE(out.at("n").get<int>() == 1);
    REQUIRE_THAT(num(out.at("value")), Catch::Matchers::WithinAbs(std::log(2.0), 1e-12));
    REQUIRE(out.at("signature")[0].get<int>() == 1);
    REQUIRE(out.at("signature")[1].get<int>() == 1);
    REQUIRE_THAT(num(out.at("metric_eigenvalues")[0]),
                 Catch::Matchers::WithinAbs(-0.125, 1e-12));
    REQUIRE_THAT(num(out.at("metric_eigenvalues")[1]),
                 Catch::Matchers::WithinAbs(0.125, 1e-12));
    REQUIRE_THAT(num(out.at("curvature_block")[0][0][0][0]),
                 Catch::Matchers::WithinAbs(0.0625, 1e-12));
}

TEST_CASE("geodesic subcommand writes the frozen path and solves the endpoint",
          "[cli]") {
    const fs::path dir = fresh_dir("geodesic");
    spit(dir / "cfg.json",
         R"({"chart": "log-n1", "p": [1.0], "q": [2.0], "steps": 128, "samples": 17})");
    REQUIRE(run_cli("geodesic --config " + (dir / "cfg.json").string() + " --out " +
                        (dir / "path.csv").string(),
                    dir / "out.json") == 0);
    const json out = slurp_json(dir / "out.json");
    REQUIRE(out.at("chart").get<std::string>() == "log/n1");
    REQUIRE(out.at("connection").get<std::string>() == "primal");
    REQUIRE(num(out.at("residual")) < 1e-5);
    REQUIRE(num(out.at("endpoint_gap")) < 1e-9);
    REQUIRE_THAT(num(out.at("endpoint")[0]), Catch::Matchers::WithinAbs(2.0, 1e-9));

    // The sampled path is frozen: integrating the same configuration must
    // reproduce the stored file byte for byte.
    REQUIRE(slurp(dir / "path.csv") == slurp(fs::path(kDataDir) / "geodesic_log_n1.csv"));
}

TEST_CASE("geodesic subcommand integrates the dual connection in dual coordinates",
          "[cli]") {
    const fs::path dir = fresh_dir("geodual");
    spit(dir / "cfg.json",
         R"({"chart": "log-n1", "p": [1.0], "v": [-0.3], "connection": "dual"})");
    REQUIRE(run_cli("geodesic --config " + (dir / "cfg.json").string() + " --out " +
                        (dir / "path.csv").string(),
                    dir / "out.json") == 0);
    const json out = slurp_json(dir / "out.json");
    REQUIRE_THAT(num(out.at("endpoint")[0]),
                 Catch::Matchers::WithinAbs(std::exp(-0.3), 1e-6));
    REQUIRE(num(out.at("residual")) < 1e-5);
}

TEST_CASE("sinkhorn subcommand balances marginals and writes the coupling", "[cli]") {
    const fs::path dir = fresh_dir("sinkhorn");
    spit(dir / "cfg.json",
         R"({"p": [0.5, 0.3, 0.2], "q": [0.2, 0.3, 0.5], "lambda": 1.0})");
    REQUIRE(run_cli("sinkhorn --config " + (dir / "cfg.json").string() + " --out " +
                        (dir / "coupling.csv").string(),
                    dir / "out.json") == 0);
    const json out = slurp_json(dir / "out.json");
    REQUIRE(out.at("states").get<int>() == 3);
    REQUIRE(num(out.at("divergence")) >= -1e-9);
    REQUIRE(num(out.at("row_marginal_gap")) < 1e-10);
    REQUIRE(num(out.at("col_marginal_gap")) < 1e-10);
    REQUIRE(out.at("iterations").get<int>() > 0);

    std::istringstream csv(slurp(dir / "coupling.csv"));
    std::string line;
    int lines = 0;
    double mass = 0;
    while (std::getline(csv, line)) {
        if (lines > 0) {
            const auto last_comma = line.rfind(',');
            mass += std::stod(line.substr(last_comma + 1));
        }
        ++lines;
    }
    REQUIRE(lines == 10);  // header + 3x3 entries
    REQUIRE_THAT(mass, Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("canonical subcommand reports both divergences of the log chart", "[cli]") {
    const fs::path dir = fresh_dir("canonical");
    spit(dir / "cfg.json", R"({"chart": "log-n1", "p": [1.0], "q": [4.0]})");
    REQUIRE(run_cli("canonical --config " + (dir / "cfg.json").string() + " --out " +
                    (dir / "canon.json").string()) == 0);
    const json out = slurp_json(dir / "canon.json");
    REQUIRE(out.at("chart").get<std::string>() == "log/n1");
    // Chart-induced divergence: log((1+4) / (2 sqrt(4))) = log(5/4).
    REQUIRE_THAT(num(out.at("c_divergence")),
                 Catch::Matchers::WithinAbs(std::log(1.25), 1e-9));
    // Geodesic-integral divergence: (log 4)^2 / 8 in the affine coordinate.
    const double dtheta = std::log(4.0);
    REQUIRE_THAT(num(out.at("divergence")),
                 Catch::Matchers::WithinAbs(dtheta * dtheta / 8.0, 1e-6));
    REQUIRE_THAT(num(out.at("endpoint_energy")),
                 Catch::Matchers::WithinAbs(dtheta * dtheta / 4.0, 1e-6));
    REQUIRE(num(out.at("restriction_gap")) < 1e-6);
}

TEST_CASE("malformed geodesic configurations are configuration errors", "[cli]") {
    const fs::path dir = fresh_dir("badgeo");
    spit(dir / "missing.json", R"({"chart": "log-n1", "p": [1.0]})");
    REQUIRE(run_cli("geodesic --config " + (dir / "missing.json").string()) == 2);

    spit(dir / "dualq.json",
         R"({"chart": "log-n1", "p": [1.0], "q": [2.0], "connection": "dual"})");
    REQUIRE(run_cli("geodesic --config " + (dir / "dualq.json").string()) == 2);
}
