#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using Catch::Matchers::ContainsSubstring;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path fresh_dir() {
    static int counter = 0;
    const fs::path d = fs::temp_directory_path() / ("curvednb-cli-" + std::to_string(++counter));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

RunResult run_cli(const std::string& args) {
    const char* bin = CURVEDNB_CLI_PATH;
    const fs::path dir = fresh_dir();
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd =
        std::string(bin) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.code = (raw >= 0 && raw <= 255) ? raw : (raw >> 8) & 0xff;  // POSIX wait status
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path scenario(const std::string& name) {
    return fs::path(CURVEDNB_SCENARIO_DIR) / name;
}

fs::path write_scenario(const std::string& text) {
    const fs::path p = fresh_dir() / "scenario.json";
    std::ofstream(p) << text;
    return p;
}

ordered_json load_json(const fs::path& p) {
    REQUIRE(fs::exists(p));
    return ordered_json::parse(slurp(p));
}

}  // namespace

TEST_CASE("simulate conserves the sphere pair and writes its artifacts") {
    const fs::path out = fresh_dir();
    const RunResult r =
        run_cli("simulate --scenario " + scenario("two_body_sphere.json").string() + " --out " + out.string());
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("simulate: completed"));

    const std::string csv = slurp(out / "trajectory.csv");
    CHECK(csv.rfind("t,b0.s,b0.phi,b0.s_dot,b0.phi_dot,b1.s,b1.phi,b1.s_dot,b1.phi_dot,E,L_z\n", 0) == 0);

    const ordered_json summary = load_json(out / "summary.json");
    CHECK(summary["termination"] == "completed");
    CHECK(summary["energy"]["max_rel_drift"].get<double>() <= 1e-8);
    CHECK(summary["angular_momentum_z"]["max_rel_drift"].get<double>() <= 1e-8);
    CHECK(summary["t_final"].get<double>() == Catch::Approx(10.0).margin(1e-9));
    CHECK(summary["initial"].size() == 2);
    CHECK(summary["initial"][0].contains("tau"));
    CHECK(summary["scenario"]["potential"] == "cotangent");
}

TEST_CASE("simulate handles a free geodesic scenario") {
    const fs::path out = fresh_dir();
    const RunResult r =
        run_cli("simulate --scenario " + scenario("single_geodesic.json").string() + " --out " + out.string());
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    const ordered_json summary = load_json(out / "summary.json");
    CHECK(summary["termination"] == "completed");
    CHECK(summary["energy"]["max_rel_drift"].get<double>() <= 1e-10);
}

TEST_CASE("simulate handles the adaptive hyperbolic scenario") {
    const fs::path out = fresh_dir();
    const RunResult r = run_cli("simulate --scenario " + scenario("two_body_hyperbolic.json").string() +
                                " --out " + out.string());
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    const ordered_json summary = load_json(out / "summary.json");
    CHECK(summary["termination"] == "completed");
    CHECK(summary["energy"]["max_rel_drift"].get<double>() <= 1e-8);
    CHECK(summary["steps_rejected"].get<int>() >= 0);
}

TEST_CASE("a malformed scenario exits with the validation code and names the field") {
    const fs::path bad = write_scenario(R"({
        "manifold": {"dim": 2, "kappa": 1.0},
        "potential": "cotangent",
        "bodies": [
            {"mass": -1.0, "position": {"s": 1.0, "phi": 0.0}, "velocity": {"s_dot": 0.0, "phi_dot": 0.1}}
        ],
        "integrator": {"method": "rk4", "dt": 0.001, "t_end": 1.0}
    })");
    const fs::path out = fresh_dir();
    const RunResult r = run_cli("simulate --scenario " + bad.string() + " --out " + out.string());
    CHECK(r.code == 1);
    CHECK_THAT(r.err, ContainsSubstring("bodies[0].mass"));
}

TEST_CASE("an initially singular configuration exits with the singularity code") {
    const fs::path bad = write_scenario(R"({
        "manifold": {"dim": 2, "kappa": 1.0},
        "potential": "cotangent",
        "bodies": [
            {"mass": 1.0, "position": {"s": 0.7, "phi": 0.3}, "velocity": {"s_dot": 0.0, "phi_dot": 0.0}},
            {"mass": 1.0, "position": {"s": 0.7, "phi": 0.3}, "velocity": {"s_dot": 0.0, "phi_dot": 0.0}}
        ],
        "integrator": {"method": "rk4", "dt": 0.001, "t_end": 1.0}
    })");
    const fs::path out = fresh_dir();
    const RunResult r = run_cli("simulate --scenario " + bad.string() + " --out " + out.string());
    CHECK(r.code == 3);
    CHECK_THAT(r.err, ContainsSubstring("collision"));
}

TEST_CASE("sweep passes the flat-limit experiments and orders the table by sign") {
    const fs::path out = fresh_dir();
    const RunResult r =
        run_cli("sweep --scenario " + scenario("sweep_flat_limit.json").string() + " --out " + out.string());
    CAPTURE(r.err, r.out);
    REQUIRE(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("[pass]"));

    const ordered_json sweep = load_json(out / "sweep.json");
    CHECK(sweep["passed"] == true);
    REQUIRE(sweep["experiments"].size() == 2);
    for (const auto& ex : sweep["experiments"]) {
        CHECK(ex["passed"] == true);
        CHECK(ex["report"]["fit_positive"]["slope"].get<double>() >= 0.9);
        CHECK(ex["report"]["fit_negative"]["slope"].get<double>() >= 0.9);
    }

    // Two sub-tables: all kappa > 0 rows (decreasing magnitude) before
    // all kappa < 0 rows.
    const std::string csv = slurp(out / "sweep_vf.csv");
    std::istringstream lines(csv);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "kappa,error,excluded,note");
    std::vector<double> kappas;
    while (std::getline(lines, line))
        if (!line.empty()) kappas.push_back(std::stod(line.substr(0, line.find(','))));
    REQUIRE(kappas.size() == 12);
    for (int i = 0; i < 6; ++i) CHECK(kappas[i] > 0.0);
    for (int i = 6; i < 12; ++i) CHECK(kappas[i] < 0.0);
    for (int i = 1; i < 6; ++i) CHECK(std::fabs(kappas[i]) < std::fabs(kappas[i - 1]));
    CHECK(fs::exists(out / "sweep_potential.csv"));
}

TEST_CASE("sweep on the trajectory experiment meets its slope threshold") {
    const fs::path out = fresh_dir();
    const RunResult r =
        run_cli("sweep --scenario " + scenario("sweep_trajectory.json").string() + " --out " + out.string());
    CAPTURE(r.err, r.out);
    REQUIRE(r.code == 0);
    const ordered_json sweep = load_json(out / "sweep.json");
    CHECK(sweep["passed"] == true);
    CHECK(sweep["experiments"][0]["kind"] == "trajectory");
}

TEST_CASE("a sweep crossing an antipodal curvature fails with per-kappa entries") {
    // Positions are stored chordally, and same-chart-tuple mode reuses
    // the stored tuple as chart coordinates: tau = 1 places both bodies
    // at arc s = 1 on opposite rays, separation 2, which is exactly
    // antipodal at kappa = (pi/2)^2 where the diameter is 2.
    const fs::path sc = write_scenario(R"({
        "manifold": {"dim": 2, "kappa": 1.0},
        "potential": "cotangent",
        "bodies": [
            {"mass": 1.0, "position": {"tau": 1.0, "phi": 0.0}, "velocity": {"s_dot": 0.0, "phi_dot": 0.5}},
            {"mass": 1.0, "position": {"tau": 1.0, "phi": 3.141592653589793}, "velocity": {"s_dot": 0.0, "phi_dot": 0.5}}
        ],
        "integrator": {"method": "rk4", "dt": 0.01, "t_end": 1.0},
        "experiment": {
            "kinds": ["vf"],
            "kappas": [0.1, 2.4674011002723395, 0.01],
            "mode": "same-chart-tuple"
        }
    })");
    const fs::path out = fresh_dir();
    const RunResult r = run_cli("sweep --scenario " + sc.string() + " --out " + out.string());
    CHECK(r.code == 2);
    CHECK_THAT(r.out, ContainsSubstring("[FAIL]"));
    CHECK_THAT(r.out, ContainsSubstring("excluded entry"));

    const std::string csv = slurp(out / "sweep_vf.csv");
    CHECK_THAT(csv, ContainsSubstring("antipodal"));
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    int rows = 0, excluded = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        ++rows;
        std::istringstream cells(line);
        std::string kappa, error, flag;
        std::getline(cells, kappa, ',');
        std::getline(cells, error, ',');
        std::getline(cells, flag, ',');
        if (flag == "1") ++excluded;
    }
    CHECK(rows == 3);
    CHECK(excluded == 1);

    const ordered_json sweep = load_json(out / "sweep.json");
    CHECK(sweep["passed"] == false);
    CHECK_FALSE(sweep["experiments"][0]["reasons"].empty());
}

TEST_CASE("verify passes all invariant checks and writes its report") {
    const fs::path out = fresh_dir();
    const RunResult r = run_cli("verify --seed 7 --out " + out.string());
    CAPTURE(r.out, r.err);
    REQUIRE(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("[pass] trig-pythagorean"));
    CHECK_THAT(r.out, ContainsSubstring("christoffel-closed-vs-numeric"));
    CHECK_THAT(r.out, ContainsSubstring("verify: all checks passed"));
    CHECK(r.out.find("[FAIL]") == std::string::npos);

    const ordered_json report = load_json(out / "verify.json");
    CHECK(report["passed"] == true);
    CHECK(report["seed"] == 7);
    REQUIRE(report["checks"].size() >= 9);
    for (const auto& c : report["checks"]) {
        CHECK(c["pass"] == true);
        CHECK(c["worst_error"].get<double>() <= c["tolerance"].get<double>());
    }
}

TEST_CASE("derive prints metric and christoffel tables") {
    const fs::path out = fresh_dir();
    const RunResult r = run_cli("derive --scenario " + scenario("two_body_sphere.json").string() + " --out " +
                                out.string());
    REQUIRE(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("metric g_ij"));
    CHECK_THAT(r.out, ContainsSubstring("Gamma^"));
    CHECK(slurp(out / "derive.txt") == r.out);
}

TEST_CASE("simulate output is deterministic run to run") {
    const fs::path a = fresh_dir();
    const fs::path b = fresh_dir();
    const std::string base = "simulate --scenario " + scenario("single_geodesic.json").string() + " --out ";
    REQUIRE(run_cli(base + a.string()).code == 0);
    REQUIRE(run_cli(base + b.string()).code == 0);
    CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));

    // The wall clock is the single nondeterministic summary field.
    ordered_json sa = load_json(a / "summary.json");
    ordered_json sb = load_json(b / "summary.json");
    sa.erase("wall_time_seconds");
    sb.erase("wall_time_seconds");
    CHECK(sa == sb);
}

TEST_CASE("argument errors use the validation exit code") {
    CHECK(run_cli("").code == 1);
    CHECK(run_cli("simulate").code == 1);
    CHECK(run_cli("simulate --scenario missing.json").code == 1);  // --out required
    CHECK(run_cli("frobnicate").code == 1);
    const fs::path out = fresh_dir();
    CHECK(run_cli("simulate --scenario /nonexistent/path.json --out " + out.string()).code == 1);
}
