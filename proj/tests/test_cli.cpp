#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int run(const std::string& cmd) {
    const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

std::string bin() { return SATSTAB_BIN; }
std::string problems() { return SATSTAB_PROBLEMS_DIR; }

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("satstab_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int counter() {
        static int c = 0;
        return ++c;
    }
};

// a one-point grid keeps the CLI round trips fast
void write_quick_problem(const fs::path& to) {
    std::ifstream in(problems() + "/example_sec5.json");
    nlohmann::json j = nlohmann::json::parse(in);
    j["grids"] = {{"alpha", {0.4}}, {"sigma", {{1.8}, {2.3}}}};
    std::ofstream out(to);
    out << j.dump(2);
}

}  // namespace

TEST_CASE("synthesize / verify / simulate round trip") {
    TempDir tmp;
    const fs::path prob = tmp.path / "problem.json";
    write_quick_problem(prob);
    const std::string out = (tmp.path / "out").string();

    REQUIRE(run(bin() + " synthesize -p " + prob.string() + " -o " + out) == 0);
    REQUIRE(fs::exists(out + "/certificate.json"));
    REQUIRE(fs::exists(out + "/grid_log.json"));

    {
        std::ifstream in(out + "/certificate.json");
        nlohmann::json cert = nlohmann::json::parse(in);
        CHECK(cert["mode"] == "design");
        CHECK(cert["K"]["rows"] == 1);
        CHECK(cert["K"]["cols"] == 2);
    }

    CHECK(run(bin() + " verify -c " + out + "/certificate.json -p " + prob.string() +
              " --tol 1e-7 -o " + out) == 0);
    CHECK(fs::exists(out + "/verify_report.json"));

    CHECK(run(bin() + " simulate -c " + out + "/certificate.json -p " + prob.string() +
              " --schedule sinusoidal:10 --seed 42 -o " + out) == 0);
    CHECK(fs::exists(out + "/traj_a.csv"));
    CHECK(fs::exists(out + "/traj_xi2.csv"));
    CHECK(fs::exists(out + "/monitor_report.json"));
    CHECK(fs::exists(out + "/phase_plane.svg"));
    CHECK(fs::exists(out + "/input_timeseries.svg"));

    // six initial conditions, six CSV files
    int csvs = 0;
    for (const auto& e : fs::directory_iterator(out))
        if (e.path().extension() == ".csv")
            ++csvs;
    CHECK(csvs == 6);
}

TEST_CASE("analyze accepts a certificate or a bare gain") {
    TempDir tmp;
    const fs::path prob = tmp.path / "problem.json";
    write_quick_problem(prob);
    const std::string out = (tmp.path / "out").string();
    REQUIRE(run(bin() + " synthesize -p " + prob.string() + " -o " + out) == 0);

    const std::string ref = (tmp.path / "refined").string();
    REQUIRE(run(bin() + " analyze -p " + prob.string() + " -K " + out +
                "/certificate.json -o " + ref) == 0);
    REQUIRE(fs::exists(ref + "/certificate.json"));
    {
        std::ifstream in(ref + "/certificate.json");
        nlohmann::json cert = nlohmann::json::parse(in);
        CHECK(cert["mode"] == "analysis");
    }
    CHECK(run(bin() + " verify -c " + ref + "/certificate.json -p " + prob.string() + " -o " +
              ref) == 0);

    // bare gain file drives analysis and (unmonitored) simulation
    nlohmann::json gain;
    gain["K"] = {{"rows", 1}, {"cols", 2}, {"data", {-0.444, -0.495}}};
    {
        std::ofstream o(tmp.path / "gain.json");
        o << gain.dump(2);
    }
    const std::string out2 = (tmp.path / "bare").string();
    REQUIRE(run(bin() + " analyze -p " + prob.string() + " -K " +
                (tmp.path / "gain.json").string() + " -o " + out2) == 0);
    REQUIRE(run(bin() + " simulate -c " + (tmp.path / "gain.json").string() + " -p " +
                prob.string() + " --schedule constant -o " + out2) == 0);
    CHECK(fs::exists(out2 + "/traj_a.csv"));
    CHECK_FALSE(fs::exists(out2 + "/monitor_report.json"));  // no certificate
    CHECK_FALSE(fs::exists(out2 + "/phase_plane.svg"));      // no ellipse without one
    CHECK(fs::exists(out2 + "/input_timeseries.svg"));
}

TEST_CASE("three-state plants fall back to the time-series plot") {
    TempDir tmp;
    nlohmann::json j;
    j["plant"] = {{"A", {{-1.0, 0.1, 0.0}, {0.0, -1.5, 0.1}, {0.1, 0.0, -2.0}}},
                  {"B", {{0.5}, {0.0}, {0.2}}},
                  {"ubar", {1.0}},
                  {"partition", {2, 1}},
                  {"T2", {0.3, 0.5}}};
    j["grids"] = {{"alpha", {0.4}}, {"sigma", {{1.0}, {1.0}}}};
    j["simulation"] = {{"t_max", 5.0},
                       {"initial_conditions", {{{"label", "s"}, {"xp", {1.0, -1.0, 0.5}}}}}};
    const fs::path prob = tmp.path / "p3.json";
    {
        std::ofstream o(prob);
        o << j.dump(2);
    }
    const std::string out = (tmp.path / "out").string();
    REQUIRE(run(bin() + " synthesize -p " + prob.string() + " -o " + out) == 0);
    REQUIRE(run(bin() + " simulate -c " + out + "/certificate.json -p " + prob.string() +
                " -o " + out) == 0);
    CHECK(fs::exists(out + "/traj_s.csv"));
    CHECK_FALSE(fs::exists(out + "/phase_plane.svg"));
    CHECK(fs::exists(out + "/input_timeseries.svg"));
}

TEST_CASE("tampered certificates fail verification with a nonzero exit") {
    TempDir tmp;
    const fs::path prob = tmp.path / "problem.json";
    write_quick_problem(prob);
    const std::string out = (tmp.path / "out").string();
    REQUIRE(run(bin() + " synthesize -p " + prob.string() + " -o " + out) == 0);

    nlohmann::json cert;
    {
        std::ifstream in(out + "/certificate.json");
        cert = nlohmann::json::parse(in);
    }
    for (auto& s : cert["S"])
        s = -s.get<double>();
    {
        std::ofstream o(tmp.path / "tampered.json");
        o << cert.dump(2);
    }
    CHECK(run(bin() + " verify -c " + (tmp.path / "tampered.json").string() + " -p " +
              prob.string() + " -o " + out) == 2);
}

TEST_CASE("validation failures exit with code 3 and an error record") {
    TempDir tmp;
    std::ifstream in(problems() + "/example_sec5.json");
    nlohmann::json j = nlohmann::json::parse(in);
    j["plant"]["partition"] = {1, 2};
    const fs::path prob = tmp.path / "bad.json";
    {
        std::ofstream o(prob);
        o << j.dump(2);
    }
    CHECK(run(bin() + " synthesize -p " + prob.string() + " -o " + tmp.path.string()) == 3);
    CHECK(fs::exists(tmp.path / "error.json"));
}

TEST_CASE("infeasible problems exit with code 2") {
    TempDir tmp;
    nlohmann::json j;
    j["plant"] = {{"A", {{1.0, 0.0}, {0.0, 1.0}}},
                  {"B", {{0.0}, {0.0}}},
                  {"ubar", {1.0}},
                  {"partition", {1, 1}},
                  {"T2", {0.3, 0.7}}};
    j["grids"] = {{"alpha", {0.4}}, {"sigma", {{1.0}, {1.0}}}};
    const fs::path prob = tmp.path / "unstable.json";
    {
        std::ofstream o(prob);
        o << j.dump(2);
    }
    CHECK(run(bin() + " synthesize -p " + prob.string() + " -o " + tmp.path.string()) == 2);
    CHECK(fs::exists(tmp.path / "grid_log.json"));
}

TEST_CASE("identical inputs and seed give byte-identical artifacts") {
    TempDir tmp;
    const fs::path prob = tmp.path / "problem.json";
    write_quick_problem(prob);
    const std::string out1 = (tmp.path / "o1").string();
    const std::string out2 = (tmp.path / "o2").string();
    REQUIRE(run(bin() + " synthesize -p " + prob.string() + " -o " + out1) == 0);
    REQUIRE(run(bin() + " synthesize -p " + prob.string() + " -o " + out2) == 0);

    auto slurp = [](const std::string& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    CHECK(slurp(out1 + "/certificate.json") == slurp(out2 + "/certificate.json"));

    REQUIRE(run(bin() + " simulate -c " + out1 + "/certificate.json -p " + prob.string() +
                " --schedule uniform --seed 7 -o " + out1) == 0);
    REQUIRE(run(bin() + " simulate -c " + out2 + "/certificate.json -p " + prob.string() +
                " --schedule uniform --seed 7 -o " + out2) == 0);
    CHECK(slurp(out1 + "/traj_xi2.csv") == slurp(out2 + "/traj_xi2.csv"));
    CHECK(slurp(out1 + "/phase_plane.svg") == slurp(out2 + "/phase_plane.svg"));
}

TEST_CASE("sdp triplet dump is written on request") {
    TempDir tmp;
    const fs::path prob = tmp.path / "problem.json";
    write_quick_problem(prob);
    const std::string out = (tmp.path / "out").string();
    const std::string dump = (tmp.path / "problem.sdp").string();
    REQUIRE(run(bin() + " synthesize -p " + prob.string() + " -o " + out + " --dump-sdp " +
                dump) == 0);
    std::ifstream in(dump);
    REQUIRE(in.good());
    int lines = 0;
    std::string line;
    while (std::getline(in, line))
        ++lines;
    CHECK(lines > 50);
}
