#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "satstab/problem_io.hpp"
#include "satstab/svg.hpp"
#include "test_helpers.hpp"

using namespace satstab;
using satstab::testing::example_gain;
using satstab::testing::example_plant;

namespace {

io::json minimal_problem() {
    io::json j;
    j["plant"] = {{"A", {{-0.8, -0.01}, {1.0, 0.1}}},
                  {"B", {{0.4}, {0.1}}},
                  {"ubar", {1.0}},
                  {"partition", {1, 1}},
                  {"T2", {0.3, 0.7}}};
    return j;
}

certify::PipelineResult analyzed_example() {
    static certify::PipelineResult cached = [] {
        certify::GridSpec g;
        g.sigma_lists = {{3.8}, {2.3}};
        return certify::analyze(example_plant(), example_gain(), g);
    }();
    return cached;
}

}  // namespace

TEST_CASE("problem parsing fills defaults") {
    const io::ProblemFile pf = io::parse_problem(minimal_problem());
    CHECK(pf.plant.A(0, 0) == -0.8);
    CHECK(pf.plant.B(0, 0) == 0.4);
    CHECK(pf.plant.ubar == Vector{1.0});
    CHECK(pf.plant.T2 == Vector{0.3, 0.7});
    // T1 default: max(0.05 T2, 0.05) capped at T2
    CHECK(pf.plant.T1 == Vector{0.05, 0.05});
    // default grids injected
    CHECK(pf.grids.alphas.size() == 6);
    REQUIRE(pf.grids.sigma_lists.size() == 2);
    CHECK(pf.grids.sigma_lists[0].size() == 8);
    CHECK(pf.weights.rho1 == 1.0);
    CHECK(pf.output.dir == ".");
}

TEST_CASE("problem validation names the failing field") {
    io::json bad = minimal_problem();
    bad["plant"]["partition"] = {1, 2};
    try {
        io::parse_problem(bad);
        FAIL("expected a validation error");
    } catch (const io::ValidationError& e) {
        CHECK(e.field() == "partition");
    }

    io::json noT2 = minimal_problem();
    noT2["plant"].erase("T2");
    CHECK_THROWS_AS(io::parse_problem(noT2), io::ValidationError);

    io::json badsigma = minimal_problem();
    badsigma["grids"] = {{"sigma", {{1.0}}}};  // one list for two channels
    CHECK_THROWS_AS(io::parse_problem(badsigma), io::ValidationError);
}

TEST_CASE("initial conditions accept controller-state or error coordinates") {
    io::json j = minimal_problem();
    j["simulation"] = {{"initial_conditions",
                        {{{"label", "ctrl"}, {"xp", {2.0, -8.0}}, {"eta", {-1.8, -5.7}}},
                         {{"label", "err"}, {"xp", {2.0, -8.0}}, {"eta_tilde", {3.8, -2.3}}},
                         {{"xp", {1.0, 1.0}}}}}};
    const io::ProblemFile pf = io::parse_problem(j);
    REQUIRE(pf.simulation.initial_conditions.size() == 3);
    CHECK(pf.simulation.initial_conditions[0].eta_tilde == Vector{3.8, -2.3});
    CHECK(pf.simulation.initial_conditions[1].eta_tilde == Vector{3.8, -2.3});
    // default controller state is zero: error equals the plant state
    CHECK(pf.simulation.initial_conditions[2].eta_tilde == Vector{1.0, 1.0});
    // default timers start at T2
    CHECK(pf.simulation.initial_conditions[0].tau == Vector{0.3, 0.7});
}

TEST_CASE("the bundled example problem file loads") {
    const io::ProblemFile pf = io::load_problem(std::string(SATSTAB_PROBLEMS_DIR) +
                                                "/example_sec5.json");
    CHECK(pf.plant.A(1, 0) == 1.0);
    CHECK(pf.plant.T2 == Vector{0.3, 0.7});
    CHECK(pf.simulation.initial_conditions.size() == 6);
    CHECK(pf.simulation.schedule.mode == sim::SamplingSchedule::Mode::sinusoidal);
    CHECK(pf.grids.sigma_lists.size() == 2);
}

TEST_CASE("certificate JSON round trips through verification") {
    const lmi::PlantModel plant = example_plant();
    const certify::PipelineResult r = analyzed_example();
    REQUIRE(r.found);

    const io::json j = io::pipeline_to_json(r);
    const io::LoadedCertificate back = io::parse_certificate(j);
    REQUIRE(back.certificate.has_value());
    CHECK((back.K - r.certificate.K).max_abs() == 0.0);
    CHECK((back.certificate->W - r.certificate.W).max_abs() == 0.0);
    CHECK(back.certificate->mu_bar == r.certificate.mu_bar);
    CHECK(certify::verify_certificate(plant, *back.certificate, 1e-7).pass);

    // byte-identical re-serialization
    CHECK(io::pipeline_to_json(r).dump(2) == j.dump(2));
    CHECK(io::certificate_to_json(*back.certificate).dump(2) ==
          io::certificate_to_json(r.certificate).dump(2));
}

TEST_CASE("bare gain files load without a certificate") {
    io::json j;
    j["K"] = {{"rows", 1}, {"cols", 2}, {"data", {-0.444, -0.495}}};
    const io::LoadedCertificate lc = io::parse_certificate(j);
    CHECK_FALSE(lc.certificate.has_value());
    CHECK(lc.K(0, 1) == -0.495);
}

TEST_CASE("trajectory CSV schema") {
    const lmi::PlantModel plant = example_plant();
    sim::HybridState x0{{1.0, 1.0}, {1.0, 1.0}, {0.3, 0.7}};
    sim::Horizon hz;
    hz.t_max = 1.0;
    const sim::HybridTrajectory tr =
        sim::simulate(x0, plant, example_gain(), sim::SamplingSchedule::uniform(5), hz);

    std::ostringstream os;
    io::write_trajectory_csv(os, plant, tr);
    std::istringstream is(os.str());
    std::string header;
    REQUIRE(std::getline(is, header));
    CHECK(header == "t,j,xp_1,xp_2,etat_1,etat_2,tau_1,tau_2,V,u_1");

    // column count = 2 + 2n + q + 1 + m on every row
    const int expected_cols = 2 + 2 * plant.n() + plant.q() + 1 + plant.m();
    std::string line;
    int rows = 0;
    int jump_pairs = 0;
    std::string prev;
    while (std::getline(is, line)) {
        const int commas = static_cast<int>(std::count(line.begin(), line.end(), ','));
        CHECK(commas == expected_cols - 1);
        ++rows;
    }
    CHECK(rows == static_cast<int>(tr.samples.size()));

    // jump instants appear twice with the same t and incremented j
    for (std::size_t k = 0; k + 1 < tr.samples.size(); ++k)
        if (tr.samples[k + 1].j == tr.samples[k].j + 1) {
            CHECK(tr.samples[k + 1].t == tr.samples[k].t);
            ++jump_pairs;
        }
    CHECK(jump_pairs >= 2);

    // determinism: identical run, identical bytes
    const sim::HybridTrajectory tr2 =
        sim::simulate(x0, plant, example_gain(), sim::SamplingSchedule::uniform(5), hz);
    std::ostringstream os2;
    io::write_trajectory_csv(os2, plant, tr2);
    CHECK(os.str() == os2.str());
}

TEST_CASE("ellipse geometry matches the eigen axes") {
    const Matrix N = Matrix::from_rows({{0.1424, 0.0788}, {0.0788, 0.1280}});
    const double mu = 2.66;
    const auto pts = svg::ellipse_points(N, mu);
    REQUIRE(pts.size() == 129);
    // all points lie on the level set
    for (const auto& p : pts) {
        const double v = N(0, 0) * p.x * p.x + 2 * N(0, 1) * p.x * p.y + N(1, 1) * p.y * p.y;
        CHECK(v == Catch::Approx(mu).epsilon(1e-9));
    }
    // extreme radius equals the smallest-eigenvalue axis
    const EigResult e = sym_eig(SymMatrix::from(N, 1e-9));
    double rmax = 0.0;
    for (const auto& p : pts)
        rmax = std::max(rmax, std::hypot(p.x, p.y));
    CHECK(rmax == Catch::Approx(std::sqrt(mu / e.values.back())).epsilon(1e-3));
}

TEST_CASE("svg writers produce deterministic documents") {
    const lmi::PlantModel plant = example_plant();
    const certify::PipelineResult r = analyzed_example();
    REQUIRE(r.found);
    const certify::BasinEstimate basin = certify::basin_sets(plant, r.certificate);

    sim::HybridState x0{{-2.0, 5.0}, {-2.0, 5.0}, {0.3, 0.7}};
    sim::Horizon hz;
    hz.t_max = 5.0;
    const sim::HybridTrajectory tr =
        sim::simulate(x0, plant, example_gain(), sim::SamplingSchedule::sinusoidal(10.0), hz);

    std::ostringstream a, b;
    svg::write_phase_plane(a, basin, {tr});
    svg::write_phase_plane(b, basin, {tr});
    CHECK(a.str() == b.str());
    CHECK(a.str().find("<svg") != std::string::npos);
    CHECK(a.str().find("polyline") != std::string::npos);

    // ellipse-only plot works with no trajectories
    std::ostringstream c;
    svg::write_phase_plane(c, basin, {});
    CHECK(c.str().find("polyline") != std::string::npos);

    std::ostringstream d;
    svg::write_input_series(d, plant.ubar, {tr});
    CHECK(d.str().find("stroke-dasharray") != std::string::npos);
}
