// Acceptance suite: one check per numbered criterion, each printed as a
// single PASS/FAIL line (with indented detail). Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "satstab/certify.hpp"
#include "satstab/hybrid_sim.hpp"
#include "satstab/lmi.hpp"
#include "satstab/sdp.hpp"
#include "test_helpers.hpp"

using namespace satstab;
using namespace satstab::certify;
using satstab::testing::example_gain;
using satstab::testing::example_plant;

namespace {

int failures = 0;

void report(int criterion, const std::string& what, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str());
    if (!detail.empty())
        std::printf("        %s\n", detail.c_str());
    if (!pass)
        ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

sim::HybridTrajectory run_from(const lmi::PlantModel& plant, const Matrix& K, Vector xp,
                               Vector etat, sim::SamplingSchedule sched, double t_max,
                               const sim::LyapunovWeights* w = nullptr) {
    sim::HybridState x0{std::move(xp), std::move(etat), plant.T2};
    sim::Horizon hz;
    hz.t_max = t_max;
    return sim::simulate(x0, plant, K, std::move(sched), hz, {}, w);
}

bool enters_ball(const sim::HybridTrajectory& tr, double radius) {
    for (const auto& s : tr.samples)
        if (norm2(s.state.xp) <= radius)
            return true;
    return false;
}

}  // namespace

// --------------------------------------------------------------- criterion 1
// Synthesis on the worked example: grid containing (1.8, 2.3, 0.4); the
// returned gain is compared componentwise against the published value.
static PipelineResult criterion1(const lmi::PlantModel& plant) {
    const auto t0 = std::chrono::steady_clock::now();
    GridSpec grid;
    grid.alphas = {0.2, 0.4, 0.8};
    grid.sigma_lists = {{1.3, 1.8, 2.3}, {1.8, 2.3, 2.8}};
    const PipelineResult r = synthesize(plant, grid);
    const double elapsed = seconds_since(t0);

    bool pass = r.found && elapsed < 60.0;
    std::string detail;
    if (r.found) {
        const Matrix Kp = example_gain();
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "returned K = [%.4f %.4f], published [-0.444 -0.495], %.1f s",
                      r.certificate.K(0, 0), r.certificate.K(0, 1), elapsed);
        detail = buf;
        for (int j = 0; j < 2; ++j)
            pass = pass &&
                   std::abs(r.certificate.K(0, j) - Kp(0, j)) <= 0.10 * std::abs(Kp(0, j));
    } else {
        detail = "no certificate found";
    }
    report(1, "synthesis reproduces the published gain within 10%", pass, detail);
    return r;
}

// --------------------------------------------------------------- criterion 2
static PipelineResult criterion2(const lmi::PlantModel& plant) {
    GridSpec grid;
    grid.sigma_lists = {{3.8}, {2.3}};
    const PipelineResult a = analyze(plant, example_gain(), grid);
    if (!a.found) {
        report(2, "analysis stage reproduces the published basin", false,
               "analysis infeasible");
        return a;
    }
    const StabilityCertificate& cert = a.certificate;
    const Matrix Winv = spd_inverse(cert.W);
    const Matrix ref = Matrix::from_rows({{0.0983, 0.0788}, {0.0788, 0.0694}});

    const bool mu_ok = cert.mu_bar >= 2.0;
    bool w_ok = true;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            w_ok = w_ok && std::abs(Winv(i, j) - ref(i, j)) <= 0.25 * std::abs(ref(i, j));

    const BasinEstimate basin = basin_sets(plant, cert);
    const Vector inside_pt{-2.0, 5.0};
    const Vector outside_pt{2.0, -8.0};
    const bool bxp_in_ok = quadratic_form(basin.N, inside_pt) <= basin.mu_bar;
    const bool bxp_out_ok = quadratic_form(basin.N, outside_pt) > basin.mu_bar;

    // xi2 in controller-state coordinates: eta(0) = (-1.8, -5.7)
    const Vector xi2{2.0, -8.0, 3.8, -2.3};
    const bool xi2_ok = membership(plant, cert, xi2);

    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "mu=%.3f(>=2 %s) W^-1 within 25%% %s; (-2,5) in Bxp %s; (2,-8) outside %s; "
                  "xi2 in E(Phat(tau*),mu) %s",
                  cert.mu_bar, mu_ok ? "ok" : "FAIL", w_ok ? "ok" : "FAIL",
                  bxp_in_ok ? "ok" : "FAIL", bxp_out_ok ? "ok" : "FAIL",
                  xi2_ok ? "ok" : "FAIL");
    report(2, "analysis stage reproduces the published basin",
           mu_ok && w_ok && bxp_in_ok && bxp_out_ok && xi2_ok, buf);
    return a;
}

// --------------------------------------------------------------- criterion 3
static void criterion3(const lmi::PlantModel& plant, const PipelineResult& ana) {
    const Matrix K = example_gain();
    const sim::LyapunovWeights w = sim::lyapunov_weights(plant, ana.certificate);

    bool conv_ok = true, monitor_ok = true, runtime_ok = true, xi1_ok = true;
    double worst_final = 0.0;
    const std::vector<sim::SamplingSchedule> schedules{
        sim::SamplingSchedule::constant(), sim::SamplingSchedule::uniform(42),
        sim::SamplingSchedule::sinusoidal(10.0)};
    for (const auto& sched : schedules) {
        const auto t0 = std::chrono::steady_clock::now();
        const sim::HybridTrajectory tr = run_from(plant, K, {2, -8}, {3.8, -2.3}, sched, 40.0, &w);
        runtime_ok = runtime_ok && seconds_since(t0) < 10.0;
        conv_ok = conv_ok && enters_ball(tr, 1e-3);
        worst_final = std::max(worst_final, norm2(tr.samples.back().state.xp));
        const sim::MonitorReport rep = sim::monitor(tr, plant, ana.certificate);
        monitor_ok = monitor_ok && rep.clean();
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        const sim::HybridTrajectory tr = run_from(plant, K, {2, -8}, {2, -8},
                                                  sim::SamplingSchedule::sinusoidal(10.0), 40.0);
        runtime_ok = runtime_ok && seconds_since(t0) < 10.0;
        xi1_ok = !enters_ball(tr, 1e-3);
    }

    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "xi2 reaches |xp|<=1e-3 by t=40: %s (final |xp| up to %.3g); monitor clean "
                  "%s; xi1 never enters %s; runtime %s",
                  conv_ok ? "ok" : "FAIL", worst_final, monitor_ok ? "ok" : "FAIL",
                  xi1_ok ? "ok" : "FAIL", runtime_ok ? "ok" : "FAIL");
    report(3, "simulation reproduces the published convergence claims",
           conv_ok && monitor_ok && xi1_ok && runtime_ok, buf);
}

// --------------------------------------------------------------- criterion 4
static void criterion4(const lmi::PlantModel& plant, const PipelineResult& ana) {
    const StabilityCertificate& cert = ana.certificate;
    const Matrix Winv = spd_inverse(cert.W);
    Matrix L(plant.m(), 2 * plant.n());
    const Matrix ZWinv = cert.Z * Winv;
    for (int i = 0; i < plant.m(); ++i)
        for (int k = 0; k < plant.n(); ++k) {
            L(i, k) = ZWinv(i, k);
            L(i, plant.n() + k) = cert.J(i, k);
        }

    std::mt19937_64 rng(20260809);
    std::uniform_real_distribution<double> t1(0.0, plant.T2[0]);
    std::uniform_real_distribution<double> t2(0.0, plant.T2[1]);
    std::uniform_real_distribution<double> uin(-5.0, 5.0);
    int violations = 0;
    double worst = -1e300;
    for (int k = 0; k < 10000; ++k) {
        const Vector tau{t1(rng), t2(rng)};
        const SymMatrix P = SymMatrix::from(p_hat(cert, plant, tau), 1e-9);
        const Vector xbar = testing::sample_ellipsoid(rng, P, cert.mu_bar);
        const Vector u{uin(rng)};
        const Vector dz = sim::deadzone(u, plant.ubar);
        const Vector Lx = L * xbar;
        double lhs = 0.0;
        for (int i = 0; i < plant.m(); ++i)
            lhs += dz[i] / cert.S[i] * (dz[i] + u[i] + Lx[i]);
        worst = std::max(worst, lhs);
        if (lhs > 1e-9)
            ++violations;
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "10^4 samples, violations=%d, worst lhs=%.3e", violations,
                  worst);
    report(4, "generalized sector condition holds on the certified region", violations == 0,
           buf);
}

// --------------------------------------------------------------- criterion 5
static void criterion5() {
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<int> pick_n(2, 4);
    std::uniform_int_distribution<int> pick_q(1, 2);
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    std::uniform_real_distribution<double> sig(0.5, 3.0);
    std::uniform_real_distribution<double> t2d(0.2, 0.8);
    std::uniform_real_distribution<double> unif01(0.0, 1.0);

    int found = 0, attempts = 0, interior_failures = 0;
    while (found < 50 && attempts < 200) {
        ++attempts;
        lmi::PlantModel plant;
        const int n = pick_n(rng);
        const int q = std::min(pick_q(rng), n);
        plant.A = testing::random_matrix(rng, n, n, 1.0);
        const double shift = plant.A.frobenius_norm() + 0.3;
        for (int i = 0; i < n; ++i)
            plant.A(i, i) -= shift;  // strictly Hurwitz by Gershgorin
        plant.B = testing::random_matrix(rng, n, 1, 1.0);
        plant.ubar = {1.0};
        plant.partition.assign(q, 1);
        plant.partition.back() = n - (q - 1);
        plant.T1.assign(q, 0.1);
        plant.T2.clear();
        Vector sigma;
        for (int i = 0; i < q; ++i) {
            plant.T2.push_back(t2d(rng));
            sigma.push_back(sig(rng));
        }
        const Matrix K(1, n);

        sdp::SdpSolution sol;
        try {
            const sdp::SdpProblem prob =
                lmi::assemble(plant, lmi::Mode::analysis, K, sigma, 0.0, {1.0, 1.0});
            sol = sdp::solve(prob);
        } catch (const std::exception&) {
            continue;
        }
        if (sol.status != sdp::SolveStatus::optimal &&
            sol.status != sdp::SolveStatus::feasible)
            continue;
        ++found;

        const lmi::VarMap vm(plant, lmi::Mode::analysis);
        const lmi::LmiValues vals = vm.unpack(sol.y);
        for (int trial = 0; trial < 100; ++trial) {
            Vector tau(q);
            for (int i = 0; i < q; ++i)
                tau[i] = unif01(rng) * plant.T2[i];
            const Matrix theta = lmi::theta_of_tau(sigma, tau, plant.partition);
            const Matrix blk = lmi::analysis_block(plant, K, vals, sigma, theta);
            if (!(lambda_max_of(blk) < -1e-9))
                ++interior_failures;
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "%d instances from %d draws, interior failures=%d", found,
                  attempts, interior_failures);
    report(5, "vertex conditions imply the interior clock conditions",
           found == 50 && interior_failures == 0, buf);
}

// --------------------------------------------------------------- criterion 6
static void criterion6(const lmi::PlantModel& plant, const PipelineResult& ana) {
    const Matrix K = example_gain();
    const sim::LyapunovWeights w = sim::lyapunov_weights(plant, ana.certificate);

    const std::vector<std::pair<Vector, Vector>> starts{
        {{0.4, 4.2}, {0.4, 4.2}},  {{2.5, -2.5}, {2.5, -2.5}}, {{-8, 2}, {-8, 2}},
        {{-6, 5}, {-6, 5}},        {{-2, 5}, {-2, 5}},         {{2, -8}, {3.8, -2.3}},
        {{2, -8}, {2, -8}}};
    int trajectories = 0, jump_checks = 0, flow_checks = 0, bad = 0;
    for (int mode = 0; mode < 3; ++mode) {
        for (const auto& [xp, etat] : starts) {
            sim::SamplingSchedule sched =
                mode == 0   ? sim::SamplingSchedule::constant()
                : mode == 1 ? sim::SamplingSchedule::uniform(1000 + trajectories)
                            : sim::SamplingSchedule::sinusoidal(10.0);
            const sim::HybridTrajectory tr = run_from(plant, K, xp, etat, sched, 20.0, &w);
            const sim::MonitorReport rep = sim::monitor(tr, plant, ana.certificate);
            ++trajectories;
            jump_checks += rep.jump_checks;
            flow_checks += rep.flow_checks;
            for (const auto& v : rep.violations)
                if (v.kind == "jump_increase" || v.kind == "flow_decay")
                    ++bad;
        }
    }
    char buf[140];
    std::snprintf(buf, sizeof(buf),
                  "%d trajectories, %d jump checks, %d in-region flow checks, violations=%d",
                  trajectories, jump_checks, flow_checks, bad);
    report(6, "Lyapunov value never increases at jumps and decays in the region",
           trajectories >= 20 && bad == 0 && jump_checks > 0 && flow_checks > 0, buf);
}

// --------------------------------------------------------------- criterion 7
static void criterion7() {
    bool ok = true;
    std::string detail;

    {  // min trace(X) s.t. X >= I2
        sdp::SdpProblem p;
        p.nvars = 3;
        p.objective = {1.0, 0.0, 1.0};
        sdp::ConstraintBlock blk;
        blk.dim = 2;
        blk.F0 = -1.0 * Matrix::identity(2);
        Matrix e00(2, 2), e01(2, 2), e11(2, 2);
        e00(0, 0) = 1;
        e01(0, 1) = e01(1, 0) = 1;
        e11(1, 1) = 1;
        blk.terms = {{0, e00}, {1, e01}, {2, e11}};
        p.constraints.push_back(blk);
        const sdp::SdpSolution sol = sdp::solve(p);
        if (sol.status != sdp::SolveStatus::optimal ||
            std::abs(sol.objective_value - 2.0) > 1e-6) {
            ok = false;
            detail += "trace-vs-identity failed; ";
        }

        sdp::SdpProblem q = p;  // add -X >= 0: infeasible
        sdp::ConstraintBlock neg = blk;
        neg.F0 = Matrix(2, 2);
        for (auto& [k, F] : neg.terms)
            F = -1.0 * F;
        q.constraints.push_back(neg);
        q.objective = {0, 0, 0};
        if (sdp::solve(q).status != sdp::SolveStatus::infeasible) {
            ok = false;
            detail += "contradiction not reported infeasible; ";
        }
    }

    {  // max t s.t. tI <= M over 100 random symmetric M
        std::mt19937_64 rng(101);
        std::uniform_int_distribution<int> dims(2, 8);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const SymMatrix M = testing::random_symmetric(rng, dims(rng), 4.0);
            sdp::SdpProblem p;
            p.nvars = 1;
            p.objective = {-1.0};
            sdp::ConstraintBlock blk;
            blk.dim = M.dim();
            blk.F0 = M.mat();
            blk.terms.emplace_back(0, -1.0 * Matrix::identity(M.dim()));
            p.constraints.push_back(blk);
            const sdp::SdpSolution sol = sdp::solve(p);
            if (sol.status != sdp::SolveStatus::optimal) {
                ok = false;
                detail += "lambda_min family solve failure; ";
                break;
            }
            worst = std::max(worst, std::abs(sol.y[0] - lambda_min(M)));
        }
        if (worst > 1e-6) {
            ok = false;
            detail += "lambda_min mismatch " + std::to_string(worst) + "; ";
        }
    }
    report(7, "analytic solver families solve to 1e-6", ok,
           detail.empty() ? "trace, lambda_min x100, infeasibility" : detail);
}

// --------------------------------------------------------------- criterion 8
static void criterion8(const lmi::PlantModel& plant) {
    // a certificate with a wider interior margin gives a nondegenerate decay
    // rate for the envelope property
    GridSpec grid;
    grid.sigma_lists = {{3.8}, {2.3}};
    PipelineOptions opts;
    opts.assembly.strict_margin = 1e-3;
    const PipelineResult ana = analyze(plant, example_gain(), grid, {}, opts);
    if (!ana.found) {
        report(8, "decay envelope holds for in-region starts", false, "analysis infeasible");
        return;
    }
    DecayCertificate decay;
    try {
        decay = decay_certificate(plant, ana.certificate);
    } catch (const std::exception& e) {
        report(8, "decay envelope holds for in-region starts", false, e.what());
        return;
    }

    const sim::LyapunovWeights w = sim::lyapunov_weights(plant, ana.certificate);
    const SymMatrix Pstar =
        SymMatrix::from(p_hat(ana.certificate, plant, plant.T2), 1e-9);
    std::mt19937_64 rng(31415);
    int envelope_checks = 0, violations = 0;
    for (int k = 0; k < 10; ++k) {
        const Vector xbar = testing::sample_ellipsoid(rng, Pstar, ana.certificate.mu_bar);
        const Vector xp(xbar.begin(), xbar.begin() + plant.n());
        const Vector etat(xbar.begin() + plant.n(), xbar.end());
        const sim::HybridTrajectory tr = run_from(plant, example_gain(), xp, etat,
                                                  sim::SamplingSchedule::uniform(k), 40.0, &w);
        const sim::MonitorReport rep = sim::monitor(tr, plant, ana.certificate, decay);
        envelope_checks += rep.envelope_checks;
        if (!rep.in_region_start)
            ++violations;  // sampled inside E(Phat(tau*), mu) must be in-region
        for (const auto& v : rep.violations)
            if (v.kind == "envelope")
                ++violations;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "kappa=%.3g lambda=%.3g, %d envelope checks, violations=%d", decay.kappa,
                  decay.lambda, envelope_checks, violations);
    report(8, "decay envelope holds for in-region starts",
           violations == 0 && envelope_checks > 0, buf);
}

int main() {
    const lmi::PlantModel plant = example_plant();
    std::printf("acceptance suite: worked-example plant, %d criteria\n\n", 8);

    criterion1(plant);
    const PipelineResult ana = criterion2(plant);
    if (ana.found) {
        criterion3(plant, ana);
        criterion4(plant, ana);
    } else {
        report(3, "simulation reproduces the published convergence claims", false,
               "skipped: analysis unavailable");
        report(4, "generalized sector condition holds on the certified region", false,
               "skipped: analysis unavailable");
    }
    criterion5();
    if (ana.found)
        criterion6(plant, ana);
    else
        report(6, "Lyapunov value never increases at jumps and decays in the region", false,
               "skipped: analysis unavailable");
    criterion7();
    criterion8(plant);

    std::printf("\n%d of 8 criteria failed\n", failures);
    return failures;
}
