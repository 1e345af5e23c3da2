// satstab: design and certify saturating state-feedback gains under
// multi-rate asynchronous sampling.
//
// Subcommands
//   synthesize  grid search over (sigma, alpha), writes certificate + grid log
//   analyze     basin refinement for a given gain (free J), writes certificate
//   verify      re-assembles every matrix-inequality block of a certificate
//   simulate    exact closed-loop runs with monitoring, CSV + SVG artifacts
//
// Exit codes: 0 success, 2 infeasible / failed verification, 3 validation
// error, 4 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "satstab/certify.hpp"
#include "satstab/hybrid_sim.hpp"
#include "satstab/problem_io.hpp"
#include "satstab/svg.hpp"

namespace fs = std::filesystem;
using namespace satstab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;

void write_error_record(const std::string& dir, int code, const std::string& kind,
                        const std::string& message) {
    try {
        io::json j;
        j["exit_code"] = code;
        j["kind"] = kind;
        j["message"] = message;
        io::write_json((fs::path(dir) / "error.json").string(), j);
    } catch (...) {
        // the stderr line below still reports the failure
    }
}

struct CommonArgs {
    std::string problem_path;
    std::string outdir;
};

std::string resolve_outdir(const CommonArgs& args, const io::ProblemFile& pf) {
    std::string dir = args.outdir.empty() ? pf.output.dir : args.outdir;
    if (dir.empty())
        dir = ".";
    fs::create_directories(dir);
    return dir;
}

void dump_first_grid_point(const io::ProblemFile& pf, lmi::Mode mode, const Matrix& K,
                           const std::string& path) {
    Vector sigma(pf.plant.q());
    for (int i = 0; i < pf.plant.q(); ++i)
        sigma[i] = pf.grids.sigma_lists[i].front();
    const double alpha = mode == lmi::Mode::design ? pf.grids.alphas.front() : 0.0;
    const sdp::SdpProblem prob = lmi::assemble(pf.plant, mode, K, sigma, alpha,
                                               {pf.weights.rho1, pf.weights.rho2});
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    prob.dump_triplets(out);
}

int run_synthesize(const CommonArgs& args, const std::string& dump_sdp) {
    const io::ProblemFile pf = io::load_problem(args.problem_path);
    const std::string dir = resolve_outdir(args, pf);
    if (!dump_sdp.empty())
        dump_first_grid_point(pf, lmi::Mode::design, Matrix(), dump_sdp);

    const certify::PipelineResult r = certify::synthesize(pf.plant, pf.grids, pf.weights);
    io::write_json((fs::path(dir) / "grid_log.json").string(), io::grid_log_to_json(r));
    if (!r.found) {
        write_error_record(dir, kExitInfeasible, "infeasible", r.message);
        std::cerr << "satstab: " << r.message << '\n';
        return kExitInfeasible;
    }
    io::write_json((fs::path(dir) / "certificate.json").string(), io::pipeline_to_json(r));
    const auto& K = r.certificate.K;
    std::printf("synthesize: objective %.6g, mu_bar %.6g, K =", r.objective,
                r.certificate.mu_bar);
    for (int j = 0; j < K.cols(); ++j)
        std::printf(" %.6g", K(0, j));
    std::printf("\n  certificate: %s\n", (fs::path(dir) / "certificate.json").c_str());
    return kExitOk;
}

int run_analyze(const CommonArgs& args, const std::string& gain_path,
                const std::string& dump_sdp) {
    const io::ProblemFile pf = io::load_problem(args.problem_path);
    const std::string dir = resolve_outdir(args, pf);
    const io::LoadedCertificate in = io::load_certificate(gain_path);
    if (!dump_sdp.empty())
        dump_first_grid_point(pf, lmi::Mode::analysis, in.K, dump_sdp);

    const certify::PipelineResult r = certify::analyze(pf.plant, in.K, pf.grids, pf.weights);
    io::write_json((fs::path(dir) / "grid_log.json").string(), io::grid_log_to_json(r));
    if (!r.found) {
        write_error_record(dir, kExitInfeasible, "infeasible", r.message);
        std::cerr << "satstab: " << r.message << '\n';
        return kExitInfeasible;
    }
    io::write_json((fs::path(dir) / "certificate.json").string(), io::pipeline_to_json(r));
    std::printf("analyze: objective %.6g, mu_bar %.6g\n  certificate: %s\n", r.objective,
                r.certificate.mu_bar, (fs::path(dir) / "certificate.json").c_str());
    return kExitOk;
}

int run_verify(const CommonArgs& args, const std::string& cert_path, double tol) {
    const io::ProblemFile pf = io::load_problem(args.problem_path);
    const std::string dir = resolve_outdir(args, pf);
    const io::LoadedCertificate in = io::load_certificate(cert_path);
    if (!in.certificate)
        throw io::ValidationError("certificate", "verify needs a full certificate file");

    const certify::VerifyReport rep = certify::verify_certificate(pf.plant, *in.certificate, tol);
    io::print_verify_report(std::cout, rep);
    io::write_json((fs::path(dir) / "verify_report.json").string(),
                   io::verify_report_to_json(rep));
    if (!rep.pass) {
        write_error_record(dir, kExitInfeasible, "verification_failed",
                           "certificate failed the eigenvalue checks");
        return kExitInfeasible;
    }
    return kExitOk;
}

int run_simulate(const CommonArgs& args, const std::string& cert_path,
                 const std::string& schedule_arg, std::optional<std::uint64_t> seed) {
    io::ProblemFile pf = io::load_problem(args.problem_path);
    const std::string dir = resolve_outdir(args, pf);
    const io::LoadedCertificate in = io::load_certificate(cert_path);

    if (!schedule_arg.empty()) {
        const auto colon = schedule_arg.find(':');
        const std::string mode = schedule_arg.substr(0, colon);
        const std::string param =
            colon == std::string::npos ? "" : schedule_arg.substr(colon + 1);
        if (mode == "constant")
            pf.simulation.schedule.mode = sim::SamplingSchedule::Mode::constant_T2;
        else if (mode == "uniform")
            pf.simulation.schedule.mode = sim::SamplingSchedule::Mode::uniform_random;
        else if (mode == "sinusoidal") {
            pf.simulation.schedule.mode = sim::SamplingSchedule::Mode::sinusoidal;
            if (!param.empty())
                pf.simulation.schedule.frequency = std::stod(param);
        } else {
            throw io::ValidationError("schedule", "expected constant|uniform|sinusoidal[:freq]");
        }
    }
    if (seed)
        pf.simulation.schedule.seed = *seed;
    if (pf.simulation.initial_conditions.empty())
        throw io::ValidationError("simulation.initial_conditions",
                                  "no initial conditions to simulate");

    std::optional<sim::LyapunovWeights> lyap;
    std::optional<certify::DecayCertificate> decay;
    if (in.certificate) {
        lyap = sim::lyapunov_weights(pf.plant, *in.certificate);
        try {
            decay = certify::decay_certificate(pf.plant, *in.certificate);
        } catch (const std::exception&) {
            // marginal certificate: the monitor reports jump checks only
        }
    }

    sim::Horizon hz;
    hz.t_max = pf.simulation.t_max;
    hz.j_max = pf.simulation.j_max;
    sim::SimOptions so;
    so.h_max = pf.simulation.h_max;

    std::vector<sim::HybridTrajectory> trajectories;
    io::json monitor_reports = io::json::array();
    for (const io::InitialCondition& ic : pf.simulation.initial_conditions) {
        sim::HybridState x0{ic.xp, ic.eta_tilde, ic.tau};
        sim::HybridTrajectory tr =
            sim::simulate(x0, pf.plant, in.K, pf.simulation.schedule.make(), hz, so,
                          lyap ? &*lyap : nullptr);
        io::write_trajectory_csv((fs::path(dir) / ("traj_" + ic.label + ".csv")).string(),
                                 pf.plant, tr);
        if (in.certificate) {
            const sim::MonitorReport rep = sim::monitor(tr, pf.plant, *in.certificate, decay);
            monitor_reports.push_back(io::monitor_report_to_json(ic.label, rep));
        }
        std::printf("simulate %-12s samples=%zu jumps=%d status=%s\n", ic.label.c_str(),
                    tr.samples.size(), tr.domain.empty() ? 0 : tr.domain.back().j,
                    tr.status == sim::TrajectoryStatus::diverged ? "diverged" : "completed");
        trajectories.push_back(std::move(tr));
    }
    if (in.certificate)
        io::write_json((fs::path(dir) / "monitor_report.json").string(), monitor_reports);

    if (pf.output.plot) {
        if (pf.plant.n() == 2 && in.certificate) {
            const certify::BasinEstimate basin = certify::basin_sets(pf.plant, *in.certificate);
            svg::write_phase_plane((fs::path(dir) / "phase_plane.svg").string(), basin,
                                   trajectories);
        }
        svg::write_input_series((fs::path(dir) / "input_timeseries.svg").string(),
                                pf.plant.ubar, trajectories);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stabilizing gain design and certification for saturating plants "
                 "with multi-rate sampled measurements"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string cert_path, gain_path, schedule_arg, dump_sdp;
    double tol = 1e-7;
    std::optional<std::uint64_t> seed;

    CLI::App* syn = app.add_subcommand("synthesize", "design a gain over the parameter grid");
    syn->add_option("-p,--problem", args.problem_path, "problem JSON file")->required();
    syn->add_option("-o,--out", args.outdir, "output directory");
    syn->add_option("--dump-sdp", dump_sdp, "write the first grid point as sparse triplets");

    CLI::App* ana = app.add_subcommand("analyze", "re-estimate the basin for a given gain");
    ana->add_option("-p,--problem", args.problem_path, "problem JSON file")->required();
    ana->add_option("-K,--gain", gain_path, "certificate or bare-gain JSON file")->required();
    ana->add_option("-o,--out", args.outdir, "output directory");
    ana->add_option("--dump-sdp", dump_sdp, "write the first grid point as sparse triplets");

    CLI::App* ver = app.add_subcommand("verify", "check a certificate against its plant");
    ver->add_option("-c,--certificate", cert_path, "certificate JSON file")->required();
    ver->add_option("-p,--problem", args.problem_path, "problem JSON file")->required();
    ver->add_option("--tol", tol, "eigenvalue tolerance");
    ver->add_option("-o,--out", args.outdir, "output directory");

    CLI::App* simc = app.add_subcommand("simulate", "run the closed loop with monitoring");
    simc->add_option("-c,--certificate", cert_path, "certificate or bare-gain JSON file")
        ->required();
    simc->add_option("-p,--problem", args.problem_path, "problem JSON file")->required();
    simc->add_option("--schedule", schedule_arg, "constant | uniform | sinusoidal[:freq]");
    simc->add_option("--seed", seed, "seed for the uniform schedule");
    simc->add_option("-o,--out", args.outdir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (syn->parsed())
            return run_synthesize(args, dump_sdp);
        if (ana->parsed())
            return run_analyze(args, gain_path, dump_sdp);
        if (ver->parsed())
            return run_verify(args, cert_path, tol);
        if (simc->parsed())
            return run_simulate(args, cert_path, schedule_arg, seed);
    } catch (const io::ValidationError& e) {
        std::cerr << "satstab: validation error: " << e.what() << '\n';
        write_error_record(args.outdir.empty() ? "." : args.outdir, kExitValidation,
                           "validation", e.what());
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "satstab: validation error: " << e.what() << '\n';
        write_error_record(args.outdir.empty() ? "." : args.outdir, kExitValidation,
                           "validation", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "satstab: error: " << e.what() << '\n';
        write_error_record(args.outdir.empty() ? "." : args.outdir, kExitNumerical, "error",
                           e.what());
        return kExitNumerical;
    }
    return kExitOk;
}
