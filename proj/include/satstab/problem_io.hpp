#pragma once

// Problem-file ingestion, certificate persistence and trajectory CSV export.
// All formats are plain text: JSON for problems and certificates, CSV for
// trajectories. Certificate matrices are stored row-major.

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "satstab/certify.hpp"
#include "satstab/hybrid_sim.hpp"
#include "satstab/lmi.hpp"
#include "satstab/matrix.hpp"

namespace satstab::io {

using json = nlohmann::ordered_json;

class ValidationError : public std::runtime_error {
public:
    ValidationError(const std::string& field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(field) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct InitialCondition {
    std::string label;
    Vector xp;
    Vector eta_tilde;  // stored as the reconstruction error x_p - eta
    Vector tau;        // empty: start the timers at T2
};

struct ScheduleConfig {
    sim::SamplingSchedule::Mode mode = sim::SamplingSchedule::Mode::constant_T2;
    std::uint64_t seed = 0;
    double frequency = 10.0;

    sim::SamplingSchedule make() const {
        switch (mode) {
        case sim::SamplingSchedule::Mode::uniform_random:
            return sim::SamplingSchedule::uniform(seed);
        case sim::SamplingSchedule::Mode::sinusoidal:
            return sim::SamplingSchedule::sinusoidal(frequency);
        default: return sim::SamplingSchedule::constant();
        }
    }
};

struct SimulationConfig {
    std::vector<InitialCondition> initial_conditions;
    ScheduleConfig schedule;
    double t_max = 40.0;
    int j_max = 100000;
    double h_max = 1e-3;
};

struct OutputConfig {
    std::string dir = ".";
    bool plot = true;
};

struct ProblemFile {
    lmi::PlantModel plant;
    certify::GridSpec grids;
    certify::Weights weights;
    SimulationConfig simulation;
    OutputConfig output;
};

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------

namespace detail {

inline Vector as_vector(const json& j, const std::string& field) {
    if (!j.is_array())
        throw ValidationError(field, "expected an array of numbers");
    Vector v;
    for (const auto& x : j) {
        if (!x.is_number())
            throw ValidationError(field, "expected an array of numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

inline Matrix as_matrix_rows(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty())
        throw ValidationError(field, "expected a nonempty array of rows");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Matrix M(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
            throw ValidationError(field, "rows must have equal length");
        for (int k = 0; k < cols; ++k)
            M(i, k) = j[i][k].get<double>();
    }
    return M;
}

inline json matrix_to_json(const Matrix& M) {
    json j;
    j["rows"] = M.rows();
    j["cols"] = M.cols();
    j["data"] = M.data();  // row-major
    return j;
}

inline Matrix matrix_from_json(const json& j, const std::string& field) {
    if (!j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw ValidationError(field, "expected {rows, cols, data}");
    const int rows = j["rows"].get<int>();
    const int cols = j["cols"].get<int>();
    const Vector data = as_vector(j["data"], field + ".data");
    if (static_cast<int>(data.size()) != rows * cols)
        throw ValidationError(field, "data length must equal rows*cols");
    Matrix M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k)
            M(i, k) = data[static_cast<std::size_t>(i) * cols + k];
    return M;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// problem files
// ---------------------------------------------------------------------------

inline ProblemFile parse_problem(const json& root) {
    ProblemFile pf;
    if (!root.contains("plant"))
        throw ValidationError("plant", "missing section");
    const json& plant = root["plant"];
    if (!plant.contains("A"))
        throw ValidationError("plant.A", "missing");
    pf.plant.A = detail::as_matrix_rows(plant["A"], "plant.A");
    if (!plant.contains("B"))
        throw ValidationError("plant.B", "missing");
    pf.plant.B = detail::as_matrix_rows(plant["B"], "plant.B");
    if (!plant.contains("ubar"))
        throw ValidationError("plant.ubar", "missing");
    pf.plant.ubar = detail::as_vector(plant["ubar"], "plant.ubar");
    if (!plant.contains("partition"))
        throw ValidationError("plant.partition", "missing");
    pf.plant.partition.clear();
    for (const auto& d : plant["partition"])
        pf.plant.partition.push_back(d.get<int>());
    if (!plant.contains("T2"))
        throw ValidationError("plant.T2", "missing");
    pf.plant.T2 = detail::as_vector(plant["T2"], "plant.T2");
    if (plant.contains("T1")) {
        pf.plant.T1 = detail::as_vector(plant["T1"], "plant.T1");
    } else {
        // default lower bounds: 0.05 T2 with a floor of 0.05, capped by T2
        pf.plant.T1.clear();
        for (double t2 : pf.plant.T2)
            pf.plant.T1.push_back(std::min(t2, std::max(0.05 * t2, 0.05)));
    }
    try {
        pf.plant.validate();
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        const auto colon = what.find(':');
        throw ValidationError(colon == std::string::npos ? "plant" : what.substr(0, colon),
                              colon == std::string::npos ? what : what.substr(colon + 2));
    }

    pf.grids = certify::GridSpec::defaults(pf.plant.q());
    if (root.contains("grids")) {
        const json& g = root["grids"];
        if (g.contains("alpha"))
            pf.grids.alphas = detail::as_vector(g["alpha"], "grids.alpha");
        if (g.contains("sigma")) {
            if (!g["sigma"].is_array() ||
                static_cast<int>(g["sigma"].size()) != pf.plant.q())
                throw ValidationError("grids.sigma", "need one candidate list per channel");
            pf.grids.sigma_lists.clear();
            for (const auto& lst : g["sigma"])
                pf.grids.sigma_lists.push_back(detail::as_vector(lst, "grids.sigma"));
        }
    }

    if (root.contains("weights")) {
        pf.weights.rho1 = root["weights"].value("rho1", 1.0);
        pf.weights.rho2 = root["weights"].value("rho2", 1.0);
        if (!(pf.weights.rho1 > 0.0) || !(pf.weights.rho2 > 0.0))
            throw ValidationError("weights", "rho1 and rho2 must be positive");
    }

    if (root.contains("simulation")) {
        const json& s = root["simulation"];
        pf.simulation.t_max = s.value("t_max", 40.0);
        pf.simulation.j_max = s.value("j_max", 100000);
        pf.simulation.h_max = s.value("h_max", 1e-3);
        if (s.contains("schedule")) {
            const json& sch = s["schedule"];
            const std::string mode = sch.value("mode", "constant");
            if (mode == "constant")
                pf.simulation.schedule.mode = sim::SamplingSchedule::Mode::constant_T2;
            else if (mode == "uniform")
                pf.simulation.schedule.mode = sim::SamplingSchedule::Mode::uniform_random;
            else if (mode == "sinusoidal")
                pf.simulation.schedule.mode = sim::SamplingSchedule::Mode::sinusoidal;
            else
                throw ValidationError("simulation.schedule.mode",
                                      "expected constant|uniform|sinusoidal");
            pf.simulation.schedule.seed = sch.value("seed", 0);
            pf.simulation.schedule.frequency = sch.value("frequency", 10.0);
        }
        if (s.contains("initial_conditions")) {
            int idx = 0;
            for (const auto& ic : s["initial_conditions"]) {
                InitialCondition c;
                c.label = ic.value("label", "x0_" + std::to_string(idx));
                if (!ic.contains("xp"))
                    throw ValidationError("simulation.initial_conditions.xp", "missing");
                c.xp = detail::as_vector(ic["xp"], "simulation.initial_conditions.xp");
                if (static_cast<int>(c.xp.size()) != pf.plant.n())
                    throw ValidationError("simulation.initial_conditions.xp",
                                          "length must equal the state dimension");
                if (ic.contains("eta_tilde")) {
                    c.eta_tilde = detail::as_vector(ic["eta_tilde"],
                                                    "simulation.initial_conditions.eta_tilde");
                } else {
                    // controller state given (default zero); error = xp - eta
                    Vector eta(pf.plant.n(), 0.0);
                    if (ic.contains("eta"))
                        eta = detail::as_vector(ic["eta"], "simulation.initial_conditions.eta");
                    if (static_cast<int>(eta.size()) != pf.plant.n())
                        throw ValidationError("simulation.initial_conditions.eta",
                                              "length must equal the state dimension");
                    c.eta_tilde.resize(pf.plant.n());
                    for (int k = 0; k < pf.plant.n(); ++k)
                        c.eta_tilde[k] = c.xp[k] - eta[k];
                }
                if (static_cast<int>(c.eta_tilde.size()) != pf.plant.n())
                    throw ValidationError("simulation.initial_conditions.eta_tilde",
                                          "length must equal the state dimension");
                c.tau = ic.contains("tau")
                            ? detail::as_vector(ic["tau"], "simulation.initial_conditions.tau")
                            : pf.plant.T2;
                if (static_cast<int>(c.tau.size()) != pf.plant.q())
                    throw ValidationError("simulation.initial_conditions.tau",
                                          "length must equal the channel count");
                pf.simulation.initial_conditions.push_back(std::move(c));
                ++idx;
            }
        }
    }

    if (root.contains("output")) {
        pf.output.dir = root["output"].value("dir", ".");
        pf.output.plot = root["output"].value("plot", true);
    }
    return pf;
}

inline ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("file", "cannot open '" + path + "'");
    json root;
    try {
        root = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("json", e.what());
    }
    return parse_problem(root);
}

// ---------------------------------------------------------------------------
// certificates
// ---------------------------------------------------------------------------

inline json certificate_to_json(const certify::StabilityCertificate& cert) {
    json j;
    j["format"] = "satstab-certificate-v1";
    j["mode"] = cert.mode == lmi::Mode::design ? "design" : "analysis";
    j["K"] = detail::matrix_to_json(cert.K);
    j["W"] = detail::matrix_to_json(cert.W);
    j["R"] = json::array();
    for (const Matrix& R : cert.R)
        j["R"].push_back(detail::matrix_to_json(R));
    j["S"] = cert.S;
    j["Z"] = detail::matrix_to_json(cert.Z);
    j["J"] = detail::matrix_to_json(cert.J);
    j["sigma"] = cert.sigma;
    if (cert.alpha)
        j["alpha"] = *cert.alpha;
    j["mu_bar"] = cert.mu_bar;
    return j;
}

inline json grid_log_to_json(const certify::PipelineResult& result) {
    json g = json::array();
    for (const auto& o : result.grid) {
        json e;
        e["sigma"] = o.sigma;
        e["alpha"] = o.alpha;
        e["status"] = sdp::to_string(o.status);
        e["objective"] = o.objective;
        e["mu_bar"] = o.mu_bar;
        e["iterations"] = o.iterations;
        g.push_back(std::move(e));
    }
    json j;
    j["points"] = std::move(g);
    j["best_index"] = result.best_index;
    j["objective"] = result.objective;
    return j;
}

inline json pipeline_to_json(const certify::PipelineResult& result) {
    json j = certificate_to_json(result.certificate);
    j["solver"] = {{"objective", result.objective}, {"grid_points", result.grid.size()}};
    j["grid_log"] = grid_log_to_json(result);
    return j;
}

// Either a full certificate or a bare gain {"K": ...}.
struct LoadedCertificate {
    Matrix K;
    std::optional<certify::StabilityCertificate> certificate;
};

inline LoadedCertificate parse_certificate(const json& j) {
    LoadedCertificate out;
    if (!j.contains("K"))
        throw ValidationError("K", "missing gain");
    out.K = detail::matrix_from_json(j["K"], "K");
    if (!j.contains("W"))
        return out;  // bare gain
    certify::StabilityCertificate cert;
    cert.mode = j.value("mode", "analysis") == std::string("design") ? lmi::Mode::design
                                                                     : lmi::Mode::analysis;
    cert.K = out.K;
    cert.W = detail::matrix_from_json(j["W"], "W");
    if (!j.contains("R") || !j["R"].is_array() || j["R"].empty())
        throw ValidationError("R", "expected a nonempty array of blocks");
    for (const auto& r : j["R"])
        cert.R.push_back(detail::matrix_from_json(r, "R"));
    cert.S = detail::as_vector(j.at("S"), "S");
    cert.Z = detail::matrix_from_json(j.at("Z"), "Z");
    cert.J = detail::matrix_from_json(j.at("J"), "J");
    cert.sigma = detail::as_vector(j.at("sigma"), "sigma");
    if (j.contains("alpha"))
        cert.alpha = j["alpha"].get<double>();
    if (!j.contains("mu_bar"))
        throw ValidationError("mu_bar", "missing");
    cert.mu_bar = j["mu_bar"].get<double>();
    out.certificate = std::move(cert);
    return out;
}

inline LoadedCertificate load_certificate(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("file", "cannot open '" + path + "'");
    json root;
    try {
        root = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("json", e.what());
    }
    return parse_certificate(root);
}

inline void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// verify reports
// ---------------------------------------------------------------------------

inline json verify_report_to_json(const certify::VerifyReport& rep) {
    json j;
    j["pass"] = rep.pass;
    j["tol"] = rep.tol;
    j["checks"] = json::array();
    for (const auto& c : rep.checks)
        j["checks"].push_back({{"name", c.name}, {"eig", c.eig}, {"pass", c.pass}});
    return j;
}

inline void print_verify_report(std::ostream& os, const certify::VerifyReport& rep) {
    for (const auto& c : rep.checks) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "% .6e", c.eig);
        os << (c.pass ? "  ok   " : "  FAIL ") << c.name << "  eig=" << buf << '\n';
    }
    os << (rep.pass ? "PASS" : "FAIL") << " at tol " << rep.tol << '\n';
}

// ---------------------------------------------------------------------------
// trajectory CSV: t, j, xp_1..n, etat_1..n, tau_1..q, V, u_1..m
// ---------------------------------------------------------------------------

inline void write_trajectory_csv(std::ostream& os, const lmi::PlantModel& plant,
                                 const sim::HybridTrajectory& traj) {
    os << "t,j";
    for (int i = 1; i <= plant.n(); ++i)
        os << ",xp_" << i;
    for (int i = 1; i <= plant.n(); ++i)
        os << ",etat_" << i;
    for (int i = 1; i <= plant.q(); ++i)
        os << ",tau_" << i;
    os << ",V";
    for (int i = 1; i <= plant.m(); ++i)
        os << ",u_" << i;
    os << '\n';

    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << ',' << buf;
    };
    for (const auto& smp : traj.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g", smp.t);
        os << buf << ',' << smp.j;
        for (double v : smp.state.xp)
            put(v);
        for (double v : smp.state.eta_tilde)
            put(v);
        for (double v : smp.state.tau)
            put(v);
        put(smp.V);
        for (double v : smp.u)
            put(v);
        os << '\n';
    }
}

inline void write_trajectory_csv(const std::string& path, const lmi::PlantModel& plant,
                                 const sim::HybridTrajectory& traj) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    write_trajectory_csv(out, plant, traj);
}

inline json monitor_report_to_json(const std::string& label, const sim::MonitorReport& rep) {
    json j;
    j["label"] = label;
    j["clean"] = rep.clean();
    j["jump_checks"] = rep.jump_checks;
    j["flow_checks"] = rep.flow_checks;
    j["envelope_checks"] = rep.envelope_checks;
    j["in_region_start"] = rep.in_region_start;
    if (!rep.note.empty())
        j["note"] = rep.note;
    j["violations"] = json::array();
    for (const auto& v : rep.violations)
        j["violations"].push_back(
            {{"kind", v.kind}, {"t", v.t}, {"j", v.j}, {"amount", v.amount}});
    return j;
}

}  // namespace satstab::io
