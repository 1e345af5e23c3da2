#pragma once

// End-to-end synthesis and analysis pipeline: grid search over the scalar
// parameters, SDP solves, gain recovery K = Y W^{-1}, certificate
// verification, basin-of-attraction ellipsoids and the exponential-decay
// constants used by the trajectory monitor.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "satstab/lmi.hpp"
#include "satstab/matrix.hpp"
#include "satstab/sdp.hpp"
#include "satstab/symmat.hpp"

namespace satstab::certify {

using lmi::Mode;
using lmi::PlantModel;

struct StabilityCertificate {
    Mode mode = Mode::analysis;
    Matrix K;               // m x n gain
    Matrix W;               // n x n PD
    std::vector<Matrix> R;  // q PD blocks
    Vector S;               // m positive diagonal entries
    Matrix Z;               // m x n
    Matrix J;               // m x n (zero for design-mode certificates)
    Vector sigma;           // q positive rates
    std::optional<double> alpha;  // design stage only
    double mu_bar = 0.0;
};

struct BasinEstimate {
    Matrix P_hat_star;  // 2n x 2n: W^{-1} (+) R(tau*)
    double mu_bar = 0.0;
    Matrix N;  // n x n: W^{-1} + (+)_i R_i exp(sigma_i T2_i)
    double volume_proxy = 0.0;
};

struct DecayCertificate {
    double c1 = 0.0;        // min eig of P_hat(0)
    double c2 = 0.0;        // max eig of P_hat(tau*)
    double c3 = 0.0;        // quadratic flow-decrease constant
    double lambda_t = 0.0;  // flow decay rate c3/c2 of the Lyapunov value
    double tau_D = 0.0;     // dwell time, min T1_i
    double lambda = 0.0;    // hybrid (t+j) rate
    double vartheta = 0.0;  // offset >= lambda q
    double kappa = 0.0;     // overshoot e^vartheta sqrt(c2/c1)
};

struct GridOutcome {
    Vector sigma;
    double alpha = 0.0;  // 0 for analysis points
    sdp::SolveStatus status = sdp::SolveStatus::numerical_failure;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double mu_bar = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
};

struct PipelineResult {
    bool found = false;
    StabilityCertificate certificate;
    BasinEstimate basin;
    std::vector<GridOutcome> grid;
    int best_index = -1;
    double objective = std::numeric_limits<double>::quiet_NaN();
    Vector solution;  // raw decision vector at the best grid point
    std::string message;
};

struct GridSpec {
    std::vector<double> alphas;
    std::vector<Vector> sigma_lists;  // one candidate list per channel

    static GridSpec defaults(int q) {
        GridSpec g;
        g.alphas = {0.05, 0.1, 0.2, 0.4, 0.8, 1.6};
        g.sigma_lists.assign(q, Vector{0.3, 0.8, 1.3, 1.8, 2.3, 2.8, 3.3, 3.8});
        return g;
    }
};

struct Weights {
    double rho1 = 1.0;
    double rho2 = 1.0;
};

struct PipelineOptions {
    PipelineOptions() { sdp.max_iter = 500; }  // grid solves get extra headroom

    sdp::SolveOptions sdp;
    lmi::AssemblyOptions assembly;
    int threads = 0;  // 0: hardware concurrency capped by SATSTAB_THREADS
};

struct BlockCheck {
    std::string name;
    double eig = 0.0;  // lambda_min for >=0 blocks, lambda_max for <0 blocks
    bool pass = false;
};

struct VerifyReport {
    std::vector<BlockCheck> checks;
    bool pass = true;
    double tol = 0.0;
};

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

inline Matrix r_of_tau(const StabilityCertificate& cert, const PlantModel& plant,
                       const Vector& tau) {
    std::vector<Matrix> blocks;
    blocks.reserve(cert.R.size());
    for (int i = 0; i < plant.q(); ++i)
        blocks.push_back(std::exp(cert.sigma[i] * tau[i]) * cert.R[i]);
    return block_diag(blocks);
}

inline Matrix p_hat(const StabilityCertificate& cert, const PlantModel& plant,
                    const Vector& tau) {
    return block_diag({spd_inverse(cert.W), r_of_tau(cert, plant, tau)});
}

inline BasinEstimate basin_sets(const PlantModel& plant, const StabilityCertificate& cert) {
    BasinEstimate b;
    const Matrix Winv = spd_inverse(cert.W);
    b.P_hat_star = block_diag({Winv, r_of_tau(cert, plant, plant.T2)});
    b.mu_bar = cert.mu_bar;
    b.N = Winv + r_of_tau(cert, plant, plant.T2);
    b.volume_proxy = b.P_hat_star.trace() / cert.mu_bar;
    return b;
}

// x_bar' P_hat(tau) x_bar <= mu_bar. Empty tau means the worst clock tau*.
inline bool membership(const PlantModel& plant, const StabilityCertificate& cert,
                       const Vector& xbar, const std::optional<Vector>& tau = std::nullopt) {
    if (static_cast<int>(xbar.size()) != 2 * plant.n())
        throw std::invalid_argument("membership: state must have dimension 2n");
    Vector t = tau.value_or(plant.T2);
    if (static_cast<int>(t.size()) != plant.q())
        throw std::invalid_argument("membership: tau must have one entry per channel");
    for (int i = 0; i < plant.q(); ++i)
        if (t[i] < -1e-12 || t[i] > plant.T2[i] + 1e-12)
            throw std::invalid_argument("membership: tau outside the timer set");
    return quadratic_form(p_hat(cert, plant, t), xbar) <= cert.mu_bar;
}

inline lmi::LmiValues values_of(const StabilityCertificate& cert) {
    lmi::LmiValues v;
    v.W = cert.W;
    v.R = cert.R;
    v.S = cert.S;
    v.Z = cert.Z;
    v.J = cert.J.empty() ? Matrix(cert.K.rows(), cert.K.cols()) : cert.J;
    v.Y = cert.K * cert.W;
    v.iota = 1.0 / cert.mu_bar;
    return v;
}

// ---------------------------------------------------------------------------
// verification
// ---------------------------------------------------------------------------

// Re-assembles every inclusion block and every vertex block at the
// certificate values and reports the relevant extreme eigenvalue of each,
// together with positive-definiteness of W, R_i and S. Reports, never throws.
inline VerifyReport verify_certificate(const PlantModel& plant,
                                       const StabilityCertificate& cert, double tol) {
    VerifyReport rep;
    rep.tol = tol;
    auto add = [&rep](const std::string& name, double eig, bool pass) {
        rep.checks.push_back({name, eig, pass});
        rep.pass = rep.pass && pass;
    };

    auto guarded = [&](const std::string& name, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            add(name + " (error: " + e.what() + ")", std::numeric_limits<double>::quiet_NaN(),
                false);
        }
    };

    guarded("W_pd", [&] {
        const double e = lambda_min_of(cert.W);
        add("W_pd", e, e > 1e-9);
    });
    for (std::size_t i = 0; i < cert.R.size(); ++i)
        guarded("R_pd", [&] {
            const double e = lambda_min_of(cert.R[i]);
            add("R_pd[" + std::to_string(i) + "]", e, e > 1e-9);
        });
    guarded("S_pd", [&] {
        double e = std::numeric_limits<double>::infinity();
        for (double s : cert.S)
            e = std::min(e, s);
        add("S_pd", e, e > 1e-9);
    });
    guarded("mu_bar", [&] { add("mu_bar_pos", cert.mu_bar, cert.mu_bar > 0.0); });

    const lmi::LmiValues vals = values_of(cert);
    const bool with_J = cert.mode == Mode::analysis;
    for (int i = 0; i < plant.m(); ++i)
        guarded("inclusion", [&] {
            const double e = lambda_min_of(lmi::inclusion_block(plant, vals, i, with_J));
            add("inclusion[" + std::to_string(i) + "]", e, e >= -tol);
        });

    const lmi::VertexSet vs = lmi::enumerate_vertices(cert.sigma, plant.T2, plant.partition);
    for (int v = 0; v < vs.count(); ++v)
        guarded("vertex", [&] {
            const Matrix theta = vs.theta(v, plant.partition);
            Matrix blk;
            if (cert.mode == Mode::analysis)
                blk = lmi::analysis_block(plant, cert.K, vals, cert.sigma, theta);
            else
                blk = lmi::design_block(plant, vals, cert.sigma, *cert.alpha, theta);
            const double e = lambda_max_of(blk);
            add("vertex[" + std::to_string(v) + "]", e, e <= tol);
        });

    return rep;
}

// ---------------------------------------------------------------------------
// decay constants
// ---------------------------------------------------------------------------

// Lemma arithmetic turning a flow decay rate of the state norm into a hybrid
// (t+j) rate: lambda = rate tau_D / (1 + tau_D), vartheta = lambda q.
inline std::pair<double, double> hybrid_rate(double flow_rate, double tau_D, int q) {
    const double lambda = flow_rate * tau_D / (1.0 + tau_D);
    return {lambda, lambda * q};
}

inline DecayCertificate decay_certificate(const PlantModel& plant,
                                          const StabilityCertificate& cert) {
    DecayCertificate d;
    const Matrix Winv = spd_inverse(cert.W);
    const Vector tau0(plant.q(), 0.0);
    d.c1 = lambda_min_of(block_diag({Winv, r_of_tau(cert, plant, tau0)}));
    d.c2 = lambda_max_of(block_diag({Winv, r_of_tau(cert, plant, plant.T2)}));

    // c3 = -max over vertices of lambda_max(Jc N(Psi) Jc), Jc = W^{-1} (+) I (+) S^{-1};
    // the congruence keeps affinity in Psi, so the maximum sits at a vertex.
    Vector sinv(cert.S.size());
    for (std::size_t i = 0; i < cert.S.size(); ++i)
        sinv[i] = 1.0 / cert.S[i];
    const Matrix Jc = block_diag({Winv, Matrix::identity(plant.n()), Matrix::diag(sinv)});
    const lmi::LmiValues vals = values_of(cert);
    const lmi::VertexSet vs = lmi::enumerate_vertices(cert.sigma, plant.T2, plant.partition);
    double worst = -std::numeric_limits<double>::infinity();
    int worst_vertex = -1;
    for (int v = 0; v < vs.count(); ++v) {
        const Matrix theta = vs.theta(v, plant.partition);
        const Matrix N = lmi::analysis_block(plant, cert.K, vals, cert.sigma, theta);
        const double e = lambda_max_of((Jc * N * Jc).symmetric_part(), 1e300);
        if (e > worst) {
            worst = e;
            worst_vertex = v;
        }
    }
    d.c3 = -worst;
    if (!(d.c3 > 0.0))
        throw std::runtime_error("decay_certificate: certificate too marginal at vertex " +
                                 std::to_string(worst_vertex));

    d.lambda_t = d.c3 / d.c2;
    d.tau_D = plant.T1[0];
    for (double t1 : plant.T1)
        d.tau_D = std::min(d.tau_D, t1);
    // quadratic Lyapunov value: the state norm decays at half the V rate
    auto [lambda, vartheta] = hybrid_rate(0.5 * d.lambda_t, d.tau_D, plant.q());
    d.lambda = lambda;
    d.vartheta = vartheta;
    d.kappa = std::exp(d.vartheta) * std::sqrt(d.c2 / d.c1);
    return d;
}

// ---------------------------------------------------------------------------
// grid search pipeline
// ---------------------------------------------------------------------------

namespace detail {

inline int resolve_threads(int requested, int npoints) {
    int t = requested;
    if (t <= 0) {
        t = static_cast<int>(std::thread::hardware_concurrency());
        if (t <= 0)
            t = 1;
        if (const char* env = std::getenv("SATSTAB_THREADS")) {
            const int cap = std::atoi(env);
            if (cap > 0)
                t = std::min(t, cap);
        }
    }
    return std::max(1, std::min(t, npoints));
}

struct GridPointSpec {
    Vector sigma;
    double alpha = 0.0;
};

// Lexicographic enumeration over the sorted candidate lists: sigma_1 is the
// slowest index, alpha the fastest. Ties in the objective are broken by this
// generation order.
inline std::vector<GridPointSpec> grid_points(const GridSpec& grid, int q, bool with_alpha) {
    std::vector<Vector> sig = grid.sigma_lists;
    if (static_cast<int>(sig.size()) != q)
        throw std::invalid_argument("grid: need one sigma candidate list per channel");
    for (auto& list : sig) {
        if (list.empty())
            throw std::invalid_argument("grid: empty sigma candidate list");
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    std::vector<double> alphas = with_alpha ? grid.alphas : std::vector<double>{0.0};
    if (with_alpha) {
        if (alphas.empty())
            throw std::invalid_argument("grid: empty alpha list");
        std::sort(alphas.begin(), alphas.end());
        alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
    }

    std::vector<GridPointSpec> pts;
    std::vector<std::size_t> idx(q, 0);
    while (true) {
        Vector s(q);
        for (int i = 0; i < q; ++i)
            s[i] = sig[i][idx[i]];
        for (double a : alphas)
            pts.push_back({s, a});
        int i = q - 1;
        for (; i >= 0; --i) {
            if (++idx[i] < sig[i].size())
                break;
            idx[i] = 0;
        }
        if (i < 0)
            break;
    }
    return pts;
}

struct PointResult {
    GridOutcome outcome;
    bool usable = false;
    StabilityCertificate cert;
    Vector solution;
};

inline PointResult solve_point(const PlantModel& plant, Mode mode, const Matrix& K,
                               const GridPointSpec& pt, const Weights& weights,
                               const PipelineOptions& opts) {
    PointResult pr;
    pr.outcome.sigma = pt.sigma;
    pr.outcome.alpha = pt.alpha;
    try {
        const sdp::SdpProblem prob = lmi::assemble(plant, mode, K, pt.sigma, pt.alpha,
                                                   {weights.rho1, weights.rho2},
                                                   opts.assembly);
        const sdp::SdpSolution sol = sdp::solve(prob, opts.sdp);
        pr.outcome.status = sol.status;
        pr.outcome.iterations = sol.iterations;
        if (sol.status == sdp::SolveStatus::optimal ||
            sol.status == sdp::SolveStatus::feasible) {
            const lmi::VarMap vm(plant, mode);
            const lmi::LmiValues vals = vm.unpack(sol.y);
            pr.outcome.objective = sol.objective_value;
            pr.outcome.mu_bar = 1.0 / vals.iota;
            StabilityCertificate cert;
            cert.mode = mode;
            cert.W = vals.W;
            cert.R = vals.R;
            cert.S = vals.S;
            cert.Z = vals.Z;
            cert.sigma = pt.sigma;
            cert.mu_bar = 1.0 / vals.iota;
            if (mode == Mode::design) {
                cert.alpha = pt.alpha;
                cert.J = Matrix(plant.m(), plant.n());
                // K = Y W^{-1}  <=>  K^T = W^{-1} Y^T
                Matrix L;
                if (!cholesky_factor(vals.W, L))
                    throw std::runtime_error("recovered W not positive definite");
                cert.K = cholesky_solve(L, vals.Y.transpose()).transpose();
            } else {
                cert.J = vals.J;
                cert.K = K;
            }
            pr.cert = std::move(cert);
            pr.solution = sol.y;
            pr.usable = true;
        }
    } catch (const std::exception& e) {
        pr.outcome.status = sdp::SolveStatus::numerical_failure;
    }
    return pr;
}

inline PipelineResult run_grid(const PlantModel& plant, Mode mode, const Matrix& K,
                               const GridSpec& grid, const Weights& weights,
                               const PipelineOptions& opts) {
    plant.validate();
    const std::vector<GridPointSpec> pts = grid_points(grid, plant.q(), mode == Mode::design);
    std::vector<PointResult> results(pts.size());

    const int nthreads = resolve_threads(opts.threads, static_cast<int>(pts.size()));
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < pts.size(); ++i)
            results[i] = solve_point(plant, mode, K, pts[i], weights, opts);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < pts.size(); i = next.fetch_add(1))
                results[i] = solve_point(plant, mode, K, pts[i], weights, opts);
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    PipelineResult out;
    for (std::size_t i = 0; i < results.size(); ++i) {
        out.grid.push_back(results[i].outcome);
        if (results[i].usable &&
            (out.best_index < 0 || results[i].outcome.objective < out.objective)) {
            out.best_index = static_cast<int>(i);
            out.objective = results[i].outcome.objective;
        }
    }
    if (out.best_index >= 0) {
        out.found = true;
        out.certificate = results[out.best_index].cert;
        out.solution = results[out.best_index].solution;
        out.basin = basin_sets(plant, out.certificate);
    } else {
        out.message = "no certificate found: every grid point infeasible or failed";
    }
    return out;
}

}  // namespace detail

// Design path: solve the synthesis program over the (sigma, alpha) grid and
// return the feasible certificate with the smallest size objective.
inline PipelineResult synthesize(const PlantModel& plant, const GridSpec& grid,
                                 const Weights& weights = {},
                                 const PipelineOptions& opts = {}) {
    return detail::run_grid(plant, Mode::design, Matrix(), grid, weights, opts);
}

// Analysis path for a given gain: free J, per-sigma grid.
inline PipelineResult analyze(const PlantModel& plant, const Matrix& K, const GridSpec& grid,
                              const Weights& weights = {}, const PipelineOptions& opts = {}) {
    if (K.rows() != plant.m() || K.cols() != plant.n())
        throw std::invalid_argument("analyze: K must be m x n");
    return detail::run_grid(plant, Mode::analysis, K, grid, weights, opts);
}

// Feasibility re-solve recovering the auxiliary variables (S, Z, J and the
// trace surrogate) for externally reported (W, R, sigma, mu_bar, K); used to
// validate published certificate values that omit the auxiliaries.
inline std::optional<StabilityCertificate> recover_auxiliary(
    const PlantModel& plant, const Matrix& K, const Vector& sigma, const Matrix& W,
    const std::vector<Matrix>& R, double mu_bar, double accept_margin = 1e-6,
    const sdp::SolveOptions& sopts = {}) {
    plant.validate();
    lmi::AssemblyOptions aopts;
    aopts.strict_margin = 0.0;  // judge the reported values as stated
    aopts.pd_margin = 0.0;
    const sdp::SdpProblem full =
        lmi::assemble(plant, Mode::analysis, K, sigma, 0.0, {1.0, 1.0}, aopts);

    const lmi::VarMap vm(plant, Mode::analysis);
    std::vector<std::optional<double>> pin(full.nvars);
    for (int i = 0; i < plant.n(); ++i)
        for (int j = i; j < plant.n(); ++j)
            pin[vm.w_index(i, j)] = W(i, j);
    for (int b = 0; b < plant.q(); ++b)
        for (int i = 0; i < plant.partition[b]; ++i)
            for (int j = i; j < plant.partition[b]; ++j)
                pin[vm.r_index(b, i, j)] = R[b](i, j);
    pin[vm.iota_index()] = 1.0 / mu_bar;

    const lmi::PinnedProblem pp = lmi::pin_variables(full, pin);
    const sdp::Phase1Result p1 = sdp::phase1(pp.problem, sopts);
    if (!p1.strictly_feasible && p1.margin < -accept_margin)
        return std::nullopt;
    if (p1.y.empty())
        return std::nullopt;

    Vector yfull(full.nvars, 0.0);
    for (int k = 0; k < full.nvars; ++k)
        if (pin[k].has_value())
            yfull[k] = *pin[k];
    for (std::size_t k = 0; k < pp.free_to_full.size(); ++k)
        yfull[pp.free_to_full[k]] = p1.y[k];

    const lmi::LmiValues vals = vm.unpack(yfull);
    StabilityCertificate cert;
    cert.mode = Mode::analysis;
    cert.K = K;
    cert.W = W;
    cert.R = R;
    cert.S = vals.S;
    cert.Z = vals.Z;
    cert.J = vals.J;
    cert.sigma = sigma;
    cert.mu_bar = mu_bar;
    return cert;
}

}  // namespace satstab::certify
