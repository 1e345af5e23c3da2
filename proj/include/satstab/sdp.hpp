#pragma once

// Small dense semidefinite-programming solver.
//
// Problem form: minimize c.y subject to a list of affine matrix constraints
//   F0 + sum_k y_k Fk  >= 0   (positive semidefinite)
// plus optional per-variable bounds. Solved with a primal-dual path-following
// interior-point method (HKM search direction, Mehrotra predictor-corrector),
// dense linear algebra throughout. A phase-1 max-margin solve classifies
// infeasible instances and produces the strictly feasible starting point.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "satstab/matrix.hpp"
#include "satstab/symmat.hpp"

namespace satstab::sdp {

struct ConstraintBlock {
    int dim = 0;
    Matrix F0;
    std::vector<std::pair<int, Matrix>> terms;  // (variable index, coefficient matrix)
    std::string name;
};

struct VarBound {
    int var = -1;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
};

struct SdpProblem {
    int nvars = 0;
    Vector objective;  // minimize objective . y
    std::vector<ConstraintBlock> constraints;
    std::vector<VarBound> var_bounds;

    void validate() const {
        if (static_cast<int>(objective.size()) != nvars)
            throw std::invalid_argument("SdpProblem: objective length != nvars");
        for (const auto& blk : constraints) {
            if (blk.F0.rows() != blk.dim || blk.F0.cols() != blk.dim)
                throw std::invalid_argument("SdpProblem: F0 dimension mismatch in block '" +
                                            blk.name + "'");
            for (const auto& [k, F] : blk.terms) {
                if (k < 0 || k >= nvars)
                    throw std::invalid_argument("SdpProblem: variable index out of range in '" +
                                                blk.name + "'");
                if (F.rows() != blk.dim || F.cols() != blk.dim)
                    throw std::invalid_argument("SdpProblem: Fk dimension mismatch in '" +
                                                blk.name + "'");
            }
        }
        for (const auto& vb : var_bounds)
            if (vb.var < 0 || vb.var >= nvars)
                throw std::invalid_argument("SdpProblem: bound variable index out of range");
    }

    Matrix eval_constraint(int b, const Vector& y) const {
        const ConstraintBlock& blk = constraints[b];
        Matrix Z = blk.F0;
        for (const auto& [k, F] : blk.terms)
            if (y[k] != 0.0)
                Z += y[k] * F;
        return Z;
    }

    // Plain-text sparse triplet dump for cross-checking against external
    // solvers. One line per stored upper-triangle nonzero:
    //   <constraint index> <variable index> <row> <col> <value>
    // where variable index 0 denotes the constant block F0 and k >= 1 the
    // coefficient of decision variable k.
    void dump_triplets(std::ostream& os) const {
        auto emit = [&os](int b, int k, const Matrix& F) {
            for (int i = 0; i < F.rows(); ++i)
                for (int j = i; j < F.cols(); ++j)
                    if (F(i, j) != 0.0) {
                        os << b << ' ' << k << ' ' << i << ' ' << j << ' ';
                        char buf[32];
                        std::snprintf(buf, sizeof(buf), "%.17g", F(i, j));
                        os << buf << '\n';
                    }
        };
        for (std::size_t b = 0; b < constraints.size(); ++b) {
            emit(static_cast<int>(b), 0, constraints[b].F0);
            for (const auto& [k, F] : constraints[b].terms)
                emit(static_cast<int>(b), k + 1, F);
        }
    }
};

enum class SolveStatus { optimal, feasible, infeasible, numerical_failure };

inline const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::numerical_failure: return "numerical_failure";
    }
    return "?";
}

struct IterationRecord {
    int iter = 0;
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    double gap = 0.0;         // sum_b tr(X_b Z_b)
    double dual_resid = 0.0;  // ||c_k - sum_b <X_b, F_bk>||_inf
    double step = 0.0;
};

struct SdpSolution {
    SolveStatus status = SolveStatus::numerical_failure;
    Vector y;
    double objective_value = 0.0;
    Vector min_eigs;  // lambda_min of each constraint block at y
    int iterations = 0;
    double duality_gap = 0.0;
    std::vector<IterationRecord> trace;
    std::vector<Matrix> infeasibility_evidence;  // dual blocks of the improving ray
    std::string message;
};

struct SolveOptions {
    double feas_tol = 1e-8;
    double gap_tol = 1e-8;
    int max_iter = 200;
};

struct FeasibilityEntry {
    std::string name;
    double min_eig = 0.0;
    bool pass = false;
};

struct FeasibilityReport {
    std::vector<FeasibilityEntry> entries;
    bool pass = true;
};

struct Phase1Result {
    bool strictly_feasible = false;
    SolveStatus status = SolveStatus::numerical_failure;
    Vector y;             // strictly feasible point when found
    double margin = 0.0;  // best witnessed min-eigenvalue across blocks
    std::vector<Matrix> evidence;  // normalized dual blocks when infeasible
    int iterations = 0;
    std::string message;
};

namespace detail {

inline double sym_lambda_min(const Matrix& M) {
    return lambda_min(SymMatrix::from(M.symmetric_part(), 0.0));
}

// Largest step alpha with M + alpha*dM staying positive definite; M SPD.
inline double max_psd_step(const Matrix& M, const Matrix& dM) {
    Matrix L;
    if (!cholesky_factor(M, L))
        return 0.0;
    Matrix W = congruence_by_inverse_factor(L, dM);
    const double lmin = sym_lambda_min(W);
    if (lmin >= -1e-14)
        return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
}

struct EngineResult {
    SolveStatus status = SolveStatus::numerical_failure;
    bool early_stop = false;
    Vector y;
    std::vector<Matrix> X;
    double gap = 0.0;
    int iterations = 0;
    std::vector<IterationRecord> trace;
    std::string message;
};

// Feasible-start HKM predictor-corrector. Requires every block strictly
// positive definite at y0; primal feasibility is then maintained exactly
// (Z is re-synchronized to F(y) each iteration), while the dual residual
// c_k - sum_b <X_b, F_bk> is driven to zero along the central path.
inline EngineResult run_interior_point(
    const std::vector<ConstraintBlock>& blocks, const Vector& c, Vector y,
    const SolveOptions& opts,
    const std::function<bool(const Vector&, double)>& early_exit = nullptr) {
    EngineResult res;
    const int p = static_cast<int>(c.size());
    const std::size_t nb = blocks.size();

    auto eval = [&](std::size_t b, const Vector& yy) {
        Matrix Z = blocks[b].F0;
        for (const auto& [k, F] : blocks[b].terms)
            if (yy[k] != 0.0)
                Z += yy[k] * F;
        return Z;
    };

    double nu = 0.0;
    for (const auto& blk : blocks)
        nu += blk.dim;

    std::vector<Matrix> X(nb), Z(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        X[b] = Matrix::identity(blocks[b].dim);
        Z[b] = eval(b, y);
        Matrix L;
        if (!cholesky_factor(Z[b], L)) {
            res.message = "starting point not strictly feasible";
            return res;
        }
    }

    const double cnorm = std::max(1.0, norm_inf(c));
    const double y0norm = norm2(y);
    int stall_count = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    int last_progress = 0;

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        res.iterations = iter + 1;

        // residuals and gap
        Vector rd = c;
        double gap = 0.0, dual_obj = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            gap += trace_product(X[b], Z[b]);
            dual_obj -= trace_product(X[b], blocks[b].F0);
            for (const auto& [k, F] : blocks[b].terms)
                rd[k] -= trace_product(X[b], F);
        }
        const double primal_obj = dot(c, y);
        const double rd_norm = norm_inf(rd);
        res.trace.push_back({iter, primal_obj, dual_obj, gap, rd_norm, 0.0});
        res.gap = gap;
        res.y = y;
        res.X = X;

        if (early_exit) {
            double margin = std::numeric_limits<double>::infinity();
            for (std::size_t b = 0; b < nb; ++b)
                margin = std::min(margin, sym_lambda_min(Z[b]));
            if (early_exit(y, margin)) {
                res.early_stop = true;
                res.status = SolveStatus::optimal;
                return res;
            }
        }

        const double scale = std::max({1.0, std::abs(primal_obj), std::abs(dual_obj)});
        if (gap <= opts.gap_tol * scale && rd_norm <= opts.feas_tol * cnorm) {
            res.status = SolveStatus::optimal;
            return res;
        }
        if (gap < 0.90 * best_gap) {
            best_gap = gap;
            last_progress = iter;
        }
        if (stall_count >= 3 || iter - last_progress > 20) {
            res.message = (gap <= 1e3 * opts.gap_tol * scale &&
                           rd_norm <= 1e3 * opts.feas_tol * cnorm)
                              ? "stalled near optimum"
                              : "step length collapsed";
            return res;
        }

        if (norm2(y) > 1e10 * (1.0 + y0norm)) {
            res.message = "iterates diverging";
            return res;
        }

        const double mu = gap / nu;

        // factorizations shared by predictor and corrector
        std::vector<Matrix> Zi(nb);
        for (std::size_t b = 0; b < nb; ++b) {
            Matrix L;
            if (!cholesky_factor(Z[b], L)) {
                res.message = "loss of primal definiteness";
                return res;
            }
            Zi[b] = cholesky_solve(L, Matrix::identity(blocks[b].dim));
        }

        // Schur complement M_jk = sum_b tr(X Fk Zi Fj)
        Matrix M(p, p);
        for (std::size_t b = 0; b < nb; ++b) {
            std::vector<Matrix> G;
            G.reserve(blocks[b].terms.size());
            for (const auto& [k, F] : blocks[b].terms)
                G.push_back(X[b] * F * Zi[b]);
            for (std::size_t a = 0; a < blocks[b].terms.size(); ++a)
                for (std::size_t bb = 0; bb < blocks[b].terms.size(); ++bb)
                    M(blocks[b].terms[bb].first, blocks[b].terms[a].first) +=
                        trace_product(G[a], blocks[b].terms[bb].second);
        }
        M = M.symmetric_part();

        Matrix ML;
        {
            bool ok = cholesky_factor(M, ML);
            double jitter = 1e-14 * std::max(1.0, M.trace() / p);
            for (int tries = 0; !ok && tries < 6; ++tries) {
                Matrix Mj = M;
                for (int i = 0; i < p; ++i)
                    Mj(i, i) += jitter;
                ok = cholesky_factor(Mj, ML);
                jitter *= 100.0;
            }
            if (!ok) {
                res.message = "Schur system not positive definite";
                return res;
            }
        }

        auto solve_direction = [&](double sigma_mu, const std::vector<Matrix>* cross)
            -> std::tuple<Vector, std::vector<Matrix>, std::vector<Matrix>> {
            Vector rhs(p, 0.0);
            for (int k = 0; k < p; ++k)
                rhs[k] = -c[k];
            for (std::size_t b = 0; b < nb; ++b)
                for (const auto& [k, F] : blocks[b].terms) {
                    if (sigma_mu != 0.0)
                        rhs[k] += sigma_mu * trace_product(Zi[b], F);
                    if (cross)
                        rhs[k] -= trace_product((*cross)[b], F);
                }
            Vector dy = cholesky_solve(ML, rhs);

            std::vector<Matrix> dZ(nb), dX(nb);
            for (std::size_t b = 0; b < nb; ++b) {
                dZ[b] = Matrix(blocks[b].dim, blocks[b].dim);
                for (const auto& [k, F] : blocks[b].terms)
                    if (dy[k] != 0.0)
                        dZ[b] += dy[k] * F;
                Matrix D = -1.0 * X[b] - X[b] * dZ[b] * Zi[b];
                if (sigma_mu != 0.0)
                    D += sigma_mu * Zi[b];
                if (cross)
                    D -= (*cross)[b];
                dX[b] = D.symmetric_part();
            }
            return {dy, dZ, dX};
        };

        auto step_lengths = [&](const std::vector<Matrix>& dZ, const std::vector<Matrix>& dX) {
            double ap = std::numeric_limits<double>::infinity();
            double ad = std::numeric_limits<double>::infinity();
            for (std::size_t b = 0; b < nb; ++b) {
                ap = std::min(ap, max_psd_step(Z[b], dZ[b]));
                ad = std::min(ad, max_psd_step(X[b], dX[b]));
            }
            return std::pair<double, double>{ap, ad};
        };

        // predictor
        auto [dy_aff, dZ_aff, dX_aff] = solve_direction(0.0, nullptr);
        auto [ap_aff, ad_aff] = step_lengths(dZ_aff, dX_aff);
        const double aaff_p = std::min(1.0, 0.99 * ap_aff);
        const double aaff_d = std::min(1.0, 0.99 * ad_aff);

        double gap_aff = 0.0;
        for (std::size_t b = 0; b < nb; ++b)
            gap_aff += trace_product(X[b] + aaff_d * dX_aff[b], Z[b] + aaff_p * dZ_aff[b]);
        gap_aff = std::max(gap_aff, 0.0);
        double sigma = std::pow(gap_aff / gap, 3.0);
        sigma = std::min(0.9, std::max(1e-6, sigma));

        // corrector with Mehrotra cross term dX_aff dZ_aff Zi
        std::vector<Matrix> cross(nb);
        for (std::size_t b = 0; b < nb; ++b)
            cross[b] = aaff_d * aaff_p * (dX_aff[b] * dZ_aff[b] * Zi[b]);
        auto [dy, dZ, dX] = solve_direction(sigma * mu, &cross);
        auto [ap_raw, ad_raw] = step_lengths(dZ, dX);

        // If the corrector direction is blocked, fall back to a plain
        // centering step.
        if (std::min(ap_raw, ad_raw) < 0.1) {
            auto [dy_c, dZ_c, dX_c] = solve_direction(std::max(sigma, 0.5) * mu, nullptr);
            auto [ap_c, ad_c] = step_lengths(dZ_c, dX_c);
            if (std::min(ap_c, ad_c) > std::min(ap_raw, ad_raw)) {
                dy = dy_c;
                dZ = dZ_c;
                dX = dX_c;
                ap_raw = ap_c;
                ad_raw = ad_c;
            }
        }

        const double frac = (gap <= 1e-5 * std::max(1.0, std::abs(primal_obj))) ? 0.999 : 0.98;
        double alpha_p = std::min(1.0, frac * ap_raw);
        double alpha_d = std::min(1.0, frac * ad_raw);
        if (!(alpha_p > 1e-12) || !(alpha_d > 1e-12)) {
            res.message = (gap <= 1e3 * opts.gap_tol * scale &&
                           rd_norm <= 1e3 * opts.feas_tol * cnorm)
                              ? "stalled near optimum"
                              : "step length collapsed";
            return res;
        }
        stall_count = std::min(alpha_p, alpha_d) < 1e-4 ? stall_count + 1 : 0;

        for (int k = 0; k < p; ++k)
            y[k] += alpha_p * dy[k];
        bool ok = true;
        for (std::size_t b = 0; b < nb; ++b) {
            X[b] = (X[b] + alpha_d * dX[b]).symmetric_part();
            Z[b] = eval(b, y);
            Matrix L;
            if (!cholesky_factor(Z[b], L))
                ok = false;
        }
        // Fraction-to-boundary should keep Z strictly feasible; if roundoff
        // broke it, retreat along the primal step until it holds again.
        for (int shrink = 0; !ok && shrink < 40; ++shrink) {
            for (int k = 0; k < p; ++k)
                y[k] -= 0.5 * alpha_p * dy[k];
            alpha_p *= 0.5;
            ok = true;
            for (std::size_t b = 0; b < nb; ++b) {
                Z[b] = eval(b, y);
                Matrix L;
                if (!cholesky_factor(Z[b], L))
                    ok = false;
            }
        }
        if (!ok) {
            res.message = "could not restore strict feasibility";
            return res;
        }
        res.trace.back().step = std::min(alpha_p, alpha_d);
    }

    // max_iter exceeded; the final iterate is attached.
    res.y = y;
    res.X = X;
    res.message = "max_iter exceeded";
    return res;
}

inline std::vector<ConstraintBlock> blocks_with_bounds(const SdpProblem& problem) {
    std::vector<ConstraintBlock> blocks = problem.constraints;
    for (const auto& vb : problem.var_bounds) {
        if (std::isfinite(vb.lower)) {
            ConstraintBlock blk;
            blk.dim = 1;
            blk.F0 = Matrix(1, 1);
            blk.F0(0, 0) = -vb.lower;
            Matrix one(1, 1);
            one(0, 0) = 1.0;
            blk.terms.emplace_back(vb.var, one);
            blk.name = "lb(y" + std::to_string(vb.var) + ")";
            blocks.push_back(std::move(blk));
        }
        if (std::isfinite(vb.upper)) {
            ConstraintBlock blk;
            blk.dim = 1;
            blk.F0 = Matrix(1, 1);
            blk.F0(0, 0) = vb.upper;
            Matrix mone(1, 1);
            mone(0, 0) = -1.0;
            blk.terms.emplace_back(vb.var, mone);
            blk.name = "ub(y" + std::to_string(vb.var) + ")";
            blocks.push_back(std::move(blk));
        }
    }
    return blocks;
}

}  // namespace detail

// Max-margin feasibility stage: maximize s subject to F_b(y) - s I >= 0 for
// every block (and s below a large cap). Exits early as soon as a strictly
// feasible witness is seen; on convergence with nonpositive margin the
// normalized dual blocks form the improving-ray evidence of infeasibility.
inline Phase1Result phase1(const SdpProblem& problem, const SolveOptions& opts = {},
                           const Vector* y_start = nullptr) {
    problem.validate();
    Phase1Result out;

    std::vector<ConstraintBlock> blocks = detail::blocks_with_bounds(problem);
    const int p = problem.nvars;
    const int svar = p;

    Vector y0(p, 0.0);
    if (y_start)
        y0 = *y_start;

    double margin0 = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        Matrix Z = blocks[b].F0;
        for (const auto& [k, F] : blocks[b].terms)
            Z += y0[k] * F;
        margin0 = std::min(margin0, detail::sym_lambda_min(Z));
    }
    if (margin0 > 1e-6) {  // already strictly feasible as given
        out.strictly_feasible = true;
        out.status = SolveStatus::optimal;
        out.y = y0;
        out.margin = margin0;
        out.message = "starting point already strictly feasible";
        return out;
    }

    const double cap = std::max(1e6, 10.0 * std::abs(margin0));
    std::vector<ConstraintBlock> aug = blocks;
    for (auto& blk : aug) {
        Matrix mI = -1.0 * Matrix::identity(blk.dim);
        blk.terms.emplace_back(svar, mI);
    }
    {
        ConstraintBlock capblk;
        capblk.dim = 1;
        capblk.F0 = Matrix(1, 1);
        capblk.F0(0, 0) = cap;
        Matrix mone(1, 1);
        mone(0, 0) = -1.0;
        capblk.terms.emplace_back(svar, mone);
        capblk.name = "phase1-cap";
        aug.push_back(std::move(capblk));
    }

    Vector c(p + 1, 0.0);
    c[svar] = -1.0;  // maximize s

    Vector yext = y0;
    yext.push_back(margin0 - 1.0);

    const double exit_target = std::max(1e-7, 10.0 * opts.feas_tol);
    double best_margin = -std::numeric_limits<double>::infinity();
    Vector best_y;
    auto early = [&](const Vector& yy, double /*aug_margin*/) {
        // margin of the *original* blocks at the current y
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            Matrix Z = blocks[b].F0;
            for (const auto& [k, F] : blocks[b].terms)
                Z += yy[k] * F;
            m = std::min(m, detail::sym_lambda_min(Z));
        }
        if (m > best_margin) {
            best_margin = m;
            best_y = Vector(yy.begin(), yy.begin() + p);
        }
        return m >= exit_target;
    };

    detail::EngineResult er = detail::run_interior_point(aug, c, yext, opts, early);
    out.iterations = er.iterations;

    if (best_margin > 0.0) {
        out.strictly_feasible = true;
        out.status = SolveStatus::optimal;
        out.y = best_y;
        out.margin = best_margin;
        return out;
    }

    const bool converged_enough =
        (er.status == SolveStatus::optimal && !er.early_stop) ||
        er.message == "stalled near optimum";
    if (converged_enough) {
        const double s_opt = er.y[svar];
        // the margin estimate is only as sharp as the remaining duality gap
        const double tol = std::max({1e-9, 10.0 * opts.gap_tol, er.gap});
        if (s_opt <= -tol) {
            out.status = SolveStatus::infeasible;
            out.margin = s_opt;
            out.y = Vector(er.y.begin(), er.y.begin() + p);
            // Farkas direction: dual blocks normalized to unit total trace.
            double total = 0.0;
            for (std::size_t b = 0; b < blocks.size(); ++b)
                total += er.X[b].trace();
            if (total > 0.0)
                for (std::size_t b = 0; b < blocks.size(); ++b)
                    out.evidence.push_back((1.0 / total) * er.X[b]);
            out.message = "max margin " + std::to_string(s_opt);
            return out;
        }
        out.status = SolveStatus::numerical_failure;
        out.margin = s_opt;
        out.y = Vector(er.y.begin(), er.y.begin() + p);
        out.message = "feasible set has empty interior (max margin ~ 0)";
        return out;
    }

    out.status = SolveStatus::numerical_failure;
    out.margin = best_margin;
    out.message = "phase1 did not converge: " + er.message;
    return out;
}

inline SdpSolution solve(const SdpProblem& problem, const SolveOptions& opts = {}) {
    problem.validate();
    SdpSolution sol;

    Phase1Result p1 = phase1(problem, opts);
    if (!p1.strictly_feasible) {
        sol.status = p1.status;
        sol.y = p1.y;
        sol.iterations = p1.iterations;
        sol.infeasibility_evidence = p1.evidence;
        sol.message = p1.message;
        if (!sol.y.empty()) {
            sol.objective_value = dot(problem.objective, sol.y);
            sol.min_eigs.resize(problem.constraints.size());
            for (std::size_t b = 0; b < problem.constraints.size(); ++b)
                sol.min_eigs[b] = detail::sym_lambda_min(problem.eval_constraint(static_cast<int>(b), sol.y));
        }
        return sol;
    }

    std::vector<ConstraintBlock> blocks = detail::blocks_with_bounds(problem);
    detail::EngineResult er =
        detail::run_interior_point(blocks, problem.objective, p1.y, opts);

    sol.y = er.y;
    sol.iterations = p1.iterations + er.iterations;
    sol.duality_gap = er.gap;
    sol.trace = std::move(er.trace);
    sol.objective_value = dot(problem.objective, sol.y);
    sol.min_eigs.resize(problem.constraints.size());
    for (std::size_t b = 0; b < problem.constraints.size(); ++b)
        sol.min_eigs[b] = detail::sym_lambda_min(problem.eval_constraint(static_cast<int>(b), sol.y));

    if (er.status == SolveStatus::optimal) {
        sol.status = SolveStatus::optimal;
    } else {
        // Iterates stay strictly feasible, so a run that stalls just short of
        // the gap tolerance still carries a usable feasible point. Exceeding
        // max_iter is reported as a numerical failure with the last iterate
        // attached.
        double minEig = std::numeric_limits<double>::infinity();
        for (double e : sol.min_eigs)
            minEig = std::min(minEig, e);
        sol.status = (minEig >= -opts.feas_tol && er.message == "stalled near optimum")
                         ? SolveStatus::feasible
                         : SolveStatus::numerical_failure;
        sol.message = er.message;
    }
    return sol;
}

inline FeasibilityReport check_feasibility(const SdpProblem& problem, const Vector& y,
                                           double tol) {
    problem.validate();
    if (static_cast<int>(y.size()) != problem.nvars)
        throw std::invalid_argument("check_feasibility: y length != nvars");
    FeasibilityReport rep;
    for (std::size_t b = 0; b < problem.constraints.size(); ++b) {
        FeasibilityEntry e;
        e.name = problem.constraints[b].name.empty()
                     ? ("block" + std::to_string(b))
                     : problem.constraints[b].name;
        e.min_eig = detail::sym_lambda_min(problem.eval_constraint(static_cast<int>(b), y));
        e.pass = e.min_eig >= -tol;
        rep.pass = rep.pass && e.pass;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

}  // namespace satstab::sdp
