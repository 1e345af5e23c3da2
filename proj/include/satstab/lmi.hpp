#pragma once

// Assembly of the toolkit's matrix inequalities from a plant description and
// decision variables: the per-channel sector-inclusion block, the
// vertex-parameterized analysis and design blocks, the trace-link block, and
// the flattening of all of them into SdpProblem form. Also enumerates the
// vertices of the exponential polytope swept by the timer-dependent weights.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "satstab/matrix.hpp"
#include "satstab/sdp.hpp"
#include "satstab/symmat.hpp"

namespace satstab::lmi {

// Plant data: dx_p = A x_p + B sat(v), per-channel measurement clocks with
// inter-sample times in [T1_i, T2_i] over the state partition.
struct PlantModel {
    Matrix A;                    // n x n
    Matrix B;                    // n x m
    Vector ubar;                 // m saturation levels, > 0
    std::vector<int> partition;  // q block dims, sum == n
    Vector T1;                   // q lower inter-sample bounds, > 0
    Vector T2;                   // q upper inter-sample bounds, >= T1

    int n() const { return A.rows(); }
    int m() const { return B.cols(); }
    int q() const { return static_cast<int>(partition.size()); }

    BlockSpec blocks() const { return BlockSpec{partition}; }

    void validate() const {
        if (A.rows() != A.cols() || A.rows() < 1)
            throw std::invalid_argument("A: must be square and nonempty");
        if (B.rows() != A.rows() || B.cols() < 1)
            throw std::invalid_argument("B: row count must match A");
        if (static_cast<int>(ubar.size()) != B.cols())
            throw std::invalid_argument("ubar: length must equal input count");
        for (double u : ubar)
            if (!(u > 0.0))
                throw std::invalid_argument("ubar: saturation levels must be positive");
        if (partition.empty())
            throw std::invalid_argument("partition: must be nonempty");
        int sum = 0;
        for (int d : partition) {
            if (d < 1)
                throw std::invalid_argument("partition: block dims must be >= 1");
            sum += d;
        }
        if (sum != n())
            throw std::invalid_argument("partition: block dims must sum to the state dimension");
        if (static_cast<int>(T1.size()) != q() || static_cast<int>(T2.size()) != q())
            throw std::invalid_argument("T1/T2: need one bound pair per channel");
        for (int i = 0; i < q(); ++i) {
            if (!(T1[i] > 0.0))
                throw std::invalid_argument("T1: lower inter-sample bounds must be positive");
            if (!(T2[i] >= T1[i]))
                throw std::invalid_argument("T2: upper bounds must dominate T1");
        }
    }
};

// Concrete values for all decision variables appearing in the inequalities.
struct LmiValues {
    Matrix W;                // n x n symmetric
    std::vector<Matrix> R;   // q symmetric blocks, dims per partition
    Vector S;                // m diagonal entries
    Matrix Z;                // m x n
    Matrix J;                // m x n (analysis; identically zero in design)
    Matrix Y;                // m x n (design only)
    double iota = 0.0;       // 1 / mu_bar
    Matrix MW;               // n x n symmetric (objective surrogate)
};

// ---------------------------------------------------------------------------
// vertex enumeration
// ---------------------------------------------------------------------------

struct VertexSet {
    std::vector<Vector> psi;  // 2^q entries, psi[v][i] in {1, exp(sigma_i T2_i)}

    int count() const { return static_cast<int>(psi.size()); }

    // expand vertex v to the n x n diagonal weight matrix over the partition
    Matrix theta(int v, const std::vector<int>& partition) const {
        int n = 0;
        for (int d : partition)
            n += d;
        Matrix T(n, n);
        int o = 0;
        for (std::size_t i = 0; i < partition.size(); ++i) {
            for (int k = 0; k < partition[i]; ++k)
                T(o + k, o + k) = psi[v][i];
            o += partition[i];
        }
        return T;
    }
};

// All 2^q corner weight patterns psi_i in {1, exp(sigma_i T2_i)} in binary
// counter order: channel 1 is the fastest-flipping bit, bit 0 maps to 1 and
// bit 1 to the exponential.
inline VertexSet enumerate_vertices(const Vector& sigma, const Vector& T2,
                                    const std::vector<int>& partition) {
    const int q = static_cast<int>(partition.size());
    if (static_cast<int>(sigma.size()) != q || static_cast<int>(T2.size()) != q)
        throw std::invalid_argument("enumerate_vertices: sigma/T2 length must equal channel count");
    if (q > 20)
        throw std::invalid_argument("enumerate_vertices: refusing q > 20 (vertex blow-up)");
    VertexSet vs;
    const int count = 1 << q;
    vs.psi.reserve(count);
    for (int v = 0; v < count; ++v) {
        Vector p(q);
        for (int i = 0; i < q; ++i)
            p[i] = ((v >> i) & 1) ? std::exp(sigma[i] * T2[i]) : 1.0;
        vs.psi.push_back(std::move(p));
    }
    return vs;
}

// Theta(tau) = diag over the partition of exp(sigma_i tau_i).
inline Matrix theta_of_tau(const Vector& sigma, const Vector& tau,
                           const std::vector<int>& partition) {
    int n = 0;
    for (int d : partition)
        n += d;
    Matrix T(n, n);
    int o = 0;
    for (std::size_t i = 0; i < partition.size(); ++i) {
        const double w = std::exp(sigma[i] * tau[i]);
        for (int k = 0; k < partition[i]; ++k)
            T(o + k, o + k) = w;
        o += partition[i];
    }
    return T;
}

// ---------------------------------------------------------------------------
// block builders (numeric; affine in the decision variables)
// ---------------------------------------------------------------------------

namespace detail {

// Symmetric block matrix assembled from an upper-triangular grid of blocks.
class SymBlockBuilder {
public:
    explicit SymBlockBuilder(std::vector<int> dims) : dims_(std::move(dims)) {
        int total = 0;
        for (int d : dims_)
            total += d;
        M_ = Matrix(total, total);
    }

    void set(int bi, int bj, const Matrix& blk) {
        const int r0 = offset(bi), c0 = offset(bj);
        if (blk.rows() != dims_[bi] || blk.cols() != dims_[bj])
            throw std::invalid_argument("SymBlockBuilder: block shape mismatch");
        M_.set_block(r0, c0, blk);
        if (bi != bj)
            M_.set_block(c0, r0, blk.transpose());
    }

    const Matrix& result() const { return M_; }

private:
    int offset(int k) const {
        int o = 0;
        for (int i = 0; i < k; ++i)
            o += dims_[i];
        return o;
    }

    std::vector<int> dims_;
    Matrix M_;
};

inline Matrix r_hat(const std::vector<Matrix>& R) { return block_diag(R); }

// Direct sum of c_i * R_i with per-channel scalars c_i; exactly symmetric.
inline Matrix scaled_r_sum(const std::vector<Matrix>& R, const Vector& coef) {
    std::vector<Matrix> blocks;
    blocks.reserve(R.size());
    for (std::size_t i = 0; i < R.size(); ++i)
        blocks.push_back(coef[i] * R[i]);
    return block_diag(blocks);
}

}  // namespace detail

// Per-channel sector-inclusion block
//   [ W        0      Z(i)^T   ]
//   [ *     (+)R_j    J(i)^T   ]  >= 0
//   [ *        *    ubar_i^2 iota ]
// with J(i) identically zero on the design path.
inline Matrix inclusion_block(const PlantModel& plant, const LmiValues& vals, int channel,
                              bool with_J) {
    const int n = plant.n();
    if (channel < 0 || channel >= plant.m())
        throw std::invalid_argument("inclusion_block: channel index out of range");
    detail::SymBlockBuilder b({n, n, 1});
    b.set(0, 0, vals.W);
    b.set(1, 1, detail::r_hat(vals.R));
    Matrix zi(n, 1), ji(n, 1);
    for (int k = 0; k < n; ++k) {
        zi(k, 0) = vals.Z(channel, k);
        ji(k, 0) = with_J ? vals.J(channel, k) : 0.0;
    }
    b.set(0, 2, zi);
    b.set(1, 2, ji);
    Matrix corner(1, 1);
    corner(0, 0) = plant.ubar[channel] * plant.ubar[channel] * vals.iota;
    b.set(2, 2, corner);
    return b.result();
}

// Vertex-parameterized analysis block, required negative definite:
//   [ He((A+BK)W)   -BK                    BS - WK^T - Z^T ]
//   [ *             He(RhPsi A) - Sg RhPsi K^T - J^T       ]
//   [ *             *                      -2S             ]
// where RhPsi is the direct sum of psi_i R_i and Sg of sigma_i I.
inline Matrix analysis_block(const PlantModel& plant, const Matrix& K, const LmiValues& vals,
                             const Vector& sigma, const Matrix& theta) {
    const int n = plant.n();
    const int m = plant.m();
    if (K.rows() != m || K.cols() != n)
        throw std::invalid_argument("analysis_block: K must be m x n");

    Vector psi(plant.q()), spsi(plant.q());
    int o = 0;
    for (int i = 0; i < plant.q(); ++i) {
        psi[i] = theta(o, o);
        spsi[i] = sigma[i] * psi[i];
        o += plant.partition[i];
    }
    const Matrix RtPsi = detail::scaled_r_sum(vals.R, psi);
    const Matrix SgRtPsi = detail::scaled_r_sum(vals.R, spsi);

    detail::SymBlockBuilder b({n, n, m});
    b.set(0, 0, he((plant.A + plant.B * K) * vals.W).mat());
    b.set(0, 1, -1.0 * (plant.B * K));
    b.set(0, 2, plant.B * Matrix::diag(vals.S) - vals.W * K.transpose() - vals.Z.transpose());
    b.set(1, 1, he(RtPsi * plant.A).mat() - SgRtPsi);
    b.set(1, 2, K.transpose() - vals.J.transpose());
    b.set(2, 2, -2.0 * Matrix::diag(vals.S));
    return b.result();
}

// Vertex-parameterized design block, required negative definite:
//   [ He(AW + BY)  -BY      BS - Y^T - Z^T   0        ]
//   [ *            -2aW     Y^T              a I      ]
//   [ *            *        -2S              0        ]
//   [ *            *        *                He(RhPsi A) - Sg RhPsi ]
// The gain is recovered afterwards as K = Y W^{-1}.
inline Matrix design_block(const PlantModel& plant, const LmiValues& vals, const Vector& sigma,
                           double alpha, const Matrix& theta) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("design_block: alpha must be positive");
    const int n = plant.n();
    const int m = plant.m();

    Vector psi(plant.q()), spsi(plant.q());
    int o = 0;
    for (int i = 0; i < plant.q(); ++i) {
        psi[i] = theta(o, o);
        spsi[i] = sigma[i] * psi[i];
        o += plant.partition[i];
    }
    const Matrix RtPsi = detail::scaled_r_sum(vals.R, psi);
    const Matrix SgRtPsi = detail::scaled_r_sum(vals.R, spsi);

    detail::SymBlockBuilder b({n, n, m, n});
    b.set(0, 0, he(plant.A * vals.W + plant.B * vals.Y).mat());
    b.set(0, 1, -1.0 * (plant.B * vals.Y));
    b.set(0, 2, plant.B * Matrix::diag(vals.S) - vals.Y.transpose() - vals.Z.transpose());
    b.set(0, 3, Matrix(n, n));
    b.set(1, 1, -2.0 * alpha * vals.W);
    b.set(1, 2, vals.Y.transpose());
    b.set(1, 3, alpha * Matrix::identity(n));
    b.set(2, 2, -2.0 * Matrix::diag(vals.S));
    b.set(2, 3, Matrix(m, n));
    b.set(3, 3, he(RtPsi * plant.A).mat() - SgRtPsi);
    return b.result();
}

// Trace-link block [ M_W  I ; I  W ] >= 0, i.e. M_W >= W^{-1}.
inline Matrix mw_link_block(const LmiValues& vals) {
    const int n = vals.W.rows();
    detail::SymBlockBuilder b({n, n});
    b.set(0, 0, vals.MW);
    b.set(0, 1, Matrix::identity(n));
    b.set(1, 1, vals.W);
    return b.result();
}

// ---------------------------------------------------------------------------
// flattening into SdpProblem form
// ---------------------------------------------------------------------------

enum class Mode { analysis, design };

// Scalar indexing of the decision variables: symmetric matrices contribute
// their upper triangles, Z/J/Y are row-major, S its diagonal.
class VarMap {
public:
    VarMap(const PlantModel& plant, Mode mode) : plant_(&plant), mode_(mode) {
        const int n = plant.n();
        const int m = plant.m();
        int off = 0;
        off_W_ = off;
        off += n * (n + 1) / 2;
        off_R_.resize(plant.q());
        for (int i = 0; i < plant.q(); ++i) {
            off_R_[i] = off;
            off += plant.partition[i] * (plant.partition[i] + 1) / 2;
        }
        off_S_ = off;
        off += m;
        off_Z_ = off;
        off += m * n;
        if (mode == Mode::analysis) {
            off_J_ = off;
            off += m * n;
        }
        if (mode == Mode::design) {
            off_Y_ = off;
            off += m * n;
        }
        off_iota_ = off;
        off += 1;
        off_MW_ = off;
        off += n * (n + 1) / 2;
        total_ = off;
    }

    int total() const { return total_; }
    Mode mode() const { return mode_; }
    int iota_index() const { return off_iota_; }

    int w_index(int i, int j) const { return off_W_ + tri_index(i, j, plant_->n()); }
    int mw_index(int i, int j) const { return off_MW_ + tri_index(i, j, plant_->n()); }
    int r_index(int blk, int i, int j) const {
        return off_R_[blk] + tri_index(i, j, plant_->partition[blk]);
    }
    int s_index(int i) const { return off_S_ + i; }
    int z_index(int r, int c) const { return off_Z_ + r * plant_->n() + c; }
    int j_index(int r, int c) const { return off_J_ + r * plant_->n() + c; }
    int y_index(int r, int c) const { return off_Y_ + r * plant_->n() + c; }

    LmiValues unpack(const Vector& y) const {
        const int n = plant_->n();
        const int m = plant_->m();
        LmiValues v;
        v.W = Matrix(n, n);
        v.MW = Matrix(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                v.W(i, j) = v.W(j, i) = y[w_index(i, j)];
                v.MW(i, j) = v.MW(j, i) = y[mw_index(i, j)];
            }
        v.R.resize(plant_->q());
        for (int b = 0; b < plant_->q(); ++b) {
            const int d = plant_->partition[b];
            v.R[b] = Matrix(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j)
                    v.R[b](i, j) = v.R[b](j, i) = y[r_index(b, i, j)];
        }
        v.S.resize(m);
        for (int i = 0; i < m; ++i)
            v.S[i] = y[s_index(i)];
        v.Z = Matrix(m, n);
        v.J = Matrix(m, n);
        v.Y = Matrix(m, n);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c) {
                v.Z(r, c) = y[z_index(r, c)];
                if (mode_ == Mode::analysis)
                    v.J(r, c) = y[j_index(r, c)];
                if (mode_ == Mode::design)
                    v.Y(r, c) = y[y_index(r, c)];
            }
        v.iota = y[off_iota_];
        return v;
    }

    Vector pack(const LmiValues& v) const {
        Vector y(total_, 0.0);
        const int n = plant_->n();
        const int m = plant_->m();
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                y[w_index(i, j)] = v.W(i, j);
                if (!v.MW.empty())
                    y[mw_index(i, j)] = v.MW(i, j);
            }
        for (int b = 0; b < plant_->q(); ++b)
            for (int i = 0; i < plant_->partition[b]; ++i)
                for (int j = i; j < plant_->partition[b]; ++j)
                    y[r_index(b, i, j)] = v.R[b](i, j);
        for (int i = 0; i < m; ++i)
            y[s_index(i)] = v.S[i];
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c) {
                y[z_index(r, c)] = v.Z(r, c);
                if (mode_ == Mode::analysis && !v.J.empty())
                    y[j_index(r, c)] = v.J(r, c);
                if (mode_ == Mode::design && !v.Y.empty())
                    y[y_index(r, c)] = v.Y(r, c);
            }
        y[off_iota_] = v.iota;
        return y;
    }

private:
    static int tri_index(int i, int j, int n) {
        if (i > j)
            std::swap(i, j);
        // row-major upper triangle
        return i * n - i * (i - 1) / 2 + (j - i);
    }

    const PlantModel* plant_;
    Mode mode_;
    int off_W_ = 0, off_S_ = 0, off_Z_ = 0, off_J_ = -1, off_Y_ = -1, off_iota_ = 0,
        off_MW_ = 0;
    std::vector<int> off_R_;
    int total_ = 0;
};

// Objective of the size-criterion scheme:
//   rho1 * iota + rho2 * ( trace(M_W) + sum_i trace(R_i) exp(sigma_i T2_i) ).
inline Vector objective_coefficients(const VarMap& vm, const PlantModel& plant,
                                     double rho1, double rho2, const Vector& sigma) {
    if (!(rho1 > 0.0) || !(rho2 >= 0.0))
        throw std::invalid_argument("objective_coefficients: weights must be positive");
    Vector c(vm.total(), 0.0);
    c[vm.iota_index()] = rho1;
    for (int i = 0; i < plant.n(); ++i)
        c[vm.mw_index(i, i)] = rho2;
    for (int b = 0; b < plant.q(); ++b) {
        const double w = rho2 * std::exp(sigma[b] * plant.T2[b]);
        for (int i = 0; i < plant.partition[b]; ++i)
            c[vm.r_index(b, i, i)] = w;
    }
    return c;
}

struct AssemblyOptions {
    double strict_margin = 1e-6;  // interior shift for the strict (< 0) blocks
    double pd_margin = 1e-6;      // W, R_i, S >= pd_margin * I
    double iota_min = 1e-9;       // keeps mu_bar = 1/iota finite
};

namespace detail {

// Affine flattening of a numeric block builder: evaluate at the origin and at
// unit vectors; exact because every builder is affine in the variables.
template <typename Builder>
void flatten_block(const VarMap& vm, Builder&& build, const std::string& name, bool negate,
                   double shift, sdp::SdpProblem& out) {
    const Vector zero(vm.total(), 0.0);
    Matrix F0 = build(vm.unpack(zero));
    if (negate)
        F0 = -1.0 * F0;
    sdp::ConstraintBlock blk;
    blk.dim = F0.rows();
    for (int i = 0; i < blk.dim; ++i)
        F0(i, i) -= shift;
    blk.F0 = F0;
    blk.name = name;
    Vector unit(vm.total(), 0.0);
    for (int k = 0; k < vm.total(); ++k) {
        unit[k] = 1.0;
        Matrix Fk = build(vm.unpack(unit));
        unit[k] = 0.0;
        if (negate)
            Fk = -1.0 * Fk;
        for (int i = 0; i < blk.dim; ++i)
            Fk(i, i) -= shift;
        Fk -= blk.F0;
        if (Fk.max_abs() > 0.0)
            blk.terms.emplace_back(k, std::move(Fk));
    }
    out.constraints.push_back(std::move(blk));
}

}  // namespace detail

// Flatten the full analysis or design program at fixed (sigma, alpha) into a
// standard-form SDP over the VarMap variables. Strict inequalities carry an
// explicit interior margin so returned solutions are strict-feasibility
// witnesses rather than closed-cone boundary points.
inline sdp::SdpProblem assemble(const PlantModel& plant, Mode mode, const Matrix& K,
                                const Vector& sigma, double alpha,
                                std::pair<double, double> weights,
                                const AssemblyOptions& opts = {}) {
    plant.validate();
    if (static_cast<int>(sigma.size()) != plant.q())
        throw std::invalid_argument("assemble: sigma length must equal channel count");
    for (double s : sigma)
        if (!(s > 0.0))
            throw std::invalid_argument("assemble: sigma entries must be positive");
    if (mode == Mode::design && !(alpha > 0.0))
        throw std::invalid_argument("assemble: alpha must be positive in design mode");

    VarMap vm(plant, mode);
    sdp::SdpProblem prob;
    prob.nvars = vm.total();
    prob.objective = objective_coefficients(vm, plant, weights.first, weights.second, sigma);

    for (int i = 0; i < plant.m(); ++i)
        detail::flatten_block(
            vm,
            [&, i](const LmiValues& v) {
                return inclusion_block(plant, v, i, mode == Mode::analysis);
            },
            "inclusion[" + std::to_string(i) + "]", false, 0.0, prob);

    const VertexSet vs = enumerate_vertices(sigma, plant.T2, plant.partition);
    for (int v = 0; v < vs.count(); ++v) {
        const Matrix theta = vs.theta(v, plant.partition);
        if (mode == Mode::analysis)
            detail::flatten_block(
                vm,
                [&](const LmiValues& vals) {
                    return analysis_block(plant, K, vals, sigma, theta);
                },
                "vertex[" + std::to_string(v) + "]", true, opts.strict_margin, prob);
        else
            detail::flatten_block(
                vm,
                [&](const LmiValues& vals) {
                    return design_block(plant, vals, sigma, alpha, theta);
                },
                "vertex[" + std::to_string(v) + "]", true, opts.strict_margin, prob);
    }

    detail::flatten_block(
        vm, [&](const LmiValues& v) { return mw_link_block(v); }, "mw_link", false, 0.0, prob);

    detail::flatten_block(
        vm, [&](const LmiValues& v) { return v.W; }, "W_pd", false, opts.pd_margin, prob);
    for (int b = 0; b < plant.q(); ++b)
        detail::flatten_block(
            vm, [&, b](const LmiValues& v) { return v.R[b]; },
            "R_pd[" + std::to_string(b) + "]", false, opts.pd_margin, prob);
    detail::flatten_block(
        vm, [&](const LmiValues& v) { return Matrix::diag(v.S); }, "S_pd", false,
        opts.pd_margin, prob);

    prob.var_bounds.push_back({vm.iota_index(), opts.iota_min,
                               std::numeric_limits<double>::infinity()});
    return prob;
}

// Substitute fixed values for a subset of variables, producing a smaller
// problem over the remaining ones (used by the certificate-recovery solves).
struct PinnedProblem {
    sdp::SdpProblem problem;
    std::vector<int> free_to_full;  // new index -> original index
};

inline PinnedProblem pin_variables(const sdp::SdpProblem& full,
                                   const std::vector<std::optional<double>>& pin) {
    if (static_cast<int>(pin.size()) != full.nvars)
        throw std::invalid_argument("pin_variables: mask length must equal nvars");
    PinnedProblem out;
    std::vector<int> remap(full.nvars, -1);
    for (int k = 0; k < full.nvars; ++k)
        if (!pin[k].has_value()) {
            remap[k] = static_cast<int>(out.free_to_full.size());
            out.free_to_full.push_back(k);
        }
    out.problem.nvars = static_cast<int>(out.free_to_full.size());
    out.problem.objective.resize(out.problem.nvars);
    for (int k = 0; k < full.nvars; ++k)
        if (remap[k] >= 0)
            out.problem.objective[remap[k]] = full.objective[k];
    for (const auto& blk : full.constraints) {
        sdp::ConstraintBlock nb;
        nb.dim = blk.dim;
        nb.name = blk.name;
        nb.F0 = blk.F0;
        for (const auto& [k, F] : blk.terms) {
            if (pin[k].has_value())
                nb.F0 += *pin[k] * F;
            else
                nb.terms.emplace_back(remap[k], F);
        }
        out.problem.constraints.push_back(std::move(nb));
    }
    for (const auto& vb : full.var_bounds)
        if (remap[vb.var] >= 0)
            out.problem.var_bounds.push_back({remap[vb.var], vb.lower, vb.upper});
    return out;
}

}  // namespace satstab::lmi
