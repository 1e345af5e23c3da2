#pragma once

// Symmetric matrix kernel: value type with enforced symmetry, He()/direct-sum
// construction helpers, a cyclic-Jacobi eigensolver and definiteness tests.
// Every matrix inequality assembled by the toolkit is built from these pieces.

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "satstab/matrix.hpp"

namespace satstab {

// Symmetric square matrix. Storage keeps entries(i,j) == entries(j,i) exactly:
// writes mirror, and construction from a general matrix symmetrizes via
// (M + M^T)/2 after rejecting asymmetry beyond a relative tolerance.
class SymMatrix {
public:
    SymMatrix() = default;

    explicit SymMatrix(int dim) : m_(dim, dim) {
        if (dim < 1)
            throw std::invalid_argument("SymMatrix: dim must be >= 1");
    }

    static SymMatrix from(const Matrix& M, double asym_tol = 1e-8) {
        M.require_square("SymMatrix::from");
        const double scale = std::max(1.0, M.max_abs());
        if (M.asymmetry() > asym_tol * scale)
            throw std::invalid_argument("SymMatrix::from: input asymmetric beyond tolerance");
        SymMatrix s;
        s.m_ = M.symmetric_part();
        return s;
    }

    static SymMatrix identity(int n) {
        SymMatrix s(n);
        for (int i = 0; i < n; ++i)
            s.m_(i, i) = 1.0;
        return s;
    }

    static SymMatrix diag(const Vector& d) {
        SymMatrix s(static_cast<int>(d.size()));
        for (int i = 0; i < s.dim(); ++i)
            s.m_(i, i) = d[i];
        return s;
    }

    int dim() const { return m_.rows(); }
    double operator()(int i, int j) const { return m_(i, j); }

    void set(int i, int j, double v) {
        m_(i, j) = v;
        m_(j, i) = v;
    }

    const Matrix& mat() const { return m_; }

    double trace() const { return m_.trace(); }
    double frobenius_norm() const { return m_.frobenius_norm(); }

    SymMatrix& operator+=(const SymMatrix& o) {
        m_ += o.m_;
        return *this;
    }
    SymMatrix& operator*=(double s) {
        m_ *= s;
        return *this;
    }
    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

private:
    Matrix m_;
};

// He(A) = A + A^T.
inline SymMatrix he(const Matrix& M) {
    M.require_square("he");
    SymMatrix s(M.rows());
    for (int i = 0; i < M.rows(); ++i)
        for (int j = i; j < M.cols(); ++j)
            s.set(i, j, M(i, j) + M(j, i));
    return s;
}

// Ordered list of square block dimensions; the bookkeeping behind every
// direct sum and state partition in the toolkit.
struct BlockSpec {
    std::vector<int> dims;

    int total() const { return std::accumulate(dims.begin(), dims.end(), 0); }

    int offset(int k) const {
        int o = 0;
        for (int i = 0; i < k; ++i)
            o += dims[i];
        return o;
    }

    int count() const { return static_cast<int>(dims.size()); }
};

inline Matrix block_diag(const std::vector<Matrix>& blocks) {
    if (blocks.empty())
        throw std::invalid_argument("block_diag: empty block list");
    int total = 0;
    for (const Matrix& b : blocks) {
        b.require_square("block_diag");
        total += b.rows();
    }
    Matrix r(total, total);
    int o = 0;
    for (const Matrix& b : blocks) {
        r.set_block(o, o, b);
        o += b.rows();
    }
    return r;
}

inline SymMatrix block_diag_sym(const std::vector<SymMatrix>& blocks) {
    std::vector<Matrix> ms;
    ms.reserve(blocks.size());
    for (const SymMatrix& b : blocks)
        ms.push_back(b.mat());
    return SymMatrix::from(block_diag(ms), 0.0);
}

struct EigResult {
    Vector values;   // descending
    Matrix vectors;  // orthonormal columns, vectors.col(k) pairs with values[k]
};

// Cyclic Jacobi rotations. Problem dimensions here stay small (a few tens),
// so robustness wins over speed.
inline EigResult sym_eig(const SymMatrix& S) {
    const int n = S.dim();
    Matrix A = S.mat();
    Matrix V = Matrix::identity(n);
    const double scale = std::max(1.0, A.frobenius_norm());

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q)
                off += 2.0 * A(p, q) * A(p, q);
        if (std::sqrt(off) <= 1e-15 * scale)
            break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) <= 1e-300)
                    continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p);
                    const double akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k);
                    const double aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p);
                    const double vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
                A(p, q) = 0.0;
                A(q, p) = 0.0;
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return A(a, a) > A(b, b); });

    EigResult r;
    r.values.resize(n);
    r.vectors = Matrix(n, n);
    for (int k = 0; k < n; ++k) {
        r.values[k] = A(order[k], order[k]);
        for (int i = 0; i < n; ++i)
            r.vectors(i, k) = V(i, order[k]);
    }
    return r;
}

inline double lambda_min(const SymMatrix& S) { return sym_eig(S).values.back(); }
inline double lambda_max(const SymMatrix& S) { return sym_eig(S).values.front(); }

inline double lambda_min_of(const Matrix& M, double asym_tol = 1e-8) {
    return lambda_min(SymMatrix::from(M, asym_tol));
}
inline double lambda_max_of(const Matrix& M, double asym_tol = 1e-8) {
    return lambda_max(SymMatrix::from(M, asym_tol));
}

enum class Definiteness { pos, neg, psd, nsd };

inline bool is_definite(const SymMatrix& S, Definiteness sense, double margin = 1e-9) {
    if (margin < 0.0)
        throw std::invalid_argument("is_definite: margin must be >= 0");
    switch (sense) {
    case Definiteness::pos: return lambda_min(S) > margin;
    case Definiteness::psd: return lambda_min(S) >= -margin;
    case Definiteness::neg: return lambda_max(S) < -margin;
    case Definiteness::nsd: return lambda_max(S) <= margin;
    }
    return false;
}

}  // namespace satstab
