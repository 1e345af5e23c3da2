#pragma once

// Dense real matrix/vector kernel used throughout satstab. Row-major storage,
// runtime dimensions. Only the operations the toolkit needs: arithmetic,
// blocks, Cholesky and LU solves.

#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace satstab {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vector& a) {
    double m = 0.0;
    for (double v : a)
        m = std::max(m, std::abs(v));
    return m;
}

class Matrix {
public:
    Matrix() = default;

    Matrix(int rows, int cols, double value = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, value) {
        if (rows < 0 || cols < 0)
            throw std::invalid_argument("Matrix: negative dimension");
    }

    static Matrix identity(int n) {
        Matrix I(n, n);
        for (int i = 0; i < n; ++i)
            I(i, i) = 1.0;
        return I;
    }

    static Matrix diag(const Vector& d) {
        Matrix D(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (std::size_t i = 0; i < d.size(); ++i)
            D(static_cast<int>(i), static_cast<int>(i)) = d[i];
        return D;
    }

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        const int r = static_cast<int>(rows.size());
        const int c = r > 0 ? static_cast<int>(rows.begin()->size()) : 0;
        Matrix M(r, c);
        int i = 0;
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != c)
                throw std::invalid_argument("Matrix::from_rows: ragged rows");
            int j = 0;
            for (double v : row)
                M(i, j++) = v;
            ++i;
        }
        return M;
    }

    static Matrix column(const Vector& v) {
        Matrix M(static_cast<int>(v.size()), 1);
        for (std::size_t i = 0; i < v.size(); ++i)
            M(static_cast<int>(i), 0) = v[i];
        return M;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }
    bool square() const { return rows_ == cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    Matrix& operator+=(const Matrix& o) {
        check_same_shape(o, "+=");
        for (std::size_t i = 0; i < a_.size(); ++i)
            a_[i] += o.a_[i];
        return *this;
    }

    Matrix& operator-=(const Matrix& o) {
        check_same_shape(o, "-=");
        for (std::size_t i = 0; i < a_.size(); ++i)
            a_[i] -= o.a_[i];
        return *this;
    }

    Matrix& operator*=(double s) {
        for (double& v : a_)
            v *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }

    friend Matrix operator-(const Matrix& a) {
        Matrix r = a;
        for (double& v : r.a_)
            v = -v;
        return r;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_)
            throw std::invalid_argument("Matrix*: inner dimension mismatch");
        Matrix r(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0)
                    continue;
                for (int j = 0; j < b.cols_; ++j)
                    r(i, j) += aik * b(k, j);
            }
        return r;
    }

    friend Vector operator*(const Matrix& a, const Vector& x) {
        if (a.cols_ != static_cast<int>(x.size()))
            throw std::invalid_argument("Matrix*vec: dimension mismatch");
        Vector y(a.rows_, 0.0);
        for (int i = 0; i < a.rows_; ++i) {
            double s = 0.0;
            for (int j = 0; j < a.cols_; ++j)
                s += a(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    Matrix transpose() const {
        Matrix r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j)
                r(j, i) = (*this)(i, j);
        return r;
    }

    double trace() const {
        require_square("trace");
        double s = 0.0;
        for (int i = 0; i < rows_; ++i)
            s += (*this)(i, i);
        return s;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : a_)
            s += v * v;
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_)
            m = std::max(m, std::abs(v));
        return m;
    }

    Matrix block(int r0, int c0, int nr, int nc) const {
        if (r0 < 0 || c0 < 0 || r0 + nr > rows_ || c0 + nc > cols_)
            throw std::invalid_argument("Matrix::block: out of range");
        Matrix r(nr, nc);
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nc; ++j)
                r(i, j) = (*this)(r0 + i, c0 + j);
        return r;
    }

    void set_block(int r0, int c0, const Matrix& m) {
        if (r0 < 0 || c0 < 0 || r0 + m.rows_ > rows_ || c0 + m.cols_ > cols_)
            throw std::invalid_argument("Matrix::set_block: out of range");
        for (int i = 0; i < m.rows_; ++i)
            for (int j = 0; j < m.cols_; ++j)
                (*this)(r0 + i, c0 + j) = m(i, j);
    }

    Vector row(int i) const {
        Vector r(cols_);
        for (int j = 0; j < cols_; ++j)
            r[j] = (*this)(i, j);
        return r;
    }

    Vector col(int j) const {
        Vector c(rows_);
        for (int i = 0; i < rows_; ++i)
            c[i] = (*this)(i, j);
        return c;
    }

    // (M + M^T)/2
    Matrix symmetric_part() const {
        require_square("symmetric_part");
        Matrix r(rows_, cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j)
                r(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
        return r;
    }

    double asymmetry() const {
        require_square("asymmetry");
        double m = 0.0;
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j)
                m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
        return m;
    }

    void require_square(const char* who) const {
        if (rows_ != cols_)
            throw std::invalid_argument(std::string(who) + ": matrix not square");
    }

private:
    void check_same_shape(const Matrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string("Matrix") + op + ": shape mismatch");
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

inline double quadratic_form(const Matrix& A, const Vector& x) { return dot(x, A * x); }

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
// Returns false (leaving L unspecified) if a pivot drops below zero.
inline bool cholesky_factor(const Matrix& A, Matrix& L) {
    A.require_square("cholesky_factor");
    const int n = A.rows();
    L = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        double d = A(j, j);
        for (int k = 0; k < j; ++k)
            d -= L(j, k) * L(j, k);
        if (d <= 0.0 || !std::isfinite(d))
            return false;
        L(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = A(i, j);
            for (int k = 0; k < j; ++k)
                s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    return true;
}

inline bool is_spd(const Matrix& A) {
    Matrix L;
    return cholesky_factor(A, L);
}

inline Vector cholesky_solve(const Matrix& L, Vector b) {
    const int n = L.rows();
    for (int i = 0; i < n; ++i) {  // L y = b
        double s = b[i];
        for (int k = 0; k < i; ++k)
            s -= L(i, k) * b[k];
        b[i] = s / L(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {  // L^T x = y
        double s = b[i];
        for (int k = i + 1; k < n; ++k)
            s -= L(k, i) * b[k];
        b[i] = s / L(i, i);
    }
    return b;
}

inline Matrix cholesky_solve(const Matrix& L, const Matrix& B) {
    Matrix X(B.rows(), B.cols());
    for (int j = 0; j < B.cols(); ++j) {
        Vector x = cholesky_solve(L, B.col(j));
        for (int i = 0; i < B.rows(); ++i)
            X(i, j) = x[i];
    }
    return X;
}

inline Matrix spd_inverse(const Matrix& A) {
    Matrix L;
    if (!cholesky_factor(A, L))
        throw std::runtime_error("spd_inverse: matrix is not positive definite");
    return cholesky_solve(L, Matrix::identity(A.rows()));
}

// Forward substitution L Y = B and its transpose variant Y L^T = B; used to
// form L^{-1} B L^{-T} congruences in the SDP step-length computation.
inline Matrix lower_solve(const Matrix& L, const Matrix& B) {
    Matrix Y(B.rows(), B.cols());
    for (int j = 0; j < B.cols(); ++j) {
        for (int i = 0; i < B.rows(); ++i) {
            double s = B(i, j);
            for (int k = 0; k < i; ++k)
                s -= L(i, k) * Y(k, j);
            Y(i, j) = s / L(i, i);
        }
    }
    return Y;
}

inline Matrix congruence_by_inverse_factor(const Matrix& L, const Matrix& B) {
    // L^{-1} B L^{-T}
    Matrix Y = lower_solve(L, B);
    return lower_solve(L, Y.transpose()).transpose();
}

// Gaussian elimination with partial pivoting; general square solve.
inline Vector solve_linear(Matrix A, Vector b) {
    A.require_square("solve_linear");
    const int n = A.rows();
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("solve_linear: rhs size mismatch");
    std::vector<int> piv(n);
    for (int i = 0; i < n; ++i)
        piv[i] = i;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A(i, k)) > std::abs(A(p, k)))
                p = i;
        if (A(p, k) == 0.0)
            throw std::runtime_error("solve_linear: singular matrix");
        if (p != k) {
            for (int j = 0; j < n; ++j)
                std::swap(A(k, j), A(p, j));
            std::swap(b[k], b[p]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = A(i, k) / A(k, k);
            if (f == 0.0)
                continue;
            for (int j = k; j < n; ++j)
                A(i, j) -= f * A(k, j);
            b[i] -= f * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j)
            s -= A(i, j) * b[j];
        b[i] = s / A(i, i);
    }
    return b;
}

inline Matrix solve_linear(const Matrix& A, const Matrix& B) {
    Matrix X(B.rows(), B.cols());
    for (int j = 0; j < B.cols(); ++j) {
        Vector x = solve_linear(A, B.col(j));
        for (int i = 0; i < B.rows(); ++i)
            X(i, j) = x[i];
    }
    return X;
}

inline double trace_product(const Matrix& A, const Matrix& B) {
    // trace(A * B) without forming the product; A is m x n, B is n x m.
    if (A.cols() != B.rows() || A.rows() != B.cols())
        throw std::invalid_argument("trace_product: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            s += A(i, j) * B(j, i);
    return s;
}

}  // namespace satstab
