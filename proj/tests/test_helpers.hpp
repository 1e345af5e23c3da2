#pragma once

#include <cmath>
#include <random>

#include "satstab/lmi.hpp"
#include "satstab/matrix.hpp"
#include "satstab/symmat.hpp"

namespace satstab::testing {

// Two-state plant with one saturating input and two independently sampled
// state clusters; the worked example used across the integration tests.
inline lmi::PlantModel example_plant() {
    lmi::PlantModel p;
    p.A = Matrix::from_rows({{-0.8, -0.01}, {1.0, 0.1}});
    p.B = Matrix::from_rows({{0.4}, {0.1}});
    p.ubar = {1.0};
    p.partition = {1, 1};
    p.T1 = {0.05, 0.05};
    p.T2 = {0.3, 0.7};
    return p;
}

inline Matrix example_gain() { return Matrix::from_rows({{-0.444, -0.495}}); }

inline Matrix random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Matrix M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            M(i, j) = dist(rng);
    return M;
}

inline SymMatrix random_symmetric(std::mt19937_64& rng, int n, double scale = 1.0) {
    return SymMatrix::from(random_matrix(rng, n, n, scale).symmetric_part(), 0.0);
}

inline bool approx_equal(const Matrix& a, const Matrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        return false;
    return (a - b).max_abs() <= tol;
}

// Uniform sample from the ellipsoid { x : x' P x <= level }, P symmetric PD.
inline Vector sample_ellipsoid(std::mt19937_64& rng, const SymMatrix& P, double level) {
    const int d = P.dim();
    const EigResult e = sym_eig(P);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector z(d);
    for (double& v : z)
        v = gauss(rng);
    const double zn = norm2(z);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double radius = std::pow(unif(rng), 1.0 / d);
    Vector x(d, 0.0);
    for (int k = 0; k < d; ++k) {
        const double coord = radius * z[k] / zn * std::sqrt(level / e.values[k]);
        for (int i = 0; i < d; ++i)
            x[i] += e.vectors(i, k) * coord;
    }
    return x;
}

// Truncated-series matrix exponential, accurate for moderate norms; an
// integrator-independent reference for linear flows.
inline Matrix expm_series(const Matrix& M, int terms = 40) {
    Matrix R = Matrix::identity(M.rows());
    Matrix P = Matrix::identity(M.rows());
    double fact = 1.0;
    for (int k = 1; k <= terms; ++k) {
        P = P * M;
        fact *= k;
        R += (1.0 / fact) * P;
    }
    return R;
}

}  // namespace satstab::testing
