#pragma once

#include <Eigen/Dense>

#include "advgauss/errors.hpp"

namespace advgauss {

using Vec = Eigen::VectorXd;
/// Dense symmetric matrix. Symmetry is a convention maintained by every
/// producer in this library; use `symmetrize` after arithmetic that may
/// break it in the last bit.
using SymMat = Eigen::MatrixXd;
/// Samples stored column-wise: column i is the i-th draw.
using Batch = Eigen::MatrixXd;

struct Norms {
    double l1 = 0.0;        // entrywise sum of |x|
    double l2 = 0.0;        // Euclidean (vectors) or Frobenius (matrices)
    double spectral = 0.0;  // largest |eigenvalue|; equals l2 for vectors
    double linf = 0.0;      // largest |entry|
};

Norms norms(const Vec& v);
Norms norms(const SymMat& m);

/// Eigenvalues ascending, eigenvectors as orthonormal columns.
struct EigenPair {
    Vec values;
    Eigen::MatrixXd vectors;

    SymMat reconstruct() const;
};

EigenPair symmetric_eigen(const SymMat& m);

/// (M + Mᵀ)/2, exact symmetry restored.
SymMat symmetrize(const SymMat& m);

double min_eigenvalue(const SymMat& m);

/// Applies f to the spectrum of a symmetric matrix: V f(Λ) Vᵀ.
template <typename F>
SymMat spectral_map(const SymMat& m, F&& f) {
    const EigenPair eig = symmetric_eigen(m);
    Vec mapped = eig.values;
    for (Eigen::Index i = 0; i < mapped.size(); ++i) mapped[i] = f(mapped[i]);
    return symmetrize(eig.vectors * mapped.asDiagonal() * eig.vectors.transpose());
}

/// Euclidean projection of v onto {b : ||b - center||_1 <= radius}.
/// Sort-based exact soft-threshold search; returns v untouched if feasible.
Vec project_l1_ball(const Vec& v, const Vec& center, double radius);

/// Frobenius projection onto {A : A >= floor * I}: clamp the spectrum from below.
SymMat project_psd_floor(const SymMat& m, double floor);

/// Entrywise l1-ball projection of a matrix around `center`, on vec(.).
SymMat project_l1_ball(const SymMat& m, const SymMat& center, double radius);

struct DykstraOptions {
    double tol = 1e-8;
    int max_iter = 10000;
};

struct DykstraResult {
    SymMat point;
    int iterations = 0;
    double last_change = 0.0;
};

class ConvergenceError : public NumericError {
public:
    ConvergenceError(const std::string& what, SymMat last_iterate, double residual)
        : NumericError(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}

    const SymMat& last_iterate() const noexcept { return last_iterate_; }
    double residual() const noexcept { return residual_; }

private:
    SymMat last_iterate_;
    double residual_;
};

/// Frobenius projection of `s` onto {||vec(A - center)||_1 <= radius} ∩ {A >= floor * I}
/// by Dykstra's alternating projections. Throws ConvergenceError when
/// `max_iter` passes without the iterate and both correction terms
/// changing by less than `tol` in one sweep.
DykstraResult dykstra_project(const SymMat& s, const SymMat& center, double radius,
                              double floor, const DykstraOptions& opts = {});

}  // namespace advgauss
