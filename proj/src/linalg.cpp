#include "advgauss/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace advgauss {

Norms norms(const Vec& v) {
    Norms out;
    if (v.size() == 0) return out;
    out.l1 = v.lpNorm<1>();
    out.l2 = v.norm();
    out.spectral = out.l2;
    out.linf = v.lpNorm<Eigen::Infinity>();
    return out;
}

Norms norms(const SymMat& m) {
    Norms out;
    if (m.size() == 0) return out;
    out.l1 = m.cwiseAbs().sum();
    out.l2 = m.norm();
    out.linf = m.cwiseAbs().maxCoeff();
    const Vec values = symmetric_eigen(m).values;
    out.spectral = std::max(std::abs(values[0]), std::abs(values[values.size() - 1]));
    return out;
}

SymMat EigenPair::reconstruct() const {
    return vectors * values.asDiagonal() * vectors.transpose();
}

EigenPair symmetric_eigen(const SymMat& m) {
    if (m.rows() != m.cols()) throw ArgumentError("symmetric_eigen: matrix is not square");
    if (!m.allFinite()) throw NumericError("symmetric_eigen: non-finite entries");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NumericError("symmetric_eigen: eigendecomposition did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

SymMat symmetrize(const SymMat& m) {
    return 0.5 * (m + m.transpose());
}

double min_eigenvalue(const SymMat& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericError("min_eigenvalue: eigendecomposition did not converge");
    }
    return solver.eigenvalues()[0];
}

namespace {

// In-place projection of u onto the centered l1 ball of the given radius.
void project_centered_l1(double* u, Eigen::Index n, double radius) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) total += std::abs(u[i]);
    if (total <= radius) return;
    if (radius <= 0.0) {
        std::fill(u, u + n, 0.0);
        return;
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    // descending magnitude, ties by index
    std::stable_sort(order.begin(), order.end(), [u](Eigen::Index a, Eigen::Index b) {
        return std::abs(u[a]) > std::abs(u[b]);
    });

    double prefix = 0.0;
    double theta = 0.0;
    for (std::size_t rho = 0; rho < order.size(); ++rho) {
        const double mag = std::abs(u[order[rho]]);
        prefix += mag;
        const double candidate = (prefix - radius) / static_cast<double>(rho + 1);
        if (mag - candidate > 0.0) {
            theta = candidate;
        } else {
            break;
        }
    }

    for (Eigen::Index i = 0; i < n; ++i) {
        const double shrunk = std::max(std::abs(u[i]) - theta, 0.0);
        u[i] = std::copysign(shrunk, u[i]);
    }
}

}  // namespace

Vec project_l1_ball(const Vec& v, const Vec& center, double radius) {
    if (v.size() != center.size()) throw ArgumentError("project_l1_ball: dimension mismatch");
    if (!(radius >= 0.0)) throw ArgumentError("project_l1_ball: radius must be nonnegative");
    if ((v - center).lpNorm<1>() <= radius) return v;
    Vec shifted = v - center;
    project_centered_l1(shifted.data(), shifted.size(), radius);
    return shifted + center;
}

SymMat project_l1_ball(const SymMat& m, const SymMat& center, double radius) {
    if (m.rows() != center.rows() || m.cols() != center.cols()) {
        throw ArgumentError("project_l1_ball: dimension mismatch");
    }
    if (!(radius >= 0.0)) throw ArgumentError("project_l1_ball: radius must be nonnegative");
    if ((m - center).cwiseAbs().sum() <= radius) return m;
    SymMat shifted = m - center;
    project_centered_l1(shifted.data(), shifted.size(), radius);
    // soft-thresholding treats (i,j) and (j,i) identically, so symmetry survives
    return shifted + center;
}

SymMat project_psd_floor(const SymMat& m, double floor) {
    const EigenPair eig = symmetric_eigen(m);
    if (eig.values[0] >= floor) return m;
    const Vec clamped = eig.values.cwiseMax(floor);
    return symmetrize(eig.vectors * clamped.asDiagonal() * eig.vectors.transpose());
}

DykstraResult dykstra_project(const SymMat& s, const SymMat& center, double radius,
                              double floor, const DykstraOptions& opts) {
    if (s.rows() != s.cols() || s.rows() != center.rows() || center.rows() != center.cols()) {
        throw ArgumentError("dykstra_project: dimension mismatch");
    }
    if (!(radius >= 0.0)) throw ArgumentError("dykstra_project: radius must be nonnegative");
    if (radius == 0.0) {
        if (min_eigenvalue(center) < floor) {
            throw ArgumentError("dykstra_project: center violates the spectral floor");
        }
        return {center, 0, 0.0};
    }
    if ((s - center).cwiseAbs().sum() <= radius && min_eigenvalue(s) >= floor) {
        return {s, 0, 0.0};
    }

    const Eigen::Index d = s.rows();
    SymMat x = s;
    SymMat p = SymMat::Zero(d, d);
    SymMat q = SymMat::Zero(d, d);
    double change = 0.0;
    for (int it = 1; it <= opts.max_iter; ++it) {
        const SymMat y = project_l1_ball(SymMat(x + p), center, radius);
        const SymMat next_p = x + p - y;
        const SymMat next = project_psd_floor(SymMat(y + q), floor);
        const SymMat next_q = y + q - next;
        // the iterate alone can stall for a few sweeps while the increments move
        change = std::max({(next - x).norm(), (next_p - p).norm(), (next_q - q).norm()});
        x = next;
        p = next_p;
        q = next_q;
        if (change <= opts.tol) return {x, it, change};
    }
    throw ConvergenceError("dykstra_project: no convergence within max_iter", x, change);
}

}  // namespace advgauss
