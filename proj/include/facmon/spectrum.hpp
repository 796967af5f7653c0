#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>

#include "facmon/rolling.hpp"

namespace facmon {

// Full eigenvalue set of one rolling covariance snapshot, sorted descending.
struct EigenSpectrum {
    Eigen::VectorXd eigenvalues;  // non-increasing
    long t = 0;

    int size() const { return static_cast<int>(eigenvalues.size()); }
    double trace() const { return eigenvalues.sum(); }
    // k-th largest, 1-based to match the usual lambda^(k) notation.
    double lambda(int k) const {
        if (k < 1 || k > size()) throw std::out_of_range("eigenvalue index out of range");
        return eigenvalues(k - 1);
    }
};

// Dense symmetric solve for the whole spectrum. The monitoring statistic
// needs lambda^(r+1) and the spectral mean; the mean equals trace/N, so a
// top-k solver could substitute later without changing any downstream value.
inline EigenSpectrum eigen_symmetric(const CovarianceMatrix& cov) {
    if (!cov.values.allFinite()) throw InvalidInput("covariance has non-finite entries");
    if (cov.values.rows() != cov.values.cols())
        throw InvalidInput("covariance matrix is not square");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.compute(cov.values, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue solve failed");

    EigenSpectrum spec;
    spec.eigenvalues = solver.eigenvalues().reverse();
    spec.t = cov.t;

    // Clamp the numerical-noise band just below zero; genuinely negative
    // values beyond the band are left visible to the PSD invariant checks.
    const int n = spec.size();
    const double floor = -1e-8 * spec.trace() / n;
    for (int i = 0; i < n; ++i) {
        double& v = spec.eigenvalues(i);
        if (v < 0.0 && v >= floor) v = 0.0;
    }
    return spec;
}

// Eigenvalue-ratio heuristic: argmax_k lambda^(k)/lambda^(k+1), ties broken
// to the smallest k. A convenience default; the monitor accepts a user r.
inline int estimate_num_factors(const EigenSpectrum& spec, int k_max) {
    const int n = spec.size();
    if (k_max < 1 || k_max >= n) throw InvalidInput("k_max must satisfy 1 <= k_max < N");
    for (int k = 1; k <= k_max + 1; ++k) {
        if (spec.lambda(k) <= 0.0)
            throw InvalidInput("eigenvalue ratio undefined: zero eigenvalue in leading block");
    }
    int best_k = 1;
    double best_ratio = spec.lambda(1) / spec.lambda(2);
    for (int k = 2; k <= k_max; ++k) {
        const double ratio = spec.lambda(k) / spec.lambda(k + 1);
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best_k = k;
        }
    }
    return best_k;
}

}  // namespace facmon
