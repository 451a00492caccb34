#pragma once

#include "matrix.hpp"

namespace f4f {

// Empirical distance covariance between a latent batch and the sensitive
// attribute's one-hot embedding. This is the V-statistic estimator: pairwise
// Euclidean distances, double centering, (1/n²)·Σ A∘B. One-hot embedding
// keeps the distance between any two distinct levels constant (√2) instead
// of imposing an ordinal metric.

struct DistanceStats {
    Matrix a_centered;  // double-centered distances of z
    Matrix b_centered;  // double-centered distances of s
    double dcov2 = 0.0;
    double dvar_z = 0.0;
    double dvar_s = 0.0;
};

// symmetric, zero diagonal, entry (i,j) = ||row_i - row_j||₂; requires n >= 2
Matrix pairwise_euclidean(const Matrix& m);

// A[j][k] = d[j][k] - rowmean_j - colmean_k + grandmean
Matrix double_center(const Matrix& d);

DistanceStats distance_stats(const Matrix& z, const Matrix& s_onehot);

struct Dcov2Result {
    double value = 0.0;  // clamped to >= 0
    Matrix grad_z;       // analytic d(value)/dz, zero when the value was clamped
};

// requires n >= 4 (estimator undefined below that)
Dcov2Result dcov2_empirical(const Matrix& z, const Matrix& s_onehot);

// dcov² / sqrt(dvar_z · dvar_s); 0 when either distance variance is 0.
// Diagnostic only: the training penalty is the unnormalized dcov².
double dcor(const Matrix& z, const Matrix& s_onehot);

}  // namespace f4f
