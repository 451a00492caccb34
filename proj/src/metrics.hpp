#pragma once

#include <cstddef>
#include <vector>

#include "matrix.hpp"

namespace f4f {

// Group-fairness ratios over binary predictions. Both use the min/max ratio
// convention with 0/0 -> 1.0 (all rates zero is perfect parity).

// (min over groups of P[yhat=1 | s=g]) / (max over groups)
double demographic_parity_ratio(const std::vector<int>& yhat, const std::vector<int>& s,
                                std::size_t n_groups);

// min over {TPR, FPR} of the per-rate min/max group ratio; every group must
// contain both label classes or the rate is undefined
double equalized_odds_ratio(const std::vector<int>& yhat, const std::vector<int>& y,
                            const std::vector<int>& s, std::size_t n_groups);

struct UtilityMetrics {
    double accuracy = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// standard binary definitions, positive class = 1; f1 is 0 when
// precision + recall is 0
UtilityMetrics utility_metrics(const std::vector<int>& yhat, const std::vector<int>& y);

struct DensityCoverage {
    double density = 0.0;   // >= 0
    double coverage = 0.0;  // in [0, 1]
};

// kNN manifold metrics between a real and a synthetic sample, Euclidean
// distance in the encoded space. Per real point the radius is the distance
// to its k-th nearest other real point; density counts synthetic points per
// real ball (normalized by k·m), coverage is the fraction of real balls
// containing at least one synthetic point.
DensityCoverage density_coverage(const Matrix& real_x, const Matrix& synth_x, std::size_t k);

struct PcaProjection {
    Matrix projected_a;  // n×dims
    Matrix projected_b;  // m×dims
    Matrix components;   // k×dims, orthonormal columns
};

// Principal components of the concatenated, mean-centered data; both sets
// are projected with the same basis. Component signs are fixed by making
// each column's largest-magnitude entry positive, so the result does not
// depend on the concatenation order.
PcaProjection pca_project(const Matrix& a, const Matrix& b, std::size_t dims = 2);

// Two-sample energy distance, V-statistic form with direct double sums:
// 2·mean‖a_i−b_j‖ − mean‖a_i−a_j‖ − mean‖b_i−b_j‖.
double energy_distance(const Matrix& a, const Matrix& b);

// Jacobi eigendecomposition of a symmetric matrix, eigenvalues descending.
struct SymmetricEigen {
    std::vector<double> values;
    Matrix vectors;  // columns are eigenvectors
};
SymmetricEigen symmetric_eigen(const Matrix& m);

}  // namespace f4f
