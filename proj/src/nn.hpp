#pragma once

#include <cstdint>

#include "matrix.hpp"
#include "rng.hpp"

namespace f4f {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Learnable weight block: value plus gradient accumulator and Adam state,
// all of identical shape.
struct ParamTensor {
    Matrix value;
    Matrix grad;
    Matrix adam_m;
    Matrix adam_v;
    std::uint64_t step_count = 0;

    ParamTensor() = default;
    ParamTensor(std::size_t rows, std::size_t cols)
        : value(rows, cols), grad(rows, cols), adam_m(rows, cols), adam_v(rows, cols) {}

    void zero_grad() {
        for (double& g : grad.values()) g = 0.0;
    }
};

// out[i][j] = sum_m x[i][m]·w[m][j] + b[0][j]
Matrix affine_forward(const Matrix& x, const ParamTensor& w, const ParamTensor& b);

struct AffineGrads {
    Matrix dx;  // B×in
    Matrix dw;  // in×out
    Matrix db;  // 1×out
};

// dw = xᵀ·upstream, db = column sums of upstream, dx = upstream·wᵀ
AffineGrads affine_backward(const Matrix& upstream, const Matrix& x, const Matrix& w);

Matrix relu(const Matrix& x);
// gradient at exactly 0 is defined as 0
Matrix relu_backward(const Matrix& upstream, const Matrix& x);

// sum over batch and dims of -1/2 (1 + logvar - mu^2 - exp(logvar)); >= 0
double gaussian_kl(const Matrix& mu, const Matrix& logvar);
// accumulates scale * dKL into dmu, dlogvar
void gaussian_kl_backward(const Matrix& mu, const Matrix& logvar, double scale,
                          Matrix& dmu, Matrix& dlogvar);

// in-place bias-corrected Adam update from p.grad; throws
// TrainingDivergedError on non-finite gradient entries
void adam_step(ParamTensor& p, const AdamConfig& cfg);

// deterministic given seed; entries i.i.d. standard normal
Matrix sample_standard_normal(std::size_t rows, std::size_t cols, std::uint64_t seed);
Matrix sample_standard_normal(std::size_t rows, std::size_t cols, Rng& rng);

// Kaiming-style fan-in scaled uniform init for ReLU stacks
void init_kaiming_uniform(ParamTensor& w, std::size_t fan_in, Rng& rng);

}  // namespace f4f
