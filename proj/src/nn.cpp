#include "nn.hpp"

#include <cmath>

#include "error.hpp"

namespace f4f {

Matrix affine_forward(const Matrix& x, const ParamTensor& w, const ParamTensor& b) {
    if (x.cols() != w.value.rows())
        throw DimensionError("affine_forward: input width " + shape_string(x) +
                             " does not match weights " + shape_string(w.value));
    require_shape(b.value, 1, w.value.cols(), "affine_forward bias");
    Matrix out = matmul(x, w.value);
    const double* bias = b.value.row_ptr(0);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        double* oi = out.row_ptr(i);
        for (std::size_t j = 0; j < out.cols(); ++j) oi[j] += bias[j];
    }
    return out;
}

AffineGrads affine_backward(const Matrix& upstream, const Matrix& x, const Matrix& w) {
    if (upstream.rows() != x.rows())
        throw DimensionError("affine_backward: upstream rows " + shape_string(upstream) +
                             " do not match input " + shape_string(x));
    if (upstream.cols() != w.cols() || x.cols() != w.rows())
        throw DimensionError("affine_backward: upstream " + shape_string(upstream) +
                             " / input " + shape_string(x) +
                             " inconsistent with weights " + shape_string(w));
    AffineGrads g;
    g.dw = matmul_transpose_a(x, upstream);
    g.dx = matmul_transpose_b(upstream, w);
    g.db = Matrix(1, upstream.cols());
    std::vector<double> sums = column_sums(upstream);
    for (std::size_t j = 0; j < sums.size(); ++j) g.db(0, j) = sums[j];
    return g;
}

Matrix relu(const Matrix& x) {
    Matrix out = x;
    for (double& v : out.values())
        if (v < 0.0) v = 0.0;
    return out;
}

Matrix relu_backward(const Matrix& upstream, const Matrix& x) {
    require_same_shape(upstream, x, "relu_backward");
    Matrix out = upstream;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x.values()[i] <= 0.0) out.values()[i] = 0.0;
    return out;
}

double gaussian_kl(const Matrix& mu, const Matrix& logvar) {
    require_same_shape(mu, logvar, "gaussian_kl");
    double total = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double m = mu.values()[i];
        const double lv = logvar.values()[i];
        total += -0.5 * (1.0 + lv - m * m - std::exp(lv));
    }
    // exact zero only at mu=0, logvar=0; tiny negatives are rounding noise
    return total < 0.0 ? 0.0 : total;
}

void gaussian_kl_backward(const Matrix& mu, const Matrix& logvar, double scale,
                          Matrix& dmu, Matrix& dlogvar) {
    require_same_shape(mu, logvar, "gaussian_kl_backward");
    require_same_shape(dmu, mu, "gaussian_kl_backward");
    require_same_shape(dlogvar, logvar, "gaussian_kl_backward");
    for (std::size_t i = 0; i < mu.size(); ++i) {
        dmu.values()[i] += scale * mu.values()[i];
        dlogvar.values()[i] += scale * (-0.5) * (1.0 - std::exp(logvar.values()[i]));
    }
}

void adam_step(ParamTensor& p, const AdamConfig& cfg) {
    if (!all_finite(p.grad))
        throw TrainingDivergedError("adam_step: non-finite gradient entry");
    p.step_count += 1;
    const double t = static_cast<double>(p.step_count);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < p.value.size(); ++i) {
        const double g = p.grad.values()[i];
        double& m = p.adam_m.values()[i];
        double& v = p.adam_v.values()[i];
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
        const double mhat = m / bc1;
        const double vhat = v / bc2;
        p.value.values()[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
    require_finite(p.value, "adam_step");
}

Matrix sample_standard_normal(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (double& v : m.values()) v = rng.normal();
    return m;
}

Matrix sample_standard_normal(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    return sample_standard_normal(rows, cols, rng);
}

void init_kaiming_uniform(ParamTensor& w, std::size_t fan_in, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in > 0 ? fan_in : 1));
    for (double& v : w.value.values()) v = (2.0 * rng.uniform() - 1.0) * bound;
}

}  // namespace f4f
