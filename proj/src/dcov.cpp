#include "dcov.hpp"

#include <cmath>

#include "error.hpp"
#include "threads.hpp"

namespace f4f {

Matrix pairwise_euclidean(const Matrix& m) {
    const std::size_t n = m.rows();
    if (n < 2) throw ValidationError("pairwise_euclidean: need at least 2 rows");
    Matrix d(n, n);
    const int nthreads = worker_count();
#pragma omp parallel for num_threads(nthreads) schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double* ri = m.row_ptr(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double* rj = m.row_ptr(j);
            double acc = 0.0;
            for (std::size_t c = 0; c < m.cols(); ++c) {
                const double diff = ri[c] - rj[c];
                acc += diff * diff;
            }
            d(i, j) = std::sqrt(acc);
        }
    }
    return d;
}

Matrix double_center(const Matrix& d) {
    const std::size_t n = d.rows();
    if (d.cols() != n) throw DimensionError("double_center: matrix must be square");
    std::vector<double> row_mean(n, 0.0), col_mean(n, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* ri = d.row_ptr(i);
        for (std::size_t j = 0; j < n; ++j) {
            row_mean[i] += ri[j];
            col_mean[j] += ri[j];
            grand += ri[j];
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        row_mean[i] *= inv_n;
        col_mean[i] *= inv_n;
    }
    grand *= inv_n * inv_n;
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* ri = d.row_ptr(i);
        double* ai = a.row_ptr(i);
        for (std::size_t j = 0; j < n; ++j)
            ai[j] = ri[j] - row_mean[i] - col_mean[j] + grand;
    }
    return a;
}

namespace {

double centered_inner(const Matrix& a, const Matrix& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a.values()[i] * b.values()[i];
    const double n = static_cast<double>(a.rows());
    return acc / (n * n);
}

// floating error can push the nonnegative statistics slightly below zero
double clamp_stat(double v) { return v < 0.0 ? 0.0 : v; }

}  // namespace

DistanceStats distance_stats(const Matrix& z, const Matrix& s_onehot) {
    if (z.rows() != s_onehot.rows())
        throw DimensionError("distance_stats: row counts differ, " + shape_string(z) +
                             " vs " + shape_string(s_onehot));
    DistanceStats st;
    st.a_centered = double_center(pairwise_euclidean(z));
    st.b_centered = double_center(pairwise_euclidean(s_onehot));
    st.dcov2 = clamp_stat(centered_inner(st.a_centered, st.b_centered));
    st.dvar_z = clamp_stat(centered_inner(st.a_centered, st.a_centered));
    st.dvar_s = clamp_stat(centered_inner(st.b_centered, st.b_centered));
    return st;
}

Dcov2Result dcov2_empirical(const Matrix& z, const Matrix& s_onehot) {
    const std::size_t n = z.rows();
    if (n < 4)
        throw ValidationError("dcov2_empirical: estimator undefined for fewer than 4 rows");
    if (s_onehot.rows() != n)
        throw DimensionError("dcov2_empirical: row counts differ, " + shape_string(z) +
                             " vs " + shape_string(s_onehot));

    const Matrix dist_z = pairwise_euclidean(z);
    const Matrix a = double_center(dist_z);
    const Matrix b = double_center(pairwise_euclidean(s_onehot));

    Dcov2Result res;
    const double raw = centered_inner(a, b);
    res.grad_z = Matrix(n, z.cols());
    if (raw <= 0.0) {
        // clamped region is flat
        res.value = 0.0;
        return res;
    }
    res.value = raw;

    // d(value)/d(dist_z[j][k]) = B[j][k]/n² because double centering is a
    // self-adjoint projection and B is already centered. Each distance
    // involves z_j twice (jk and kj), and d(dist)/dz_j = (z_j - z_k)/dist.
    const double inv_n2 = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
    const std::size_t k = z.cols();
    const int nthreads = worker_count();
#pragma omp parallel for num_threads(nthreads) schedule(static)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(n); ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        double* gj = res.grad_z.row_ptr(j);
        const double* zj = z.row_ptr(j);
        for (std::size_t m = 0; m < n; ++m) {
            if (m == j) continue;
            const double dist = dist_z(j, m);
            if (dist == 0.0) continue;  // subgradient 0 at coincident points
            const double w = 2.0 * b(j, m) * inv_n2 / dist;
            const double* zm = z.row_ptr(m);
            for (std::size_t c = 0; c < k; ++c) gj[c] += w * (zj[c] - zm[c]);
        }
    }
    return res;
}

namespace {

double row_distance(const Matrix& m, std::size_t i, std::size_t j) {
    const double* ri = m.row_ptr(i);
    const double* rj = m.row_ptr(j);
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        const double diff = ri[c] - rj[c];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

// Same statistic as distance_stats but in O(n) memory: two passes over the
// pairwise distances, never materializing the n×n matrices. Used for
// diagnostics over whole splits, where n² doubles would not fit.
double dcor_streaming(const Matrix& z, const Matrix& s_onehot) {
    const std::size_t n = z.rows();
    std::vector<double> rz(n, 0.0), rs(n, 0.0);
    const int nthreads = worker_count();
#pragma omp parallel for num_threads(nthreads) schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double az = 0.0, as = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            az += row_distance(z, i, j);
            as += row_distance(s_onehot, i, j);
        }
        rz[i] = az;
        rs[i] = as;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    double gz = 0.0, gs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        gz += rz[i];
        gs += rs[i];
        rz[i] *= inv_n;
        rs[i] *= inv_n;
    }
    gz *= inv_n * inv_n;
    gs *= inv_n * inv_n;

    std::vector<double> sab(n, 0.0), saa(n, 0.0), sbb(n, 0.0);
#pragma omp parallel for num_threads(nthreads) schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double ab = 0.0, aa = 0.0, bb = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double dz = (j == i) ? 0.0 : row_distance(z, i, j);
            const double ds = (j == i) ? 0.0 : row_distance(s_onehot, i, j);
            const double a = dz - rz[i] - rz[j] + gz;
            const double b = ds - rs[i] - rs[j] + gs;
            ab += a * b;
            aa += a * a;
            bb += b * b;
        }
        sab[i] = ab;
        saa[i] = aa;
        sbb[i] = bb;
    }
    double dcov2 = 0.0, dvar_z = 0.0, dvar_s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dcov2 += sab[i];
        dvar_z += saa[i];
        dvar_s += sbb[i];
    }
    dcov2 = clamp_stat(dcov2 * inv_n * inv_n);
    dvar_z = clamp_stat(dvar_z * inv_n * inv_n);
    dvar_s = clamp_stat(dvar_s * inv_n * inv_n);
    const double denom = dvar_z * dvar_s;
    if (denom <= 0.0) return 0.0;
    return dcov2 / std::sqrt(denom);
}

}  // namespace

double dcor(const Matrix& z, const Matrix& s_onehot) {
    if (z.rows() != s_onehot.rows())
        throw DimensionError("dcor: row counts differ, " + shape_string(z) + " vs " +
                             shape_string(s_onehot));
    if (z.rows() > 4096) return dcor_streaming(z, s_onehot);
    DistanceStats st = distance_stats(z, s_onehot);
    const double denom = st.dvar_z * st.dvar_s;
    if (denom <= 0.0) return 0.0;
    return st.dcov2 / std::sqrt(denom);
}

}  // namespace f4f
