#include "metrics.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "threads.hpp"

namespace f4f {

namespace {

void check_group_vector(const std::vector<int>& s, std::size_t n_groups) {
    if (n_groups < 2) throw ValidationError("fairness ratio: need at least 2 groups");
    std::vector<std::size_t> count(n_groups, 0);
    for (int g : s) {
        if (g < 0 || static_cast<std::size_t>(g) >= n_groups)
            throw ValidationError("fairness ratio: group index out of range");
        ++count[static_cast<std::size_t>(g)];
    }
    for (std::size_t g = 0; g < n_groups; ++g)
        if (count[g] == 0)
            throw ValidationError("fairness ratio: group " + std::to_string(g) +
                                  " has no samples");
}

double min_max_ratio(const std::vector<double>& rates) {
    const double mx = *std::max_element(rates.begin(), rates.end());
    const double mn = *std::min_element(rates.begin(), rates.end());
    if (mx == 0.0) return 1.0;  // all rates zero: parity by convention
    return mn / mx;
}

}  // namespace

double demographic_parity_ratio(const std::vector<int>& yhat, const std::vector<int>& s,
                                std::size_t n_groups) {
    if (yhat.size() != s.size() || yhat.empty())
        throw ValidationError("demographic_parity_ratio: length mismatch or empty input");
    check_group_vector(s, n_groups);
    std::vector<double> selected(n_groups, 0.0), total(n_groups, 0.0);
    for (std::size_t i = 0; i < yhat.size(); ++i) {
        const auto g = static_cast<std::size_t>(s[i]);
        total[g] += 1.0;
        if (yhat[i]) selected[g] += 1.0;
    }
    std::vector<double> rates(n_groups);
    for (std::size_t g = 0; g < n_groups; ++g) rates[g] = selected[g] / total[g];
    return min_max_ratio(rates);
}

double equalized_odds_ratio(const std::vector<int>& yhat, const std::vector<int>& y,
                            const std::vector<int>& s, std::size_t n_groups) {
    if (yhat.size() != y.size() || yhat.size() != s.size() || yhat.empty())
        throw ValidationError("equalized_odds_ratio: length mismatch or empty input");
    check_group_vector(s, n_groups);
    std::vector<double> tp(n_groups, 0.0), pos(n_groups, 0.0);
    std::vector<double> fp(n_groups, 0.0), neg(n_groups, 0.0);
    for (std::size_t i = 0; i < yhat.size(); ++i) {
        const auto g = static_cast<std::size_t>(s[i]);
        if (y[i]) {
            pos[g] += 1.0;
            if (yhat[i]) tp[g] += 1.0;
        } else {
            neg[g] += 1.0;
            if (yhat[i]) fp[g] += 1.0;
        }
    }
    std::vector<double> tpr(n_groups), fpr(n_groups);
    for (std::size_t g = 0; g < n_groups; ++g) {
        if (pos[g] == 0.0)
            throw ValidationError("equalized_odds_ratio: group " + std::to_string(g) +
                                  " has no positive labels; TPR is undefined");
        if (neg[g] == 0.0)
            throw ValidationError("equalized_odds_ratio: group " + std::to_string(g) +
                                  " has no negative labels; FPR is undefined");
        tpr[g] = tp[g] / pos[g];
        fpr[g] = fp[g] / neg[g];
    }
    return std::min(min_max_ratio(tpr), min_max_ratio(fpr));
}

UtilityMetrics utility_metrics(const std::vector<int>& yhat, const std::vector<int>& y) {
    if (yhat.size() != y.size() || yhat.empty())
        throw ValidationError("utility_metrics: length mismatch or empty input");
    double tp = 0.0, tn = 0.0, fp = 0.0, fn = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] && yhat[i]) tp += 1.0;
        else if (y[i] && !yhat[i]) fn += 1.0;
        else if (!y[i] && yhat[i]) fp += 1.0;
        else tn += 1.0;
    }
    UtilityMetrics m;
    m.accuracy = (tp + tn) / static_cast<double>(y.size());
    m.recall = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
    const double precision = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
    m.f1 = (precision + m.recall) > 0.0
               ? 2.0 * precision * m.recall / (precision + m.recall)
               : 0.0;
    return m;
}

namespace {

double sign_or_one(double v) { return v < 0.0 ? -1.0 : 1.0; }

double row_dist(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
    const double* ri = a.row_ptr(i);
    const double* rj = b.row_ptr(j);
    double acc = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        const double d = ri[c] - rj[c];
        acc += d * d;
    }
    return std::sqrt(acc);
}

}  // namespace

DensityCoverage density_coverage(const Matrix& real_x, const Matrix& synth_x, std::size_t k) {
    if (real_x.cols() != synth_x.cols())
        throw DimensionError("density_coverage: dimension mismatch, " + shape_string(real_x) +
                             " vs " + shape_string(synth_x));
    if (k < 1) throw ValidationError("density_coverage: k must be >= 1");
    const std::size_t n = real_x.rows(), m = synth_x.rows();
    if (n < k + 1 || m < k + 1)
        throw ValidationError("density_coverage: both sets need at least k+1 = " +
                              std::to_string(k + 1) + " rows");

    // radius of each real point: distance to its k-th nearest other real point
    std::vector<double> radius(n, 0.0);
    const int nthreads = worker_count();
#pragma omp parallel for num_threads(nthreads) schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        std::vector<double> d;
        d.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) d.push_back(row_dist(real_x, i, real_x, j));
        std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k - 1), d.end());
        radius[i] = d[k - 1];
    }

    std::vector<double> inside_count(m, 0.0);
    std::vector<unsigned char> covered(n, 0);
#pragma omp parallel for num_threads(nthreads) schedule(static)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(m); ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        double cnt = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (row_dist(synth_x, j, real_x, i) <= radius[i]) {
                cnt += 1.0;
                covered[i] = 1;  // benign race: only ever set to 1
            }
        inside_count[j] = cnt;
    }

    DensityCoverage dc;
    double total = 0.0;
    for (double c : inside_count) total += c;
    dc.density = total / (static_cast<double>(k) * static_cast<double>(m));
    double cov = 0.0;
    for (unsigned char c : covered) cov += c;
    dc.coverage = cov / static_cast<double>(n);
    return dc;
}

SymmetricEigen symmetric_eigen(const Matrix& m) {
    const std::size_t n = m.rows();
    if (m.cols() != n) throw DimensionError("symmetric_eigen: matrix must be square");
    Matrix a = m;
    Matrix v = Matrix::identity(n);

    // cyclic Jacobi rotations
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = sign_or_one(theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    SymmetricEigen e;
    e.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) e.values[i] = a(i, i);
    // sort eigenpairs by descending eigenvalue
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return e.values[x] > e.values[y]; });
    std::vector<double> sorted_values(n);
    Matrix sorted_vectors(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        sorted_values[j] = e.values[order[j]];
        for (std::size_t i = 0; i < n; ++i) sorted_vectors(i, j) = v(i, order[j]);
    }
    e.values = std::move(sorted_values);
    e.vectors = std::move(sorted_vectors);
    return e;
}

PcaProjection pca_project(const Matrix& a, const Matrix& b, std::size_t dims) {
    if (a.cols() != b.cols())
        throw DimensionError("pca_project: dimension mismatch, " + shape_string(a) + " vs " +
                             shape_string(b));
    const std::size_t k = a.cols();
    if (k < dims) throw ValidationError("pca_project: data dimension below requested dims");
    const std::size_t n = a.rows() + b.rows();
    if (n < 2) throw ValidationError("pca_project: need at least 2 rows overall");

    // covariance of the concatenated, mean-centered data
    std::vector<double> mean(k, 0.0);
    for (const Matrix* m : {&a, &b})
        for (std::size_t i = 0; i < m->rows(); ++i)
            for (std::size_t c = 0; c < k; ++c) mean[c] += (*m)(i, c);
    for (double& v : mean) v /= static_cast<double>(n);

    Matrix cov(k, k);
    for (const Matrix* m : {&a, &b}) {
        for (std::size_t i = 0; i < m->rows(); ++i) {
            for (std::size_t p = 0; p < k; ++p) {
                const double dp = (*m)(i, p) - mean[p];
                for (std::size_t q = p; q < k; ++q)
                    cov(p, q) += dp * ((*m)(i, q) - mean[q]);
            }
        }
    }
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t q = p; q < k; ++q) {
            cov(p, q) /= static_cast<double>(n - 1);
            cov(q, p) = cov(p, q);
        }

    double trace = 0.0;
    for (std::size_t p = 0; p < k; ++p) trace += cov(p, p);
    if (trace <= 0.0) throw ValidationError("pca_project: data has zero variance");

    SymmetricEigen e = symmetric_eigen(cov);
    PcaProjection out;
    out.components = Matrix(k, dims);
    for (std::size_t j = 0; j < dims; ++j) {
        // sign convention: largest-magnitude entry positive
        std::size_t arg = 0;
        for (std::size_t i = 1; i < k; ++i)
            if (std::abs(e.vectors(i, j)) > std::abs(e.vectors(arg, j))) arg = i;
        const double sgn = e.vectors(arg, j) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < k; ++i) out.components(i, j) = sgn * e.vectors(i, j);
    }

    auto project = [&](const Matrix& m) {
        Matrix p(m.rows(), dims);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < dims; ++j) {
                double acc = 0.0;
                for (std::size_t c = 0; c < k; ++c)
                    acc += (m(i, c) - mean[c]) * out.components(c, j);
                p(i, j) = acc;
            }
        return p;
    };
    out.projected_a = project(a);
    out.projected_b = project(b);
    return out;
}

double energy_distance(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw DimensionError("energy_distance: dimension mismatch, " + shape_string(a) +
                             " vs " + shape_string(b));
    if (a.rows() == 0 || b.rows() == 0)
        throw ValidationError("energy_distance: empty sample");
    const std::size_t n = a.rows(), m = b.rows();
    double cross = 0.0, within_a = 0.0, within_b = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) cross += row_dist(a, i, b, j);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) within_a += row_dist(a, i, a, j);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) within_b += row_dist(b, i, b, j);
    return 2.0 * cross / static_cast<double>(n * m) -
           within_a / static_cast<double>(n * n) -
           within_b / static_cast<double>(m * m);
}

}  // namespace f4f
