#include "matrix.hpp"

#include <cmath>
#include <sstream>

#include "error.hpp"
#include "threads.hpp"

namespace f4f {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return Matrix();
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols())
            throw DimensionError("from_rows: ragged row lengths");
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

std::string shape_string(const Matrix& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw DimensionError("matmul: inner dimensions differ, " + shape_string(a) +
                             " vs " + shape_string(b));
    Matrix c(a.rows(), b.cols());
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    const int nthreads = worker_count();
#pragma omp parallel for num_threads(nthreads) schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
        double* ci = c.row_ptr(static_cast<std::size_t>(i));
        const double* ai = a.row_ptr(static_cast<std::size_t>(i));
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ai[p];
            if (aip == 0.0) continue;
            const double* bp = b.row_ptr(p);
            for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
    return c;
}

Matrix matmul_transpose_a(const Matrix& a, const Matrix& b) {
    // (a: k×m, b: k×n) -> aᵀ·b: m×n
    if (a.rows() != b.rows())
        throw DimensionError("matmul_transpose_a: row counts differ, " +
                             shape_string(a) + " vs " + shape_string(b));
    Matrix c(a.cols(), b.cols());
    const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
    const int nthreads = worker_count();
#pragma omp parallel for num_threads(nthreads) schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
        double* ci = c.row_ptr(static_cast<std::size_t>(i));
        for (std::size_t p = 0; p < k; ++p) {
            const double api = a(p, static_cast<std::size_t>(i));
            if (api == 0.0) continue;
            const double* bp = b.row_ptr(p);
            for (std::size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
        }
    }
    return c;
}

Matrix matmul_transpose_b(const Matrix& a, const Matrix& b) {
    // (a: m×k, b: n×k) -> a·bᵀ: m×n
    if (a.cols() != b.cols())
        throw DimensionError("matmul_transpose_b: column counts differ, " +
                             shape_string(a) + " vs " + shape_string(b));
    Matrix c(a.rows(), b.rows());
    const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
    const int nthreads = worker_count();
#pragma omp parallel for num_threads(nthreads) schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
        double* ci = c.row_ptr(static_cast<std::size_t>(i));
        const double* ai = a.row_ptr(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b.row_ptr(j);
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
            ci[j] = acc;
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix hconcat(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        throw DimensionError("hconcat: row counts differ, " + shape_string(a) +
                             " vs " + shape_string(b));
    Matrix c(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row_ptr(i);
        const double* ai = a.row_ptr(i);
        const double* bi = b.row_ptr(i);
        for (std::size_t j = 0; j < a.cols(); ++j) ci[j] = ai[j];
        for (std::size_t j = 0; j < b.cols(); ++j) ci[a.cols() + j] = bi[j];
    }
    return c;
}

Matrix slice_cols(const Matrix& a, std::size_t first, std::size_t count) {
    if (first + count > a.cols())
        throw DimensionError("slice_cols: range past " + shape_string(a));
    Matrix c(a.rows(), count);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row_ptr(i);
        double* ci = c.row_ptr(i);
        for (std::size_t j = 0; j < count; ++j) ci[j] = ai[first + j];
    }
    return c;
}

Matrix take_rows(const Matrix& a, const std::vector<std::size_t>& indices) {
    Matrix c(indices.size(), a.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= a.rows())
            throw DimensionError("take_rows: index out of range");
        const double* ai = a.row_ptr(indices[i]);
        double* ci = c.row_ptr(i);
        for (std::size_t j = 0; j < a.cols(); ++j) ci[j] = ai[j];
    }
    return c;
}

std::vector<double> column_sums(const Matrix& a) {
    std::vector<double> s(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row_ptr(i);
        for (std::size_t j = 0; j < a.cols(); ++j) s[j] += ai[j];
    }
    return s;
}

std::vector<double> column_means(const Matrix& a) {
    std::vector<double> s = column_sums(a);
    if (a.rows() > 0)
        for (double& v : s) v /= static_cast<double>(a.rows());
    return s;
}

void add_in_place(Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add_in_place");
    for (std::size_t i = 0; i < a.size(); ++i) a.values()[i] += b.values()[i];
}

void scale_in_place(Matrix& a, double s) {
    for (double& v : a.values()) v *= s;
}

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols,
                   const std::string& context) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << context << ": expected " << rows << "x" << cols << ", got "
           << shape_string(m);
        throw DimensionError(os.str());
    }
}

void require_same_shape(const Matrix& a, const Matrix& b, const std::string& context) {
    if (!a.same_shape(b))
        throw DimensionError(context + ": shapes differ, " + shape_string(a) +
                             " vs " + shape_string(b));
}

bool all_finite(const Matrix& m) {
    for (double v : m.values())
        if (!std::isfinite(v)) return false;
    return true;
}

void require_finite(const Matrix& m, const std::string& context) {
    if (!all_finite(m))
        throw Error(ErrorKind::runtime, context + ": non-finite value produced");
}

}  // namespace f4f
