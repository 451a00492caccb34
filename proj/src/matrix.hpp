#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace f4f {

// Dense row-major matrix of doubles. Desk-scale sizes only; double precision
// throughout so gradient checks have headroom.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
    const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// a[m×k] · b[k×n]
Matrix matmul(const Matrix& a, const Matrix& b);
// aᵀ[k×m]ᵀ · b -> [m? ] : (a: k×m, b: k×n) -> m×n
Matrix matmul_transpose_a(const Matrix& a, const Matrix& b);
// a · bᵀ : (a: m×k, b: n×k) -> m×n
Matrix matmul_transpose_b(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);
Matrix hconcat(const Matrix& a, const Matrix& b);
Matrix slice_cols(const Matrix& a, std::size_t first, std::size_t count);
Matrix take_rows(const Matrix& a, const std::vector<std::size_t>& indices);
std::vector<double> column_sums(const Matrix& a);
std::vector<double> column_means(const Matrix& a);

void add_in_place(Matrix& a, const Matrix& b);
void scale_in_place(Matrix& a, double s);

// shape/finiteness guards; throw DimensionError / Error naming the context
void require_shape(const Matrix& m, std::size_t rows, std::size_t cols,
                   const std::string& context);
void require_same_shape(const Matrix& a, const Matrix& b, const std::string& context);
void require_finite(const Matrix& m, const std::string& context);
bool all_finite(const Matrix& m);

std::string shape_string(const Matrix& m);

}  // namespace f4f
