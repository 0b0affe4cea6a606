#include "siopt/matrix.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace siopt {

namespace {

void require_positive_dims(int rows, int cols) {
    if (rows <= 0 || cols <= 0) {
        throw std::invalid_argument("Matrix: dimensions must be positive, got " +
                                    std::to_string(rows) + "x" + std::to_string(cols));
    }
}

void require_finite(const std::vector<double>& data) {
    for (double x : data) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument("Matrix: non-finite entry");
        }
    }
}

}  // namespace

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
    require_positive_dims(rows, cols);
    data_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

Matrix::Matrix(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    require_positive_dims(rows, cols);
    if (data_.size() != static_cast<std::size_t>(rows) * cols) {
        throw std::invalid_argument("Matrix: data length does not match rows*cols");
    }
    require_finite(data_);
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diag(const std::vector<double>& entries) {
    const int n = static_cast<int>(entries.size());
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = entries[i];
    require_finite(m.data_);
    return m;
}

Matrix Matrix::random_uniform(int rows, int cols, double scale, Rng& rng) {
    Matrix m(rows, cols);
    for (auto& x : m.data_) x = rng.uniform(-scale, scale);
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "operator+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_shape(*this, other, "operator-=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (auto& x : data_) x *= s;
    return *this;
}

bool Matrix::bitwise_equal(const Matrix& other) const {
    if (!same_shape(other)) return false;
    return std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(double)) == 0;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* where) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(where) + ": shape mismatch " +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()));
    }
}

namespace {

void matmul_rows(const Matrix& a, const Matrix& b, Matrix& c, int row_begin, int row_end) {
    const int n = b.cols();
    const int k_dim = a.cols();
    for (int i = row_begin; i < row_end; ++i) {
        for (int k = 0; k < k_dim; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    }
}

}  // namespace

Matrix matmul_serial(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: inner dimensions disagree, " +
                                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()));
    }
    Matrix c(a.rows(), b.cols());
    matmul_rows(a, b, c, 0, a.rows());
    return c;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: inner dimensions disagree, " +
                                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()));
    }
    Matrix c(a.rows(), b.cols());
    const long long flops = static_cast<long long>(a.rows()) * a.cols() * b.cols();
    if (flops < 64LL * 64 * 64) {
        matmul_rows(a, b, c, 0, a.rows());
        return c;
    }
#pragma omp parallel for schedule(static)
    for (int i = 0; i < a.rows(); ++i) {
        matmul_rows(a, b, c, i, i + 1);
    }
    return c;
}

double frobenius_norm(const Matrix& a) {
    double sum = 0.0;
    for (double x : a.data()) sum += x * x;
    return std::sqrt(sum);
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (double x : a.data()) m = std::max(m, std::fabs(x));
    return m;
}

double inner(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "inner");
    double sum = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) sum += a.data()[k] * b.data()[k];
    return sum;
}

}  // namespace siopt
