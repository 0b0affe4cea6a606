#pragma once

#include <cstddef>
#include <vector>

#include "siopt/rng.hpp"

namespace siopt {

// Dense row-major matrix of doubles, the universal value type of the lab.
// Construction rejects non-finite entries; every kernel below preserves
// finiteness, so downstream code never re-checks.
class Matrix {
  public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols);                              // zero-filled
    Matrix(int rows, int cols, std::vector<double> data);    // validates

    static Matrix identity(int n);
    static Matrix diag(const std::vector<double>& entries);
    static Matrix random_uniform(int rows, int cols, double scale, Rng& rng);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix transpose() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    bool bitwise_equal(const Matrix& other) const;

  private:
    int rows_;
    int cols_;
    std::vector<double> data_;
};

// OpenMP-parallel product for large operands; falls back to the serial
// kernel below the parallel threshold. Both are bitwise identical.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_serial(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
// trace(a^T b), the Frobenius pairing <a, b>
double inner(const Matrix& a, const Matrix& b);

void require_same_shape(const Matrix& a, const Matrix& b, const char* where);

}  // namespace siopt
