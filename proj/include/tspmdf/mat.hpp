#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace tspmdf {

// Dense row-major matrix of doubles. Column vectors are stored n-by-1.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
    double* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return a.data() + static_cast<std::size_t>(r) * cols; }

    [[nodiscard]] std::size_t size() const { return a.size(); }
    [[nodiscard]] bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
    void zero() { std::fill(a.begin(), a.end(), 0.0); }
};

// C = A * W^T, with A (n x I), W (O x I), C (n x O). The inner loop is a dot
// product of two contiguous rows, which the compiler vectorizes.
void mul_abt(const Mat& A, const Mat& W, Mat& C);

// dW += dC^T * A, with dC (n x O), A (n x I), dW (O x I).
void add_atb(const Mat& dC, const Mat& A, Mat& dW);

// dA += dC * W, with dC (n x O), W (O x I), dA (n x I).
void add_ab(const Mat& dC, const Mat& W, Mat& dA);

}  // namespace tspmdf
