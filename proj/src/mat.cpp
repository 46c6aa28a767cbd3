#include "tspmdf/mat.hpp"

#include <cassert>

namespace tspmdf {

void mul_abt(const Mat& A, const Mat& W, Mat& C) {
    assert(A.cols == W.cols && C.rows == A.rows && C.cols == W.rows);
    const int n = A.rows, inner = A.cols, out = W.rows;
    for (int r = 0; r < n; ++r) {
        const double* ar = A.row(r);
        double* cr = C.row(r);
        for (int o = 0; o < out; ++o) {
            const double* wr = W.row(o);
            double acc = 0.0;
            for (int i = 0; i < inner; ++i) acc += ar[i] * wr[i];
            cr[o] = acc;
        }
    }
}

void add_atb(const Mat& dC, const Mat& A, Mat& dW) {
    assert(dC.rows == A.rows && dW.rows == dC.cols && dW.cols == A.cols);
    const int n = A.rows, inner = A.cols, out = dC.cols;
    for (int r = 0; r < n; ++r) {
        const double* ar = A.row(r);
        const double* gr = dC.row(r);
        for (int o = 0; o < out; ++o) {
            const double g = gr[o];
            if (g == 0.0) continue;
            double* wr = dW.row(o);
            for (int i = 0; i < inner; ++i) wr[i] += g * ar[i];
        }
    }
}

void add_ab(const Mat& dC, const Mat& W, Mat& dA) {
    assert(dC.rows == dA.rows && dC.cols == W.rows && dA.cols == W.cols);
    const int n = dC.rows, inner = W.cols, out = dC.cols;
    for (int r = 0; r < n; ++r) {
        const double* gr = dC.row(r);
        double* ar = dA.row(r);
        for (int o = 0; o < out; ++o) {
            const double g = gr[o];
            if (g == 0.0) continue;
            const double* wr = W.row(o);
            for (int i = 0; i < inner; ++i) ar[i] += g * wr[i];
        }
    }
}

}  // namespace tspmdf
