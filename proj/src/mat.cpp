#include "vf/mat.hpp"

#include <algorithm>
#include <cmath>

#include "vf/kernels.hpp"

namespace vf {

void softmax_inplace(double* x, std::size_t n) {
    double mx = *std::max_element(x, x + n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::exp(x[i] - mx);
        sum += x[i];
    }
    for (std::size_t i = 0; i < n; ++i) x[i] /= sum;
}

Matrix attend_scores(const Matrix& fa, const Matrix& fb) {
    Matrix e(fa.rows, fb.rows);
    for (std::size_t i = 0; i < fa.rows; ++i)
        for (std::size_t j = 0; j < fb.rows; ++j)
            e.at(i, j) = kern::dot(fa.row(i), fb.row(j), fa.cols);
    return e;
}

AttendPools attention_pools(const Matrix& e, const Matrix& a, const Matrix& b) {
    AttendPools out;
    const std::size_t m = e.rows, n = e.cols;
    out.row_softmax = e;
    for (std::size_t i = 0; i < m; ++i) softmax_inplace(out.row_softmax.row(i), n);
    out.col_softmax = Matrix(m, n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> col(m);
        for (std::size_t i = 0; i < m; ++i) col[i] = e.at(i, j);
        softmax_inplace(col.data(), m);
        for (std::size_t i = 0; i < m; ++i) out.col_softmax.at(i, j) = col[i];
    }
    out.beta = Matrix(m, b.cols);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            kern::axpy(out.row_softmax.at(i, j), b.row(j), out.beta.row(i), b.cols);
    out.alpha = Matrix(n, a.cols);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i)
            kern::axpy(out.col_softmax.at(i, j), a.row(i), out.alpha.row(j), a.cols);
    return out;
}

}  // namespace vf
