#pragma once

#include <cstddef>
#include <vector>

namespace vf {

// Minimal row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }
};

// Pairwise interaction scores: e[i][j] = fa_i . fb_j.
Matrix attend_scores(const Matrix& fa, const Matrix& fb);

// Soft alignments from the score matrix: beta_i attends over the rows of b,
// alpha_j over the rows of a. Also returns the row/column softmax weights.
struct AttendPools {
    Matrix row_softmax;  // m x n
    Matrix col_softmax;  // m x n
    Matrix beta;         // m x (cols of b)
    Matrix alpha;        // n x (cols of a)
};
AttendPools attention_pools(const Matrix& e, const Matrix& a, const Matrix& b);

void softmax_inplace(double* x, std::size_t n);

}  // namespace vf
