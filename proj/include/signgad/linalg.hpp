#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace signgad {

// Dense row-major matrix of doubles. Desk-scale sizes only; no BLAS.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

// Extracts the given rows into a new matrix.
Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& row_ids);

// Columnwise concatenation [a | b]; row counts must match.
Matrix hconcat(const Matrix& a, const Matrix& b);

// Solves A x = b for symmetric positive definite A (Cholesky, in-place copy).
// Returns false if the factorization breaks down.
bool solve_spd(const Matrix& a, const std::vector<double>& b, std::vector<double>& x);

// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
// Eigenvalues are returned in descending order with matching eigenvector
// columns. Deterministic; intended for the small Gram matrices that back the
// truncated SVD (dimension at desk scale).
void symmetric_eigen(const Matrix& a, std::vector<double>& eigenvalues, Matrix& eigenvectors);

// Orthonormal basis (d x rank) of the top principal directions of the rows of
// `x` (assumed already centered). Columns beyond the effective numerical rank
// are zero, so the output width is always `rank`. Column signs are fixed by
// making the largest-magnitude coordinate positive.
Matrix principal_basis(const Matrix& x, std::size_t rank, std::size_t* effective_rank = nullptr);

} // namespace signgad
