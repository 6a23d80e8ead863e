#pragma once

// Bookkeeping for symmetric matrices: half-vectorization (column-wise lower
// triangle), duplication and elimination matrices, and the measurement map
// that turns vech(A) into the product A*s.

#include "sqngp/types.hpp"

namespace sqngp {

/// Number of unique entries of a symmetric n x n matrix.
constexpr Eigen::Index sym_size(Eigen::Index n) { return n * (n + 1) / 2; }

/// Inverse of sym_size; returns -1 when len is not a triangular number.
Eigen::Index sym_dim(Eigen::Index len);

/// Lower-triangular elements of a symmetric matrix, stacked column by column.
struct SymVec {
    Eigen::Index n = 0;
    Vector data;

    SymVec() = default;
    SymVec(Eigen::Index dim, Vector values);
};

struct DuplicationMatrix {
    Eigen::Index n = 0;
    Matrix entries;  // n^2 x n(n+1)/2, 0/1
};

/// Position of element (i, j), i >= j, inside vech.
Eigen::Index vech_index(Eigen::Index n, Eigen::Index i, Eigen::Index j);

/// Throws Error("not symmetric") when |A - A^T| exceeds 1e-12 relative to max|A|.
SymVec vech(const Matrix& a);
Matrix unvech(const SymVec& h);
Matrix unvech(const Vector& h);

/// Column-major vec.
Vector vec(const Matrix& a);

DuplicationMatrix duplication_matrix(Eigen::Index n);

/// L with vech(A) = L vec(A); picks the lower-triangular entry of vec(A).
Matrix elimination_matrix(Eigen::Index n);

/// (s^T kron I) D, the n x n(n+1)/2 map with dbar(s, D) * vech(A) == A * s.
Matrix dbar(const Vector& s, const DuplicationMatrix& d);

}  // namespace sqngp
