#include "sqngp/symtools.hpp"

#include <cmath>

namespace sqngp {

Eigen::Index sym_dim(Eigen::Index len) {
    if (len < 1) return -1;
    auto n = static_cast<Eigen::Index>(std::llround((std::sqrt(8.0 * static_cast<double>(len) + 1.0) - 1.0) / 2.0));
    return sym_size(n) == len ? n : -1;
}

SymVec::SymVec(Eigen::Index dim, Vector values) : n(dim), data(std::move(values)) {
    if (data.size() != sym_size(n)) throw Error("SymVec: length is not n(n+1)/2");
}

Eigen::Index vech_index(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
    // columns 0..j-1 contribute n, n-1, ..., n-j+1 entries
    return j * n - j * (j - 1) / 2 + (i - j);
}

SymVec vech(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error("vech: matrix is not square");
    const Eigen::Index n = a.rows();
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw Error("vech: not symmetric");
    Vector out(sym_size(n));
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j; i < n; ++i) out(k++) = a(i, j);
    return SymVec(n, std::move(out));
}

Matrix unvech(const Vector& h) {
    const Eigen::Index n = sym_dim(h.size());
    if (n < 0) throw Error("unvech: length is not a triangular number");
    Matrix a(n, n);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j; i < n; ++i) {
            a(i, j) = h(k);
            a(j, i) = h(k);
            ++k;
        }
    return a;
}

Matrix unvech(const SymVec& h) { return unvech(h.data); }

Vector vec(const Matrix& a) { return Eigen::Map<const Vector>(a.data(), a.size()); }

DuplicationMatrix duplication_matrix(Eigen::Index n) {
    if (n < 1) throw Error("duplication_matrix: n must be >= 1");
    DuplicationMatrix d{n, Matrix::Zero(n * n, sym_size(n))};
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index col = i >= j ? vech_index(n, i, j) : vech_index(n, j, i);
            d.entries(j * n + i, col) = 1.0;
        }
    return d;
}

Matrix elimination_matrix(Eigen::Index n) {
    if (n < 1) throw Error("elimination_matrix: n must be >= 1");
    Matrix l = Matrix::Zero(sym_size(n), n * n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j; i < n; ++i) l(vech_index(n, i, j), j * n + i) = 1.0;
    return l;
}

Matrix dbar(const Vector& s, const DuplicationMatrix& d) {
    const Eigen::Index n = d.n;
    if (s.size() != n) throw Error("dbar: dimension mismatch");
    // (s^T kron I) has the block row [s_0 I, s_1 I, ..., s_{n-1} I]
    Matrix out = Matrix::Zero(n, d.entries.cols());
    for (Eigen::Index j = 0; j < n; ++j) {
        if (s(j) == 0.0) continue;
        out.noalias() += s(j) * d.entries.middleRows(j * n, n);
    }
    return out;
}

}  // namespace sqngp
