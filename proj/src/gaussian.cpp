#include "sqngp/gaussian.hpp"

namespace sqngp {

Matrix covariance_factor(const Matrix& cov) {
    if (cov.rows() != cov.cols()) throw Error("covariance_factor: matrix is not square");
    if (cov.isZero(0.0)) return Matrix::Zero(cov.rows(), cov.cols());
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (cov + cov.transpose()));
    if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, eig.eigenvalues().maxCoeff()))
        throw Error("covariance_factor: matrix is not positive semidefinite");
    return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Vector draw_gaussian(const Matrix& factor, RandomStream& stream) {
    Vector z(factor.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = stream.normal();
    return factor * z;
}

}  // namespace sqngp
