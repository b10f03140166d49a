#include "cckm/solvers.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>

namespace cckm {

SymEig sym_eig(const Eigen::MatrixXd& A, double sym_tol) {
    if (A.rows() != A.cols()) throw Error(ErrorKind::InvalidInput, "sym_eig needs a square matrix");
    if (!A.allFinite()) throw Error(ErrorKind::InvalidInput, "sym_eig input has non-finite entries");
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > sym_tol * scale)
        throw Error(ErrorKind::InvalidInput, "sym_eig input is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::InvalidInput, "eigensolver did not converge");
    return SymEig{es.eigenvalues(), es.eigenvectors()};
}

// Z = 11'/N + Z' with Z' supported on the complement of 1, 0 <= Z' <= I and tr Z' = K - 1,
// so the best Z' spans the top K - 1 eigenvectors of the centered Gram matrix.
double solve_pw2_spectral(const Eigen::MatrixXd& W, int K) {
    const int N = static_cast<int>(W.rows());
    if (K < 1 || K > N)
        throw Error(ErrorKind::SpecViolation, "PW2 needs 1 <= K <= N (K = " + std::to_string(K) + ")");
    Eigen::MatrixXd Ws = 0.5 * (W + W.transpose());
    Eigen::VectorXd r = Ws.rowwise().mean();
    double mean = r.mean();
    Eigen::MatrixXd C = Ws;
    C.colwise() -= r;
    C.rowwise() -= r.transpose();
    C.array() += mean;
    C = 0.5 * (C + C.transpose());
    Eigen::VectorXd ev = sym_eig(C, 1e-9).values;
    double top = 0.0;
    for (int k = 0; k < K - 1; ++k) top += ev[N - 1 - k];
    return Ws.trace() - Ws.sum() / N - top;
}

}  // namespace cckm
