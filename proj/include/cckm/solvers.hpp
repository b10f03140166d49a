#pragma once

#include "cckm/conic.hpp"

#include <functional>
#include <ostream>

namespace cckm {

struct SolverConfig {
    double tol_feas = 0.0;  // 0 selects the backend default (1e-8 LP, 1e-6 SDP)
    double tol_gap = 0.0;
    int max_iters = 0;      // 0 selects 200 (LP) or 20000 (SDP)
    bool scaling = true;
    unsigned long long seed = 0;  // reserved; both backends are deterministic
    double time_budget = 0.0;     // seconds, 0 = unlimited
    int max_n = 600;
    std::ostream* log = nullptr;  // one line per logged iteration: iter pres dres gap

    SolverConfig with_defaults(bool sdp) const;
};

// Homogeneous self-dual interior point method for programs without PSD families.
RelaxationSolution solve_lp(const ConicProgram& p, const SolverConfig& cfg = {});

// Operator-splitting conic solver (nonnegative orthant and PSD cones).
RelaxationSolution solve_sdp(const ConicProgram& p, const SolverConfig& cfg = {});

// Dispatches on p.has_psd().
RelaxationSolution solve(const ConicProgram& p, const SolverConfig& cfg = {});

// Optimal value of the PW2 relaxation from the spectrum of the centered Gram matrix.
double solve_pw2_spectral(const Eigen::MatrixXd& W, int K);

struct SymEig {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns orthonormal
};
SymEig sym_eig(const Eigen::MatrixXd& A, double sym_tol = 1e-12);

}  // namespace cckm
