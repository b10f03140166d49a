#pragma once

#include "cckm/conic.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace cckm::detail {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// min c'v + c0  s.t.  Aeq v = beq,  Ac v + ac in K = R+^{n_nonneg} x PSD(order_1) x ...
// PSD rows are in svec order with off-diagonal rows scaled by sqrt(2).
struct StandardForm {
    int n = 0;
    Eigen::VectorXd c;
    double c0 = 0.0;
    SpMat Aeq;
    Eigen::VectorXd beq;
    SpMat Ac;
    Eigen::VectorXd ac;
    int n_nonneg = 0;
    std::vector<int> psd_orders;

    // Variables of the original program: value = fixed_value when fixed, else v[column].
    std::vector<int> column;
    std::vector<double> fixed_value;
    bool infeasible = false;

    Eigen::VectorXd expand(const Eigen::VectorXd& v) const;
};

// With presolve, singleton equality rows fix their variable and rows left without
// free variables are dropped. PSD families are never presolved.
StandardForm lower(const ConicProgram& p, bool presolve);

SpMat build_sparse(const std::vector<AffineRow>& rows, const std::vector<int>& column, int ncols);

}  // namespace cckm::detail
