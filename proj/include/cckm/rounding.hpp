#pragma once

#include "cckm/conic.hpp"
#include "cckm/solvers.hpp"

namespace cckm {

struct RoundingResult {
    Clustering clustering;
    double upper_bound = 0.0;
    double lower_bound = 0.0;
    double gap = 0.0;  // (UB - LB) / max(1, |LB|)
    RelaxationKind kind = RelaxationKind::R_LP;
    SolveStatus status = SolveStatus::Optimal;  // worst status over the relaxation solves
    bool certified = true;  // false when some solve stopped before reaching its tolerances
    int solves = 0;
    double seconds = 0.0;
};

// Relaxation, assignment maximizing sum pi x, centroids, then a capacitated
// nearest-center assignment.
RoundingResult round_general(const DataSet& ds, const CardinalitySpec& spec, RelaxationKind kind,
                             const SolverConfig& cfg = {});

// K - 1 balanced solves on the shrinking index set, peeling the n largest x^1 entries each
// time. The bound is the first solve's value; lloyd_step appends one centroid reassignment.
RoundingResult round_balanced(const DataSet& ds, int n, int K, RelaxationKind kind, const SolverConfig& cfg = {},
                              bool lloyd_step = false);

// Outlier relaxation, the n_0 largest x^0 entries become outliers, and the rest is
// clustered by round_general (or round_balanced for the *_ob kinds).
RoundingResult round_outlier(const DataSet& ds, const CardinalitySpec& spec, RelaxationKind kind,
                             const SolverConfig& cfg = {});

// Indices sorted by value descending, ties by ascending index.
std::vector<int> order_descending(const Eigen::VectorXd& v);

}  // namespace cckm
