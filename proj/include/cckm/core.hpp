#pragma once

#include "cckm/types.hpp"

#include <vector>

namespace cckm {

Eigen::MatrixXd distance_matrix(const DataSet& ds);
Eigen::MatrixXd gram_matrix(const DataSet& ds);

// Sum of squared distances to cluster means; outliers contribute nothing.
double cluster_cost(const DataSet& ds, const Clustering& c, const CardinalitySpec& spec);
// Same quantity through (1/2|S|) sum_{i,j in S} d_ij.
double cluster_cost_pairwise(const Eigen::MatrixXd& D, const Clustering& c);
double set_cost_centroid(const DataSet& ds, const std::vector<int>& S);
double set_cost_pairwise(const Eigen::MatrixXd& D, const std::vector<int>& S);

// K x d matrix of cluster means.
Eigen::MatrixXd centroids(const DataSet& ds, const Clustering& c);

// N x K squared distances from every point to every center.
Eigen::MatrixXd point_center_costs(const DataSet& ds, const Eigen::MatrixXd& centers);

struct Assignment {
    std::vector<int> column;  // column index chosen for each row
    double objective = 0.0;

    Eigen::MatrixXi matrix(int K) const;
};

// Min-cost assignment of rows to columns with column k receiving exactly sizes[k] rows.
// Among optimal assignments the lexicographically smallest column vector is returned.
Assignment solve_assignment(const Eigen::MatrixXd& cost, const std::vector<int>& sizes);
// Uses spec.sizes, with an extra zero-cost column of capacity n_0 when n_0 > 0.
Assignment solve_assignment(const Eigen::MatrixXd& cost, const CardinalitySpec& spec);

struct PairSeparation {
    int k = 0;
    int l = 0;
    double margin = 0.0;
    bool separable = false;
};

struct VoronoiReport {
    std::vector<PairSeparation> pairs;
    bool all_separable() const;
};

VoronoiReport check_voronoi_compatibility(const DataSet& ds, const Clustering& c,
                                          double margin_tol = 1e-7);

}  // namespace cckm
