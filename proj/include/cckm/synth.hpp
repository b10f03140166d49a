#pragma once

#include "cckm/types.hpp"

#include <cstdint>
#include <string>

namespace cckm {

struct SeparationCertificate {
    double max_intra = 0.0;         // largest squared distance inside a cluster
    double min_inter = 0.0;         // smallest squared distance across clusters
    double min_outlier = 0.0;       // smallest squared distance from an outlier to any other point
    bool satisfies_S = false;
    bool satisfies_S_prime = false;
};

struct PlantedInstance {
    DataSet data;
    Clustering planted;
    SeparationCertificate cert;
};

SeparationCertificate certify(const Eigen::MatrixXd& D, const Clustering& c);

PlantedInstance generate_stochastic_balls(const std::vector<int>& sizes, double delta, int dim, std::uint64_t seed);

PlantedInstance generate_separated_instance(int K, int n, int n0, int dim, double margin, std::uint64_t seed);

// Sample standard deviation; constant columns become zero and are reported in `warnings`.
DataSet zscore(const DataSet& ds, std::vector<std::string>* warnings = nullptr);

}  // namespace cckm
