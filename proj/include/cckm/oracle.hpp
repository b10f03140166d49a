#pragma once

#include "cckm/types.hpp"

#include <cstdint>

namespace cckm {

struct OracleResult {
    Clustering clustering;
    double cost = 0.0;
    std::uint64_t enumerated = 0;
};

// Number of partitions left after removing label symmetry among equal-size clusters.
double partition_count(const CardinalitySpec& spec);

// Exhaustive search; throws ResourceLimit when partition_count exceeds cap.
OracleResult enumerate_optimal(const DataSet& ds, const CardinalitySpec& spec, double cap = 2e6);

}  // namespace cckm
