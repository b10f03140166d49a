#pragma once

#include "cckm/types.hpp"

#include <cstdint>
#include <random>

namespace cckm {

// Per-run streams: std::mt19937_64 seeded with seed + run, with uniform doubles built
// from the top 53 bits so draws do not depend on the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    std::uint64_t next() { return gen_(); }
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    int below(int n) { return static_cast<int>(uniform() * n) % n; }
    double normal();

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

Eigen::MatrixXd kmeanspp_centers(const DataSet& ds, int K, std::uint64_t seed);

struct BennettResult {
    Clustering clustering;
    double cost = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> cost_history;  // cost after each assignment step
    std::vector<Clustering> history;   // clustering after each assignment step, if requested
};

BennettResult bennett(const DataSet& ds, const CardinalitySpec& spec, const Eigen::MatrixXd& init, int max_iters = 1000,
                      bool keep_history = false);

struct MultiStartReport {
    Clustering best;
    double best_cost = 0.0;
    std::vector<double> costs;
    double cv = 0.0;
    int runs = 0;
    std::uint64_t seed = 0;
};

MultiStartReport multistart_bennett(const DataSet& ds, const CardinalitySpec& spec, int runs, std::uint64_t seed,
                                    int max_iters = 1000);

}  // namespace cckm
