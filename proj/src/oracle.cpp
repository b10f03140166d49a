#include "cckm/oracle.hpp"

#include "cckm/core.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace cckm {

double partition_count(const CardinalitySpec& spec) {
    const int N = spec.total();
    double lg = std::lgamma(N + 1.0) - std::lgamma(spec.outliers + 1.0);
    std::map<int, int> classes;
    for (int n : spec.sizes) {
        lg -= std::lgamma(n + 1.0);
        ++classes[n];
    }
    for (auto [n, m] : classes) lg -= std::lgamma(m + 1.0);
    return std::round(std::exp(lg));
}

namespace {

// Slots 0..K-1 are clusters, slot K holds outliers. Points are placed in index order;
// an empty cluster may be opened only if no earlier cluster of the same size is empty,
// so clusters of equal size appear ordered by their smallest member.
struct Search {
    const Eigen::MatrixXd& D;
    const CardinalitySpec& spec;
    int N, K;
    std::vector<int> first_of_class;  // first cluster with the same size, for each cluster
    std::vector<std::vector<int>> members;
    std::vector<double> pair_sum;
    std::vector<int> labels, best_labels;
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t leaves = 0;

    Search(const Eigen::MatrixXd& D_, const CardinalitySpec& s) : D(D_), spec(s), N(s.total()), K(s.K()) {
        first_of_class.resize(K);
        for (int k = 0; k < K; ++k) {
            first_of_class[k] = k;
            for (int j = 0; j < k; ++j)
                if (spec.sizes[j] == spec.sizes[k]) {
                    first_of_class[k] = j;
                    break;
                }
        }
        members.resize(K + 1);
        pair_sum.assign(K, 0.0);
        labels.assign(N, -1);
    }

    int capacity(int slot) const { return slot < K ? spec.sizes[slot] : spec.outliers; }

    void leaf() {
        ++leaves;
        double cost = 0.0;
        for (int k = 0; k < K; ++k) cost += pair_sum[k] / spec.sizes[k];
        // near-ties keep the lexicographically first labelling
        if (best_labels.empty() || cost < best - 1e-12 * (1.0 + std::fabs(best))) {
            best = cost;
            best_labels = labels;
        }
    }

    void place(int i) {
        if (i == N) {
            leaf();
            return;
        }
        for (int slot = 0; slot <= K; ++slot) {
            if (static_cast<int>(members[slot].size()) >= capacity(slot)) continue;
            if (slot < K && members[slot].empty()) {
                bool earlier_empty = false;
                for (int j = first_of_class[slot]; j < slot; ++j)
                    if (spec.sizes[j] == spec.sizes[slot] && members[j].empty()) earlier_empty = true;
                if (earlier_empty) continue;
            }
            double added = 0.0;
            if (slot < K)
                for (int j : members[slot]) added += D(i, j);
            members[slot].push_back(i);
            if (slot < K) pair_sum[slot] += added;
            labels[i] = slot;
            place(i + 1);
            labels[i] = -1;
            if (slot < K) pair_sum[slot] -= added;
            members[slot].pop_back();
        }
    }
};

}  // namespace

OracleResult enumerate_optimal(const DataSet& ds, const CardinalitySpec& spec, double cap) {
    spec.validate(ds.N());
    const double count = partition_count(spec);
    if (count > cap)
    {
        char msg[128];
        std::snprintf(msg, sizeof msg, "exact enumeration needs %.3g partitions, above the cap of %.3g", count, cap);
        throw Error(ErrorKind::ResourceLimit, msg);
    }
    Eigen::MatrixXd D = distance_matrix(ds);
    Search s(D, spec);
    s.place(0);
    OracleResult r;
    r.clustering = Clustering::from_labels(s.best_labels, spec.K());
    r.cost = cluster_cost(ds, r.clustering, spec);
    r.enumerated = s.leaves;
    return r;
}

}  // namespace cckm
