#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace cckm {

enum class ErrorKind {
    InvalidInput,
    SpecViolation,
    DegenerateCluster,
    Precondition,
    ResourceLimit,
    Ingest,
    Config,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Points are stored one per row.
struct DataSet {
    Eigen::MatrixXd points;

    DataSet() = default;
    explicit DataSet(Eigen::MatrixXd p) : points(std::move(p)) {}

    int N() const { return static_cast<int>(points.rows()); }
    int d() const { return static_cast<int>(points.cols()); }

    // Throws InvalidInput on empty data or non-finite coordinates.
    void validate() const;
    DataSet subset(const std::vector<int>& idx) const;
};

struct CardinalitySpec {
    std::vector<int> sizes;
    int outliers = 0;

    CardinalitySpec() = default;
    CardinalitySpec(std::vector<int> s, int n0 = 0) : sizes(std::move(s)), outliers(n0) {}

    static CardinalitySpec balanced(int K, int n, int n0 = 0) {
        return CardinalitySpec(std::vector<int>(K, n), n0);
    }

    int K() const { return static_cast<int>(sizes.size()); }
    int total() const;
    bool is_balanced() const;
    // Throws SpecViolation unless K >= 1, every n_k >= 1, n_0 >= 0 and the total is N.
    void validate(int N) const;
};

// Indices are 0-based and kept sorted inside each set.
struct Clustering {
    std::vector<std::vector<int>> clusters;
    std::vector<int> outliers;

    int K() const { return static_cast<int>(clusters.size()); }
    int N() const;
    // label in [0, K) for cluster members, K for outliers
    std::vector<int> labels() const;
    static Clustering from_labels(const std::vector<int>& labels, int K);
    void normalize();
    void validate(const CardinalitySpec& spec, int N) const;
    bool operator==(const Clustering& o) const = default;
    // Equality up to relabelling of clusters.
    bool same_partition(const Clustering& o) const;
};

}  // namespace cckm
