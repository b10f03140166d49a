#include "cckm/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cckm {

void DataSet::validate() const {
    if (points.rows() < 1 || points.cols() < 1)
        throw Error(ErrorKind::InvalidInput, "dataset needs at least one point and one dimension");
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        for (Eigen::Index j = 0; j < points.cols(); ++j)
            if (!std::isfinite(points(i, j)))
                throw Error(ErrorKind::InvalidInput, "non-finite coordinate at point " + std::to_string(i) +
                                                         ", feature " + std::to_string(j));
}

DataSet DataSet::subset(const std::vector<int>& idx) const {
    Eigen::MatrixXd p(idx.size(), points.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) p.row(r) = points.row(idx[r]);
    return DataSet(std::move(p));
}

int CardinalitySpec::total() const { return std::accumulate(sizes.begin(), sizes.end(), 0) + outliers; }

bool CardinalitySpec::is_balanced() const {
    return !sizes.empty() && std::all_of(sizes.begin(), sizes.end(), [&](int s) { return s == sizes[0]; });
}

void CardinalitySpec::validate(int N) const {
    if (sizes.empty()) throw Error(ErrorKind::SpecViolation, "cardinality spec needs K >= 1");
    for (int s : sizes)
        if (s < 1) throw Error(ErrorKind::SpecViolation, "cluster sizes must be positive (got " + std::to_string(s) + ")");
    if (outliers < 0) throw Error(ErrorKind::SpecViolation, "outlier count must be nonnegative");
    if (total() != N)
        throw Error(ErrorKind::SpecViolation, "cluster sizes sum to " + std::to_string(total()) +
                                                  " but the dataset has " + std::to_string(N) + " points");
}

int Clustering::N() const {
    std::size_t n = outliers.size();
    for (const auto& c : clusters) n += c.size();
    return static_cast<int>(n);
}

std::vector<int> Clustering::labels() const {
    std::vector<int> lab(N(), -1);
    for (int k = 0; k < K(); ++k)
        for (int i : clusters[k]) lab.at(i) = k;
    for (int i : outliers) lab.at(i) = K();
    return lab;
}

Clustering Clustering::from_labels(const std::vector<int>& labels, int K) {
    Clustering c;
    c.clusters.resize(K);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        int l = labels[i];
        if (l >= 0 && l < K)
            c.clusters[l].push_back(static_cast<int>(i));
        else
            c.outliers.push_back(static_cast<int>(i));
    }
    return c;
}

void Clustering::normalize() {
    for (auto& c : clusters) std::sort(c.begin(), c.end());
    std::sort(outliers.begin(), outliers.end());
}

void Clustering::validate(const CardinalitySpec& spec, int N) const {
    if (K() != spec.K()) throw Error(ErrorKind::SpecViolation, "clustering has wrong number of clusters");
    std::vector<char> seen(N, 0);
    auto mark = [&](int i) {
        if (i < 0 || i >= N) throw Error(ErrorKind::SpecViolation, "index out of range in clustering");
        if (seen[i]) throw Error(ErrorKind::SpecViolation, "index " + std::to_string(i) + " assigned twice");
        seen[i] = 1;
    };
    for (int k = 0; k < K(); ++k) {
        if (static_cast<int>(clusters[k].size()) != spec.sizes[k])
            throw Error(ErrorKind::SpecViolation, "cluster " + std::to_string(k) + " has " +
                                                      std::to_string(clusters[k].size()) + " points, spec says " +
                                                      std::to_string(spec.sizes[k]));
        for (int i : clusters[k]) mark(i);
    }
    if (static_cast<int>(outliers.size()) != spec.outliers)
        throw Error(ErrorKind::SpecViolation, "outlier set has wrong size");
    for (int i : outliers) mark(i);
    for (int i = 0; i < N; ++i)
        if (!seen[i]) throw Error(ErrorKind::SpecViolation, "index " + std::to_string(i) + " is unassigned");
}

bool Clustering::same_partition(const Clustering& o) const {
    Clustering a = *this, b = o;
    a.normalize();
    b.normalize();
    std::sort(a.clusters.begin(), a.clusters.end());
    std::sort(b.clusters.begin(), b.clusters.end());
    return a == b;
}

}  // namespace cckm
