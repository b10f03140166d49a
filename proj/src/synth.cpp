#include "cckm/synth.hpp"

#include "cckm/core.hpp"
#include "cckm/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cckm {

SeparationCertificate certify(const Eigen::MatrixXd& D, const Clustering& c) {
    const double inf = std::numeric_limits<double>::infinity();
    SeparationCertificate cert;
    cert.min_inter = inf;
    cert.min_outlier = inf;
    std::vector<int> lab = c.labels();
    const int N = static_cast<int>(lab.size());
    const int K = c.K();
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) {
            const double d = D(i, j);
            if (lab[i] == K || lab[j] == K)
                cert.min_outlier = std::min(cert.min_outlier, d);
            else if (lab[i] == lab[j])
                cert.max_intra = std::max(cert.max_intra, d);
            else
                cert.min_inter = std::min(cert.min_inter, d);
        }
    bool balanced = true;
    for (const auto& cl : c.clusters) balanced = balanced && cl.size() == c.clusters[0].size();
    cert.satisfies_S = balanced && cert.max_intra < cert.min_inter;
    cert.satisfies_S_prime = cert.satisfies_S && cert.max_intra < cert.min_outlier;
    return cert;
}

namespace {

Eigen::VectorXd ball_point(Rng& rng, int dim) {
    Eigen::VectorXd g(dim);
    double norm = 0.0;
    do {
        for (int j = 0; j < dim; ++j) g[j] = rng.normal();
        norm = g.norm();
    } while (norm == 0.0);
    return g / norm * std::pow(rng.uniform(), 1.0 / dim);
}

// Vertices of a regular simplex with edge length delta in the first K-1
// coordinates: scaled basis vectors projected onto the complement of the all-ones vector.
Eigen::MatrixXd simplex_centers(int K, double delta, int dim) {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(K, dim);
    if (K == 1) return C;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(K, K - 1);  // Helmert basis of 1-perp
    for (int j = 0; j < K - 1; ++j) {
        const double s = 1.0 / std::sqrt(static_cast<double>((j + 1) * (j + 2)));
        for (int i = 0; i <= j; ++i) H(i, j) = s;
        H(j + 1, j) = -(j + 1) * s;
    }
    C.leftCols(K - 1) = H * (delta / std::sqrt(2.0));
    return C;
}

PlantedInstance finish(Eigen::MatrixXd pts, std::vector<int> labels, int K, Rng& rng) {
    const int N = static_cast<int>(labels.size());
    std::vector<int> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = N - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    PlantedInstance inst;
    inst.data.points.resize(N, pts.cols());
    std::vector<int> lab(N);
    for (int i = 0; i < N; ++i) {
        inst.data.points.row(i) = pts.row(perm[i]);
        lab[i] = labels[perm[i]] < 0 ? K : labels[perm[i]];
    }
    inst.planted = Clustering::from_labels(lab, K);
    inst.cert = certify(distance_matrix(inst.data), inst.planted);
    return inst;
}

}  // namespace

PlantedInstance generate_stochastic_balls(const std::vector<int>& sizes, double delta, int dim, std::uint64_t seed) {
    const int K = static_cast<int>(sizes.size());
    if (K < 1) throw Error(ErrorKind::SpecViolation, "need at least one cluster");
    if (dim < std::max(1, K - 1))
        throw Error(ErrorKind::SpecViolation,
                    "dimension " + std::to_string(dim) + " cannot hold a simplex of " + std::to_string(K) + " centers");
    for (int n : sizes)
        if (n < 1) throw Error(ErrorKind::SpecViolation, "cluster sizes must be positive");
    Rng rng(seed);
    const Eigen::MatrixXd C = simplex_centers(K, delta, dim);
    const int N = std::accumulate(sizes.begin(), sizes.end(), 0);
    Eigen::MatrixXd pts(N, dim);
    std::vector<int> labels;
    int row = 0;
    for (int k = 0; k < K; ++k)
        for (int t = 0; t < sizes[k]; ++t, ++row) {
            pts.row(row) = C.row(k) + ball_point(rng, dim).transpose();
            labels.push_back(k);
        }
    return finish(std::move(pts), std::move(labels), K, rng);
}

PlantedInstance generate_separated_instance(int K, int n, int n0, int dim, double margin, std::uint64_t seed) {
    if (K < 1 || n < 1 || n0 < 0 || dim < 1)
        throw Error(ErrorKind::SpecViolation, "separated instance needs K, n, dim >= 1 and n0 >= 0");
    if (!(margin > 1.0)) throw Error(ErrorKind::SpecViolation, "margin must exceed 1");
    Rng rng(seed);
    Eigen::MatrixXd offsets(K * n, dim);
    for (int i = 0; i < K * n; ++i) offsets.row(i) = ball_point(rng, dim).transpose();
    double diam = 0.0, radius = 0.0;
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < n; ++i) {
            radius = std::max(radius, offsets.row(k * n + i).norm());
            for (int j = i + 1; j < n; ++j)
                diam = std::max(diam, (offsets.row(k * n + i) - offsets.row(k * n + j)).norm());
        }
    // gaps between any two groups of points are at least `gap` > diam
    const double gap = std::max(margin * diam, 1.0);
    const double spacing = gap + 2.0 * radius;
    Eigen::MatrixXd pts(K * n + n0, dim);
    std::vector<int> labels;
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < n; ++i) {
            pts.row(k * n + i) = offsets.row(k * n + i);
            pts(k * n + i, 0) += k * spacing;
            labels.push_back(k);
        }
    for (int j = 0; j < n0; ++j) {
        pts.row(K * n + j).setZero();
        pts(K * n + j, 0) = (K - 1) * spacing + radius + (j + 1) * gap;
        labels.push_back(-1);
    }
    PlantedInstance inst = finish(std::move(pts), std::move(labels), K, rng);
    return inst;
}

DataSet zscore(const DataSet& ds, std::vector<std::string>* warnings) {
    if (ds.N() < 2) throw Error(ErrorKind::InvalidInput, "z-score needs at least two points");
    DataSet out = ds;
    for (int j = 0; j < ds.d(); ++j) {
        const double mean = ds.points.col(j).mean();
        const double var = (ds.points.col(j).array() - mean).square().sum() / (ds.N() - 1);
        if (var <= 0.0) {
            out.points.col(j).setZero();
            if (warnings) warnings->push_back("feature " + std::to_string(j) + " has zero variance; set to 0");
            continue;
        }
        out.points.col(j) = (ds.points.col(j).array() - mean) / std::sqrt(var);
    }
    return out;
}

}  // namespace cckm
