#include "cckm/rounding.hpp"

#include "cckm/core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace cckm {

std::vector<int> order_descending(const Eigen::VectorXd& v) {
    std::vector<int> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] > v[b]; });
    return idx;
}

namespace {

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Later statuses only override an optimal one.
void merge_status(RoundingResult& r, SolveStatus s) {
    ++r.solves;
    if (s != SolveStatus::Optimal) {
        r.certified = false;
        if (r.status == SolveStatus::Optimal) r.status = s;
    }
}

void finalize(RoundingResult& r, const DataSet& ds, const CardinalitySpec& spec) {
    r.clustering.normalize();
    r.upper_bound = cluster_cost(ds, r.clustering, spec);
    r.gap = (r.upper_bound - r.lower_bound) / std::max(1.0, std::fabs(r.lower_bound));
}

Clustering single_cluster(int N) {
    Clustering c;
    c.clusters.assign(1, std::vector<int>(N));
    std::iota(c.clusters[0].begin(), c.clusters[0].end(), 0);
    return c;
}

Clustering nearest_center_step(const DataSet& ds, const Clustering& c, const std::vector<int>& sizes) {
    Eigen::MatrixXd Z = centroids(ds, c);
    Assignment a = solve_assignment(point_center_costs(ds, Z), sizes);
    return Clustering::from_labels(a.column, static_cast<int>(sizes.size()));
}

}  // namespace

RoundingResult round_general(const DataSet& ds, const CardinalitySpec& spec, RelaxationKind kind,
                             const SolverConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (kind != RelaxationKind::R_LP && kind != RelaxationKind::R_SDP)
        throw Error(ErrorKind::SpecViolation, std::string("round_general needs R_LP or R_SDP, got ") + kind_name(kind));
    if (spec.outliers != 0) throw Error(ErrorKind::SpecViolation, "round_general does not handle outliers");
    spec.validate(ds.N());
    RoundingResult r;
    r.kind = kind;
    if (spec.K() == 1) {
        r.clustering = single_cluster(ds.N());
        finalize(r, ds, spec);
        r.lower_bound = r.upper_bound;
        r.gap = 0.0;
        r.seconds = elapsed_since(t0);
        return r;
    }
    Eigen::MatrixXd D = distance_matrix(ds);
    ConicProgram p = build_relaxation(kind, D, Eigen::MatrixXd(), spec);
    RelaxationSolution sol = solve(p, cfg);
    merge_status(r, sol.status);
    r.lower_bound = sol.objective;

    auto blocks = cluster_blocks(p, sol);
    const int K = spec.K();
    Eigen::MatrixXd C(ds.N(), K);
    for (int k = 0; k < K; ++k) C.col(k) = -blocks[k].first;
    Assignment first = solve_assignment(C, spec.sizes);
    Clustering prelim = Clustering::from_labels(first.column, K);
    r.clustering = nearest_center_step(ds, prelim, spec.sizes);
    finalize(r, ds, spec);
    r.seconds = elapsed_since(t0);
    return r;
}

RoundingResult round_balanced(const DataSet& ds, int n, int K, RelaxationKind kind, const SolverConfig& cfg,
                              bool lloyd_step) {
    const auto t0 = std::chrono::steady_clock::now();
    if (kind != RelaxationKind::R_LP_b && kind != RelaxationKind::R_SDP_b)
        throw Error(ErrorKind::SpecViolation,
                    std::string("round_balanced needs R_LP_b or R_SDP_b, got ") + kind_name(kind));
    if (n < 1 || K < 1 || n * K != ds.N())
        throw Error(ErrorKind::SpecViolation, "balanced rounding needs N = n K (N = " + std::to_string(ds.N()) +
                                                  ", n = " + std::to_string(n) + ", K = " + std::to_string(K) + ")");
    const CardinalitySpec spec = CardinalitySpec::balanced(K, n);
    RoundingResult r;
    r.kind = kind;
    if (K == 1) {
        r.clustering = single_cluster(ds.N());
        finalize(r, ds, spec);
        r.lower_bound = r.upper_bound;
        r.gap = 0.0;
        r.seconds = elapsed_since(t0);
        return r;
    }
    std::vector<int> remaining(ds.N());
    std::iota(remaining.begin(), remaining.end(), 0);
    r.clustering.clusters.resize(K);
    for (int k = 0; k < K - 1; ++k) {
        DataSet sub = ds.subset(remaining);
        Eigen::MatrixXd D = distance_matrix(sub);
        ConicProgram p = build_relaxation(kind, D, Eigen::MatrixXd(), CardinalitySpec::balanced(K - k, n));
        RelaxationSolution sol = solve(p, cfg);
        merge_status(r, sol.status);
        if (k == 0) r.lower_bound = sol.objective;
        std::vector<int> order = order_descending(cluster_blocks(p, sol)[0].first);
        std::vector<char> take(remaining.size(), 0);
        for (int t = 0; t < n; ++t) take[order[t]] = 1;
        std::vector<int> rest;
        for (std::size_t t = 0; t < remaining.size(); ++t)
            (take[t] ? r.clustering.clusters[k] : rest).push_back(remaining[t]);
        remaining = std::move(rest);
    }
    r.clustering.clusters[K - 1] = remaining;
    if (lloyd_step) r.clustering = nearest_center_step(ds, r.clustering, spec.sizes);
    finalize(r, ds, spec);
    r.seconds = elapsed_since(t0);
    return r;
}

RoundingResult round_outlier(const DataSet& ds, const CardinalitySpec& spec, RelaxationKind kind,
                             const SolverConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!is_outlier_kind(kind))
        throw Error(ErrorKind::SpecViolation, std::string("round_outlier needs an outlier kind, got ") + kind_name(kind));
    spec.validate(ds.N());
    const bool balanced = kind == RelaxationKind::R_LP_ob || kind == RelaxationKind::R_SDP_ob;
    const bool sdp = is_sdp(kind);
    if (balanced && !spec.is_balanced())
        throw Error(ErrorKind::SpecViolation, std::string(kind_name(kind)) + " needs equal cluster sizes");
    if (spec.outliers == 0) {
        if (balanced)
            return round_balanced(ds, spec.sizes[0], spec.K(), sdp ? RelaxationKind::R_SDP_b : RelaxationKind::R_LP_b,
                                  cfg);
        return round_general(ds, spec, sdp ? RelaxationKind::R_SDP : RelaxationKind::R_LP, cfg);
    }

    RoundingResult r;
    r.kind = kind;
    Eigen::MatrixXd D = distance_matrix(ds);
    ConicProgram p = build_relaxation(kind, D, Eigen::MatrixXd(), spec);
    RelaxationSolution sol = solve(p, cfg);
    merge_status(r, sol.status);
    r.lower_bound = sol.objective;

    std::vector<int> order = order_descending(cluster_blocks(p, sol)[0].first);
    std::vector<char> out(ds.N(), 0);
    for (int t = 0; t < spec.outliers; ++t) out[order[t]] = 1;
    std::vector<int> kept;
    for (int i = 0; i < ds.N(); ++i)
        if (out[i])
            r.clustering.outliers.push_back(i);
        else
            kept.push_back(i);

    DataSet sub = ds.subset(kept);
    CardinalitySpec inner(spec.sizes, 0);
    RoundingResult in = balanced ? round_balanced(sub, spec.sizes[0], spec.K(),
                                                  sdp ? RelaxationKind::R_SDP_b : RelaxationKind::R_LP_b, cfg)
                                 : round_general(sub, inner, sdp ? RelaxationKind::R_SDP : RelaxationKind::R_LP, cfg);
    r.solves += in.solves;
    if (!in.certified) {
        r.certified = false;
        if (r.status == SolveStatus::Optimal) r.status = in.status;
    }
    r.clustering.clusters.resize(spec.K());
    for (int k = 0; k < spec.K(); ++k)
        for (int i : in.clustering.clusters[k]) r.clustering.clusters[k].push_back(kept[i]);
    finalize(r, ds, spec);
    r.seconds = elapsed_since(t0);
    return r;
}

}  // namespace cckm
