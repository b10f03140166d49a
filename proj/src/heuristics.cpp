#include "cckm/heuristics.hpp"

#include "cckm/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace cckm {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

Eigen::MatrixXd kmeanspp_centers(const DataSet& ds, int K, std::uint64_t seed) {
    const int N = ds.N();
    if (K < 1 || K > N)
        throw Error(ErrorKind::SpecViolation,
                    "k-means++ needs 1 <= K <= N (K = " + std::to_string(K) + ", N = " + std::to_string(N) + ")");
    Rng rng(seed);
    std::vector<char> chosen(N, 0);
    std::vector<int> picks;
    picks.push_back(rng.below(N));
    chosen[picks[0]] = 1;
    Eigen::VectorXd d2 = (ds.points.rowwise() - ds.points.row(picks[0])).rowwise().squaredNorm();
    while (static_cast<int>(picks.size()) < K) {
        double total = 0.0;
        for (int i = 0; i < N; ++i)
            if (!chosen[i]) total += d2[i];
        int pick = -1;
        if (total > 0.0) {
            const double r = rng.uniform() * total;
            double acc = 0.0;
            for (int i = 0; i < N; ++i) {
                if (chosen[i] || d2[i] <= 0.0) continue;
                acc += d2[i];
                pick = i;
                if (r < acc) break;
            }
        } else {
            int m = rng.below(N - static_cast<int>(picks.size()));
            for (int i = 0; i < N; ++i)
                if (!chosen[i] && m-- == 0) {
                    pick = i;
                    break;
                }
        }
        chosen[pick] = 1;
        picks.push_back(pick);
        d2 = d2.cwiseMin((ds.points.rowwise() - ds.points.row(pick)).rowwise().squaredNorm());
    }
    Eigen::MatrixXd C(K, ds.d());
    for (int k = 0; k < K; ++k) C.row(k) = ds.points.row(picks[k]);
    return C;
}

BennettResult bennett(const DataSet& ds, const CardinalitySpec& spec, const Eigen::MatrixXd& init, int max_iters,
                      bool keep_history) {
    if (spec.outliers != 0) throw Error(ErrorKind::SpecViolation, "bennett does not handle outliers");
    spec.validate(ds.N());
    if (init.rows() != spec.K() || init.cols() != ds.d())
        throw Error(ErrorKind::InvalidInput, "initial centers must be K x d");
    if (max_iters < 1) throw Error(ErrorKind::Config, "max_iters must be positive");

    BennettResult r;
    Eigen::MatrixXd centers = init;
    std::set<std::vector<int>> seen;
    for (int it = 1; it <= max_iters; ++it) {
        Assignment a = solve_assignment(point_center_costs(ds, centers), spec.sizes);
        r.clustering = Clustering::from_labels(a.column, spec.K());
        r.cost = cluster_cost(ds, r.clustering, spec);
        r.iterations = it;
        r.cost_history.push_back(r.cost);
        if (keep_history) r.history.push_back(r.clustering);
        Eigen::MatrixXd next = centroids(ds, r.clustering);
        if (next == centers || !seen.insert(a.column).second) {
            r.converged = true;
            break;
        }
        centers = std::move(next);
    }
    return r;
}

MultiStartReport multistart_bennett(const DataSet& ds, const CardinalitySpec& spec, int runs, std::uint64_t seed,
                                    int max_iters) {
    if (runs < 1) throw Error(ErrorKind::Config, "runs must be at least 1");
    MultiStartReport rep;
    rep.runs = runs;
    rep.seed = seed;
    for (int run = 0; run < runs; ++run) {
        BennettResult b = bennett(ds, spec, kmeanspp_centers(ds, spec.K(), seed + run), max_iters);
        rep.costs.push_back(b.cost);
        if (run == 0 || b.cost < rep.best_cost) {
            rep.best_cost = b.cost;
            rep.best = b.clustering;
        }
    }
    double mean = 0.0;
    for (double c : rep.costs) mean += c;
    mean /= runs;
    double var = 0.0;
    for (double c : rep.costs) var += (c - mean) * (c - mean);
    var /= runs;
    rep.cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
    return rep;
}

}  // namespace cckm
