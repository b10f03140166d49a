#include "cckm/core.hpp"

#include "cckm/conic.hpp"
#include "cckm/kernels.hpp"
#include "cckm/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace cckm {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

Eigen::MatrixXd distance_matrix(const DataSet& ds) {
    ds.validate();
    const int N = ds.N();
    RowMajor X = ds.points;
    const auto& k = kern::active();
    Eigen::MatrixXd D(N, N);
    std::vector<double> row(N);
    for (int i = 0; i < N; ++i) {
        k.sq_dist_row(X.data() + static_cast<std::size_t>(i) * ds.d(), X.data(), N, ds.d(), row.data());
        for (int j = 0; j < N; ++j) D(i, j) = row[j];
    }
    // the kernel is exact-symmetric already; enforce it so downstream checks can rely on it
    for (int i = 0; i < N; ++i) {
        D(i, i) = 0.0;
        for (int j = i + 1; j < N; ++j) D(j, i) = D(i, j);
    }
    return D;
}

Eigen::MatrixXd gram_matrix(const DataSet& ds) {
    ds.validate();
    Eigen::MatrixXd W = ds.points * ds.points.transpose();
    return 0.5 * (W + W.transpose());
}

double set_cost_centroid(const DataSet& ds, const std::vector<int>& S) {
    if (S.empty()) return 0.0;
    Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(ds.d());
    for (int i : S) mu += ds.points.row(i);
    mu /= static_cast<double>(S.size());
    double c = 0.0;
    for (int i : S) c += (ds.points.row(i) - mu).squaredNorm();
    return c;
}

double set_cost_pairwise(const Eigen::MatrixXd& D, const std::vector<int>& S) {
    if (S.empty()) return 0.0;
    double s = 0.0;
    for (int i : S)
        for (int j : S) s += D(i, j);
    return s / (2.0 * static_cast<double>(S.size()));
}

double cluster_cost(const DataSet& ds, const Clustering& c, const CardinalitySpec& spec) {
    c.validate(spec, ds.N());
    double cost = 0.0;
    for (const auto& S : c.clusters) cost += set_cost_centroid(ds, S);
    return cost;
}

double cluster_cost_pairwise(const Eigen::MatrixXd& D, const Clustering& c) {
    double cost = 0.0;
    for (const auto& S : c.clusters) cost += set_cost_pairwise(D, S);
    return cost;
}

Eigen::MatrixXd centroids(const DataSet& ds, const Clustering& c) {
    Eigen::MatrixXd Z(c.K(), ds.d());
    for (int k = 0; k < c.K(); ++k) {
        if (c.clusters[k].empty())
            throw Error(ErrorKind::DegenerateCluster, "cluster " + std::to_string(k) + " is empty");
        Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(ds.d());
        for (int i : c.clusters[k]) mu += ds.points.row(i);
        Z.row(k) = mu / static_cast<double>(c.clusters[k].size());
    }
    return Z;
}

Eigen::MatrixXd point_center_costs(const DataSet& ds, const Eigen::MatrixXd& centers) {
    RowMajor X = ds.points;
    RowMajor C = centers;
    const auto& k = kern::active();
    Eigen::MatrixXd out(ds.N(), centers.rows());
    std::vector<double> row(centers.rows());
    for (int i = 0; i < ds.N(); ++i) {
        k.sq_dist_row(X.data() + static_cast<std::size_t>(i) * ds.d(), C.data(), C.rows(), ds.d(), row.data());
        for (Eigen::Index j = 0; j < C.rows(); ++j) out(i, j) = row[j];
    }
    return out;
}

Eigen::MatrixXi Assignment::matrix(int K) const {
    Eigen::MatrixXi P = Eigen::MatrixXi::Zero(static_cast<int>(column.size()), K);
    for (std::size_t i = 0; i < column.size(); ++i) P(i, column[i]) = 1;
    return P;
}

namespace {

// Shortest distances between columns in the residual graph of the current partial
// assignment; moving row j from column a to b costs cost(j,b) - cost(j,a).
// Bellman-Ford over K nodes, seeded from the columns listed in `sources`.
struct ColumnPaths {
    std::vector<double> dist;
    std::vector<int> via_row;  // row moved into the column on the best path
    std::vector<int> prev;     // column the row came from (-1 at a source)
};

ColumnPaths column_paths(const Eigen::MatrixXd& cost, const std::vector<int>& col,
                         const std::vector<std::vector<int>>& members, const std::vector<double>& init) {
    const int K = static_cast<int>(cost.cols());
    const double inf = std::numeric_limits<double>::infinity();
    ColumnPaths cp{init, std::vector<int>(K, -1), std::vector<int>(K, -1)};
    // cheapest move a -> b via any row of a; lowest row index on ties
    std::vector<double> w(static_cast<std::size_t>(K) * K, inf);
    std::vector<int> wr(static_cast<std::size_t>(K) * K, -1);
    for (int a = 0; a < K; ++a)
        for (int j : members[a])
            for (int b = 0; b < K; ++b) {
                if (b == a) continue;
                double c = cost(j, b) - cost(j, a);
                auto& cur = w[a * K + b];
                if (c < cur) {
                    cur = c;
                    wr[a * K + b] = j;
                }
            }
    (void)col;
    for (int it = 0; it < K; ++it) {
        bool changed = false;
        for (int a = 0; a < K; ++a) {
            if (cp.dist[a] == inf) continue;
            for (int b = 0; b < K; ++b) {
                if (wr[a * K + b] < 0) continue;
                double nd = cp.dist[a] + w[a * K + b];
                if (nd < cp.dist[b] - 1e-15 * (1.0 + std::fabs(nd))) {
                    cp.dist[b] = nd;
                    cp.via_row[b] = wr[a * K + b];
                    cp.prev[b] = a;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    return cp;
}

}  // namespace

Assignment solve_assignment(const Eigen::MatrixXd& cost, const std::vector<int>& sizes) {
    const int N = static_cast<int>(cost.rows());
    const int K = static_cast<int>(cost.cols());
    if (static_cast<int>(sizes.size()) != K)
        throw Error(ErrorKind::SpecViolation, "cost matrix has " + std::to_string(K) + " columns but " +
                                                  std::to_string(sizes.size()) + " sizes were given");
    long total = 0;
    for (int s : sizes) {
        if (s < 0) throw Error(ErrorKind::SpecViolation, "negative column capacity");
        total += s;
    }
    if (total != N)
        throw Error(ErrorKind::SpecViolation, "column capacities sum to " + std::to_string(total) + ", expected " +
                                                  std::to_string(N));
    if (!cost.allFinite()) throw Error(ErrorKind::InvalidInput, "assignment costs must be finite");

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<int> col(N, -1);
    std::vector<std::vector<int>> members(K);

    // Successive shortest paths: insert rows one at a time along a cheapest augmenting path.
    for (int i = 0; i < N; ++i) {
        std::vector<double> init(K);
        for (int k = 0; k < K; ++k) init[k] = sizes[k] > 0 ? cost(i, k) : inf;
        ColumnPaths cp = column_paths(cost, col, members, init);
        int best = -1;
        for (int k = 0; k < K; ++k)
            if (static_cast<int>(members[k].size()) < sizes[k] && cp.dist[k] < inf &&
                (best < 0 || cp.dist[k] < cp.dist[best]))
                best = k;
        // walk the path back: each via_row moves into its column from prev
        int b = best;
        while (cp.prev[b] >= 0) {
            int j = cp.via_row[b];
            int a = cp.prev[b];
            members[a].erase(std::find(members[a].begin(), members[a].end(), j));
            members[b].push_back(j);
            col[j] = b;
            b = a;
        }
        members[b].push_back(i);
        col[i] = b;
    }

    // Column potentials certify optimality; tight edges carry every optimal assignment.
    ColumnPaths cp = column_paths(cost, col, members, std::vector<double>(K, 0.0));
    std::vector<double> pot = cp.dist;
    double scale = 1.0 + cost.cwiseAbs().maxCoeff();
    double tight_tol = 1e-11 * scale;
    auto tight = [&](int j, int b) {
        int a = col[j];
        return (cost(j, b) - pot[b]) - (cost(j, a) - pot[a]) <= tight_tol;
    };

    // Lexicographic pass: move row i to the smallest column reachable by an alternating
    // cycle through tight edges that only touches rows after i.
    for (int i = 0; i < N; ++i) {
        for (int k = 0; k < col[i]; ++k) {
            if (!tight(i, k)) continue;
            int target = col[i];
            std::vector<int> prev_col(K, -2), prev_row(K, -1);
            std::deque<int> q{k};
            prev_col[k] = -1;
            bool found = false;
            while (!q.empty() && !found) {
                int a = q.front();
                q.pop_front();
                std::vector<int> rows = members[a];
                std::sort(rows.begin(), rows.end());
                for (int j : rows) {
                    if (j <= i) continue;
                    for (int b = 0; b < K; ++b) {
                        if (b == a || prev_col[b] != -2 || !tight(j, b)) continue;
                        prev_col[b] = a;
                        prev_row[b] = j;
                        if (b == target) {
                            found = true;
                            break;
                        }
                        q.push_back(b);
                    }
                    if (found) break;
                }
            }
            if (!found) continue;
            int b = target;
            while (b != k) {
                int j = prev_row[b];
                int a = prev_col[b];
                members[a].erase(std::find(members[a].begin(), members[a].end(), j));
                members[b].push_back(j);
                col[j] = b;
                b = a;
            }
            members[target].erase(std::find(members[target].begin(), members[target].end(), i));
            members[k].push_back(i);
            col[i] = k;
            break;
        }
    }

    Assignment out;
    out.column = col;
    for (int i = 0; i < N; ++i) out.objective += cost(i, col[i]);
    return out;
}

Assignment solve_assignment(const Eigen::MatrixXd& cost, const CardinalitySpec& spec) {
    if (spec.outliers == 0) return solve_assignment(cost, spec.sizes);
    Eigen::MatrixXd ext(cost.rows(), cost.cols() + 1);
    ext.leftCols(cost.cols()) = cost;
    ext.col(cost.cols()).setZero();
    std::vector<int> sizes = spec.sizes;
    sizes.push_back(spec.outliers);
    return solve_assignment(ext, sizes);
}

bool VoronoiReport::all_separable() const {
    return std::all_of(pairs.begin(), pairs.end(), [](const PairSeparation& p) { return p.separable; });
}

namespace {

// max t  s.t.  w.xi - b >= t (A),  b - w.xj >= t (B),  -1 <= w <= 1,  t <= 1.
// Always feasible (w = 0, b = 0, t = 0); separable iff the optimum is positive.
double separation_margin(const DataSet& ds, const std::vector<int>& A, const std::vector<int>& B) {
    ConicProgram p;
    p.N = ds.N();
    int d = ds.d();
    int w = p.add_vector_block("w", d);
    int bt = p.add_vector_block("bt", 2);  // (b, t)
    p.objective = Eigen::VectorXd::Zero(p.num_vars);
    const Block& bw = p.blocks[w];
    const Block& bb = p.blocks[bt];
    p.objective[bb.var(1)] = -1.0;
    auto& fam = p.add_family("separation", Cone::NonNeg);
    for (int i : A) {
        AffineRow r;
        for (int t = 0; t < d; ++t) r.add(bw.var(t), ds.points(i, t));
        r.add(bb.var(0), -1.0).add(bb.var(1), -1.0);
        fam.rows.push_back(r);
    }
    for (int j : B) {
        AffineRow r;
        for (int t = 0; t < d; ++t) r.add(bw.var(t), -ds.points(j, t));
        r.add(bb.var(0), 1.0).add(bb.var(1), -1.0);
        fam.rows.push_back(r);
    }
    auto& box = p.add_family("box", Cone::NonNeg);
    for (int t = 0; t < d; ++t) {
        box.rows.push_back(AffineRow().add(bw.var(t), 1.0).shift(1.0));
        box.rows.push_back(AffineRow().add(bw.var(t), -1.0).shift(1.0));
    }
    box.rows.push_back(AffineRow().add(bb.var(1), -1.0).shift(1.0));
    SolverConfig cfg;
    cfg.tol_feas = 1e-10;
    cfg.tol_gap = 1e-10;
    RelaxationSolution s = solve_lp(p, cfg);
    return -s.objective;
}

}  // namespace

VoronoiReport check_voronoi_compatibility(const DataSet& ds, const Clustering& c, double margin_tol) {
    VoronoiReport rep;
    for (int k = 0; k < c.K(); ++k)
        for (int l = k + 1; l < c.K(); ++l) {
            PairSeparation ps;
            ps.k = k;
            ps.l = l;
            ps.margin = separation_margin(ds, c.clusters[k], c.clusters[l]);
            ps.separable = ps.margin > margin_tol;
            rep.pairs.push_back(ps);
        }
    return rep;
}

}  // namespace cckm
