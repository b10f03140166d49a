#include "test_util.hpp"

#include "cckm/heuristics.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace cckm;
using namespace testutil;

TEST_SUITE("heuristics") {

TEST_CASE("generator streams are reproducible") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng u(1);
    double mean = 0, sq = 0;
    for (int i = 0; i < 20000; ++i) {
        const double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        const double z = u.normal();
        mean += z;
        sq += z * z;
    }
    CHECK(std::fabs(mean / 20000) < 0.05);
    CHECK(std::fabs(sq / 20000 - 1.0) < 0.05);
}

TEST_CASE("k-means++ corner cases") {
    DataSet ds = random_points(6, 2, 3);
    Eigen::MatrixXd all = kmeanspp_centers(ds, 6, 9);
    std::set<std::vector<double>> picked, points;
    for (int i = 0; i < 6; ++i) {
        picked.insert({all(i, 0), all(i, 1)});
        points.insert({ds.points(i, 0), ds.points(i, 1)});
    }
    CHECK(picked == points);
    Eigen::MatrixXd one = kmeanspp_centers(ds, 1, 9);
    bool found = false;
    for (int i = 0; i < 6; ++i) found = found || one.row(0) == ds.points.row(i);
    CHECK(found);
    CHECK_THROWS_AS(kmeanspp_centers(ds, 7, 0), Error);
    CHECK(kmeanspp_centers(ds, 3, 5) == kmeanspp_centers(ds, 3, 5));

    // identical points: remaining weights vanish and the draw falls back to uniform
    DataSet same(Eigen::MatrixXd::Ones(4, 2));
    CHECK(kmeanspp_centers(same, 4, 1).rows() == 4);
}

TEST_CASE("k-means++ separates two distant pairs") {
    Eigen::MatrixXd X(4, 2);
    X << 0, 0, 0, 0.1, 10, 0, 10, 0.1;
    DataSet ds(X);
    // after the first draw the other pair carries weight ~2*100 against 0.01
    int split = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        Eigen::MatrixXd C = kmeanspp_centers(ds, 2, s);
        split += (C(0, 0) < 5) != (C(1, 0) < 5);
    }
    CHECK(split >= 950);
}

TEST_CASE("Bennett on the 1x2 rectangle") {
    DataSet r = rectangle();
    CardinalitySpec spec({2, 2});
    Clustering trap, good;
    trap.clusters = {{0, 3}, {1, 2}};
    good.clusters = {{0, 1}, {2, 3}};
    BennettResult t = bennett(r, spec, centroids(r, trap));
    CHECK(t.cost == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(t.clustering.same_partition(trap));
    CHECK(t.converged);
    BennettResult g = bennett(r, spec, centroids(r, good));
    CHECK(g.cost == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.iterations == 1);
    CHECK(g.converged);

    MultiStartReport ms = multistart_bennett(r, spec, 100, 0);
    CHECK(ms.best_cost == doctest::Approx(1.0));
    CHECK(std::count_if(ms.costs.begin(), ms.costs.end(), [](double c) { return c > 3.9; }) > 0);
}

TEST_CASE("multistart statistics") {
    DataSet ds = random_points(10, 2, 4);
    MultiStartReport one = multistart_bennett(ds, CardinalitySpec({5, 5}), 1, 7);
    CHECK(one.cv == 0.0);
    CHECK(one.best_cost == one.costs[0]);
    DataSet same(Eigen::MatrixXd::Zero(6, 3));
    MultiStartReport z = multistart_bennett(same, CardinalitySpec({3, 3}), 5, 1);
    CHECK(z.best_cost == 0.0);
    CHECK(z.cv == 0.0);
    MultiStartReport m = multistart_bennett(ds, CardinalitySpec({3, 7}), 10, 2);
    CHECK(m.best_cost == *std::min_element(m.costs.begin(), m.costs.end()));
    CHECK(m.cv >= 0.0);
    CHECK_THROWS_AS(multistart_bennett(ds, CardinalitySpec({5, 5}), 0, 1), Error);
    CHECK_THROWS_AS(bennett(ds, CardinalitySpec({4, 5}, 1), Eigen::MatrixXd::Zero(2, 2)), Error);
}

TEST_CASE("Bennett iterates are feasible and never increase the cost") {
    Rng rng(12);
    for (int t = 0; t < 20; ++t) {
        const int N = 10 + rng.below(30);
        DataSet ds = random_points(N, 2, 1000 + t);
        CardinalitySpec spec(random_sizes(N, 2 + rng.below(3), rng));
        BennettResult b = bennett(ds, spec, kmeanspp_centers(ds, spec.K(), t), 1000, true);
        for (std::size_t i = 0; i < b.history.size(); ++i) {
            b.history[i].validate(spec, N);
            if (i > 0) CHECK(b.cost_history[i] <= b.cost_history[i - 1] + 1e-12 * (1 + b.cost_history[i - 1]));
        }
        CHECK(b.converged);
    }
}

}
