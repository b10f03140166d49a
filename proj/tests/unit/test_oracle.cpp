#include "test_util.hpp"

#include "cckm/oracle.hpp"

#include <doctest.h>

#include <limits>

using namespace cckm;
using namespace testutil;

TEST_SUITE("oracle") {

TEST_CASE("1x2 rectangle") {
    OracleResult o = enumerate_optimal(rectangle(), CardinalitySpec({2, 2}));
    CHECK(o.cost == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(o.clustering.clusters == std::vector<std::vector<int>>{{0, 1}, {2, 3}});
    CHECK(o.enumerated == 3);
}

TEST_CASE("collinear triple picks the canonical optimum") {
    Eigen::MatrixXd X(3, 1);
    X << 0, 1, 2;
    OracleResult o = enumerate_optimal(DataSet(X), CardinalitySpec({2, 1}));
    CHECK(o.cost == doctest::Approx(0.5));
    CHECK(o.clustering.clusters == std::vector<std::vector<int>>{{0, 1}, {2}});
}

TEST_CASE("singletons cost nothing") {
    OracleResult o = enumerate_optimal(random_points(5, 2, 1), CardinalitySpec::balanced(5, 1));
    CHECK(o.cost == 0.0);
    CHECK(o.enumerated == 1);
}

TEST_CASE("partition counts") {
    CHECK(partition_count(CardinalitySpec({2, 2})) == 3.0);
    CHECK(partition_count(CardinalitySpec({3, 3, 2})) == 280.0);
    CHECK(partition_count(CardinalitySpec({2, 2}, 1)) == 15.0);
    Rng rng(2);
    for (int t = 0; t < 10; ++t) {
        const int N = 4 + rng.below(6);
        CardinalitySpec spec(random_sizes(N - 1, 1 + rng.below(3), rng), 1);
        OracleResult o = enumerate_optimal(random_points(N, 2, t), spec);
        CHECK(static_cast<double>(o.enumerated) == partition_count(spec));
    }
    CHECK_THROWS_AS(enumerate_optimal(random_points(30, 2, 1), CardinalitySpec::balanced(3, 10)), Error);
    try {
        enumerate_optimal(random_points(9, 2, 1), CardinalitySpec::balanced(3, 3), 10);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ResourceLimit);
    }
}

TEST_CASE("matches brute force over all labellings, with and without outliers") {
    Rng rng(4);
    for (int t = 0; t < 25; ++t) {
        const int N = 3 + rng.below(6);
        const int n0 = t % 2 ? rng.below(2) + 1 : 0;
        if (N - n0 < 2) continue;
        DataSet ds = random_points(N, 2, 40 + t);
        CardinalitySpec spec(random_sizes(N - n0, 1 + rng.below(std::min(3, N - n0)), rng), n0);
        std::vector<int> caps = spec.sizes;
        caps.push_back(n0);
        double best = std::numeric_limits<double>::infinity();
        for_each_labelling(N, caps, [&](const std::vector<int>& lab) {
            best = std::min(best, cluster_cost(ds, Clustering::from_labels(lab, spec.K()), spec));
        });
        OracleResult o = enumerate_optimal(ds, spec);
        CHECK(close_rel(o.cost, best, 1e-10));
        CHECK(o.cost == doctest::Approx(cluster_cost(ds, o.clustering, spec)));
        o.clustering.validate(spec, N);
    }
}

TEST_CASE("relabelling equal-size clusters does not change the optimum") {
    DataSet ds = random_points(9, 2, 8);
    const double a = enumerate_optimal(ds, CardinalitySpec({3, 2, 2, 2})).cost;
    const double b = enumerate_optimal(ds, CardinalitySpec({2, 3, 2, 2})).cost;
    const double c = enumerate_optimal(ds, CardinalitySpec({2, 2, 2, 3})).cost;
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK(a == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("no heuristic beats the oracle") {
    for (int t = 0; t < 5; ++t) {
        DataSet ds = random_points(10, 2, 90 + t);
        CardinalitySpec spec({3, 3, 4});
        OracleResult o = enumerate_optimal(ds, spec);
        MultiStartReport ms = multistart_bennett(ds, spec, 5, t);
        CHECK(o.cost <= ms.best_cost + 1e-12);
    }
}

}
