#include "test_util.hpp"

#include "cckm/oracle.hpp"
#include "cckm/rounding.hpp"
#include "cckm/synth.hpp"

#include <doctest.h>

using namespace cckm;
using namespace testutil;

TEST_SUITE("rounding") {

TEST_CASE("1x2 rectangle is solved by both general and balanced rounding") {
    DataSet r = rectangle();
    Clustering want;
    want.clusters = {{0, 1}, {2, 3}};
    for (auto kind : {RelaxationKind::R_LP, RelaxationKind::R_SDP}) {
        RoundingResult g = round_general(r, CardinalitySpec({2, 2}), kind);
        CHECK(g.upper_bound == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(g.clustering.same_partition(want));
    }
    for (auto kind : {RelaxationKind::R_LP_b, RelaxationKind::R_SDP_b}) {
        RoundingResult b = round_balanced(r, 2, 2, kind);
        CHECK(b.upper_bound == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(b.clustering.same_partition(want));
        CHECK(b.certified);
        CHECK(b.solves == 1);
    }
}

TEST_CASE("single cluster needs no solve") {
    DataSet ds = random_points(5, 2, 2);
    RoundingResult g = round_general(ds, CardinalitySpec({5}), RelaxationKind::R_LP);
    CHECK(g.solves == 0);
    CHECK(g.upper_bound == g.lower_bound);
    CHECK(g.upper_bound == doctest::Approx(cluster_cost(ds, g.clustering, CardinalitySpec({5}))));
    RoundingResult b = round_balanced(ds, 5, 1, RelaxationKind::R_LP_b);
    CHECK(b.gap == 0.0);
}

TEST_CASE("precondition errors") {
    DataSet ds = random_points(7, 2, 2);
    CHECK_THROWS_AS(round_balanced(ds, 3, 2, RelaxationKind::R_LP_b), Error);
    CHECK_THROWS_AS(round_general(ds, CardinalitySpec({3, 4}), RelaxationKind::R_LP_b), Error);
    CHECK_THROWS_AS(round_general(ds, CardinalitySpec({3, 3}, 1), RelaxationKind::R_LP), Error);
    CHECK_THROWS_AS(round_outlier(ds, CardinalitySpec({3, 3}, 1), RelaxationKind::R_LP), Error);
}

TEST_CASE("planted balanced instance is recovered with a zero gap") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        PlantedInstance inst = generate_separated_instance(3, 4, 0, 2, 2.0, seed);
        REQUIRE(inst.cert.satisfies_S);
        RoundingResult r = round_balanced(inst.data, 4, 3, RelaxationKind::R_LP_b);
        CHECK(r.clustering.same_partition(inst.planted));
        CHECK(r.gap <= 1e-6);
        OracleResult o = enumerate_optimal(inst.data, CardinalitySpec::balanced(3, 4));
        CHECK(close_rel(r.upper_bound, o.cost, 1e-9));
    }
}

TEST_CASE("planted outlier instance is recovered") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        PlantedInstance inst = generate_separated_instance(3, 4, 3, 2, 2.0, seed);
        REQUIRE(inst.cert.satisfies_S_prime);
        for (auto kind : {RelaxationKind::R_LP_ob, RelaxationKind::R_LP_o}) {
            RoundingResult r = round_outlier(inst.data, CardinalitySpec::balanced(3, 4, 3), kind);
            CHECK(r.clustering.same_partition(inst.planted));
        }
    }
}

TEST_CASE("unequal planted balls are recovered by general rounding") {
    int recovered = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        PlantedInstance inst = generate_stochastic_balls({10, 20, 70}, 4.0, 2, seed);
        RoundingResult r = round_general(inst.data, CardinalitySpec({10, 20, 70}), RelaxationKind::R_LP);
        recovered += r.clustering.same_partition(inst.planted);
    }
    CHECK(recovered == 5);
}

TEST_CASE("all but K points as outliers leaves zero cost") {
    DataSet ds = random_points(7, 2, 6);
    RoundingResult r = round_outlier(ds, CardinalitySpec({1, 1, 1}, 4), RelaxationKind::R_LP_o);
    CHECK(r.upper_bound == doctest::Approx(0.0));
}

TEST_CASE("no outliers delegates to the plain rounding") {
    DataSet ds = random_points(8, 2, 12);
    RoundingResult a = round_outlier(ds, CardinalitySpec({3, 5}), RelaxationKind::R_LP_o);
    RoundingResult b = round_general(ds, CardinalitySpec({3, 5}), RelaxationKind::R_LP);
    CHECK(a.clustering == b.clustering);
    CHECK(a.lower_bound == b.lower_bound);
    RoundingResult c = round_outlier(ds, CardinalitySpec::balanced(2, 4), RelaxationKind::R_LP_ob);
    RoundingResult d = round_balanced(ds, 4, 2, RelaxationKind::R_LP_b);
    CHECK(c.clustering == d.clustering);
}

TEST_CASE("bounds sandwich the exact optimum") {
    Rng rng(31);
    for (int t = 0; t < 8; ++t) {
        const int N = 6 + rng.below(5);
        DataSet ds = random_points(N, 2, 700 + t);
        CardinalitySpec spec(random_sizes(N, 2 + rng.below(2), rng));
        RoundingResult r = round_general(ds, spec, RelaxationKind::R_LP);
        OracleResult o = enumerate_optimal(ds, spec);
        CHECK(r.lower_bound <= o.cost + 1e-5 * (1 + o.cost));
        CHECK(o.cost <= r.upper_bound + 1e-9);
        r.clustering.validate(spec, N);
    }
}

TEST_CASE("ties sort by ascending index") {
    Eigen::VectorXd v(5);
    v << 0.5, 1.0, 0.5, 1.0, -1.0;
    CHECK(order_descending(v) == std::vector<int>{1, 3, 0, 2, 4});
}

TEST_CASE("stopping early marks the result uncertified") {
    DataSet ds = random_points(8, 2, 5);
    SolverConfig cfg;
    cfg.max_iters = 2;
    RoundingResult r = round_general(ds, CardinalitySpec({4, 4}), RelaxationKind::R_SDP, cfg);
    CHECK_FALSE(r.certified);
    CHECK(r.status == SolveStatus::MaxIterations);
    r.clustering.validate(CardinalitySpec({4, 4}), 8);
}

}
