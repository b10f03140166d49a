#include "test_util.hpp"

#include "cckm/synth.hpp"

#include <doctest.h>

using namespace cckm;
using namespace testutil;

namespace {

// The balanced separation condition recomputed literally from the distance matrix.
bool literal_S(const Eigen::MatrixXd& D, const Clustering& c) {
    double intra = 0, inter = std::numeric_limits<double>::infinity();
    for (int k = 0; k < c.K(); ++k)
        for (int i : c.clusters[k]) {
            for (int j : c.clusters[k]) intra = std::max(intra, D(i, j));
            for (int l = 0; l < c.K(); ++l)
                if (l != k)
                    for (int j : c.clusters[l]) inter = std::min(inter, D(i, j));
        }
    for (const auto& cl : c.clusters)
        if (cl.size() != c.clusters[0].size()) return false;
    return intra < inter;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("z-score uses the sample deviation") {
    Eigen::MatrixXd X(2, 1);
    X << 0, 2;
    DataSet z = zscore(DataSet(X));
    CHECK(z.points(0, 0) == doctest::Approx(-std::sqrt(0.5)));
    CHECK(z.points(1, 0) == doctest::Approx(std::sqrt(0.5)));

    Eigen::MatrixXd C(3, 2);
    C << 1, 5, 2, 5, 3, 5;
    std::vector<std::string> warn;
    DataSet zc = zscore(DataSet(C), &warn);
    CHECK(zc.points.col(1).isZero());
    CHECK(warn.size() == 1);

    DataSet r = zscore(random_points(20, 5, 3, 7.0));
    for (int j = 0; j < 5; ++j) {
        const double m = r.points.col(j).mean();
        const double sd = std::sqrt((r.points.col(j).array() - m).square().sum() / 19.0);
        CHECK(std::fabs(m) <= 1e-12);
        CHECK(sd == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(zscore(random_points(1, 2, 1)), Error);
}

TEST_CASE("stochastic balls") {
    PlantedInstance far = generate_stochastic_balls({5, 5, 5}, 100.0, 2, 1);
    CHECK(far.cert.satisfies_S);
    CHECK(far.data.N() == 15);
    for (std::uint64_t s = 0; s < 10; ++s) {
        PlantedInstance inst = generate_stochastic_balls({6, 6, 6}, 4.0, 2, s);
        Eigen::MatrixXd D = distance_matrix(inst.data);
        CHECK(inst.cert.satisfies_S == literal_S(D, inst.planted));
        CHECK(inst.cert.max_intra <= 4.0 + 1e-12);  // unit balls have diameter 2
    }
    PlantedInstance uneq = generate_stochastic_balls({10, 20, 70}, 2.5, 2, 3);
    CHECK_FALSE(uneq.cert.satisfies_S);  // unequal sizes
    CHECK(uneq.planted.clusters[2].size() == 70);
    CHECK_THROWS_AS(generate_stochastic_balls({3, 3, 3, 3}, 4.0, 2, 0), Error);
    PlantedInstance a = generate_stochastic_balls({4, 4}, 3.0, 3, 77), b = generate_stochastic_balls({4, 4}, 3.0, 3, 77);
    CHECK(a.data.points == b.data.points);
    CHECK(a.planted == b.planted);
}

TEST_CASE("separated instances satisfy the separation assumptions") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        PlantedInstance a = generate_separated_instance(3, 4, 0, 2, 2.0, s);
        CHECK(a.cert.satisfies_S);
        CHECK(literal_S(distance_matrix(a.data), a.planted));
        PlantedInstance b = generate_separated_instance(3, 4, 3, 3, 1.5, s);
        CHECK(b.cert.satisfies_S_prime);
        CHECK(b.planted.outliers.size() == 3);
    }
    PlantedInstance ones = generate_separated_instance(4, 1, 0, 1, 2.0, 3);
    CHECK(ones.cert.max_intra == 0.0);
    CHECK(ones.cert.satisfies_S);
    CHECK_THROWS_AS(generate_separated_instance(3, 4, 0, 2, 1.0, 0), Error);
}

TEST_CASE("certificate on a hand-built layout") {
    Eigen::MatrixXd X(5, 1);
    X << 0, 1, 10, 11, 30;
    Clustering c;
    c.clusters = {{0, 1}, {2, 3}};
    c.outliers = {4};
    SeparationCertificate cert = certify(distance_matrix(DataSet(X)), c);
    CHECK(cert.max_intra == 1.0);
    CHECK(cert.min_inter == 81.0);
    CHECK(cert.min_outlier == 361.0);
    CHECK(cert.satisfies_S_prime);
}

}
