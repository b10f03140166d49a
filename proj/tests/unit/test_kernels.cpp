#include "test_util.hpp"

#include "cckm/kernels.hpp"
#include "cckm/solvers.hpp"

#include <doctest.h>

#include <cstdlib>
#include <cstring>

using namespace cckm;
using namespace testutil;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = lo + (hi - lo) * rng.uniform();
    return v;
}

struct IsaGuard {
    kern::Isa saved = kern::active_isa();
    ~IsaGuard() { kern::set_isa(saved); }
};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("environment override selects the scalar path") {
    const char* env = std::getenv("CCKM_FORCE_SCALAR");
    if (env && *env && std::strcmp(env, "0") != 0) CHECK(kern::active_isa() == kern::Isa::Scalar);
    IsaGuard g;
    kern::set_isa(kern::Isa::Scalar);
    CHECK(kern::active_isa() == kern::Isa::Scalar);
    CHECK(&kern::active() == &kern::scalar_table());
}

TEST_CASE("scalar kernels on hand-checked inputs") {
    const auto& s = kern::scalar_table();
    double a[] = {1, 2, 3}, b[] = {4, -5, 6};
    CHECK(s.dot(a, b, 3) == 12.0);
    CHECK(s.inf_norm(b, 3) == 6.0);
    double y[] = {1, 1, 1};
    s.axpby(2.0, a, -1.0, y, 3);
    CHECK(y[0] == 1.0);
    CHECK(y[2] == 5.0);
    double p[] = {0, 0}, Y[] = {3, 4, 1, 0};
    double out[2];
    s.sq_dist_row(p, Y, 2, 2, out);
    CHECK(out[0] == 25.0);
    CHECK(out[1] == 1.0);
    double v[] = {-1, 2}, mult[] = {0.5, -0.5}, slack[2], rho[] = {1.0, 2.0};
    s.nonneg_step(v, mult, slack, rho, 2);
    CHECK(slack[0] == 0.0);           // max(-1 + 0.5, 0)
    CHECK(slack[1] == 1.75);          // 2 - 0.25
    CHECK(mult[0] == -0.5);           // 1 * (-0.5 - 0)
    CHECK(mult[1] == 0.0);
}

TEST_CASE("AVX2 kernels match the scalar reference") {
    const kern::Table* v = kern::avx2_table();
    if (!v || kern::detected_isa() != kern::Isa::Avx2) {
        MESSAGE("AVX2 variant unavailable on this machine; skipped");
        return;
    }
    const auto& s = kern::scalar_table();
    Rng rng(99);
    for (std::size_t n = 0; n < 70; ++n) {
        auto a = random_vec(rng, n), b = random_vec(rng, n);
        double mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) mag += std::fabs(a[i] * b[i]);
        CHECK(std::fabs(v->dot(a.data(), b.data(), n) - s.dot(a.data(), b.data(), n)) <= 1e-14 * (1.0 + mag));
        CHECK(v->inf_norm(a.data(), n) == s.inf_norm(a.data(), n));

        auto y1 = random_vec(rng, n), y2 = y1;
        s.axpby(0.3, a.data(), -1.7, y1.data(), n);
        v->axpby(0.3, a.data(), -1.7, y2.data(), n);
        CHECK(y1 == y2);

        auto rho = random_vec(rng, n, 0.1, 5.0);
        auto m1 = random_vec(rng, n), m2 = m1;
        std::vector<double> s1(n), s2(n);
        s.nonneg_step(a.data(), m1.data(), s1.data(), rho.data(), n);
        v->nonneg_step(a.data(), m2.data(), s2.data(), rho.data(), n);
        CHECK(s1 == s2);
        CHECK(m1 == m2);
    }
    for (std::size_t d = 1; d < 12; ++d) {
        const std::size_t m = 9;
        auto p = random_vec(rng, d), Y = random_vec(rng, m * d);
        std::vector<double> o1(m), o2(m);
        s.sq_dist_row(p.data(), Y.data(), m, d, o1.data());
        v->sq_dist_row(p.data(), Y.data(), m, d, o2.data());
        for (std::size_t j = 0; j < m; ++j) CHECK(o1[j] == doctest::Approx(o2[j]).epsilon(1e-14));
    }
}

TEST_CASE("whole solves agree across kernel variants") {
    if (kern::detected_isa() != kern::Isa::Avx2) {
        MESSAGE("AVX2 variant unavailable on this machine; skipped");
        return;
    }
    IsaGuard g;
    DataSet ds = random_points(8, 2, 5);
    auto solve_with = [&](kern::Isa isa) {
        kern::set_isa(isa);
        Eigen::MatrixXd D = distance_matrix(ds);
        ConicProgram p = build_relaxation(RelaxationKind::R_SDP_b, D, gram_matrix(ds), CardinalitySpec::balanced(2, 4));
        return solve_sdp(p).objective;
    };
    const double a = solve_with(kern::Isa::Scalar);
    const double b = solve_with(kern::Isa::Avx2);
    CHECK(a == doctest::Approx(b).epsilon(1e-6));
}

}
