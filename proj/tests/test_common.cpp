#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dbsim/common.hpp"

#include <cmath>
#include <set>
#include <vector>

using namespace dbsim;

TEST_CASE("unit conversions")
{
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(db_to_linear(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(linear_to_db(100.0) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(dbm_to_mw(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dbm_to_mw(30.0) == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(dbm_to_mw(-104.0) == doctest::Approx(3.98107170553497e-11).epsilon(1e-12));
}

TEST_CASE("distance helpers")
{
    CHECK(planar_distance({0, 0}, {3, 4}) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(distance_3d({0, 0, 0}, {2, 3, 6}) == doctest::Approx(7.0).epsilon(1e-15));
    const Vec3 p{1, 2, 3};
    CHECK(p.xy().x == 1.0);
    CHECK(p.xy().y == 2.0);
}

TEST_CASE("matrix is row-major and zero-initialized")
{
    Matrix m(3, 4);
    CHECK(m.rows() == 3);
    CHECK(m.cols() == 4);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 4; ++c) CHECK(m(r, c) == 0.0);
    m(1, 2) = 7.5;
    CHECK(m(1, 2) == 7.5);
    CHECK(m.data()[1 * 4 + 2] == 7.5);
}

TEST_CASE("rng streams are deterministic per seed")
{
    Rng a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 64; ++i) {
        const double ua = a.uniform();
        all_equal = all_equal && (ua == b.uniform());
        any_diff = any_diff || (ua != c.uniform());
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("derived substreams differ from the parent and each other")
{
    Rng base(7);
    Rng s0 = base.derive(0);
    Rng s1 = base.derive(1);
    Rng s0_again = Rng(7).derive(0);
    int same01 = 0, same0p = 0;
    Rng parent(7);
    for (int i = 0; i < 64; ++i) {
        const double v0 = s0.uniform();
        if (v0 == s1.uniform()) ++same01;
        if (v0 == parent.uniform()) ++same0p;
        CHECK(v0 == s0_again.uniform()); // same tag, same stream
    }
    CHECK(same01 == 0);
    CHECK(same0p == 0);
}

TEST_CASE("uniform draws live in [0,1) with the right mean")
{
    Rng rng(1234);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    // 4 sigma for the mean of n uniforms: 4 / (sqrt(12) * sqrt(n))
    CHECK(std::abs(sum / n - 0.5) < 4.0 / (std::sqrt(12.0) * std::sqrt(double(n))));
}

TEST_CASE("uniform(lo,hi) and uniform_index stay in range")
{
    Rng rng(99);
    std::set<std::size_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.uniform(-3.0, 5.0);
        REQUIRE(v >= -3.0);
        REQUIRE(v < 5.0);
        const std::size_t k = rng.uniform_index(7);
        REQUIRE(k < 7);
        seen.insert(k);
    }
    CHECK(seen.size() == 7); // hits every bucket over 1000 draws
}

TEST_CASE("normal draws match the target moments")
{
    Rng rng(2024);
    const int n = 200000;
    double sum = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal(3.0, 2.0);
        sum += x;
        ss += x * x;
    }
    const double mean = sum / n;
    const double var = ss / n - mean * mean;
    CHECK(std::abs(mean - 3.0) < 4.0 * 2.0 / std::sqrt(double(n)));
    // var of the sample variance of a normal is ~ 2 sigma^4 / n
    CHECK(std::abs(var - 4.0) < 4.0 * std::sqrt(2.0 * 16.0 / double(n)));
}

TEST_CASE("exponential and poisson match their means")
{
    Rng rng(5150);
    const int n = 50000;
    double esum = 0.0;
    for (int i = 0; i < n; ++i) esum += rng.exponential();
    CHECK(std::abs(esum / n - 1.0) < 4.0 / std::sqrt(double(n)));

    long psum = 0;
    const double lambda = 3.5;
    for (int i = 0; i < n; ++i) psum += rng.poisson(lambda);
    CHECK(std::abs(double(psum) / n - lambda) < 4.0 * std::sqrt(lambda / double(n)));

    CHECK(rng.poisson(0.0) == 0);
    CHECK_THROWS_AS(rng.poisson(-1.0), std::invalid_argument);
}
