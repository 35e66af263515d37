#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dbsim/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace dbsim;

namespace {

Environment default_env() { return Environment{}; }

// MBS at the origin on a 25 m mast; one user 1 km east; drone 1 directly
// over a point 100 m north of the user at the altitude that puts the user
// exactly on its 60-degree footprint edge; drone 2 far away to the west.
std::vector<User> one_user() { return {{0, {1000.0, 0.0}, 0}}; }

std::vector<BaseStation> three_stations()
{
    return {
        BaseStation::macro({0.0, 0.0}, 25.0, 46.0),
        BaseStation::drone(1, {1000.0, 100.0, 173.205080756888}, 36.0, 60.0),
        BaseStation::drone(2, {0.0, 300.0, 200.0}, 36.0, 60.0),
    };
}

} // namespace

TEST_CASE("free-space path loss")
{
    // 20 log10(4 pi f d / c) at 2 GHz, exact speed of light
    CHECK(fspl_db(1000.0, 2.0e9) == doctest::Approx(98.468383135163).epsilon(1e-12));
    CHECK(fspl_db(100.0, 2.0e9) == doctest::Approx(78.468383135163).epsilon(1e-12));
    // 20 dB per decade of distance
    CHECK(fspl_db(1000.0, 2.0e9) - fspl_db(100.0, 2.0e9) ==
          doctest::Approx(20.0).epsilon(1e-12));
    // rounded speed of light shifts the constant term
    CHECK(fspl_db(1000.0, 2.0e9, 3.0e8) == doctest::Approx(98.4623720993283).epsilon(1e-12));
    CHECK_THROWS_AS(fspl_db(0.0, 2.0e9), std::domain_error);
    CHECK_THROWS_AS(fspl_db(-5.0, 2.0e9), std::domain_error);
    CHECK_THROWS_AS(fspl_db(10.0, 0.0), std::domain_error);
}

TEST_CASE("elevation angle")
{
    CHECK(elevation_angle_deg({0, 0}, {0, 0, 120}) == doctest::Approx(90.0).epsilon(1e-12));
    CHECK(elevation_angle_deg({0, 0}, {100, 0, 100}) == doctest::Approx(45.0).epsilon(1e-12));
    // altitude = 100 tan(60 deg) above a point 100 m away
    CHECK(elevation_angle_deg({1000, 0}, {1000, 100, 173.205080756888}) ==
          doctest::Approx(60.0).epsilon(1e-12));
    CHECK_THROWS_AS(elevation_angle_deg({0, 0}, {10, 0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(elevation_angle_deg({0, 0}, {10, 0, -5.0}), std::domain_error);
}

TEST_CASE("line-of-sight probability")
{
    const Environment env = default_env();
    // at theta = a the sigmoid collapses to 1/(1+a)
    CHECK(p_los(9.61, env) == doctest::Approx(1.0 / 10.61).epsilon(1e-13));
    CHECK(p_los(90.0, env) == doctest::Approx(0.999975074537903).epsilon(1e-12));
    CHECK(p_los(45.0, env) == doctest::Approx(0.967691899947242).epsilon(1e-12));
    // strictly increasing in elevation
    double prev = 0.0;
    for (double theta = 5.0; theta <= 90.0; theta += 5.0) {
        const double p = p_los(theta, env);
        CHECK(p > prev);
        CHECK(p < 1.0);
        prev = p;
    }
}

TEST_CASE("expected excess loss interpolates the class means")
{
    const Environment env = default_env();
    CHECK(a2g_excess_loss_db(90.0, env, ChannelMode::Expected) ==
          doctest::Approx(1.00047358377984).epsilon(1e-12));
    CHECK(a2g_excess_loss_db(45.0, env, ChannelMode::Expected) ==
          doctest::Approx(1.6138539010024).epsilon(1e-12));
    CHECK(a2g_excess_loss_db(60.0, env, ChannelMode::Expected) ==
          doctest::Approx(1.05737302699145).epsilon(1e-12));
    // where P(LoS) = 1/2 the expectation is the midpoint (1+20)/2
    CHECK(a2g_excess_loss_db(23.7525263936388, env, ChannelMode::Expected) ==
          doctest::Approx(10.5).epsilon(1e-12));
    // decreasing in elevation: high angles are almost surely line of sight
    double prev = 21.0;
    for (double theta = 10.0; theta <= 90.0; theta += 10.0) {
        const double e = a2g_excess_loss_db(theta, env, ChannelMode::Expected);
        CHECK(e < prev);
        prev = e;
    }
    CHECK_THROWS_AS(a2g_excess_loss_db(45.0, env, ChannelMode::Sampled, nullptr),
                    std::invalid_argument);
}

TEST_CASE("sampled excess loss matches the mixture moments")
{
    const Environment env = default_env();
    Rng rng(777);
    const int n = 40000;
    double sum = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = a2g_excess_loss_db(45.0, env, ChannelMode::Sampled, &rng);
        sum += x;
        ss += x * x;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(ss / n - mean * mean);
    // mixture of N(1, 1.0951) w.p. 0.9677 and N(20, 7.6735) w.p. 0.0323
    CHECK(std::abs(mean - 1.6138539010024) < 4.0 * 3.78804602349867 / std::sqrt(double(n)));
    CHECK(std::abs(sd - 3.78804602349867) < 0.25);

    // same seed, same draws
    Rng r1(31), r2(31);
    for (int i = 0; i < 16; ++i)
        CHECK(a2g_excess_loss_db(45.0, env, ChannelMode::Sampled, &r1) ==
              a2g_excess_loss_db(45.0, env, ChannelMode::Sampled, &r2));
}

TEST_CASE("antenna gain is flat inside the cone and zero outside")
{
    const double g0 = 30000.0 / 3600.0; // beamwidth 60
    CHECK(antenna_gain(90.0, 60.0) == doctest::Approx(g0).epsilon(1e-13));
    CHECK(antenna_gain(60.0, 60.0) == doctest::Approx(g0).epsilon(1e-13)); // boundary inclusive
    CHECK(antenna_gain(75.0, 60.0) == doctest::Approx(g0).epsilon(1e-13));
    CHECK(antenna_gain(59.999, 60.0) == 0.0);
    CHECK(antenna_gain(10.0, 60.0) == 0.0);
    // narrower beam, higher gain
    CHECK(antenna_gain(90.0, 40.0) == doctest::Approx(30000.0 / 1600.0).epsilon(1e-13));
    CHECK(antenna_gain(90.0, 40.0) > antenna_gain(90.0, 60.0));
    CHECK_THROWS_AS(antenna_gain(90.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(antenna_gain(90.0, 180.0), std::invalid_argument);
}

TEST_CASE("footprint threshold")
{
    CHECK(footprint_threshold_deg(60.0) == doctest::Approx(60.0).epsilon(1e-13));
    CHECK(footprint_threshold_deg(80.0) == doctest::Approx(50.0).epsilon(1e-13));
    CHECK(footprint_threshold_deg(40.0) == doctest::Approx(70.0).epsilon(1e-13));
}

TEST_CASE("macro path loss")
{
    const Environment env = default_env();
    // textbook urban macro curve: exactly 128.1 dB at 1 km
    CHECK(mbs_path_loss_db(1000.0, env, ChannelMode::Expected) ==
          doctest::Approx(128.1).epsilon(1e-13));
    CHECK(mbs_path_loss_db(10000.0, env, ChannelMode::Expected) ==
          doctest::Approx(128.1 + 37.6).epsilon(1e-13));
    CHECK_THROWS_AS(mbs_path_loss_db(0.0, env, ChannelMode::Expected), std::domain_error);
    CHECK_THROWS_AS(mbs_path_loss_db(100.0, env, ChannelMode::Sampled, nullptr),
                    std::invalid_argument);

    // shadowing draws average out to the deterministic curve
    Rng rng(4242);
    const int n = 40000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += mbs_path_loss_db(1000.0, env, ChannelMode::Sampled, &rng);
    CHECK(std::abs(sum / n - 128.1) < 4.0 * 10.0 / std::sqrt(double(n)));
}

TEST_CASE("noise floor over 10 MHz")
{
    const Environment env = default_env();
    CHECK(env.noise_dbm() == doctest::Approx(-104.0).epsilon(1e-13));
    CHECK(env.noise_mw() == doctest::Approx(3.98107170553497e-11).epsilon(1e-12));
}

TEST_CASE("macro link budget reproduces the closed-form SNR")
{
    // 46 dBm over 128.1 dB loss against -104 dBm noise: 21.9 dB SNR
    const Environment env = default_env();
    const double pl = mbs_path_loss_db(1000.0, env, ChannelMode::Expected);
    const double snr = dbm_to_mw(46.0) * db_to_linear(-pl) / env.noise_mw();
    CHECK(snr == doctest::Approx(154.881661891248).epsilon(1e-12));
    CHECK(std::log2(1.0 + snr) == doctest::Approx(7.28430740738919).epsilon(1e-12));
}

TEST_CASE("environment validation")
{
    Environment env = default_env();
    CHECK_NOTHROW(env.validate());
    CHECK(env.exclude_mbs_interference == false);
    env.bandwidth_hz = 0.0;
    CHECK_THROWS_AS(env.validate(), std::invalid_argument);
    env = default_env();
    env.carrier_hz = -1.0;
    CHECK_THROWS_AS(env.validate(), std::invalid_argument);
    env = default_env();
    env.b = 0.0;
    CHECK_THROWS_AS(env.validate(), std::invalid_argument);
}

TEST_CASE("base station factories")
{
    const BaseStation m = BaseStation::macro({10.0, 20.0}, 25.0, 46.0);
    CHECK(m.id == 0);
    CHECK(m.kind == BsKind::Mbs);
    CHECK(m.pos.z == 25.0);
    const BaseStation d = BaseStation::drone(3, {1, 2, 100}, 36.0, 60.0);
    CHECK(d.id == 3);
    CHECK(d.kind == BsKind::Dbs);
    CHECK_THROWS_AS(BaseStation::drone(0, {0, 0, 100}, 36.0, 60.0), std::invalid_argument);
    CHECK_THROWS_AS(BaseStation::drone(1, {0, 0, 0.0}, 36.0, 60.0), std::invalid_argument);
    CHECK_THROWS_AS(BaseStation::drone(1, {0, 0, 100}, 36.0, 0.0), std::invalid_argument);
}

TEST_CASE("link matrix on the pinned three-station layout")
{
    const Environment env = default_env();
    const auto users = one_user();
    const auto bss = three_stations();
    const LinkMatrix link = build_link_matrix(users, bss, env, ChannelMode::Expected);

    REQUIRE(link.num_users() == 1);
    REQUIRE(link.num_bs() == 3);
    REQUIRE(link.num_dbs() == 2);

    CHECK(link.elevation(0, 0) == doctest::Approx(60.0).epsilon(1e-9));
    CHECK(link.elevation(0, 1) == doctest::Approx(10.8445000673424).epsilon(1e-12));

    // macro link: noise-limited
    CHECK(link.sinr(0, 0) == doctest::Approx(154.699839593589).epsilon(1e-10));
    CHECK(link.rate(0, 0) == doctest::Approx(7.28262364788691).epsilon(1e-10));

    // drone 1 link: macro interference in the denominator, drone 2 silent
    CHECK(link.sinr(0, 1) == doctest::Approx(14924.3347377045).epsilon(1e-10));
    CHECK(link.rate(0, 1) == doctest::Approx(13.8654756674222).epsilon(1e-10));

    // drone 2 is out of footprint: dead link, elevation still recorded
    CHECK(link.sinr(0, 2) == 0.0);
    CHECK(link.rate(0, 2) == 0.0);

    // wireless backhaul, free-space only
    CHECK(link.backhaul_rate[0] == doctest::Approx(17.0730493611335).epsilon(1e-10));
    CHECK(link.backhaul_rate[1] == doctest::Approx(20.1698329594003).epsilon(1e-10));
}

TEST_CASE("dropping macro interference raises drone SINR")
{
    Environment env = default_env();
    env.exclude_mbs_interference = true;
    const LinkMatrix link =
        build_link_matrix(one_user(), three_stations(), env, ChannelMode::Expected);
    CHECK(link.sinr(0, 1) == doctest::Approx(2323716.52470163).epsilon(1e-10));
    CHECK(link.rate(0, 1) == doctest::Approx(21.148003272111).epsilon(1e-10));
    // macro link unchanged
    CHECK(link.rate(0, 0) == doctest::Approx(7.28262364788691).epsilon(1e-10));
}

TEST_CASE("rate is log2(1 + sinr) everywhere")
{
    const LinkMatrix link =
        build_link_matrix(one_user(), three_stations(), default_env(), ChannelMode::Expected);
    for (std::size_t i = 0; i < link.num_users(); ++i)
        for (std::size_t j = 0; j < link.num_bs(); ++j)
            CHECK(link.rate(i, j) ==
                  doctest::Approx(std::log2(1.0 + link.sinr(i, j))).epsilon(1e-12));
}

TEST_CASE("sampled link matrices are seed-deterministic")
{
    const Environment env = default_env();
    const auto users = one_user();
    const auto bss = three_stations();
    Rng r1(9001), r2(9001), r3(9002);
    const LinkMatrix a = build_link_matrix(users, bss, env, ChannelMode::Sampled, &r1);
    const LinkMatrix b = build_link_matrix(users, bss, env, ChannelMode::Sampled, &r2);
    const LinkMatrix c = build_link_matrix(users, bss, env, ChannelMode::Sampled, &r3);
    bool ab_equal = true, ac_diff = false;
    for (std::size_t j = 0; j < a.num_bs(); ++j) {
        ab_equal = ab_equal && (a.rate(0, j) == b.rate(0, j));
        ac_diff = ac_diff || (a.rate(0, j) != c.rate(0, j));
    }
    CHECK(ab_equal);
    CHECK(ac_diff);
    CHECK_THROWS_AS(build_link_matrix(users, bss, env, ChannelMode::Sampled, nullptr),
                    std::invalid_argument);
}

TEST_CASE("link matrix input validation")
{
    const Environment env = default_env();
    const auto users = one_user();
    auto bss = three_stations();
    std::swap(bss[0], bss[1]); // macro must come first
    CHECK_THROWS_AS(build_link_matrix(users, bss, env, ChannelMode::Expected),
                    std::invalid_argument);
    bss = three_stations();
    bss[2].id = 5; // ids must match positions
    CHECK_THROWS_AS(build_link_matrix(users, bss, env, ChannelMode::Expected),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_link_matrix({}, three_stations(), env, ChannelMode::Expected),
                    std::invalid_argument);
}
