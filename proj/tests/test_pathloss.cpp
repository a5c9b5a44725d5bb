#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "skychan/pathloss.hpp"
#include "skychan/synth.hpp"

using namespace skychan;

namespace {
double rad(double deg) { return deg * std::numbers::pi / 180.0; }
} // namespace

TEST_CASE("urban NLOS worked example") {
    auto p = PathlossParams::urban(Scenario::Nlos);
    double pl = pathloss_db(p, 21954828.7, 1.57542, rad(45.7599));
    CHECK(pl == doctest::Approx(208.63).epsilon(0.01 / 208.63));
}

TEST_CASE("urban LOS worked example") {
    auto p = PathlossParams::urban(Scenario::Los);
    double pl = pathloss_db(p, 20408478.5, 1.57542, rad(45.7599));
    CHECK(pl == doctest::Approx(182.69).epsilon(0.01 / 182.69));
}

TEST_CASE("reference point returns exactly B") {
    // d = 1 m, fc = 1 GHz, elevation = 1 rad: every log10 term vanishes
    auto los = PathlossParams::urban(Scenario::Los);
    CHECK(pathloss_db(los, 1.0, 1.0, 1.0) == los.B);
    auto nlos = PathlossParams::urban(Scenario::Nlos);
    CHECK(pathloss_db(nlos, 1.0, 1.0, 1.0) == nlos.B);
}

TEST_CASE("urban parameter sets") {
    auto los = PathlossParams::urban(Scenario::Los);
    CHECK(los.A == 20.0);
    CHECK(los.B == 32.55);
    CHECK(los.C == 20.0);
    CHECK(los.D == 0.0);
    auto nlos = PathlossParams::urban(Scenario::Nlos);
    CHECK(nlos.A == 20.05);
    CHECK(nlos.B == 54.85);
    CHECK(nlos.C == 27.9);
    CHECK(nlos.D == -11.0);
}

TEST_CASE("atmospheric extra loss is purely additive") {
    auto p = PathlossParams::urban(Scenario::Los);
    double base = pathloss_db(p, 2e7, 1.57542, rad(40.0));
    CHECK(pathloss_db(p, 2e7, 1.57542, rad(40.0), 2.5) == doctest::Approx(base + 2.5));
}

TEST_CASE("pathloss grows with distance") {
    auto p = PathlossParams::urban(Scenario::Los);
    double a = pathloss_db(p, 1e7, 1.57542, rad(45.0));
    double b = pathloss_db(p, 2e7, 1.57542, rad(45.0));
    CHECK(b > a);
    // 20 dB per decade of distance for the LOS set
    CHECK(pathloss_db(p, 1e8, 1.57542, rad(45.0)) - a == doctest::Approx(20.0));
}

TEST_CASE("pathloss rejects non-positive inputs") {
    auto p = PathlossParams::urban(Scenario::Los);
    CHECK_THROWS(pathloss_db(p, 0.0, 1.57542, rad(45.0)));
    CHECK_THROWS(pathloss_db(p, 1e7, 0.0, rad(45.0)));
    CHECK_THROWS(pathloss_db(p, 1e7, 1.57542, 0.0));
}

TEST_CASE("link budget worked examples") {
    LinkBudget b{0.0, 40.0, 0.0};
    CHECK(received_power_dbm(b, 208.63) == doctest::Approx(-168.63).epsilon(0.01 / 168.63));
    CHECK(received_power_dbm(b, 182.69) == doctest::Approx(-142.69).epsilon(0.01 / 142.69));
}

TEST_CASE("isotropic antenna has unit gain everywhere") {
    AntennaPattern a;
    a.kind = AntennaKind::Isotropic;
    a.boresight_gain_dbi = 0.0;
    CHECK(a.gain_linear(0.0) == doctest::Approx(1.0));
    CHECK(a.gain_linear(rad(90.0)) == doctest::Approx(1.0));
}

TEST_CASE("dish roll-off follows the parabolic mask") {
    AntennaPattern a;
    a.kind = AntennaKind::Dish;
    a.boresight_gain_dbi = 40.0;
    a.beamwidth_deg = 10.0;
    CHECK(10.0 * std::log10(a.gain_linear(0.0)) == doctest::Approx(40.0));
    // 12 (theta/beamwidth)^2 dB down: at theta = beamwidth, 12 dB
    CHECK(10.0 * std::log10(a.gain_linear(rad(10.0))) == doctest::Approx(28.0));
    // attenuation saturates at 30 dB
    CHECK(10.0 * std::log10(a.gain_linear(rad(60.0))) == doctest::Approx(10.0));
}

TEST_CASE("patch gain is cosine-squared in zenith angle and one-sided") {
    AntennaPattern a;
    a.kind = AntennaKind::Patch;
    a.boresight_gain_dbi = 3.0;
    double g0 = a.gain_linear(0.0);
    CHECK(10.0 * std::log10(g0) == doctest::Approx(3.0));
    CHECK(a.gain_linear(rad(60.0)) == doctest::Approx(g0 * 0.25));
    CHECK(a.gain_linear(rad(91.0)) == doctest::Approx(0.0));
}
