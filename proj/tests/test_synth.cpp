#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "skychan/analysis.hpp"
#include "skychan/constants.hpp"
#include "skychan/geometry.hpp"
#include "skychan/lsp.hpp"
#include "skychan/state_model.hpp"
#include "skychan/synth.hpp"

using namespace skychan;

namespace {
constexpr double kPi = std::numbers::pi;
double rad(double deg) { return deg * kPi / 180.0; }

// deterministic LOS link series for assembly tests
LinkSeries test_series(double rate_hz, double duration_s, double rx_speed) {
    Vec3 rx0 = lat_lon_to_ecef(rad(48.0), rad(11.0));
    double incl, raan, phase;
    orbit_elements_for_placement(rx0, rad(45.0), rad(120.0), rad(30.0), 20200e3, incl, raan,
                                 phase);
    double step = std::max(duration_s / 512.0, 1e-4);
    Trajectory sat = circular_orbit_ephemeris(20200e3, incl, raan, phase, 0.0,
                                              duration_s + 2.0 * step, step);
    Trajectory rxt = make_ground_track(rad(48.0), rad(11.0), rad(90.0), rx_speed,
                                       duration_s + 2.0 * step, step);
    return sample_link_series(sat, rxt, 1575.42e6, rate_hz, 0.0, duration_s);
}
} // namespace

TEST_CASE("minimum channel update rate worked example") {
    double r = min_channel_update_rate(3500.0, 5.0, 1.57542e9, 1.0);
    CHECK(r == doctest::Approx(91963.0).epsilon(1.0 / 91963.0));
    // a static link needs no minimum
    CHECK(min_channel_update_rate(0.0, 5.0, 1.57542e9, 1.0) == 0.0);
    CHECK_THROWS(min_channel_update_rate(-1.0, 5.0, 1.57542e9, 1.0));
    CHECK_THROWS(min_channel_update_rate(3500.0, 0.0, 1.57542e9, 1.0));
}

TEST_CASE("subpath offsets: the fixed 20-ray set with unit rms") {
    auto off = subpath_offsets(20);
    REQUIRE(off.size() == 20);
    double rms = 0.0;
    for (double o : off)
        rms += o * o;
    rms = std::sqrt(rms / 20.0);
    CHECK(rms == doctest::Approx(1.0).epsilon(1e-3));
    // symmetric: sorted values come in +- pairs
    auto sorted = off;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 10; ++i)
        CHECK(sorted[i] == doctest::Approx(-sorted[19 - i]).epsilon(1e-12));
    // the two largest magnitudes of the canonical table
    CHECK(std::abs(sorted[0]) == doctest::Approx(2.1551).epsilon(1e-12));
    CHECK(std::abs(sorted[10]) == doctest::Approx(0.0447).epsilon(1e-12));

    CHECK(subpath_offsets(1) == std::vector<double>{0.0});
}

TEST_CASE("cluster delays start at zero and stay sorted") {
    RandomStream rng(4);
    for (int i = 0; i < 50; ++i) {
        auto d = generate_cluster_delays(100e-9, 2.5, 20, rng);
        REQUIRE(d.size() == 20);
        CHECK(d.front() == 0.0);
        CHECK(std::is_sorted(d.begin(), d.end()));
    }
}

TEST_CASE("cluster powers normalize to one") {
    RandomStream rng(9);
    auto d = generate_cluster_delays(100e-9, 2.3, 20, rng);
    auto p = generate_cluster_powers(d, 100e-9, 2.3, 3.0, std::nullopt, rng);
    REQUIRE(p.size() == 20);
    double sum = 0.0;
    for (double v : p) {
        CHECK(v > 0.0);
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("K factor splits power between direct and multipath") {
    RandomStream rng(11);
    auto d = generate_cluster_delays(50e-9, 2.5, 12, rng);
    auto p = generate_cluster_powers(d, 50e-9, 2.5, 3.0, 9.0, rng);
    REQUIRE(p.size() == 13); // direct + 12 clusters
    REQUIRE(d.size() == 13);
    CHECK(d.front() == 0.0);
    // K = 9 dB: direct K/(K+1), multipath 1/(K+1)
    CHECK(p.front() == doctest::Approx(0.888185).epsilon(1e-5));
    double mp = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i)
        mp += p[i];
    CHECK(mp == doctest::Approx(0.111815).epsilon(1e-5));
}

TEST_CASE("generated sets hit the drawn delay spread exactly") {
    RandomStream rng(123);
    for (int i = 0; i < 200; ++i) {
        double ds = 1e-9 * (5.0 + 50.0 * rng.uniform());
        bool with_k = (i % 2) == 0;
        auto d = generate_cluster_delays(ds, 2.5, 12, rng);
        auto p = generate_cluster_powers(d, ds, 2.5, 3.0,
                                         with_k ? std::optional<double>(9.0) : std::nullopt,
                                         rng);
        double got = rms_delay_spread(p, d);
        CHECK(got == doctest::Approx(ds).epsilon(1e-12));
    }
}

TEST_CASE("make_cluster_set: LOS has a direct row, NLOS does not") {
    SynthConfig cfg;
    RandomStream rng(55);
    ClusterSet los = make_cluster_set(Scenario::Los, 20e-9, 9.0, rad(120.0), cfg, rng);
    CHECK(los.has_direct);
    CHECK(int(los.size()) == cfg.n_clusters_los + 1);
    REQUIRE(!los.subpath_aoa_rad.empty());
    // the direct row's sub-path angles all collapse onto the LOS azimuth
    for (double aoa : los.subpath_aoa_rad[0])
        CHECK(aoa == doctest::Approx(rad(120.0)));
    for (std::size_t l = 1; l < los.size(); ++l)
        CHECK(los.subpath_aoa_rad[l].size() == std::size_t(cfg.subpaths_per_cluster));

    ClusterSet nlos = make_cluster_set(Scenario::Nlos, 100e-9, std::nullopt, rad(120.0), cfg, rng);
    CHECK(!nlos.has_direct);
    CHECK(int(nlos.size()) == cfg.n_clusters_nlos);
}

TEST_CASE("doppler shift of the worked radial velocity") {
    CHECK(doppler_shift(1575.42e6, -434.5713) == doctest::Approx(-2283.69).epsilon(0.5 / 2283.69));
}

TEST_CASE("assembled tensor shape and timestamps") {
    LinkSeries series = test_series(2000.0, 0.05, 13.89);
    StateSequence states;
    states.track_length_m = series.rx_distance_m.back();
    states.segments = {{StateKind::Good, 0.0, states.track_length_m}};

    SynthConfig cfg;
    RandomStream rng(3);
    SegmentRealization seg;
    seg.scenario = Scenario::Los;
    seg.lsp = {20e-9, 9.0, 0.0};
    seg.clusters = make_cluster_set(Scenario::Los, 20e-9, 9.0, series.geo[0].azimuth_rad, cfg, rng);

    AssembleInputs in;
    in.series = &series;
    in.states = &states;
    in.segments = {seg};
    in.tx_antenna = {AntennaKind::Isotropic, 0.0, 10.0};
    in.rx_antenna = {AntennaKind::Isotropic, 0.0, 10.0};
    in.sat_id = "t";
    in.cfg = cfg;
    ChannelTensor t = assemble_channel(in);

    CHECK(t.n_paths == std::size_t(cfg.n_clusters_los + 1));
    CHECK(t.n_snapshots == series.size());
    CHECK(t.fc_hz == 1575.42e6);
    CHECK(t.rate_hz == 2000.0);
    REQUIRE(t.timestamps_s.size() == t.n_snapshots);
    CHECK(t.timestamps_s.front() == doctest::Approx(0.0));
    CHECK(t.timestamps_s[1] - t.timestamps_s[0] == doctest::Approx(1.0 / 2000.0));
    CHECK(t.h.size() == t.n_paths * t.n_snapshots);
    CHECK(t.tau_s.size() == t.n_paths * t.n_snapshots);
}

TEST_CASE("mean received power tracks the link budget") {
    // isotropic antennas, no shadow fading: mean total |h|^2 over time must
    // sit within a dB of the pathloss prediction (sub-path fading averages out)
    LinkSeries series = test_series(2000.0, 0.1, 13.89);
    StateSequence states;
    states.track_length_m = series.rx_distance_m.back();
    states.segments = {{StateKind::Good, 0.0, states.track_length_m}};

    SynthConfig cfg;
    RandomStream rng(17);
    SegmentRealization seg;
    seg.scenario = Scenario::Los;
    seg.lsp = {20e-9, 9.0, 0.0};
    seg.clusters = make_cluster_set(Scenario::Los, 20e-9, 9.0, series.geo[0].azimuth_rad, cfg, rng);

    AssembleInputs in;
    in.series = &series;
    in.states = &states;
    in.segments = {seg};
    in.tx_antenna = {AntennaKind::Isotropic, 0.0, 10.0};
    in.rx_antenna = {AntennaKind::Isotropic, 0.0, 10.0};
    in.sat_id = "t";
    in.cfg = cfg;
    ChannelTensor t = assemble_channel(in);

    auto pw = received_power_series(t);
    double mean = 0.0;
    for (double v : pw)
        mean += v;
    mean /= double(pw.size());

    double pl = pathloss_db(PathlossParams::urban(Scenario::Los), series.geo[0].d3d_m,
                            1.57542, series.geo[0].elevation_rad);
    double want_db = -pl;
    CHECK(10.0 * std::log10(mean) == doctest::Approx(want_db).epsilon(1.5 / std::abs(want_db)));
}

TEST_CASE("direct-path doppler matches the geometric prediction") {
    LinkSeries series = test_series(20000.0, 0.05, 0.0);
    StateSequence states;
    states.track_length_m = 0.0;
    states.segments = {{StateKind::Good, 0.0, 0.0}};

    SynthConfig cfg;
    RandomStream rng(8);
    SegmentRealization seg;
    seg.scenario = Scenario::Los;
    seg.lsp = {20e-9, 9.0, 0.0};
    seg.clusters = make_cluster_set(Scenario::Los, 20e-9, 9.0, series.geo[0].azimuth_rad, cfg, rng);

    AssembleInputs in;
    in.series = &series;
    in.states = &states;
    in.segments = {seg};
    in.tx_antenna = {AntennaKind::Isotropic, 0.0, 10.0};
    in.rx_antenna = {AntennaKind::Isotropic, 0.0, 10.0};
    in.sat_id = "t";
    in.cfg = cfg;
    ChannelTensor t = assemble_channel(in);

    // phase slope of the direct row over one snapshot = 2 pi f_d / rate
    double predicted = doppler_shift(series.fc_hz, series.geo[0].radial_velocity_mps);
    std::complex<double> r = t.at(0, 1) / t.at(0, 0);
    double measured = std::arg(r) * t.rate_hz / (2.0 * kPi);
    CHECK(measured == doctest::Approx(predicted).epsilon(0.02));
}

TEST_CASE("merge: a continuing segment passes through unchanged") {
    ChannelTensor a;
    a.n_paths = 1;
    a.n_snapshots = 4;
    a.fc_hz = 1e9;
    a.rate_hz = 10.0;
    a.h = {{1, 0}, {2, 0}, {3, 0}, {4, 0}};
    a.tau_s = {0, 0, 0, 0};
    a.timestamps_s = {0.0, 0.1, 0.2, 0.3};
    a.target_ds_s = 1e-9;

    // b repeats a's last two snapshots, then continues
    ChannelTensor b = a;
    b.h = {{3, 0}, {4, 0}, {5, 0}, {6, 0}};
    b.timestamps_s = {0.2, 0.3, 0.4, 0.5};

    ChannelTensor m = merge_segments(a, b, 2);
    REQUIRE(m.n_paths == 1);
    REQUIRE(m.n_snapshots == 6);
    CHECK(m.at(0, 0).real() == doctest::Approx(1.0));
    CHECK(m.at(0, 2).real() == doctest::Approx(3.0)); // identical overlap collapses
    CHECK(m.at(0, 3).real() == doctest::Approx(4.0));
    CHECK(m.at(0, 5).real() == doctest::Approx(6.0));
}

TEST_CASE("merge: crossfade conserves expected power over the overlap") {
    // two independent rows of equal constant power; after the sqrt-weight
    // crossfade the summed expected power stays 1 at every overlap snapshot
    const std::size_t n = 6, ov = 4;
    ChannelTensor a;
    a.n_paths = 1;
    a.n_snapshots = n;
    a.fc_hz = 1e9;
    a.rate_hz = 10.0;
    a.h.assign(n, {1.0, 0.0});
    a.tau_s.assign(n, 0.0);
    a.timestamps_s = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    a.target_ds_s = 1e-9;

    ChannelTensor b = a;
    b.h.assign(n, {0.0, 1.0});
    b.timestamps_s = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7};

    ChannelTensor m = merge_segments(a, b, ov);
    REQUIRE(m.n_paths == 2);
    REQUIRE(m.n_snapshots == 2 * n - ov);
    // w_i = (i+1)/(ov+1) ramps the incoming segment up
    for (std::size_t i = 0; i < ov; ++i) {
        std::size_t t = (n - ov) + i;
        double w = double(i + 1) / double(ov + 1);
        double pa = std::norm(m.at(0, t));
        double pb = std::norm(m.at(1, t));
        CHECK(pa == doctest::Approx(1.0 - w).epsilon(1e-12));
        CHECK(pb == doctest::Approx(w).epsilon(1e-12));
    }
    // before the overlap only a, after it only b
    CHECK(std::norm(m.at(0, 0)) == doctest::Approx(1.0));
    CHECK(std::norm(m.at(1, 0)) == doctest::Approx(0.0));
    CHECK(std::norm(m.at(0, m.n_snapshots - 1)) == doctest::Approx(0.0));
    CHECK(std::norm(m.at(1, m.n_snapshots - 1)) == doctest::Approx(1.0));
}

TEST_CASE("ds_mse reports -inf for an exact series") {
    CHECK(std::isinf(ds_mse({10e-9, 10e-9}, 10e-9)));
    CHECK(ds_mse({10e-9, 10e-9}, 10e-9) < 0.0);
    CHECK(std::isfinite(ds_mse({12e-9, 9e-9}, 10e-9)));
}

TEST_CASE("sample_link_series spacing and rate") {
    LinkSeries s = test_series(1000.0, 0.02, 5.0);
    CHECK(s.rate_hz == 1000.0);
    REQUIRE(s.size() >= 20);
    for (std::size_t i = 1; i < s.size(); ++i)
        CHECK(s.t_s[i] - s.t_s[i - 1] == doctest::Approx(1e-3).epsilon(1e-12));
    // receiver distance advances at the requested speed
    CHECK(s.rx_distance_m.back() ==
          doctest::Approx(5.0 * s.t_s.back()).epsilon(1e-6));
    CHECK(s.sat_speed_mps.front() == doctest::Approx(3873.155).epsilon(1e-5));
}
