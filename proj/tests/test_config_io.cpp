#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "skychan/channel_dump.hpp"
#include "skychan/config.hpp"

using namespace skychan;

namespace {
std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}
} // namespace

TEST_CASE("parse scalars, strings and sections") {
    ConfigDoc doc = parse_config("duration_s = 2.5\n"
                                 "fc_hz = 1575.42e6\n"
                                 "\n"
                                 "# comment\n"
                                 "[rx]\n"
                                 "track = \"paths/u1.csv\"  ; trailing comment\n"
                                 "heading_deg = 90\n");
    CHECK(doc.at("duration_s").as_number() == 2.5);
    CHECK(doc.at("fc_hz").as_number() == 1575.42e6);
    CHECK(doc.at("rx.track").as_string() == "paths/u1.csv");
    CHECK(doc.at("rx.heading_deg").as_number() == 90.0);
    CHECK(doc.at("rx.heading_deg").line == 7);
}

TEST_CASE("parse arrays, nested and multi-line") {
    ConfigDoc doc = parse_config("flat = [1, 2.5, 3e-1]\n"
                                 "[state]\n"
                                 "plos_table = [[20, 0.25],\n"
                                 "              [45, 0.6],\n"
                                 "              [70, 0.95]]\n");
    auto flat = doc.at("flat").as_numbers(3);
    CHECK(flat[1] == 2.5);
    CHECK(flat[2] == 0.3);
    auto rows = doc.at("state.plos_table").as_rows(2);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][0] == 45.0);
    CHECK(rows[1][1] == 0.6);
    // the multi-line value is anchored to its first line
    CHECK(doc.at("state.plos_table").line == 3);
}

TEST_CASE("parse errors carry line numbers") {
    try {
        parse_config("ok = 1\nbroken = [1, 2\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
    }
    try {
        parse_config("a = 1\na = 2\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
    }
    CHECK_THROWS_AS(parse_config("no value line\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("x = unquoted string\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[bad section\n"), ConfigError);
}

TEST_CASE("serialize-parse is a fixed point") {
    const char* text = "duration_s = 0.5\n"
                       "master_seed = 42\n"
                       "[satellite.g-07]\n"
                       "placement = [45, 120, 30, 20200e3]\n"
                       "[state]\n"
                       "mu_good = 2.995732273553991\n"
                       "plos_table = [[20, 0.25], [70, 0.95]]\n";
    ConfigDoc doc = parse_config(text);
    std::string one = serialize_config(doc);
    ConfigDoc doc2 = parse_config(one);
    std::string two = serialize_config(doc2);
    CHECK(one == two);
    CHECK(config_hash(doc) == config_hash(doc2));
}

TEST_CASE("hash ignores formatting but not values") {
    ConfigDoc a = parse_config("x = 1\ny = 2\n");
    ConfigDoc b = parse_config("# reordered, commented\ny = 2\n\nx = 1\n");
    CHECK(config_hash(a) == config_hash(b));
    ConfigDoc c = parse_config("x = 1\ny = 2.0001\n");
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("empty scenario loads with defaults") {
    ScenarioConfig cfg = load_scenario(parse_config(""));
    CHECK(cfg.duration_s == 1.0);
    CHECK(cfg.elevation_mask_deg == 15.0);
    CHECK(cfg.fc_hz == 1575.42e6);
    CHECK(cfg.sample_density == 5.0);
    CHECK(cfg.channel_update_rate_hz == 0.0);
    CHECK(cfg.master_seed == 1);
    CHECK(cfg.satellites.empty());
    CHECK(cfg.link.tx_power_dbm == 0.0);
    CHECK(cfg.tx_antenna.gain_dbi == 40.0);
    CHECK(cfg.analysis.nfft == 1024);
    // built-in urban tables present
    CHECK(cfg.min_durations.at(StateKind::Bad, 60.0) == doctest::Approx(1.9126));
    CHECK(cfg.ds_nlos.mu == -6.85);
}

TEST_CASE("scenario keys land in the typed config") {
    ScenarioConfig cfg = load_scenario(parse_config(
        "duration_s = 0.25\n"
        "elevation_mask_deg = 10\n"
        "fc_hz = 2e9\n"
        "sample_density = 4\n"
        "channel_update_rate_hz = 120e3\n"
        "rx_speed_mps = 13.89\n"
        "master_seed = 77\n"
        "[state]\n"
        "mu_good = 2.0\n"
        "sigma_good = 0.5\n"
        "mu_bad = 1.5\n"
        "sigma_bad = 0.6\n"
        "redraw_limit = 25\n"
        "plos_table = [[20, 0.25], [45, 0.6], [70, 0.95]]\n"
        "min_duration_table = [[20, 4, 10], [70, 118, 5]]\n"
        "[link]\n"
        "tx_power_dbm = 3\n"
        "[lsp]\n"
        "ds.los.mu = -7.5\n"
        "ds.los.d_lambda = 60\n"
        "k.mu = 10\n"
        "[synth]\n"
        "n_clusters_los = 8\n"
        "r_tau_los = 2.8\n"
        "[antenna.tx]\n"
        "kind = \"dish\"\n"
        "gain_dbi = 35\n"
        "beamwidth_deg = 8\n"
        "[rx]\n"
        "lat_deg = 48.1\n"
        "lon_deg = 11.5\n"
        "heading_deg = 45\n"
        "[analysis]\n"
        "nfft = 512\n"
        "window_s = 0.5\n"
        "[satellite.a]\n"
        "orbit = [20200e3, 55, 10, 20]\n"
        "[satellite.b]\n"
        "placement = [60, 200, 100, 600e3]\n"));
    CHECK(cfg.duration_s == 0.25);
    CHECK(cfg.channel_update_rate_hz == 120e3);
    CHECK(cfg.state_durations.mu_good == 2.0);
    CHECK(cfg.state_durations.redraw_limit == 25);
    CHECK(cfg.plos.at(45.0) == doctest::Approx(0.6));
    CHECK(cfg.plos.at(32.5) == doctest::Approx(0.425));
    CHECK(cfg.min_durations.at(StateKind::Good, 70.0) == doctest::Approx(118.0));
    CHECK(cfg.link.tx_power_dbm == 3.0);
    CHECK(cfg.ds_los.mu == -7.5);
    CHECK(cfg.ds_los.d_lambda == 60.0);
    CHECK(cfg.ds_los.sigma == 0.3); // untouched default
    CHECK(cfg.fading.k_mu_db == 10.0);
    CHECK(cfg.synth.n_clusters_los == 8);
    CHECK(cfg.synth.r_tau_los == 2.8);
    CHECK(cfg.synth.sample_density == 4.0); // mirrored from the top level
    CHECK(cfg.tx_antenna.kind == AntennaKind::Dish);
    CHECK(cfg.tx_antenna.gain_dbi == 35.0);
    CHECK(cfg.rx.lat_deg == 48.1);
    CHECK(cfg.analysis.nfft == 512);
    CHECK(cfg.analysis.window_s == 0.5);
    REQUIRE(cfg.satellites.size() == 2);
    CHECK(cfg.satellites[0].id == "a");
    CHECK(cfg.satellites[0].source == SatelliteSpec::Source::Orbit);
    CHECK(cfg.satellites[0].altitude_m == 20200e3);
    CHECK(cfg.satellites[1].source == SatelliteSpec::Source::Placement);
    CHECK(cfg.satellites[1].elevation_deg == 60.0);
}

TEST_CASE("scenario validation rejects bad values with their line") {
    auto expect_line = [](const char* text, int line) {
        try {
            load_scenario(parse_config(text));
            FAIL_CHECK("expected ConfigError for: " << text);
        } catch (const ConfigError& e) {
            CHECK(e.line == line);
        }
    };
    expect_line("duration_s = 0\n", 1);
    expect_line("elevation_mask_deg = 95\n", 1);
    expect_line("fc_hz = 1e9\nmade_up_key = 3\n", 2);
    expect_line("[analysis]\nnfft = 100\n", 2);
    expect_line("[state]\nplos_table = [[45, 1.5]]\n", 2);
    expect_line("[satellite.x]\norbit = [1, 2, 3]\n", 2);
    // exactly one source per satellite
    expect_line("[satellite.x]\norbit = [20200e3, 55, 0, 0]\nplacement = [45, 0, 0, 20200e3]\n",
                2);
    expect_line("[antenna.tx]\nkind = \"horn\"\n", 2);
}

TEST_CASE("channel dump round trip is exact") {
    ChannelTensor t;
    t.n_paths = 3;
    t.n_snapshots = 4;
    t.fc_hz = 1575.42e6;
    t.rate_hz = 1e5;
    t.sat_id = "g-07";
    t.h.resize(12);
    t.tau_s.resize(12);
    for (std::size_t i = 0; i < 12; ++i) {
        t.h[i] = {std::sin(double(i)) * 1e-7, std::cos(double(i)) * 1e-7};
        t.tau_s[i] = 1e-9 * double(i) / 3.0;
    }
    t.timestamps_s = {0.0, 1e-5, 2e-5, 3e-5};

    auto path = temp_file("skch_roundtrip.skch");
    write_channel_dump(path.string(), t);
    ChannelTensor r = read_channel_dump(path.string());
    CHECK(r.n_paths == 3);
    CHECK(r.n_snapshots == 4);
    CHECK(r.fc_hz == t.fc_hz);
    CHECK(r.rate_hz == t.rate_hz);
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(r.h[i] == t.h[i]); // bit-exact
        CHECK(r.tau_s[i] == t.tau_s[i]);
    }
    CHECK(r.timestamps_s == t.timestamps_s);
    std::filesystem::remove(path);
}

TEST_CASE("dump reader rejects foreign and truncated files") {
    auto path = temp_file("skch_bad.skch");
    {
        std::ofstream f(path, std::ios::binary);
        f << "PNG\x89 definitely not a channel dump";
    }
    CHECK_THROWS_WITH_AS(read_channel_dump(path.string()),
                         doctest::Contains("bad magic"), std::runtime_error);

    ChannelTensor t;
    t.n_paths = 2;
    t.n_snapshots = 8;
    t.fc_hz = 1e9;
    t.rate_hz = 100.0;
    t.h.assign(16, {1.0, -1.0});
    t.tau_s.assign(16, 1e-9);
    t.timestamps_s.assign(8, 0.0);
    write_channel_dump(path.string(), t);
    auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size - 24);
    CHECK_THROWS_WITH_AS(read_channel_dump(path.string()),
                         doctest::Contains("truncated"), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("csv dump carries the expected header") {
    ChannelTensor t;
    t.n_paths = 1;
    t.n_snapshots = 2;
    t.fc_hz = 1e9;
    t.rate_hz = 10.0;
    t.h = {{0.5, -0.25}, {1.0, 0.0}};
    t.tau_s = {0.0, 1e-9};
    t.timestamps_s = {0.0, 0.1};
    auto path = temp_file("skch_csv.csv");
    write_channel_csv(path.string(), t);
    std::ifstream f(path);
    std::string header, row;
    std::getline(f, header);
    std::getline(f, row);
    CHECK(header == "path,snapshot,t_s,h_re,h_im,tau_s");
    CHECK(row == "0,0,0,0.5,-0.25,0");
    std::filesystem::remove(path);
}
