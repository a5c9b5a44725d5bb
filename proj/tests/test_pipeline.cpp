#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "skychan/analysis.hpp"
#include "skychan/channel_dump.hpp"
#include "skychan/config.hpp"
#include "skychan/orchestrator.hpp"

using namespace skychan;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("skychan_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json load_json(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    json j;
    f >> j;
    return j;
}

const char* kTwoSatConfig = "duration_s = 0.02\n"
                            "rx_speed_mps = 13.89\n"
                            "master_seed = 11\n"
                            "[satellite.g-07]\n"
                            "placement = [45, 120, 30, 20200e3]\n"
                            "[satellite.g-21]\n"
                            "placement = [62, 310, 75, 20200e3]\n";

} // namespace

TEST_CASE("simulate writes dumps and a manifest") {
    fs::path out = fresh_dir("sim_basic");
    ConfigDoc doc = parse_config(kTwoSatConfig);
    ScenarioConfig cfg = load_scenario(doc);
    SimulateResult res = run_simulate(cfg, doc, out.string());

    CHECK(res.dropped.empty());
    REQUIRE(res.dump_paths.size() == 2);
    CHECK(fs::exists(out / "g-07.skch"));
    CHECK(fs::exists(out / "g-21.skch"));

    json m = load_json(res.manifest_path);
    CHECK(m["seed"] == 11);
    CHECK(m["satellites"].size() == 2);
    CHECK(m["satellites"][0]["id"] == "g-07");
    CHECK(m["satellites"][0]["n_paths"] == 13);
    CHECK(m["rate_hz"].get<double>() > 90e3); // auto-derived GPS-altitude rate
    CHECK(m.contains("config_hash"));
    CHECK(m.contains("wall_clock_utc"));

    ChannelTensor t = read_channel_dump((out / "g-07.skch").string());
    CHECK(t.n_paths == 13);
    CHECK(t.n_snapshots == m["satellites"][0]["n_snapshots"].get<std::size_t>());
    fs::remove_all(out);
}

TEST_CASE("two runs with one seed are bit-identical") {
    fs::path a = fresh_dir("sim_det_a"), b = fresh_dir("sim_det_b");
    ConfigDoc doc = parse_config(kTwoSatConfig);
    ScenarioConfig cfg = load_scenario(doc);
    run_simulate(cfg, doc, a.string());
    run_simulate(cfg, doc, b.string());
    for (const char* name : {"g-07.skch", "g-21.skch"}) {
        ChannelTensor ta = read_channel_dump((a / name).string());
        ChannelTensor tb = read_channel_dump((b / name).string());
        REQUIRE(ta.h.size() == tb.h.size());
        CHECK(ta.h == tb.h);
        CHECK(ta.tau_s == tb.tau_s);
        CHECK(ta.timestamps_s == tb.timestamps_s);
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("explicit rate below the geometric minimum is rejected") {
    // a satellite whose orbital speed is 3500 m/s covers a 3500 m path in 1 s;
    // at density 5 and L1 that demands 91963 Hz, so 50 kHz must bounce
    double alt = 3.986004418e14 / (3500.0 * 3500.0) - 6371000.0;
    std::string text = "duration_s = 1\n"
                       "channel_update_rate_hz = 50e3\n"
                       "[satellite.slow]\n"
                       "placement = [45, 0, 0, " +
                       std::to_string(alt) + "]\n";
    ConfigDoc doc = parse_config(text);
    ScenarioConfig cfg = load_scenario(doc);
    fs::path out = fresh_dir("sim_rate");
    try {
        run_simulate(cfg, doc, out.string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("91963") != std::string::npos);
        CHECK(e.line == 2); // anchored to the channel_update_rate_hz line
    }
    fs::remove_all(out);
}

TEST_CASE("satellites below the mask are dropped with a reason") {
    fs::path out = fresh_dir("sim_mask");
    ConfigDoc doc = parse_config("duration_s = 0.02\n"
                                 "elevation_mask_deg = 15\n"
                                 "[satellite.low]\n"
                                 "placement = [8, 90, 0, 20200e3]\n"
                                 "[satellite.high]\n"
                                 "placement = [50, 90, 0, 20200e3]\n");
    ScenarioConfig cfg = load_scenario(doc);
    SimulateResult res = run_simulate(cfg, doc, out.string());
    REQUIRE(res.dropped.size() == 1);
    CHECK(res.dropped[0].first == "low");
    CHECK(res.dropped[0].second.find("elevation mask") != std::string::npos);
    CHECK(res.dump_paths.size() == 1);
    CHECK(!fs::exists(out / "low.skch"));

    json m = load_json(out / "manifest.json");
    CHECK(m["dropped"].size() == 1);
    CHECK(m["satellites"].size() == 1);
    fs::remove_all(out);
}

TEST_CASE("empty satellite list still produces a manifest") {
    fs::path out = fresh_dir("sim_empty");
    ConfigDoc doc = parse_config("duration_s = 0.01\n");
    ScenarioConfig cfg = load_scenario(doc);
    SimulateResult res = run_simulate(cfg, doc, out.string());
    CHECK(res.dump_paths.empty());
    json m = load_json(res.manifest_path);
    CHECK(m["satellites"].empty());
    fs::remove_all(out);
}

TEST_CASE("a static receiver gets a single-segment state sequence") {
    fs::path out = fresh_dir("sim_static");
    ConfigDoc doc = parse_config("duration_s = 0.02\n"
                                 "rx_speed_mps = 0\n"
                                 "[satellite.g-07]\n"
                                 "placement = [45, 120, 30, 20200e3]\n");
    ScenarioConfig cfg = load_scenario(doc);
    run_simulate(cfg, doc, out.string());
    json m = load_json(out / "manifest.json");
    REQUIRE(m["satellites"].size() == 1);
    CHECK(m["satellites"][0]["segments"].size() == 1);
    CHECK(m["satellites"][0]["segments"][0]["length_m"] == 0.0);
    fs::remove_all(out);
}

TEST_CASE("ephemeris satellites and track receivers read CSV trajectories") {
    fs::path dir = fresh_dir("sim_csv");
    // leapfrog a satellite across the sky from a hand-written ephemeris
    Vec3 rx0 = lat_lon_to_ecef(48.0 * 0.0174532925199433, 11.0 * 0.0174532925199433);
    {
        std::ofstream f(dir / "sat.csv");
        f << "t_s,x_m,y_m,z_m\n";
        for (int i = 0; i <= 10; ++i) {
            double t = 0.01 * i;
            f << t << ',' << (rx0.x + 20200e3 + 3873.0 * t) << ',' << rx0.y << ',' << rx0.z
              << "\n";
        }
    }
    {
        std::ofstream f(dir / "rx.csv");
        f << "t_s,x_m,y_m,z_m\n";
        for (int i = 0; i <= 10; ++i) {
            double t = 0.01 * i;
            f << t << ',' << rx0.x << ',' << (rx0.y + 13.89 * t) << ',' << rx0.z << "\n";
        }
    }
    std::string text = "duration_s = 0.05\n"
                       "channel_update_rate_hz = 2000\n"
                       "rx_speed_mps = 13.89\n"
                       "[rx]\n"
                       "track = \"" +
                       (dir / "rx.csv").string() +
                       "\"\n"
                       "[satellite.eph]\n"
                       "ephemeris = \"" +
                       (dir / "sat.csv").string() + "\"\n";
    ConfigDoc doc = parse_config(text);
    ScenarioConfig cfg = load_scenario(doc);
    fs::path out = fresh_dir("sim_csv_out");
    SimulateResult res = run_simulate(cfg, doc, out.string());
    CHECK(res.dump_paths.size() == 1);
    json m = load_json(out / "manifest.json");
    // straight-overhead geometry: elevation near 90 from the hand ephemeris
    CHECK(m["satellites"][0]["elevation_start_deg"].get<double>() > 85.0);
    fs::remove_all(dir);
    fs::remove_all(out);
}

TEST_CASE("an ephemeris that stops early is an error") {
    fs::path dir = fresh_dir("sim_short_eph");
    {
        std::ofstream f(dir / "sat.csv");
        f << "t_s,x_m,y_m,z_m\n0,26571000,0,0\n0.01,26571000,38,0\n";
    }
    std::string text = "duration_s = 0.05\n"
                       "channel_update_rate_hz = 2000\n"
                       "[satellite.eph]\n"
                       "ephemeris = \"" +
                       (dir / "sat.csv").string() + "\"\n";
    ConfigDoc doc = parse_config(text);
    ScenarioConfig cfg = load_scenario(doc);
    CHECK_THROWS_WITH_AS(run_simulate(cfg, doc, (dir / "out").string()),
                         doctest::Contains("spans"), std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("analyze emits the full report set per satellite") {
    fs::path out = fresh_dir("ana_sim");
    ConfigDoc doc = parse_config(kTwoSatConfig);
    ScenarioConfig cfg = load_scenario(doc);
    run_simulate(cfg, doc, out.string());

    fs::path rep = fresh_dir("ana_rep");
    AnalyzeOptions opts;
    opts.nfft = 64;
    AnalyzeResult res = run_analyze(out.string(), rep.string(), opts);
    CHECK(res.n_analyzed == 2);
    CHECK(res.failures.empty());
    for (const char* sat : {"g-07", "g-21"}) {
        for (const char* f : {"power_series.csv", "amplitude_hist.csv", "delay_hist.csv",
                              "ds_series.csv", "doppler_psd.csv", "summary.json"}) {
            CHECK(fs::exists(rep / sat / f));
            CHECK(fs::file_size(rep / sat / f) > 0);
        }
    }
    CHECK(fs::exists(rep / "doppler_bounds.csv"));

    // doppler peak stays near the geometric prediction
    json s = load_json(rep / "g-07" / "summary.json");
    json m = load_json(out / "manifest.json");
    double predicted = m["satellites"][0]["predicted_doppler_hz"].get<double>();
    double peak = s["doppler"]["peak_hz"].get<double>();
    CHECK(std::abs(peak - predicted) < 2.0 / 0.02 + 1.0); // within two bins
    fs::remove_all(out);
    fs::remove_all(rep);
}

TEST_CASE("analyze continues past a corrupt dump and reports it") {
    fs::path out = fresh_dir("ana_corrupt");
    ConfigDoc doc = parse_config(kTwoSatConfig);
    ScenarioConfig cfg = load_scenario(doc);
    run_simulate(cfg, doc, out.string());
    {
        std::ofstream f(out / "g-07.skch", std::ios::binary | std::ios::trunc);
        f << "garbage";
    }
    fs::path rep = fresh_dir("ana_corrupt_rep");
    AnalyzeOptions opts;
    opts.nfft = 64;
    AnalyzeResult res = run_analyze(out.string(), rep.string(), opts);
    CHECK(res.n_analyzed == 1);
    REQUIRE(res.failures.size() == 1);
    CHECK(res.failures[0].first.find("g-07") != std::string::npos);
    CHECK(fs::exists(rep / "g-21" / "summary.json"));
    fs::remove_all(out);
    fs::remove_all(rep);
}

TEST_CASE("analyze works from bare dumps without a manifest") {
    fs::path out = fresh_dir("ana_bare");
    ConfigDoc doc = parse_config(kTwoSatConfig);
    ScenarioConfig cfg = load_scenario(doc);
    run_simulate(cfg, doc, out.string());
    fs::remove(out / "manifest.json");

    fs::path rep = fresh_dir("ana_bare_rep");
    AnalyzeOptions opts;
    opts.nfft = 64;
    AnalyzeResult res = run_analyze(out.string(), rep.string(), opts);
    CHECK(res.n_analyzed == 2);
    CHECK(fs::exists(rep / "g-07" / "summary.json"));
    CHECK(!fs::exists(rep / "doppler_bounds.csv")); // needs manifest geometry
    fs::remove_all(out);
    fs::remove_all(rep);
}

TEST_CASE("report prints the timeline and flags") {
    fs::path out = fresh_dir("rep_sim");
    ConfigDoc doc = parse_config(kTwoSatConfig);
    ScenarioConfig cfg = load_scenario(doc);
    run_simulate(cfg, doc, out.string());
    std::string text = run_report((out / "manifest.json").string());
    CHECK(text.find("[g-07]") != std::string::npos);
    CHECK(text.find("[g-21]") != std::string::npos);
    CHECK(text.find("LOS 100%") != std::string::npos);
    CHECK(text.find("GOOD") != std::string::npos);
    CHECK(text.find("mean power") != std::string::npos);
    CHECK(text.find("doppler peak") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("per-satellite streams are independent for identical geometry") {
    // two satellites with the same placement differ only in their derived RNG
    // stream; across seeds their small-scale fading must decorrelate. The
    // pooled Pearson correlation over all runs is the sharp statistic: with
    // ~60k pooled samples even weak coupling would surface well above 0.05.
    const char* text = "duration_s = 0.01\n"
                       "rx_speed_mps = 13.89\n"
                       "channel_update_rate_hz = 102e3\n"
                       "[satellite.twin-a]\n"
                       "placement = [45, 120, 30, 20200e3]\n"
                       "[satellite.twin-b]\n"
                       "placement = [45, 120, 30, 20200e3]\n";
    ConfigDoc doc = parse_config(text);
    ScenarioConfig cfg = load_scenario(doc);

    double sum_rho = 0.0;
    double pooled_xy = 0.0, pooled_xx = 0.0, pooled_yy = 0.0;
    const int n_seeds = 100;
    fs::path out = fresh_dir("sim_twin");
    for (int seed = 1; seed <= n_seeds; ++seed) {
        cfg.master_seed = std::uint64_t(seed);
        run_simulate(cfg, doc, out.string());
        ChannelTensor ta = read_channel_dump((out / "twin-a.skch").string());
        ChannelTensor tb = read_channel_dump((out / "twin-b.skch").string());
        auto pa = received_power_series(ta);
        auto pb = received_power_series(tb);
        REQUIRE(pa.size() == pb.size());
        double ma = 0.0, mb = 0.0;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            ma += pa[i];
            mb += pb[i];
        }
        ma /= double(pa.size());
        mb /= double(pb.size());
        double xy = 0.0, xx = 0.0, yy = 0.0;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            double dx = pa[i] - ma, dy = pb[i] - mb;
            xy += dx * dy;
            xx += dx * dx;
            yy += dy * dy;
        }
        sum_rho += xy / std::sqrt(xx * yy);
        pooled_xy += xy;
        pooled_xx += xx;
        pooled_yy += yy;
    }
    fs::remove_all(out);
    double mean_rho = sum_rho / n_seeds;
    double pooled_rho = pooled_xy / std::sqrt(pooled_xx * pooled_yy);
    CHECK(std::abs(mean_rho) < 0.05);
    CHECK(std::abs(pooled_rho) < 0.05);
}
