// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#include "skychan/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "skychan/analysis.hpp"
#include "skychan/channel_dump.hpp"
#include "skychan/constants.hpp"
#include "skychan/lsp.hpp"
#include "skychan/state_model.hpp"
#include "skychan/synth.hpp"
#include "skychan/version.hpp"

namespace skychan {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fmt_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string iso_utc_now() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_cap()), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;)
                fn(i);
        });
    for (auto& t : pool)
        t.join();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_csv_number(const std::string& token, const std::string& path, int line_no) {
    const char* begin = token.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + token.size() || !std::isfinite(v))
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": bad numeric field '" + token + "'");
    return v;
}

} // namespace

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open trajectory file '" + path + "'");

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ": empty trajectory file");
    auto header = split_csv_line(line);
    bool has_vel = false;
    if (header == std::vector<std::string>{"t_s", "x_m", "y_m", "z_m"})
        has_vel = false;
    else if (header == std::vector<std::string>{"t_s", "x_m", "y_m", "z_m", "vx_mps", "vy_mps",
                                                "vz_mps"})
        has_vel = true;
    else
        throw std::runtime_error(path + ": expected header t_s,x_m,y_m,z_m[,vx_mps,vy_mps,vz_mps]");

    std::vector<double> t;
    std::vector<Vec3> pos, vel;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(header.size()) + " fields");
        t.push_back(parse_csv_number(cells[0], path, line_no));
        pos.push_back({parse_csv_number(cells[1], path, line_no),
                       parse_csv_number(cells[2], path, line_no),
                       parse_csv_number(cells[3], path, line_no)});
        if (has_vel)
            vel.push_back({parse_csv_number(cells[4], path, line_no),
                           parse_csv_number(cells[5], path, line_no),
                           parse_csv_number(cells[6], path, line_no)});
    }
    return has_vel ? Trajectory(std::move(t), std::move(pos), std::move(vel))
                   : Trajectory(std::move(t), std::move(pos));
}

int thread_cap() {
    unsigned hw = std::thread::hardware_concurrency();
    long cap = hw ? static_cast<long>(hw) : 1;
    if (const char* env = std::getenv("SKYCHAN_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1)
            cap = std::min(v, 256L);
    }
    return static_cast<int>(cap);
}

// ---------- simulate ----------

namespace {

double deg(double rad) { return rad * kDegPerRad; }
double rad(double deg_v) { return deg_v / kDegPerRad; }

double sample_step(double duration_s) { return std::max(duration_s / 1024.0, 1e-4); }

Trajectory build_sat_trajectory(const SatelliteSpec& spec, const Vec3& rx0, double duration_s) {
    switch (spec.source) {
    case SatelliteSpec::Source::Ephemeris: {
        Trajectory t = read_trajectory_csv(spec.ephemeris_path);
        if (t.t_begin() > 0.0 || t.t_end() < duration_s)
            throw std::runtime_error("satellite '" + spec.id + "': ephemeris spans [" +
                                     fmt(t.t_begin()) + ", " + fmt(t.t_end()) +
                                     "] s but the run needs [0, " + fmt(duration_s) + "] s");
        return t;
    }
    case SatelliteSpec::Source::Orbit: {
        double step = sample_step(duration_s);
        return circular_orbit_ephemeris(spec.altitude_m, rad(spec.inclination_deg),
                                        rad(spec.raan_deg), rad(spec.phase_deg), 0.0,
                                        duration_s + 2.0 * step, step);
    }
    case SatelliteSpec::Source::Placement: {
        double incl, raan, phase;
        orbit_elements_for_placement(rx0, rad(spec.elevation_deg), rad(spec.azimuth_deg),
                                     rad(spec.vel_azimuth_deg), spec.altitude_m, incl, raan,
                                     phase);
        double step = sample_step(duration_s);
        return circular_orbit_ephemeris(spec.altitude_m, incl, raan, phase, 0.0,
                                        duration_s + 2.0 * step, step);
    }
    }
    throw std::logic_error("unreachable satellite source");
}

Trajectory build_rx_trajectory(const ScenarioConfig& cfg) {
    if (!cfg.rx.track_path.empty()) {
        Trajectory t = read_trajectory_csv(cfg.rx.track_path);
        if (t.t_begin() > 0.0 || t.t_end() < cfg.duration_s)
            throw std::runtime_error("receiver track spans [" + fmt(t.t_begin()) + ", " +
                                     fmt(t.t_end()) + "] s but the run needs [0, " +
                                     fmt(cfg.duration_s) + "] s");
        return t;
    }
    double step = sample_step(cfg.duration_s);
    return make_ground_track(rad(cfg.rx.lat_deg), rad(cfg.rx.lon_deg), rad(cfg.rx.heading_deg),
                             cfg.rx_speed_mps, cfg.duration_s + 2.0 * step, step);
}

std::pair<double, double> ds_envelope_ns(const DelaySpreadParams& p, double fc_ghz,
                                         double elev_rad) {
    double lo = std::pow(10.0, delay_spread_exponent(p, fc_ghz, elev_rad, -3.0)) * 1e9;
    double hi = std::pow(10.0, delay_spread_exponent(p, fc_ghz, elev_rad, 3.0)) * 1e9;
    return {lo, hi};
}

const char* state_name(StateKind s) { return s == StateKind::Good ? "GOOD" : "BAD"; }

struct SatOutcome {
    bool dropped = false;
    std::string reason;
    std::string dump_name;
    json entry;
};

SatOutcome simulate_one(const ScenarioConfig& cfg, const SatelliteSpec& spec,
                        const Trajectory& sat_traj, const Trajectory& rx_traj, double rate_hz,
                        const fs::path& out_dir) {
    SatOutcome out;
    LinkSeries series =
        sample_link_series(sat_traj, rx_traj, cfg.fc_hz, rate_hz, 0.0, cfg.duration_s);

    double mask_rad = rad(cfg.elevation_mask_deg);
    double min_elev = series.geo.front().elevation_rad;
    double min_elev_t = series.t_s.front();
    double elev_sum = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        elev_sum += series.geo[i].elevation_rad;
        if (series.geo[i].elevation_rad < min_elev) {
            min_elev = series.geo[i].elevation_rad;
            min_elev_t = series.t_s[i];
        }
    }
    if (min_elev < mask_rad) {
        out.dropped = true;
        out.reason = "below the " + fmt_fixed(cfg.elevation_mask_deg, 1) +
                     " deg elevation mask (reaches " + fmt_fixed(deg(min_elev), 2) +
                     " deg at t=" + fmt_fixed(min_elev_t, 3) + " s)";
        return out;
    }
    double mean_elev_rad = elev_sum / static_cast<double>(series.size());

    RandomStream rng = RandomStream::derive(cfg.master_seed, "sat/" + spec.id);

    // index of the first snapshot at or past a track distance
    auto snap_at = [&](double d) {
        auto it = std::lower_bound(series.rx_distance_m.begin(), series.rx_distance_m.end(),
                                   d - 1e-9);
        std::size_t i = static_cast<std::size_t>(it - series.rx_distance_m.begin());
        return std::min(i, series.size() - 1);
    };
    auto elev_deg_at = [&](double d) { return deg(series.geo[snap_at(d)].elevation_rad); };

    double track_len = series.rx_distance_m.back();
    StateSequence states;
    if (track_len > 0.0) {
        states = build_state_sequence(track_len, elev_deg_at, cfg.plos, cfg.state_durations,
                                      cfg.min_durations, rng);
    } else {
        StateKind s0 = initial_state(elev_deg_at(0.0), cfg.plos, rng.uniform());
        states.segments = {{s0, 0.0, 0.0}};
        states.track_length_m = 0.0;
    }

    // Delay-spread field: one standard-normal per segment, spatially
    // correlated along the track within each scenario.
    std::vector<double> good_pos, bad_pos;
    for (const auto& seg : states.segments)
        (seg.state == StateKind::Good ? good_pos : bad_pos).push_back(seg.start_m);
    std::vector<double> good_x, bad_x;
    if (!good_pos.empty())
        good_x = correlated_normal_field(good_pos, cfg.ds_los.d_lambda, rng);
    if (!bad_pos.empty())
        bad_x = correlated_normal_field(bad_pos, cfg.ds_nlos.d_lambda, rng);

    double fc_ghz = cfg.fc_hz / 1e9;
    std::vector<SegmentRealization> segs;
    json seg_entries = json::array();
    std::size_t gi = 0, bi = 0;
    for (const auto& seg : states.segments) {
        Scenario sc = seg.state == StateKind::Good ? Scenario::Los : Scenario::Nlos;
        const DelaySpreadParams& dsp = sc == Scenario::Los ? cfg.ds_los : cfg.ds_nlos;
        double x = sc == Scenario::Los ? good_x[gi++] : bad_x[bi++];

        std::size_t anchor = snap_at(seg.start_m);
        double elev_rad = series.geo[anchor].elevation_rad;
        double ds = draw_delay_spread(dsp, fc_ghz, elev_rad, x);
        LspDraw lsp = draw_k_factor_and_sf(sc, cfg.fading, ds, rng);

        SegmentRealization sr;
        sr.scenario = sc;
        sr.lsp = lsp;
        sr.clusters = make_cluster_set(sc, ds, lsp.k_factor_db,
                                       series.geo[anchor].azimuth_rad, cfg.synth, rng);
        segs.push_back(std::move(sr));

        json e = {{"state", state_name(seg.state)},
                  {"start_m", seg.start_m},
                  {"length_m", seg.length_m},
                  {"ds_ns", ds * 1e9},
                  {"sf_db", lsp.shadow_fading_db}};
        e["k_db"] = lsp.k_factor_db ? json(*lsp.k_factor_db) : json();
        seg_entries.push_back(std::move(e));
    }

    AssembleInputs in;
    in.series = &series;
    in.states = &states;
    in.segments = std::move(segs);
    in.tx_antenna = {cfg.tx_antenna.kind, cfg.tx_antenna.gain_dbi, cfg.tx_antenna.beamwidth_deg};
    in.rx_antenna = {cfg.rx_antenna.kind, cfg.rx_antenna.gain_dbi, cfg.rx_antenna.beamwidth_deg};
    in.pl_los = cfg.pl_los;
    in.pl_nlos = cfg.pl_nlos;
    in.atmospheric_db = cfg.atmospheric_db;
    in.cfg = cfg.synth;
    in.sat_id = spec.id;
    ChannelTensor tensor = assemble_channel(in);

    out.dump_name = spec.id + ".skch";
    write_channel_dump((out_dir / out.dump_name).string(), tensor);

    const LinkGeometry& g0 = series.geo.front();
    auto los_env = ds_envelope_ns(cfg.ds_los, fc_ghz, mean_elev_rad);
    auto nlos_env = ds_envelope_ns(cfg.ds_nlos, fc_ghz, mean_elev_rad);

    json entry = {{"id", spec.id},
                  {"dump", out.dump_name},
                  {"n_paths", tensor.n_paths},
                  {"n_snapshots", tensor.n_snapshots},
                  {"elevation_start_deg", deg(series.geo.front().elevation_rad)},
                  {"elevation_end_deg", deg(series.geo.back().elevation_rad)},
                  {"mean_elevation_deg", deg(mean_elev_rad)},
                  {"sat_speed_mps", series.sat_speed_mps.front()},
                  {"theta_sat_deg", deg(g0.theta_sat_rad)},
                  {"radial_velocity_mps", g0.radial_velocity_mps},
                  {"predicted_doppler_hz", doppler_shift(cfg.fc_hz, g0.radial_velocity_mps)},
                  {"los_envelope_ns", {los_env.first, los_env.second}},
                  {"nlos_envelope_ns", {nlos_env.first, nlos_env.second}},
                  {"ds_mse_db", tensor.ds_mse_db},
                  {"segments", std::move(seg_entries)}};
    if (series.sat_speed_mps.front() > 0.0) {
        double lo, hi;
        doppler_angle_bounds(series.sat_speed_mps.front(), lo, hi);
        entry["doppler_bounds_deg"] = {deg(lo), deg(hi)};
    } else {
        entry["doppler_bounds_deg"] = json();
    }
    out.entry = std::move(entry);
    return out;
}

} // namespace

SimulateResult run_simulate(const ScenarioConfig& cfg, const ConfigDoc& doc,
                            const std::string& out_dir) {
    fs::create_directories(out_dir);
    fs::path out(out_dir);

    Trajectory rx_traj = build_rx_trajectory(cfg);
    Vec3 rx0 = rx_traj.position_at(0.0);

    std::vector<Trajectory> sat_trajs;
    sat_trajs.reserve(cfg.satellites.size());
    for (const auto& spec : cfg.satellites)
        sat_trajs.push_back(build_sat_trajectory(spec, rx0, cfg.duration_s));

    // Channel update rate: the fastest satellite's span sets the floor.
    double required = 0.0;
    for (std::size_t i = 0; i < sat_trajs.size(); ++i) {
        double path = sat_trajs[i].distance_at(cfg.duration_s) - sat_trajs[i].distance_at(0.0);
        if (path > 0.0)
            required = std::max(required, min_channel_update_rate(path, cfg.sample_density,
                                                                  cfg.fc_hz, cfg.duration_s));
    }
    double rate = cfg.channel_update_rate_hz;
    if (rate > 0.0) {
        if (rate + 1e-9 < required) {
            const ConfigValue* v = doc.find("channel_update_rate_hz");
            throw ConfigError(v ? v->line : 0,
                              "channel_update_rate_hz " + fmt(rate) +
                                  " Hz is below the required " + fmt_fixed(required, 1) +
                                  " Hz minimum for this geometry");
        }
    } else {
        rate = std::max(required, 16.0 / cfg.duration_s);
    }

    std::vector<SatOutcome> outcomes(cfg.satellites.size());
    std::vector<std::exception_ptr> errors(cfg.satellites.size());
    parallel_for(cfg.satellites.size(), [&](std::size_t i) {
        try {
            outcomes[i] =
                simulate_one(cfg, cfg.satellites[i], sat_trajs[i], rx_traj, rate, out);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (auto& err : errors)
        if (err)
            std::rethrow_exception(err);

    SimulateResult result;
    json sats = json::array();
    json dropped = json::array();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].dropped) {
            dropped.push_back({{"id", cfg.satellites[i].id}, {"reason", outcomes[i].reason}});
            result.dropped.emplace_back(cfg.satellites[i].id, outcomes[i].reason);
        } else {
            sats.push_back(std::move(outcomes[i].entry));
            result.dump_paths.push_back((out / outcomes[i].dump_name).string());
        }
    }

    json manifest = {{"software", std::string("skychan ") + kVersion},
                     {"config_hash", hash_hex(config_hash(doc))},
                     {"seed", cfg.master_seed},
                     {"fc_hz", cfg.fc_hz},
                     {"rate_hz", rate},
                     {"duration_s", cfg.duration_s},
                     {"elevation_mask_deg", cfg.elevation_mask_deg},
                     {"rx_speed_mps", cfg.rx_speed_mps},
                     {"tx_power_dbm", cfg.link.tx_power_dbm},
                     {"analysis",
                      {{"bandwidth_hz", cfg.analysis.bandwidth_hz},
                       {"nfft", cfg.analysis.nfft},
                       {"window_s", cfg.analysis.window_s},
                       {"delay_threshold_db", cfg.analysis.delay_threshold_db}}},
                     {"satellites", std::move(sats)},
                     {"dropped", std::move(dropped)},
                     {"wall_clock_utc", iso_utc_now()}};

    result.manifest_path = (out / "manifest.json").string();
    std::ofstream mf(result.manifest_path, std::ios::binary | std::ios::trunc);
    if (!mf)
        throw std::runtime_error("cannot write '" + result.manifest_path + "'");
    mf << manifest.dump(2) << "\n";
    return result;
}

// ---------- analyze ----------

namespace {

const char* family_name(FitFamily f) {
    switch (f) {
    case FitFamily::Rayleigh: return "rayleigh";
    case FitFamily::Rician: return "rician";
    case FitFamily::Exponential: return "exponential";
    case FitFamily::Gamma: return "gamma";
    }
    return "?";
}

struct DumpJob {
    std::string path; // absolute or dir-relative path to the .skch file
    std::string stem;
    json meta; // manifest satellite entry, or null
};

struct AnalyzeSettings {
    AnalysisDefaults defaults;
    double tx_power_dbm = 0.0;
    double rx_speed_mps = 0.0;
};

struct SatAnalysis {
    bool ok = false;
    double peak_hz = 0.0;
    double peak_power_db = 0.0;
};

SatAnalysis analyze_one(const DumpJob& job, const AnalyzeSettings& st, const fs::path& out_dir,
                        bool csv_dump) {
    ChannelTensor tensor = read_channel_dump(job.path);
    fs::path dir = out_dir / job.stem;
    fs::create_directories(dir);

    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
        return f;
    };

    json summary;
    summary["sat_id"] = job.stem;
    summary["n_paths"] = tensor.n_paths;
    summary["n_snapshots"] = tensor.n_snapshots;
    summary["duration_s"] =
        tensor.rate_hz > 0.0 ? static_cast<double>(tensor.n_snapshots) / tensor.rate_hz : 0.0;

    // received power
    auto power = received_power_series(tensor);
    double mean_power = 0.0;
    {
        auto f = open("power_series.csv");
        f << "t_s,power_dbm\n";
        for (std::size_t t = 0; t < power.size(); ++t) {
            double dbm = power[t] > 0.0 ? st.tx_power_dbm + 10.0 * std::log10(power[t]) : -400.0;
            f << fmt(tensor.timestamps_s[t]) << ',' << fmt(dbm) << '\n';
            mean_power += power[t];
        }
    }
    mean_power /= static_cast<double>(std::max<std::size_t>(power.size(), 1));
    summary["mean_power_dbm"] =
        mean_power > 0.0 ? st.tx_power_dbm + 10.0 * std::log10(mean_power) : -400.0;

    // amplitude distribution
    auto amplitude = received_amplitude_series(tensor);
    try {
        HistogramFit ray = fit_histogram(amplitude, FitFamily::Rayleigh);
        HistogramFit ric = fit_histogram(amplitude, FitFamily::Rician);
        auto f = open("amplitude_hist.csv");
        f << "# rmse rayleigh=" << fmt(ray.rmse) << " rician=" << fmt(ric.rmse) << "\n";
        f << "bin_center,density,rayleigh_fit,rician_fit\n";
        for (std::size_t i = 0; i < ray.bin_centers.size(); ++i)
            f << fmt(ray.bin_centers[i]) << ',' << fmt(ray.bin_density[i]) << ','
              << fmt(fit_pdf(ray, ray.bin_centers[i])) << ','
              << fmt(fit_pdf(ric, ray.bin_centers[i])) << '\n';
        summary["amplitude"] = {
            {"rayleigh",
             {{"sigma2", ray.params[0]}, {"rmse", ray.rmse}, {"converged", ray.converged}}},
            {"rician",
             {{"sigma2", ric.params[0]},
              {"z", ric.params[1]},
              {"rmse", ric.rmse},
              {"converged", ric.converged}}}};
    } catch (const std::invalid_argument& e) {
        auto f = open("amplitude_hist.csv");
        f << "# not fitted: " << e.what() << "\n";
        f << "bin_center,density,rayleigh_fit,rician_fit\n";
        summary["amplitude"] = {{"error", e.what()}};
    }

    // multipath excess delays
    DelayStats delays = multipath_delay_stats(tensor, st.defaults.delay_threshold_db);
    summary["delay_threshold_db"] = st.defaults.delay_threshold_db;
    if (delays.degenerate) {
        auto f = open("delay_hist.csv");
        f << "# no multipath delays above threshold\n";
        f << "bin_center_ns,density,exp_fit,gamma_fit,rayleigh_fit\n";
        summary["delay"] = {{"degenerate", true}};
    } else {
        json jd = {{"tau_avg_ns", delays.tau_avg_s * 1e9},
                   {"tau_med_ns", delays.tau_med_s * 1e9},
                   {"n_pooled", delays.pooled_delays_s.size()}};
        auto f = open("delay_hist.csv");
        if (delays.fits.size() == 3) {
            const HistogramFit& ex = delays.fits[0];
            f << "# rmse exponential=" << fmt(delays.fits[0].rmse)
              << " gamma=" << fmt(delays.fits[1].rmse)
              << " rayleigh=" << fmt(delays.fits[2].rmse) << "\n";
            f << "bin_center_ns,density,exp_fit,gamma_fit,rayleigh_fit\n";
            for (std::size_t i = 0; i < ex.bin_centers.size(); ++i) {
                double x = ex.bin_centers[i];
                f << fmt(x * 1e9) << ',' << fmt(ex.bin_density[i]) << ','
                  << fmt(fit_pdf(delays.fits[0], x)) << ',' << fmt(fit_pdf(delays.fits[1], x))
                  << ',' << fmt(fit_pdf(delays.fits[2], x)) << '\n';
            }
            jd["fits"] = {{"exponential",
                           {{"lambda_per_s", delays.fits[0].params[0]},
                            {"rmse", delays.fits[0].rmse}}},
                          {"gamma",
                           {{"shape", delays.fits[1].params[0]},
                            {"scale_s", delays.fits[1].params[1]},
                            {"rmse", delays.fits[1].rmse}}},
                          {"rayleigh",
                           {{"sigma2", delays.fits[2].params[0]},
                            {"rmse", delays.fits[2].rmse}}}};
            json ranking = json::array();
            for (std::size_t idx : delays.ranking)
                ranking.push_back(family_name(delays.fits[idx].family));
            jd["ranking"] = std::move(ranking);
        } else {
            f << "# too few pooled delays for fitting\n";
            f << "bin_center_ns,density,exp_fit,gamma_fit,rayleigh_fit\n";
        }
        summary["delay"] = std::move(jd);
    }

    // delay-spread series
    auto ds = delay_spread_series(tensor);
    {
        auto f = open("ds_series.csv");
        f << "distance_m,ds_ns\n";
        for (std::size_t t = 0; t < ds.size(); ++t)
            f << fmt(st.rx_speed_mps * tensor.timestamps_s[t]) << ',' << fmt(ds[t] * 1e9)
              << '\n';
        double lo = ds.empty() ? 0.0 : *std::min_element(ds.begin(), ds.end());
        double hi = ds.empty() ? 0.0 : *std::max_element(ds.begin(), ds.end());
        double mean = 0.0;
        for (double v : ds)
            mean += v;
        mean /= static_cast<double>(std::max<std::size_t>(ds.size(), 1));
        summary["ds"] = {{"min_ns", lo * 1e9}, {"max_ns", hi * 1e9}, {"mean_ns", mean * 1e9}};
    }

    // Doppler spectrum; the window shrinks to the tensor when needed
    double duration = static_cast<double>(tensor.n_snapshots) / tensor.rate_hz;
    double window = std::min(st.defaults.window_s, duration);
    DopplerSpectrum sp =
        doppler_spectrum(tensor, st.defaults.bandwidth_hz, st.defaults.nfft, window);
    {
        auto f = open("doppler_psd.csv");
        f << "hz,db\n";
        for (std::size_t i = 0; i < sp.freq_hz.size(); ++i)
            f << fmt(sp.freq_hz[i]) << ',' << fmt(sp.psd_db[i]) << '\n';
    }
    summary["doppler"] = {{"peak_hz", sp.peak_hz},
                          {"peak_power_db", sp.peak_power_db},
                          {"bandwidth_hz", st.defaults.bandwidth_hz},
                          {"nfft", st.defaults.nfft},
                          {"window_s", window}};

    if (csv_dump)
        write_channel_csv((dir / "channel.csv").string(), tensor);

    {
        auto f = open("summary.json");
        f << summary.dump(2) << "\n";
    }

    SatAnalysis res;
    res.ok = true;
    res.peak_hz = sp.peak_hz;
    res.peak_power_db = sp.peak_power_db;
    return res;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    json j;
    in >> j;
    return j;
}

} // namespace

AnalyzeResult run_analyze(const std::string& dump_dir, const std::string& out_dir,
                          const AnalyzeOptions& opts) {
    fs::path dir(dump_dir);
    if (!fs::is_directory(dir))
        throw std::runtime_error("'" + dump_dir + "' is not a directory");

    AnalyzeSettings settings;
    std::vector<DumpJob> jobs;
    json manifest;
    bool have_manifest = fs::exists(dir / "manifest.json");
    if (have_manifest) {
        manifest = load_json_file((dir / "manifest.json").string());
        settings.defaults.bandwidth_hz =
            manifest["analysis"].value("bandwidth_hz", settings.defaults.bandwidth_hz);
        settings.defaults.nfft = manifest["analysis"].value("nfft", settings.defaults.nfft);
        settings.defaults.window_s =
            manifest["analysis"].value("window_s", settings.defaults.window_s);
        settings.defaults.delay_threshold_db = manifest["analysis"].value(
            "delay_threshold_db", settings.defaults.delay_threshold_db);
        settings.tx_power_dbm = manifest.value("tx_power_dbm", 0.0);
        settings.rx_speed_mps = manifest.value("rx_speed_mps", 0.0);
        for (const auto& sat : manifest["satellites"]) {
            DumpJob job;
            job.path = (dir / sat["dump"].get<std::string>()).string();
            job.stem = sat["id"].get<std::string>();
            job.meta = sat;
            jobs.push_back(std::move(job));
        }
    } else {
        std::vector<std::string> names;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_regular_file() && e.path().extension() == ".skch")
                names.push_back(e.path().filename().string());
        std::sort(names.begin(), names.end());
        for (const auto& name : names) {
            DumpJob job;
            job.path = (dir / name).string();
            job.stem = fs::path(name).stem().string();
            jobs.push_back(std::move(job));
        }
        if (jobs.empty())
            throw std::runtime_error("no channel dumps (*.skch) under '" + dump_dir + "'");
    }

    if (opts.bandwidth_hz > 0.0)
        settings.defaults.bandwidth_hz = opts.bandwidth_hz;
    if (opts.nfft > 0)
        settings.defaults.nfft = opts.nfft;
    if (opts.window_s > 0.0)
        settings.defaults.window_s = opts.window_s;

    fs::create_directories(out_dir);
    fs::path out(out_dir);

    std::vector<SatAnalysis> results(jobs.size());
    std::vector<std::string> errors(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        try {
            results[i] = analyze_one(jobs[i], settings, out, opts.csv_dump);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    AnalyzeResult result;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (results[i].ok)
            ++result.n_analyzed;
        else
            result.failures.emplace_back(jobs[i].path,
                                         errors[i].empty() ? "unknown failure" : errors[i]);
    }

    // Doppler-angle feasibility table, one row per satellite with geometry.
    if (have_manifest) {
        std::ofstream f(out / "doppler_bounds.csv", std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot write doppler_bounds.csv");
        f << "sat_id,sat_speed_mps,bound_lo_deg,bound_hi_deg,theta_sat_deg,within_bounds,"
             "predicted_doppler_hz,measured_peak_hz\n";
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            const json& meta = jobs[i].meta;
            if (meta.is_null())
                continue;
            double speed = meta.value("sat_speed_mps", 0.0);
            double theta = meta.value("theta_sat_deg", 0.0);
            std::string lo = "nan", hi = "nan", within = "0";
            if (meta.contains("doppler_bounds_deg") && meta["doppler_bounds_deg"].is_array()) {
                double blo = meta["doppler_bounds_deg"][0].get<double>();
                double bhi = meta["doppler_bounds_deg"][1].get<double>();
                lo = fmt(blo);
                hi = fmt(bhi);
                within = (theta >= blo && theta <= bhi) ? "1" : "0";
            }
            f << jobs[i].stem << ',' << fmt(speed) << ',' << lo << ',' << hi << ','
              << fmt(theta) << ',' << within << ','
              << fmt(meta.value("predicted_doppler_hz", 0.0)) << ','
              << (results[i].ok ? fmt(results[i].peak_hz) : std::string("nan")) << '\n';
        }
    }
    return result;
}

// ---------- report ----------

std::string run_report(const std::string& manifest_path) {
    json m = load_json_file(manifest_path);
    fs::path dir = fs::path(manifest_path).parent_path();

    std::ostringstream out;
    out << m.value("software", "skychan") << "  seed " << m.value("seed", 0ULL) << "  config "
        << m.value("config_hash", "?") << "\n";
    out << "fc " << fmt(m.value("fc_hz", 0.0)) << " Hz, rate " << fmt(m.value("rate_hz", 0.0))
        << " Hz, duration " << fmt(m.value("duration_s", 0.0)) << " s, rx speed "
        << fmt(m.value("rx_speed_mps", 0.0)) << " m/s\n";

    double rx_speed = m.value("rx_speed_mps", 0.0);
    json analysis = m.contains("analysis") ? m["analysis"] : json::object();

    for (const auto& sat : m["satellites"]) {
        std::string id = sat.value("id", "?");
        out << "\n[" << id << "]\n";
        out << "  elevation " << fmt_fixed(sat.value("elevation_start_deg", 0.0), 2) << " -> "
            << fmt_fixed(sat.value("elevation_end_deg", 0.0), 2) << " deg\n";

        const json& segs = sat["segments"];
        double total_m = 0.0, good_m = 0.0;
        for (const auto& s : segs) {
            double len = s.value("length_m", 0.0);
            total_m += len;
            if (s.value("state", "") == "GOOD")
                good_m += len;
            out << "  " << s.value("state", "?") << "  start " << fmt_fixed(s.value("start_m", 0.0), 2)
                << " m, length " << fmt_fixed(s.value("length_m", 0.0), 2) << " m, ds "
                << fmt_fixed(s.value("ds_ns", 0.0), 2) << " ns";
            if (s.contains("k_db") && !s["k_db"].is_null())
                out << ", K " << fmt_fixed(s["k_db"].get<double>(), 2) << " dB";
            out << ", sf " << fmt_fixed(s.value("sf_db", 0.0), 2) << " dB\n";
        }
        double los_pct;
        if (total_m > 0.0)
            los_pct = 100.0 * good_m / total_m;
        else
            los_pct = (!segs.empty() && segs[0].value("state", "") == "GOOD") ? 100.0 : 0.0;
        out << "  LOS " << fmt_fixed(los_pct, 0) << "%\n";

        ChannelTensor tensor;
        try {
            tensor = read_channel_dump((dir / sat.value("dump", "")).string());
        } catch (const std::exception& e) {
            out << "  dump unreadable: " << e.what() << "\n";
            continue;
        }

        auto power = received_power_series(tensor);
        double mean_power = 0.0;
        for (double p : power)
            mean_power += p;
        mean_power /= static_cast<double>(std::max<std::size_t>(power.size(), 1));
        double tx = m.value("tx_power_dbm", 0.0);
        out << "  mean power "
            << (mean_power > 0.0 ? fmt_fixed(tx + 10.0 * std::log10(mean_power), 2) : "-inf")
            << " dBm\n";

        // delay-spread range against the per-scenario 3-sigma envelopes
        auto ds = delay_spread_series(tensor);
        double lo_env_l = sat["los_envelope_ns"][0].get<double>();
        double hi_env_l = sat["los_envelope_ns"][1].get<double>();
        double lo_env_n = sat["nlos_envelope_ns"][0].get<double>();
        double hi_env_n = sat["nlos_envelope_ns"][1].get<double>();
        std::size_t inside = 0;
        for (std::size_t t = 0; t < ds.size(); ++t) {
            double d = rx_speed * tensor.timestamps_s[t];
            bool good = true;
            for (const auto& s : segs) { // last matching segment wins
                if (d + 1e-12 >= s.value("start_m", 0.0))
                    good = s.value("state", "") == "GOOD";
            }
            double v = ds[t] * 1e9;
            double lo = good ? lo_env_l : lo_env_n;
            double hi = good ? hi_env_l : hi_env_n;
            if (v >= lo && v <= hi)
                ++inside;
        }
        double ds_lo = ds.empty() ? 0.0 : *std::min_element(ds.begin(), ds.end()) * 1e9;
        double ds_hi = ds.empty() ? 0.0 : *std::max_element(ds.begin(), ds.end()) * 1e9;
        double frac = ds.empty() ? 1.0 : static_cast<double>(inside) / ds.size();
        out << "  ds range [" << fmt_fixed(ds_lo, 2) << ", " << fmt_fixed(ds_hi, 2)
            << "] ns, envelope LOS [" << fmt_fixed(lo_env_l, 2) << ", " << fmt_fixed(hi_env_l, 2)
            << "] NLOS [" << fmt_fixed(lo_env_n, 2) << ", " << fmt_fixed(hi_env_n, 2) << "] ns, "
            << fmt_fixed(100.0 * frac, 1) << "% inside";
        if (frac < 0.95)
            out << "  WARN";
        out << "\n";

        // Doppler peak against the geometric prediction
        double duration = static_cast<double>(tensor.n_snapshots) / tensor.rate_hz;
        double window = std::min(analysis.value("window_s", 1.0), duration);
        try {
            DopplerSpectrum sp = doppler_spectrum(tensor, analysis.value("bandwidth_hz", 2e6),
                                                  analysis.value("nfft", 1024), window);
            double predicted = sat.value("predicted_doppler_hz", 0.0);
            double bin = 1.0 / sp.window_s;
            out << "  doppler peak " << fmt_fixed(sp.peak_hz, 1) << " Hz (predicted "
                << fmt_fixed(predicted, 1) << " Hz)";
            if (std::abs(sp.peak_hz - predicted) > 2.0 * bin)
                out << "  WARN";
            out << "\n";
        } catch (const std::exception& e) {
            out << "  doppler spectrum unavailable: " << e.what() << "\n";
        }
    }

    for (const auto& d : m["dropped"])
        out << "\ndropped " << d.value("id", "?") << ": " << d.value("reason", "") << "\n";
    return out.str();
}

} // namespace skychan
