// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#include "skychan.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "skychan/analysis.hpp"
#include "skychan/config.hpp"
#include "skychan/geometry.hpp"
#include "skychan/orchestrator.hpp"
#include "skychan/pathloss.hpp"
#include "skychan/synth.hpp"
#include "skychan/version.hpp"

struct skychan_sim {
    skychan::ConfigDoc doc;
    skychan::ScenarioConfig cfg;
    bool loaded = false;
    std::string last_error;
};

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

int fail(skychan_sim* sim, int code, const std::string& msg) {
    if (sim)
        sim->last_error = msg;
    return code;
}

template <typename Fn>
int guarded(skychan_sim* sim, Fn&& fn) {
    if (!sim)
        return SKYCHAN_ERR_ARG;
    try {
        return fn();
    } catch (const skychan::ConfigError& e) {
        return fail(sim, SKYCHAN_ERR_CONFIG, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(sim, SKYCHAN_ERR_ARG, e.what());
    } catch (const std::bad_alloc&) {
        return fail(sim, SKYCHAN_ERROR, "out of memory");
    } catch (const std::exception& e) {
        return fail(sim, SKYCHAN_ERROR, e.what());
    }
}

template <typename Fn>
double quiet_nan_on_error(Fn&& fn) {
    try {
        double v = fn();
        return std::isfinite(v) ? v : kNan;
    } catch (...) {
        return kNan;
    }
}

} // namespace

extern "C" {

skychan_sim* skychan_create(void) {
    try {
        return new skychan_sim();
    } catch (...) {
        return nullptr;
    }
}

void skychan_destroy(skychan_sim* sim) { delete sim; }

const char* skychan_last_error(const skychan_sim* sim) {
    return sim ? sim->last_error.c_str() : "null handle";
}

int skychan_load_config(skychan_sim* sim, const char* path) {
    return guarded(sim, [&] {
        if (!path)
            return fail(sim, SKYCHAN_ERR_ARG, "path is null");
        skychan::ConfigDoc doc = skychan::parse_config_file(path);
        sim->cfg = skychan::load_scenario(doc);
        sim->doc = std::move(doc);
        sim->loaded = true;
        return static_cast<int>(SKYCHAN_OK);
    });
}

int skychan_load_config_text(skychan_sim* sim, const char* text) {
    return guarded(sim, [&] {
        if (!text)
            return fail(sim, SKYCHAN_ERR_ARG, "text is null");
        skychan::ConfigDoc doc = skychan::parse_config(text);
        sim->cfg = skychan::load_scenario(doc);
        sim->doc = std::move(doc);
        sim->loaded = true;
        return static_cast<int>(SKYCHAN_OK);
    });
}

int skychan_set_seed(skychan_sim* sim, uint64_t seed) {
    return guarded(sim, [&] {
        if (!sim->loaded)
            return fail(sim, SKYCHAN_ERR_ARG, "no config loaded");
        sim->cfg.master_seed = seed;
        return static_cast<int>(SKYCHAN_OK);
    });
}

int skychan_set_rate(skychan_sim* sim, double rate_hz) {
    return guarded(sim, [&] {
        if (!sim->loaded)
            return fail(sim, SKYCHAN_ERR_ARG, "no config loaded");
        if (!(rate_hz >= 0.0) || !std::isfinite(rate_hz))
            return fail(sim, SKYCHAN_ERR_ARG, "rate must be finite and >= 0");
        sim->cfg.channel_update_rate_hz = rate_hz;
        return static_cast<int>(SKYCHAN_OK);
    });
}

int skychan_simulate(skychan_sim* sim, const char* out_dir) {
    return guarded(sim, [&] {
        if (!out_dir)
            return fail(sim, SKYCHAN_ERR_ARG, "out_dir is null");
        if (!sim->loaded)
            return fail(sim, SKYCHAN_ERR_ARG, "no config loaded");
        skychan::run_simulate(sim->cfg, sim->doc, out_dir);
        return static_cast<int>(SKYCHAN_OK);
    });
}

int skychan_analyze(skychan_sim* sim, const char* dump_dir, const char* out_dir,
                    double bandwidth_hz, int nfft, double window_s, int csv_dump) {
    return guarded(sim, [&] {
        if (!dump_dir || !out_dir)
            return fail(sim, SKYCHAN_ERR_ARG, "dump_dir/out_dir is null");
        skychan::AnalyzeOptions opts;
        opts.bandwidth_hz = bandwidth_hz;
        opts.nfft = nfft;
        opts.window_s = window_s;
        opts.csv_dump = csv_dump != 0;
        skychan::AnalyzeResult res = skychan::run_analyze(dump_dir, out_dir, opts);
        if (!res.failures.empty()) {
            std::string msg = "analysis failed for " + std::to_string(res.failures.size()) +
                              " dump(s):";
            for (const auto& [file, reason] : res.failures)
                msg += "\n  " + file + ": " + reason;
            return fail(sim, SKYCHAN_ERR_PARTIAL, msg);
        }
        return static_cast<int>(SKYCHAN_OK);
    });
}

int skychan_report_alloc(skychan_sim* sim, const char* manifest_path, char** text_out) {
    return guarded(sim, [&] {
        if (!manifest_path || !text_out)
            return fail(sim, SKYCHAN_ERR_ARG, "manifest_path/text_out is null");
        std::string text = skychan::run_report(manifest_path);
        char* buf = static_cast<char*>(::operator new(text.size() + 1, std::nothrow));
        if (!buf)
            return fail(sim, SKYCHAN_ERROR, "out of memory");
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *text_out = buf;
        return static_cast<int>(SKYCHAN_OK);
    });
}

void skychan_string_free(char* text) { ::operator delete(text); }

double skychan_pathloss_db(int line_of_sight, double distance_m, double fc_ghz,
                           double elevation_rad) {
    return quiet_nan_on_error([&] {
        auto p = skychan::PathlossParams::urban(line_of_sight ? skychan::Scenario::Los
                                                              : skychan::Scenario::Nlos);
        return skychan::pathloss_db(p, distance_m, fc_ghz, elevation_rad);
    });
}

double skychan_doppler_shift_hz(double fc_hz, double radial_velocity_mps) {
    return quiet_nan_on_error(
        [&] { return skychan::doppler_shift(fc_hz, radial_velocity_mps); });
}

double skychan_min_update_rate_hz(double path_length_m, double sample_density, double fc_hz,
                                  double duration_s) {
    return quiet_nan_on_error([&] {
        return skychan::min_channel_update_rate(path_length_m, sample_density, fc_hz,
                                                duration_s);
    });
}

int skychan_doppler_angle_bounds(double sat_speed_mps, double* lo_rad, double* hi_rad) {
    if (!lo_rad || !hi_rad)
        return SKYCHAN_ERR_ARG;
    try {
        skychan::doppler_angle_bounds(sat_speed_mps, *lo_rad, *hi_rad);
        return SKYCHAN_OK;
    } catch (...) {
        *lo_rad = kNan;
        *hi_rad = kNan;
        return SKYCHAN_ERR_ARG;
    }
}

double skychan_rms_delay_spread(const double* delays_s, const double* powers, size_t n) {
    return quiet_nan_on_error([&] {
        if ((!delays_s || !powers) && n > 0)
            throw std::invalid_argument("null profile");
        std::vector<double> d(delays_s, delays_s + n), p(powers, powers + n);
        return skychan::rms_delay_spread(p, d);
    });
}

const char* skychan_version(void) { return skychan::kVersion; }

} // extern "C"
