// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#pragma once

#include <string>
#include <vector>

#include "skychan/config.hpp"
#include "skychan/geometry.hpp"

namespace skychan {

/// `t_s,x_m,y_m,z_m[,vx_mps,vy_mps,vz_mps]` with a header row.
Trajectory read_trajectory_csv(const std::string& path);

struct SimulateResult {
    std::string manifest_path;
    std::vector<std::string> dump_paths;              // satellites that produced output
    std::vector<std::pair<std::string, std::string>> dropped; // (id, reason)
};

/// Run the full per-satellite pipeline (geometry, states, large-scale draws,
/// clusters, channel assembly) and write one dump per visible satellite plus
/// manifest.json into out_dir. Satellites run in parallel up to thread_cap().
SimulateResult run_simulate(const ScenarioConfig& cfg, const ConfigDoc& doc,
                            const std::string& out_dir);

struct AnalyzeOptions {
    double bandwidth_hz = 0.0; // <= 0: manifest/config default
    int nfft = 0;
    double window_s = 0.0;
    bool csv_dump = false;     // additionally export each tensor as CSV
};

struct AnalyzeResult {
    int n_analyzed = 0;
    std::vector<std::pair<std::string, std::string>> failures; // (file, reason)
};

/// Analyze every channel dump under dump_dir (using manifest.json metadata
/// when present) into per-satellite report files under out_dir. A corrupt
/// dump is recorded and the rest continue.
AnalyzeResult run_analyze(const std::string& dump_dir, const std::string& out_dir,
                          const AnalyzeOptions& opts);

/// Human-readable run summary: per-satellite state timeline, mean received
/// power, delay-spread range against the large-scale envelopes, and the
/// measured Doppler peak against the geometric prediction.
std::string run_report(const std::string& manifest_path);

/// Worker count: hardware concurrency, overridable via SKYCHAN_THREADS.
int thread_cap();

} // namespace skychan
