// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "skychan/lsp.hpp"
#include "skychan/pathloss.hpp"
#include "skychan/state_model.hpp"
#include "skychan/synth.hpp"

namespace skychan {

/// Config problem anchored to a source line (0 when no line applies).
struct ConfigError : std::runtime_error {
    ConfigError(int line_no, const std::string& msg);
    int line = 0;
};

/// One parsed config value: a number, a string, or an array of values.
struct ConfigValue {
    enum class Kind { Number, String, Array };

    Kind kind = Kind::Number;
    double number = 0.0;
    std::string text;
    std::vector<ConfigValue> items;
    int line = 0;

    double as_number() const;
    std::int64_t as_integer() const;
    const std::string& as_string() const;
    const std::vector<ConfigValue>& as_array() const;
    /// Array of fixed-width numeric rows, e.g. [[20, 0.25], [45, 0.6]].
    std::vector<std::vector<double>> as_rows(std::size_t row_len) const;
    /// Flat numeric array of exactly n entries.
    std::vector<double> as_numbers(std::size_t n) const;
};

/// Flat dotted-key view of a structured plain-text config:
///   key = value            (numbers, "quoted" or bare strings, [arrays])
///   [section.subsection]   (prefixes the keys that follow)
/// Comments run from `#` or `;` to end of line. Keys are unique.
class ConfigDoc {
public:
    void set(const std::string& key, ConfigValue v);

    bool has(const std::string& key) const;
    const ConfigValue& at(const std::string& key) const; // throws ConfigError if absent
    const ConfigValue* find(const std::string& key) const;

    double number_or(const std::string& key, double fallback) const;
    const std::map<std::string, ConfigValue>& entries() const { return entries_; }

    /// Keys below `prefix.` with the prefix stripped.
    std::vector<std::string> keys_under(const std::string& prefix) const;

private:
    std::map<std::string, ConfigValue> entries_;
};

ConfigDoc parse_config(const std::string& text);
ConfigDoc parse_config_file(const std::string& path);

/// Canonical rendering: sections sorted, keys sorted, numbers in shortest
/// round-trip form. parse(serialize(doc)) reproduces doc exactly.
std::string serialize_config(const ConfigDoc& doc);

/// FNV-1a hash of the canonical rendering; stable across re-serialization.
std::uint64_t config_hash(const ConfigDoc& doc);

// ---------- typed scenario ----------

struct SatelliteSpec {
    enum class Source { Ephemeris, Orbit, Placement };

    std::string id;
    Source source = Source::Orbit;
    std::string ephemeris_path;

    // orbit = [altitude_m, inclination_deg, raan_deg, phase_deg]
    double altitude_m = 0.0;
    double inclination_deg = 0.0;
    double raan_deg = 0.0;
    double phase_deg = 0.0;

    // placement = [elevation_deg, azimuth_deg, velocity_azimuth_deg, altitude_m]
    double elevation_deg = 0.0;
    double azimuth_deg = 0.0;
    double vel_azimuth_deg = 0.0;
};

struct ReceiverSpec {
    std::string track_path; // empty: synthetic great-circle track
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double heading_deg = 90.0;
};

struct AntennaSpec {
    AntennaKind kind = AntennaKind::Isotropic;
    double gain_dbi = 0.0;
    double beamwidth_deg = 10.0;
};

struct AnalysisDefaults {
    double bandwidth_hz = 2e6;
    int nfft = 1024;
    double window_s = 1.0;
    double delay_threshold_db = 40.0;
};

/// Fully validated simulation scenario. Defaults that the source material
/// leaves open (state duration parameters, LOS probability, fading sigmas)
/// are placeholders; production configs are expected to set them.
struct ScenarioConfig {
    double duration_s = 1.0;
    double elevation_mask_deg = 15.0;
    double fc_hz = 1575.42e6;
    double sample_density = 5.0;
    double channel_update_rate_hz = 0.0; // 0: derive the minimum from geometry
    double rx_speed_mps = 0.0;
    std::uint64_t master_seed = 1;

    DurationParams state_durations;
    MinDurationTable min_durations = MinDurationTable::defaults();
    ElevationTable plos;

    PathlossParams pl_los = PathlossParams::urban(Scenario::Los);
    PathlossParams pl_nlos = PathlossParams::urban(Scenario::Nlos);
    double atmospheric_db = 0.0;
    LinkBudget link{0.0, 40.0, 0.0};

    DelaySpreadParams ds_los = DelaySpreadParams::urban(Scenario::Los);
    DelaySpreadParams ds_nlos = DelaySpreadParams::urban(Scenario::Nlos);
    FadingParams fading;

    SynthConfig synth;
    AntennaSpec tx_antenna{AntennaKind::Dish, 40.0, 10.0};
    AntennaSpec rx_antenna{AntennaKind::Isotropic, 0.0, 10.0};

    ReceiverSpec rx;
    std::vector<SatelliteSpec> satellites;
    AnalysisDefaults analysis;
};

/// Validate and type the document. Unknown keys and out-of-range values
/// throw ConfigError carrying the offending line.
ScenarioConfig load_scenario(const ConfigDoc& doc);

} // namespace skychan
