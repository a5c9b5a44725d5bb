// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#include "skychan/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "skychan/rng.hpp"

namespace skychan {

namespace {

std::string with_line(int line, const std::string& msg) {
    if (line <= 0)
        return msg;
    return "line " + std::to_string(line) + ": " + msg;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
    if (key.empty() || key.front() == '.' || key.back() == '.')
        return false;
    bool prev_dot = false;
    for (char c : key) {
        if (c == '.') {
            if (prev_dot)
                return false;
            prev_dot = true;
            continue;
        }
        prev_dot = false;
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
            return false;
    }
    return true;
}

bool parses_as_number(const std::string& s, double& out) {
    if (s.empty())
        return false;
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + s.size() && std::isfinite(out);
}

// Characters a string may carry without quotes (and it must not read as a number).
bool bare_safe(const std::string& s) {
    if (s.empty())
        return false;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            continue;
        if (c == '_' || c == '-' || c == '.' || c == '/' || c == ':' || c == '+')
            continue;
        return false;
    }
    double ignored;
    return !parses_as_number(s, ignored);
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_number(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

ConfigValue parse_value(const std::string& raw, int line);

std::vector<std::string> split_array_elements(const std::string& inner, int line) {
    std::vector<std::string> parts;
    std::string cur;
    int depth = 0;
    bool in_quote = false, escaped = false;
    for (char c : inner) {
        if (escaped) {
            cur += c;
            escaped = false;
            continue;
        }
        if (in_quote) {
            if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_quote = false;
            cur += c;
            continue;
        }
        if (c == '"') {
            in_quote = true;
            cur += c;
        } else if (c == '[') {
            ++depth;
            cur += c;
        } else if (c == ']') {
            --depth;
            if (depth < 0)
                throw ConfigError(line, "unbalanced ']' inside array");
            cur += c;
        } else if (c == ',' && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (depth != 0 || in_quote)
        throw ConfigError(line, "unterminated array or string");
    parts.push_back(cur);
    return parts;
}

ConfigValue parse_value(const std::string& raw, int line) {
    std::string s = trim(raw);
    if (s.empty())
        throw ConfigError(line, "empty value");

    ConfigValue v;
    v.line = line;

    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw ConfigError(line, "unterminated string");
        std::string out;
        bool escaped = false;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            char c = s[i];
            if (escaped) {
                switch (c) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default:
                    throw ConfigError(line, std::string("unknown escape \\") + c);
                }
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                throw ConfigError(line, "stray '\"' inside string (escape it)");
            } else {
                out += c;
            }
        }
        if (escaped)
            throw ConfigError(line, "dangling escape at end of string");
        v.kind = ConfigValue::Kind::String;
        v.text = out;
        return v;
    }

    if (s.front() == '[') {
        if (s.back() != ']')
            throw ConfigError(line, "unterminated array");
        v.kind = ConfigValue::Kind::Array;
        std::string inner = trim(s.substr(1, s.size() - 2));
        if (!inner.empty())
            for (const auto& part : split_array_elements(inner, line))
                v.items.push_back(parse_value(part, line));
        return v;
    }

    double num;
    if (parses_as_number(s, num)) {
        v.kind = ConfigValue::Kind::Number;
        v.number = num;
        return v;
    }

    if (!bare_safe(s))
        throw ConfigError(line, "value '" + s + "' must be quoted");
    v.kind = ConfigValue::Kind::String;
    v.text = s;
    return v;
}

std::string strip_comment(const std::string& line_text) {
    std::string out;
    bool in_quote = false, escaped = false;
    for (char c : line_text) {
        if (!in_quote && (c == '#' || c == ';'))
            break;
        out += c;
        if (escaped)
            escaped = false;
        else if (in_quote && c == '\\')
            escaped = true;
        else if (c == '"')
            in_quote = !in_quote;
    }
    return out;
}

int bracket_balance(const std::string& s) {
    int depth = 0;
    bool in_quote = false, escaped = false;
    for (char c : s) {
        if (escaped) {
            escaped = false;
            continue;
        }
        if (in_quote) {
            if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_quote = false;
            continue;
        }
        if (c == '"')
            in_quote = true;
        else if (c == '[')
            ++depth;
        else if (c == ']')
            --depth;
    }
    return depth;
}

std::string value_to_text(const ConfigValue& v) {
    switch (v.kind) {
    case ConfigValue::Kind::Number:
        return format_number(v.number);
    case ConfigValue::Kind::String:
        return bare_safe(v.text) ? v.text : quote(v.text);
    case ConfigValue::Kind::Array: {
        std::string out = "[";
        for (std::size_t i = 0; i < v.items.size(); ++i) {
            if (i)
                out += ", ";
            out += value_to_text(v.items[i]);
        }
        out += "]";
        return out;
    }
    }
    return "";
}

} // namespace

ConfigError::ConfigError(int line_no, const std::string& msg)
    : std::runtime_error(with_line(line_no, msg)), line(line_no) {}

double ConfigValue::as_number() const {
    if (kind != Kind::Number)
        throw ConfigError(line, "expected a number");
    return number;
}

std::int64_t ConfigValue::as_integer() const {
    double v = as_number();
    if (v != std::floor(v) || std::abs(v) > 9.007199254740992e15)
        throw ConfigError(line, "expected an integer");
    return static_cast<std::int64_t>(v);
}

const std::string& ConfigValue::as_string() const {
    if (kind != Kind::String)
        throw ConfigError(line, "expected a string");
    return text;
}

const std::vector<ConfigValue>& ConfigValue::as_array() const {
    if (kind != Kind::Array)
        throw ConfigError(line, "expected an array");
    return items;
}

std::vector<std::vector<double>> ConfigValue::as_rows(std::size_t row_len) const {
    std::vector<std::vector<double>> rows;
    for (const auto& item : as_array()) {
        const auto& cells = item.as_array();
        if (cells.size() != row_len)
            throw ConfigError(item.line, "expected rows of " + std::to_string(row_len) +
                                             " numbers");
        std::vector<double> row;
        for (const auto& c : cells)
            row.push_back(c.as_number());
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<double> ConfigValue::as_numbers(std::size_t n) const {
    const auto& arr = as_array();
    if (arr.size() != n)
        throw ConfigError(line, "expected " + std::to_string(n) + " numbers");
    std::vector<double> out;
    for (const auto& item : arr)
        out.push_back(item.as_number());
    return out;
}

void ConfigDoc::set(const std::string& key, ConfigValue v) {
    auto [it, inserted] = entries_.emplace(key, std::move(v));
    if (!inserted)
        throw ConfigError(v.line, "duplicate key '" + key + "' (first set on line " +
                                      std::to_string(it->second.line) + ")");
}

bool ConfigDoc::has(const std::string& key) const { return entries_.count(key) != 0; }

const ConfigValue& ConfigDoc::at(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end())
        throw ConfigError(0, "missing required key '" + key + "'");
    return it->second;
}

const ConfigValue* ConfigDoc::find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

double ConfigDoc::number_or(const std::string& key, double fallback) const {
    const ConfigValue* v = find(key);
    return v ? v->as_number() : fallback;
}

std::vector<std::string> ConfigDoc::keys_under(const std::string& prefix) const {
    std::vector<std::string> out;
    std::string p = prefix + ".";
    for (auto it = entries_.lower_bound(p); it != entries_.end(); ++it) {
        if (it->first.compare(0, p.size(), p) != 0)
            break;
        out.push_back(it->first.substr(p.size()));
    }
    return out;
}

ConfigDoc parse_config(const std::string& text) {
    ConfigDoc doc;
    std::string section;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        int start_line = line_no;
        std::string logical = strip_comment(raw);

        // Arrays may continue over following lines until brackets balance.
        while (bracket_balance(logical) > 0) {
            std::string next;
            if (!std::getline(in, next))
                throw ConfigError(start_line, "unterminated array");
            ++line_no;
            logical += " " + strip_comment(next);
        }
        if (bracket_balance(logical) < 0)
            throw ConfigError(start_line, "unbalanced ']'");

        std::string stripped = trim(logical);
        if (stripped.empty())
            continue;

        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ConfigError(start_line, "malformed section header");
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (!valid_key(section))
                throw ConfigError(start_line, "invalid section name '" + section + "'");
            continue;
        }

        auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(start_line, "expected 'key = value' or '[section]'");
        std::string key = trim(stripped.substr(0, eq));
        if (!valid_key(key))
            throw ConfigError(start_line, "invalid key '" + key + "'");
        if (!section.empty())
            key = section + "." + key;

        ConfigValue value = parse_value(stripped.substr(eq + 1), start_line);
        doc.set(key, std::move(value));
    }
    return doc;
}

ConfigDoc parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(0, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ConfigDoc& doc) {
    // section -> (key, value) pairs; map keys are already sorted.
    std::map<std::string, std::vector<std::pair<std::string, const ConfigValue*>>> sections;
    for (const auto& [key, value] : doc.entries()) {
        auto dot = key.rfind('.');
        std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
        std::string leaf = dot == std::string::npos ? key : key.substr(dot + 1);
        sections[section].emplace_back(leaf, &value);
    }

    std::string out;
    for (const auto& [section, pairs] : sections) {
        if (!section.empty()) {
            if (!out.empty())
                out += "\n";
            out += "[" + section + "]\n";
        }
        for (const auto& [leaf, value] : pairs)
            out += leaf + " = " + value_to_text(*value) + "\n";
    }
    return out;
}

std::uint64_t config_hash(const ConfigDoc& doc) {
    return RandomStream::fnv1a(serialize_config(doc));
}

// ---------- typed loading ----------

namespace {

/// Pulls keys out of a ConfigDoc and remembers which were touched, so the
/// loader can reject typos instead of silently ignoring them.
class KeyReader {
public:
    explicit KeyReader(const ConfigDoc& doc) : doc_(doc) {}

    const ConfigValue* find(const std::string& key) {
        used_.insert(key);
        return doc_.find(key);
    }

    double num(const std::string& key, double fallback) {
        const ConfigValue* v = find(key);
        return v ? v->as_number() : fallback;
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        const ConfigValue* v = find(key);
        return v ? v->as_integer() : fallback;
    }

    std::string str(const std::string& key, const std::string& fallback) {
        const ConfigValue* v = find(key);
        return v ? v->as_string() : fallback;
    }

    int line(const std::string& key) const {
        const ConfigValue* v = doc_.find(key);
        return v ? v->line : 0;
    }

    void expect_all_used() const {
        for (const auto& [key, value] : doc_.entries())
            if (!used_.count(key))
                throw ConfigError(value.line, "unknown key '" + key + "'");
    }

private:
    const ConfigDoc& doc_;
    std::set<std::string> used_;
};

void require(bool ok, int line, const std::string& msg) {
    if (!ok)
        throw ConfigError(line, msg);
}

ElevationTable table_from_rows(const std::vector<std::vector<double>>& rows,
                               std::size_t value_col, int line) {
    ElevationTable t;
    for (const auto& row : rows) {
        require(t.elevation_deg.empty() || row[0] > t.elevation_deg.back(), line,
                "table elevations must be strictly increasing");
        t.elevation_deg.push_back(row[0]);
        t.value.push_back(row[value_col]);
    }
    return t;
}

AntennaSpec read_antenna(KeyReader& r, const std::string& prefix, AntennaSpec spec) {
    std::string kind = r.str(prefix + ".kind", "");
    if (!kind.empty()) {
        if (kind == "isotropic")
            spec.kind = AntennaKind::Isotropic;
        else if (kind == "dish")
            spec.kind = AntennaKind::Dish;
        else if (kind == "patch")
            spec.kind = AntennaKind::Patch;
        else
            throw ConfigError(r.line(prefix + ".kind"),
                              "antenna kind must be isotropic, dish or patch");
    }
    spec.gain_dbi = r.num(prefix + ".gain_dbi", spec.gain_dbi);
    spec.beamwidth_deg = r.num(prefix + ".beamwidth_deg", spec.beamwidth_deg);
    require(spec.beamwidth_deg > 0.0, r.line(prefix + ".beamwidth_deg"),
            "beamwidth_deg must be positive");
    return spec;
}

void read_ds_params(KeyReader& r, const std::string& prefix, DelaySpreadParams& p) {
    p.mu = r.num(prefix + ".mu", p.mu);
    p.sigma = r.num(prefix + ".sigma", p.sigma);
    p.alpha = r.num(prefix + ".alpha", p.alpha);
    p.gamma = r.num(prefix + ".gamma", p.gamma);
    p.d_lambda = r.num(prefix + ".d_lambda", p.d_lambda);
    p.elevation_scaled =
        r.integer(prefix + ".elevation_scaled", p.elevation_scaled ? 1 : 0) != 0;
    require(p.sigma >= 0.0, r.line(prefix + ".sigma"), "sigma must be non-negative");
    require(p.d_lambda > 0.0, r.line(prefix + ".d_lambda"), "d_lambda must be positive");
}

SatelliteSpec read_satellite(KeyReader& r, const ConfigDoc& doc, const std::string& id) {
    SatelliteSpec sat;
    sat.id = id;
    std::string base = "satellite." + id;

    const ConfigValue* eph = r.find(base + ".ephemeris");
    const ConfigValue* orbit = r.find(base + ".orbit");
    const ConfigValue* placement = r.find(base + ".placement");
    int sources = (eph != nullptr) + (orbit != nullptr) + (placement != nullptr);
    int anchor_line = eph ? eph->line : orbit ? orbit->line : placement ? placement->line : 0;
    if (anchor_line == 0) {
        // point at whatever key created the section
        auto under = doc.keys_under(base);
        if (!under.empty())
            anchor_line = doc.at(base + "." + under.front()).line;
    }
    require(sources == 1, anchor_line,
            "satellite '" + id + "' needs exactly one of ephemeris, orbit or placement");

    if (eph) {
        sat.source = SatelliteSpec::Source::Ephemeris;
        sat.ephemeris_path = eph->as_string();
    } else if (orbit) {
        auto v = orbit->as_numbers(4); // altitude_m, inclination_deg, raan_deg, phase_deg
        sat.source = SatelliteSpec::Source::Orbit;
        sat.altitude_m = v[0];
        sat.inclination_deg = v[1];
        sat.raan_deg = v[2];
        sat.phase_deg = v[3];
        require(sat.altitude_m > 0.0, orbit->line, "orbit altitude must be positive");
    } else {
        auto v = placement->as_numbers(4); // elev_deg, az_deg, vel_az_deg, altitude_m
        sat.source = SatelliteSpec::Source::Placement;
        sat.elevation_deg = v[0];
        sat.azimuth_deg = v[1];
        sat.vel_azimuth_deg = v[2];
        sat.altitude_m = v[3];
        require(sat.elevation_deg > 0.0 && sat.elevation_deg <= 90.0, placement->line,
                "placement elevation must be in (0, 90] degrees");
        require(sat.altitude_m > 0.0, placement->line, "placement altitude must be positive");
    }
    return sat;
}

} // namespace

ScenarioConfig load_scenario(const ConfigDoc& doc) {
    KeyReader r(doc);
    ScenarioConfig cfg;

    // Placeholder duration stats; production configs supply measured values.
    cfg.state_durations = {std::log(20.0), 0.5, std::log(10.0), 0.5, 100};
    cfg.plos.elevation_deg = {0.0};
    cfg.plos.value = {0.5};

    cfg.duration_s = r.num("duration_s", cfg.duration_s);
    require(cfg.duration_s > 0.0, r.line("duration_s"), "duration_s must be positive");

    cfg.elevation_mask_deg = r.num("elevation_mask_deg", cfg.elevation_mask_deg);
    require(cfg.elevation_mask_deg >= 0.0 && cfg.elevation_mask_deg < 90.0,
            r.line("elevation_mask_deg"), "elevation_mask_deg must be in [0, 90)");

    cfg.fc_hz = r.num("fc_hz", cfg.fc_hz);
    require(cfg.fc_hz > 0.0, r.line("fc_hz"), "fc_hz must be positive");

    cfg.sample_density = r.num("sample_density", cfg.sample_density);
    require(cfg.sample_density > 0.0, r.line("sample_density"),
            "sample_density must be positive");

    cfg.channel_update_rate_hz = r.num("channel_update_rate_hz", 0.0);
    require(cfg.channel_update_rate_hz >= 0.0, r.line("channel_update_rate_hz"),
            "channel_update_rate_hz must be non-negative");

    cfg.rx_speed_mps = r.num("rx_speed_mps", cfg.rx_speed_mps);
    require(cfg.rx_speed_mps >= 0.0, r.line("rx_speed_mps"), "rx_speed_mps must be >= 0");

    std::int64_t seed = r.integer("master_seed", static_cast<std::int64_t>(cfg.master_seed));
    require(seed >= 0, r.line("master_seed"), "master_seed must be non-negative");
    cfg.master_seed = static_cast<std::uint64_t>(seed);

    // state model
    cfg.state_durations.mu_good = r.num("state.mu_good", cfg.state_durations.mu_good);
    cfg.state_durations.sigma_good = r.num("state.sigma_good", cfg.state_durations.sigma_good);
    cfg.state_durations.mu_bad = r.num("state.mu_bad", cfg.state_durations.mu_bad);
    cfg.state_durations.sigma_bad = r.num("state.sigma_bad", cfg.state_durations.sigma_bad);
    require(cfg.state_durations.sigma_good >= 0.0, r.line("state.sigma_good"),
            "state.sigma_good must be non-negative");
    require(cfg.state_durations.sigma_bad >= 0.0, r.line("state.sigma_bad"),
            "state.sigma_bad must be non-negative");
    cfg.state_durations.redraw_limit =
        static_cast<int>(r.integer("state.redraw_limit", cfg.state_durations.redraw_limit));
    require(cfg.state_durations.redraw_limit >= 0, r.line("state.redraw_limit"),
            "state.redraw_limit must be non-negative");

    if (const ConfigValue* v = r.find("state.min_duration_table")) {
        auto rows = v->as_rows(3); // elevation_deg, good_min_m, bad_min_m
        for (const auto& row : rows)
            require(row[1] >= 0.0 && row[2] >= 0.0, v->line,
                    "minimum durations must be non-negative");
        cfg.min_durations.good = table_from_rows(rows, 1, v->line);
        cfg.min_durations.bad = table_from_rows(rows, 2, v->line);
    }
    if (const ConfigValue* v = r.find("state.plos_table")) {
        auto rows = v->as_rows(2); // elevation_deg, p_los
        for (const auto& row : rows)
            require(row[1] >= 0.0 && row[1] <= 1.0, v->line,
                    "LOS probabilities must be in [0, 1]");
        cfg.plos = table_from_rows(rows, 1, v->line);
    }

    // pathloss + budget
    auto read_pl = [&](const std::string& prefix, PathlossParams& p) {
        p.A = r.num(prefix + ".A", p.A);
        p.B = r.num(prefix + ".B", p.B);
        p.C = r.num(prefix + ".C", p.C);
        p.D = r.num(prefix + ".D", p.D);
    };
    read_pl("pathloss.scenario_overrides.los", cfg.pl_los);
    read_pl("pathloss.scenario_overrides.nlos", cfg.pl_nlos);
    cfg.atmospheric_db = r.num("pathloss.atmospheric_db", 0.0);
    require(cfg.atmospheric_db >= 0.0, r.line("pathloss.atmospheric_db"),
            "pathloss.atmospheric_db must be non-negative");

    cfg.link.tx_power_dbm = r.num("link.tx_power_dbm", cfg.link.tx_power_dbm);
    cfg.link.tx_gain_dbi = r.num("link.tx_gain_dbi", cfg.link.tx_gain_dbi);
    cfg.link.rx_gain_dbi = r.num("link.rx_gain_dbi", cfg.link.rx_gain_dbi);

    // large-scale parameters
    read_ds_params(r, "lsp.ds.los", cfg.ds_los);
    read_ds_params(r, "lsp.ds.nlos", cfg.ds_nlos);
    cfg.fading.k_mu_db = r.num("lsp.k.mu", cfg.fading.k_mu_db);
    cfg.fading.k_sigma_db = r.num("lsp.k.sigma", cfg.fading.k_sigma_db);
    cfg.fading.sf_sigma_los_db = r.num("lsp.sf.sigma_los", cfg.fading.sf_sigma_los_db);
    cfg.fading.sf_sigma_nlos_db = r.num("lsp.sf.sigma_nlos", cfg.fading.sf_sigma_nlos_db);
    require(cfg.fading.k_sigma_db >= 0.0, r.line("lsp.k.sigma"),
            "lsp.k.sigma must be non-negative");
    require(cfg.fading.sf_sigma_los_db >= 0.0, r.line("lsp.sf.sigma_los"),
            "lsp.sf.sigma_los must be non-negative");
    require(cfg.fading.sf_sigma_nlos_db >= 0.0, r.line("lsp.sf.sigma_nlos"),
            "lsp.sf.sigma_nlos must be non-negative");

    // synthesis
    cfg.synth.n_clusters_los =
        static_cast<int>(r.integer("synth.n_clusters_los", cfg.synth.n_clusters_los));
    cfg.synth.n_clusters_nlos =
        static_cast<int>(r.integer("synth.n_clusters_nlos", cfg.synth.n_clusters_nlos));
    cfg.synth.subpaths_per_cluster =
        static_cast<int>(r.integer("synth.subpaths_per_cluster", cfg.synth.subpaths_per_cluster));
    cfg.synth.r_tau_los = r.num("synth.r_tau_los", cfg.synth.r_tau_los);
    cfg.synth.r_tau_nlos = r.num("synth.r_tau_nlos", cfg.synth.r_tau_nlos);
    cfg.synth.per_cluster_shadow_sigma_db =
        r.num("synth.per_cluster_shadow_sigma_db", cfg.synth.per_cluster_shadow_sigma_db);
    cfg.synth.cluster_asa_deg = r.num("synth.cluster_asa_deg", cfg.synth.cluster_asa_deg);
    cfg.synth.overlap_fraction = r.num("synth.overlap_fraction", cfg.synth.overlap_fraction);
    cfg.synth.overlap_cap_s = r.num("synth.overlap_cap_s", cfg.synth.overlap_cap_s);
    cfg.synth.sample_density = cfg.sample_density;
    require(cfg.synth.n_clusters_los >= 1, r.line("synth.n_clusters_los"),
            "synth.n_clusters_los must be at least 1");
    require(cfg.synth.n_clusters_nlos >= 1, r.line("synth.n_clusters_nlos"),
            "synth.n_clusters_nlos must be at least 1");
    require(cfg.synth.subpaths_per_cluster >= 1, r.line("synth.subpaths_per_cluster"),
            "synth.subpaths_per_cluster must be at least 1");
    require(cfg.synth.r_tau_los > 1.0, r.line("synth.r_tau_los"),
            "synth.r_tau_los must exceed 1");
    require(cfg.synth.r_tau_nlos > 1.0, r.line("synth.r_tau_nlos"),
            "synth.r_tau_nlos must exceed 1");
    require(cfg.synth.per_cluster_shadow_sigma_db >= 0.0,
            r.line("synth.per_cluster_shadow_sigma_db"),
            "synth.per_cluster_shadow_sigma_db must be non-negative");
    require(cfg.synth.cluster_asa_deg >= 0.0, r.line("synth.cluster_asa_deg"),
            "synth.cluster_asa_deg must be non-negative");
    require(cfg.synth.overlap_fraction >= 0.0 && cfg.synth.overlap_fraction <= 1.0,
            r.line("synth.overlap_fraction"), "synth.overlap_fraction must be in [0, 1]");
    require(cfg.synth.overlap_cap_s > 0.0, r.line("synth.overlap_cap_s"),
            "synth.overlap_cap_s must be positive");

    cfg.tx_antenna = read_antenna(r, "antenna.tx", cfg.tx_antenna);
    cfg.rx_antenna = read_antenna(r, "antenna.rx", cfg.rx_antenna);

    // receiver
    cfg.rx.track_path = r.str("rx.track", "");
    cfg.rx.lat_deg = r.num("rx.lat_deg", cfg.rx.lat_deg);
    cfg.rx.lon_deg = r.num("rx.lon_deg", cfg.rx.lon_deg);
    cfg.rx.heading_deg = r.num("rx.heading_deg", cfg.rx.heading_deg);
    require(cfg.rx.lat_deg >= -90.0 && cfg.rx.lat_deg <= 90.0, r.line("rx.lat_deg"),
            "rx.lat_deg must be in [-90, 90]");

    // satellites: one section per id under [satellite.<ID>]
    std::set<std::string> sat_ids;
    for (const auto& key : doc.keys_under("satellite")) {
        auto dot = key.find('.');
        require(dot != std::string::npos, doc.at("satellite." + key).line,
                "satellite entries live under [satellite.<id>]");
        sat_ids.insert(key.substr(0, dot));
    }
    for (const auto& id : sat_ids)
        cfg.satellites.push_back(read_satellite(r, doc, id));

    // analysis defaults
    cfg.analysis.bandwidth_hz = r.num("analysis.bandwidth_hz", cfg.analysis.bandwidth_hz);
    cfg.analysis.nfft = static_cast<int>(r.integer("analysis.nfft", cfg.analysis.nfft));
    cfg.analysis.window_s = r.num("analysis.window_s", cfg.analysis.window_s);
    cfg.analysis.delay_threshold_db =
        r.num("analysis.delay_threshold_db", cfg.analysis.delay_threshold_db);
    require(cfg.analysis.bandwidth_hz > 0.0, r.line("analysis.bandwidth_hz"),
            "analysis.bandwidth_hz must be positive");
    require(cfg.analysis.nfft >= 2 && (cfg.analysis.nfft & (cfg.analysis.nfft - 1)) == 0,
            r.line("analysis.nfft"), "analysis.nfft must be a power of two");
    require(cfg.analysis.window_s > 0.0, r.line("analysis.window_s"),
            "analysis.window_s must be positive");
    require(cfg.analysis.delay_threshold_db > 0.0, r.line("analysis.delay_threshold_db"),
            "analysis.delay_threshold_db must be positive");

    r.expect_all_used();
    return cfg;
}

} // namespace skychan
