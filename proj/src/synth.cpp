// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#include "skychan/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "skychan/analysis.hpp"
#include "skychan/constants.hpp"

namespace skychan {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
} // namespace

// ---------- antennas ----------

double AntennaPattern::gain_linear(double offaxis_rad) const {
    double g0 = db_to_linear(boresight_gain_dbi);
    switch (kind) {
    case AntennaKind::Isotropic:
        return g0;
    case AntennaKind::Dish: {
        if (beamwidth_deg <= 0.0)
            throw std::invalid_argument("dish beamwidth must be positive");
        double theta_deg = std::abs(offaxis_rad) * 180.0 / kPi;
        double att_db = std::min(12.0 * (theta_deg / beamwidth_deg) * (theta_deg / beamwidth_deg),
                                 30.0);
        return g0 * db_to_linear(-att_db);
    }
    case AntennaKind::Patch: {
        double z = std::abs(offaxis_rad);
        if (z >= kPi / 2.0)
            return 0.0; // below the horizon
        double c = std::cos(z);
        return g0 * c * c;
    }
    }
    return g0;
}

double AntennaPattern::gain_dbi(const Vec3& direction, const Vec3& pointing) const {
    double angle = 0.0;
    if (kind != AntennaKind::Isotropic) {
        Vec3 d = direction.normalized();
        Vec3 p = pointing.normalized();
        angle = std::acos(std::clamp(d.dot(p), -1.0, 1.0));
    }
    double g = gain_linear(angle);
    if (g <= 0.0)
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(g);
}

// ---------- update rate ----------

double min_channel_update_rate(double path_length_m, double sample_density,
                               double fc_hz, double duration_s) {
    if (path_length_m < 0.0)
        throw std::invalid_argument("path length must be non-negative");
    if (sample_density <= 0.0)
        throw std::invalid_argument("sample density must be positive");
    if (fc_hz <= 0.0)
        throw std::invalid_argument("carrier frequency must be positive");
    if (duration_s <= 0.0)
        throw std::invalid_argument("duration must be positive");
    return (path_length_m / duration_s) * sample_density * fc_hz / constants::c;
}

// ---------- clusters ----------

std::vector<double> generate_cluster_delays(double ds_s, double r_tau, int count,
                                            RandomStream& rng) {
    if (ds_s <= 0.0)
        throw std::invalid_argument("delay spread must be positive");
    if (r_tau <= 1.0)
        throw std::invalid_argument("delay distribution proportionality factor must exceed 1");
    if (count < 1)
        throw std::invalid_argument("cluster count must be at least 1");

    std::vector<double> tau(static_cast<std::size_t>(count));
    for (auto& t : tau) {
        double u = 1.0 - rng.uniform(); // (0, 1]
        t = -r_tau * ds_s * std::log(u);
    }
    std::sort(tau.begin(), tau.end());
    double t0 = tau.front();
    for (auto& t : tau)
        t -= t0;
    return tau;
}

std::vector<double> generate_cluster_powers(std::vector<double>& delays_s, double ds_s,
                                            double r_tau, double shadow_sigma_db,
                                            std::optional<double> k_factor_db,
                                            RandomStream& rng) {
    if (delays_s.empty())
        throw std::invalid_argument("cluster delays are empty");
    if (ds_s <= 0.0)
        throw std::invalid_argument("delay spread must be positive");
    if (r_tau <= 1.0)
        throw std::invalid_argument("delay distribution proportionality factor must exceed 1");
    if (shadow_sigma_db < 0.0)
        throw std::invalid_argument("per-cluster shadowing sigma must be non-negative");

    std::vector<double> p(delays_s.size());
    double sum = 0.0;
    for (std::size_t l = 0; l < p.size(); ++l) {
        double zeta = shadow_sigma_db * rng.normal();
        p[l] = std::exp(-delays_s[l] * (r_tau - 1.0) / (r_tau * ds_s)) *
               std::pow(10.0, -zeta / 10.0);
        sum += p[l];
    }
    for (auto& v : p)
        v /= sum;

    if (k_factor_db) {
        // Shrink the multipath total to 1/(K+1) and put the direct path,
        // power K/(K+1), in front at zero delay.
        double k_lin = db_to_linear(*k_factor_db);
        for (auto& v : p)
            v /= (k_lin + 1.0);
        p.insert(p.begin(), k_lin / (k_lin + 1.0));
        delays_s.insert(delays_s.begin(), 0.0);
    }

    // Pin the profile's rms delay spread to the drawn value exactly. Delays
    // start at 0, so a pure scale keeps the first arrival in place.
    double current = rms_delay_spread(p, delays_s);
    if (current > 0.0) {
        double scale = ds_s / current;
        for (auto& t : delays_s)
            t *= scale;
    }
    return p;
}

std::vector<double> subpath_offsets(int m) {
    if (m < 1)
        throw std::invalid_argument("sub-path count must be at least 1");
    if (m == 1)
        return {0.0};
    if (m == 20) {
        // Fixed symmetric set with unit rms angle spread.
        return {0.0447, -0.0447, 0.1413, -0.1413, 0.2492, -0.2492, 0.3715, -0.3715,
                0.5129, -0.5129, 0.6797, -0.6797, 0.8844, -0.8844, 1.1481, -1.1481,
                1.5195, -1.5195, 2.1551, -2.1551};
    }
    // Equal-probability Laplacian quantile pairs (plus a center ray when m is
    // odd), normalized to unit rms.
    std::vector<double> off;
    off.reserve(static_cast<std::size_t>(m));
    int pairs = m / 2;
    for (int i = 1; i <= pairs; ++i) {
        double q = -std::log(1.0 - (2.0 * i - 1.0) / (2.0 * pairs + (m % 2)));
        off.push_back(q);
        off.push_back(-q);
    }
    if (m % 2 == 1)
        off.push_back(0.0);
    double ms = 0.0;
    for (double v : off)
        ms += v * v;
    double norm = std::sqrt(ms / static_cast<double>(m));
    for (auto& v : off)
        v /= norm;
    return off;
}

void synthesize_subpaths(ClusterSet& cs, int subpaths_per_cluster, double cluster_asa_deg,
                         double los_azimuth_rad, RandomStream& rng) {
    if (cluster_asa_deg < 0.0)
        throw std::invalid_argument("cluster angle spread must be non-negative");
    std::size_t n = cs.size();
    if (n == 0)
        throw std::invalid_argument("cluster set is empty");

    std::vector<double> offsets = subpath_offsets(subpaths_per_cluster);
    double asa_rad = cluster_asa_deg * kPi / 180.0;
    std::size_t m = offsets.size();

    cs.subpath_phase_rad.assign(n, std::vector<double>(m));
    cs.subpath_aoa_rad.assign(n, std::vector<double>(m));

    for (std::size_t l = 0; l < n; ++l) {
        bool direct = cs.has_direct && l == 0;
        double cluster_az = direct ? los_azimuth_rad : rng.uniform(0.0, kTwoPi);
        for (std::size_t i = 0; i < m; ++i) {
            cs.subpath_phase_rad[l][i] = rng.uniform(0.0, kTwoPi);
            cs.subpath_aoa_rad[l][i] = direct ? cluster_az : cluster_az + asa_rad * offsets[i];
        }
    }
}

ClusterSet make_cluster_set(Scenario sc, double ds_s, std::optional<double> k_factor_db,
                            double los_azimuth_rad, const SynthConfig& cfg, RandomStream& rng) {
    if (sc == Scenario::Los && !k_factor_db)
        throw std::invalid_argument("direct-path scenario needs a K-factor");
    if (sc == Scenario::Nlos && k_factor_db)
        throw std::invalid_argument("obstructed scenario must not carry a K-factor");

    int count = sc == Scenario::Los ? cfg.n_clusters_los : cfg.n_clusters_nlos;
    double r_tau = sc == Scenario::Los ? cfg.r_tau_los : cfg.r_tau_nlos;

    ClusterSet cs;
    cs.delays_s = generate_cluster_delays(ds_s, r_tau, count, rng);
    cs.powers = generate_cluster_powers(cs.delays_s, ds_s, r_tau,
                                        cfg.per_cluster_shadow_sigma_db, k_factor_db, rng);
    cs.has_direct = k_factor_db.has_value();
    synthesize_subpaths(cs, cfg.subpaths_per_cluster, cfg.cluster_asa_deg,
                        los_azimuth_rad, rng);
    return cs;
}

// ---------- link series ----------

LinkSeries sample_link_series(const Trajectory& sat, const Trajectory& rx,
                              double fc_hz, double rate_hz, double t0_s, double duration_s) {
    if (fc_hz <= 0.0 || rate_hz <= 0.0 || duration_s <= 0.0)
        throw std::invalid_argument("carrier, rate and duration must be positive");

    auto n = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
    if (n < 1)
        throw std::invalid_argument("duration too short for the given update rate");

    LinkSeries s;
    s.fc_hz = fc_hz;
    s.rate_hz = rate_hz;
    s.t_s.resize(n);
    s.geo.resize(n);
    s.sat_speed_mps.resize(n);
    s.rx_speed_mps.resize(n);
    s.rx_heading_rad.resize(n);
    s.rx_distance_m.resize(n);

    double d0 = rx.distance_at(t0_s);
    for (std::size_t k = 0; k < n; ++k) {
        double t = t0_s + static_cast<double>(k) / rate_hz;
        Vec3 sp = sat.position_at(t), sv = sat.velocity_at(t);
        Vec3 rp = rx.position_at(t), rv = rx.velocity_at(t);
        s.t_s[k] = t;
        s.geo[k] = compute_link_geometry(sp, sv, rp, rv);
        s.sat_speed_mps[k] = sv.norm();
        s.rx_speed_mps[k] = rv.norm();
        s.rx_distance_m[k] = rx.distance_at(t) - d0;

        // Heading of the receiver's motion in its local sky (azimuth of the
        // velocity vector); 0 for a stationary receiver.
        double speed = rv.norm();
        if (speed < 1e-12) {
            s.rx_heading_rad[k] = 0.0;
        } else {
            Vec3 up = rp.normalized();
            Vec3 z{0.0, 0.0, 1.0};
            Vec3 east = z.cross(up);
            double en = east.norm();
            east = en < 1e-12 ? Vec3{0.0, 1.0, 0.0} : east / en;
            Vec3 north = up.cross(east);
            s.rx_heading_rad[k] = std::atan2(rv.dot(east), rv.dot(north));
        }
    }
    return s;
}

// ---------- merge ----------

double ds_mse(const std::vector<double>& ds_values_s, double ds_target_s) {
    if (ds_values_s.empty())
        throw std::invalid_argument("delay-spread series is empty");
    double acc = 0.0;
    for (double v : ds_values_s) {
        double e = ds_target_s - v;
        acc += e * e;
    }
    double mse = acc / static_cast<double>(ds_values_s.size());
    if (mse <= 0.0)
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(mse);
}

ChannelTensor merge_segments(const ChannelTensor& a, const ChannelTensor& b,
                             std::size_t overlap_snapshots) {
    if (a.fc_hz != b.fc_hz || a.rate_hz != b.rate_hz)
        throw std::invalid_argument("cannot merge tensors with different carrier or rate");
    if (overlap_snapshots < 1)
        throw std::invalid_argument("merge overlap must be at least one snapshot");
    if (overlap_snapshots > a.n_snapshots || overlap_snapshots > b.n_snapshots)
        throw std::invalid_argument("merge overlap exceeds a tensor span");

    std::size_t ta = a.n_snapshots, tb = b.n_snapshots, ov = overlap_snapshots;
    std::size_t seam = ta - ov; // column where b starts
    if (std::abs(a.timestamps_s[seam] - b.timestamps_s[0]) > 0.5 / a.rate_hz)
        throw std::invalid_argument("merge tensors are not aligned in time");

    // A continuation (same rows, same content over the shared window) merges
    // row-wise with linear weights, which reproduces identical input exactly;
    // independent segments concatenate rows with sqrt power weights.
    bool continuation = a.n_paths == b.n_paths;
    if (continuation) {
        for (std::size_t l = 0; l < a.n_paths && continuation; ++l)
            for (std::size_t i = 0; i < ov; ++i) {
                if (a.at(l, seam + i) != b.at(l, i) || a.tau_at(l, seam + i) != b.tau_at(l, i)) {
                    continuation = false;
                    break;
                }
            }
    }

    ChannelTensor out;
    out.fc_hz = a.fc_hz;
    out.rate_hz = a.rate_hz;
    out.sat_id = a.sat_id.empty() ? b.sat_id : a.sat_id;
    out.target_ds_s = b.target_ds_s;

    std::size_t t_out = ta + tb - ov;
    auto weight = [ov](std::size_t i) {
        return (static_cast<double>(i) + 1.0) / (static_cast<double>(ov) + 1.0);
    };

    if (continuation) {
        out.resize(a.n_paths, t_out);
        for (std::size_t l = 0; l < a.n_paths; ++l) {
            for (std::size_t t = 0; t < seam; ++t) {
                out.at(l, t) = a.at(l, t);
                out.tau_at(l, t) = a.tau_at(l, t);
            }
            for (std::size_t i = 0; i < ov; ++i) {
                double w = weight(i);
                out.at(l, seam + i) = a.at(l, seam + i) * (1.0 - w) + b.at(l, i) * w;
                out.tau_at(l, seam + i) = a.tau_at(l, seam + i);
            }
            for (std::size_t t = ov; t < tb; ++t) {
                out.at(l, seam + t) = b.at(l, t);
                out.tau_at(l, seam + t) = b.tau_at(l, t);
            }
        }
    } else {
        out.resize(a.n_paths + b.n_paths, t_out);
        for (std::size_t l = 0; l < a.n_paths; ++l) {
            for (std::size_t t = 0; t < ta; ++t) {
                double w = t >= seam ? std::sqrt(1.0 - weight(t - seam)) : 1.0;
                out.at(l, t) = a.at(l, t) * w;
                out.tau_at(l, t) = a.tau_at(l, t);
            }
        }
        for (std::size_t l = 0; l < b.n_paths; ++l) {
            for (std::size_t t = 0; t < tb; ++t) {
                double w = t < ov ? std::sqrt(weight(t)) : 1.0;
                out.at(a.n_paths + l, seam + t) = b.at(l, t) * w;
                out.tau_at(a.n_paths + l, seam + t) = b.tau_at(l, t);
            }
        }
    }

    for (std::size_t t = 0; t < ta; ++t)
        out.timestamps_s[t] = a.timestamps_s[t];
    for (std::size_t t = ov; t < tb; ++t)
        out.timestamps_s[seam + t] = b.timestamps_s[t];

    if (!a.scenario.empty() && !b.scenario.empty()) {
        out.scenario.resize(t_out);
        for (std::size_t t = 0; t < seam; ++t)
            out.scenario[t] = a.scenario[t];
        for (std::size_t t = 0; t < tb; ++t)
            out.scenario[seam + t] = b.scenario[t];
    }

    if (out.target_ds_s > 0.0) {
        std::vector<double> ds(ov);
        for (std::size_t i = 0; i < ov; ++i) {
            std::vector<double> p(out.n_paths), d(out.n_paths);
            for (std::size_t l = 0; l < out.n_paths; ++l) {
                p[l] = std::norm(out.at(l, seam + i));
                d[l] = out.tau_at(l, seam + i);
            }
            ds[i] = rms_delay_spread(p, d);
        }
        out.ds_mse_db = ds_mse(ds, out.target_ds_s);
    }
    return out;
}

// ---------- assembly ----------

namespace {

struct SegmentSpan {
    std::size_t begin = 0;       // first snapshot
    std::size_t end = 0;         // one past the owned range
    std::size_t extended_end = 0; // owned range plus crossfade tail
    const SegmentRealization* real = nullptr;
};

ChannelTensor synthesize_segment(const AssembleInputs& in, const SegmentSpan& span) {
    const LinkSeries& s = *in.series;
    const ClusterSet& cs = span.real->clusters;
    const LspDraw& lsp = span.real->lsp;
    Scenario sc = span.real->scenario;

    std::size_t t0 = span.begin, t1 = span.extended_end;
    std::size_t nt = t1 - t0;
    std::size_t nl = cs.size();
    std::size_t m = cs.subpath_phase_rad.empty() ? 0 : cs.subpath_phase_rad[0].size();
    if (m == 0)
        throw std::invalid_argument("cluster set has no synthesized sub-paths");

    ChannelTensor out;
    out.resize(nl, nt);
    out.fc_hz = s.fc_hz;
    out.rate_hz = s.rate_hz;
    out.sat_id = in.sat_id;
    out.target_ds_s = lsp.delay_spread_s;
    out.scenario.assign(nt, sc == Scenario::Los ? StateKind::Good : StateKind::Bad);

    // Doppler terms anchored at the segment start.
    const LinkGeometry& g0 = s.geo[t0];
    double sat_radial = (g0.sat_zero_speed ? 0.0 : s.sat_speed_mps[t0]) *
                        std::cos(g0.theta_sat_rad);
    double v_rx = g0.rx_zero_speed ? 0.0 : s.rx_speed_mps[t0];
    double heading = s.rx_heading_rad[t0];
    double fc_over_c = s.fc_hz / constants::c;
    double direct_df = fc_over_c * g0.radial_velocity_mps;

    // Per-snapshot linear budget shared by all rows of this segment.
    const PathlossParams& plp = sc == Scenario::Los ? in.pl_los : in.pl_nlos;
    double fc_ghz = s.fc_hz / 1e9;
    std::vector<double> budget(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        const LinkGeometry& g = s.geo[t0 + k];
        double pl_db = pathloss_db(plp, g.d3d_m, fc_ghz, g.elevation_rad, in.atmospheric_db);
        // Transmit dish is steered at the receiver each snapshot, so its
        // off-axis angle is identically zero; the receive antenna sees the
        // satellite at zenith angle pi/2 - elevation.
        double gtx = in.tx_antenna.gain_linear(0.0);
        double grx = in.rx_antenna.gain_linear(kPi / 2.0 - g.elevation_rad);
        budget[k] = gtx * grx * std::pow(10.0, (-pl_db + lsp.shadow_fading_db) / 10.0);
    }

    // Sub-path phasors advance by a fixed per-snapshot rotation.
    std::vector<std::complex<double>> cur(nl * m), step(nl * m);
    for (std::size_t l = 0; l < nl; ++l) {
        bool direct = cs.has_direct && l == 0;
        for (std::size_t i = 0; i < m; ++i) {
            double df = direct
                            ? direct_df
                            : fc_over_c * (sat_radial +
                                           v_rx * std::cos(cs.subpath_aoa_rad[l][i] - heading));
            cur[l * m + i] = std::polar(1.0, cs.subpath_phase_rad[l][i]);
            step[l * m + i] = std::polar(1.0, kTwoPi * df / s.rate_hz);
        }
    }

    double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::size_t k = 0; k < nt; ++k) {
        out.timestamps_s[k] = s.t_s[t0 + k];
        for (std::size_t l = 0; l < nl; ++l) {
            bool direct = cs.has_direct && l == 0;
            double amp = std::sqrt(cs.powers[l] * budget[k]);
            std::complex<double> v;
            if (direct) {
                v = cur[l * m]; // single unfaded ray
            } else {
                std::complex<double> acc{0.0, 0.0};
                for (std::size_t i = 0; i < m; ++i)
                    acc += cur[l * m + i];
                v = acc * inv_sqrt_m;
            }
            out.at(l, k) = v * amp;
            out.tau_at(l, k) = cs.delays_s[l];
        }
        for (std::size_t j = 0; j < nl * m; ++j)
            cur[j] *= step[j];
    }
    return out;
}

} // namespace

ChannelTensor assemble_channel(const AssembleInputs& in) {
    if (!in.series || in.series->size() == 0)
        throw std::invalid_argument("assemble_channel needs a sampled link series");
    if (!in.states || in.states->segments.empty())
        throw std::invalid_argument("assemble_channel needs a state sequence");
    if (in.segments.size() != in.states->segments.size())
        throw std::invalid_argument("one realization per state segment is required");

    const LinkSeries& s = *in.series;
    std::size_t t_total = s.size();

    // Map state segments (meters along the receiver track) to snapshot spans;
    // a transition mid-snapshot takes effect at the next snapshot boundary.
    std::vector<SegmentSpan> spans;
    std::size_t cursor = 0;
    for (std::size_t j = 0; j < in.segments.size(); ++j) {
        const StateSegment& seg = in.states->segments[j];
        std::size_t begin = cursor;
        if (j > 0) {
            while (begin < t_total && s.rx_distance_m[begin] < seg.start_m - 1e-9)
                ++begin;
        }
        std::size_t end = t_total;
        if (j + 1 < in.segments.size()) {
            double next_start = seg.start_m + seg.length_m;
            end = begin;
            while (end < t_total && s.rx_distance_m[end] < next_start - 1e-9)
                ++end;
        }
        cursor = end;
        if (end > begin)
            spans.push_back({begin, end, end, &in.segments[j]});
    }
    if (spans.empty())
        throw std::invalid_argument("no state segment covers the simulated window");
    spans.back().end = t_total;
    spans.back().extended_end = t_total;

    // Crossfade tail: a fraction of the shorter neighbor, capped in seconds,
    // never past the incoming segment's own span.
    for (std::size_t j = 0; j + 1 < spans.size(); ++j) {
        std::size_t len_a = spans[j].end - spans[j].begin;
        std::size_t len_b = spans[j + 1].end - spans[j + 1].begin;
        auto ov = static_cast<std::size_t>(
            std::floor(in.cfg.overlap_fraction * static_cast<double>(std::min(len_a, len_b))));
        ov = std::min(ov, static_cast<std::size_t>(std::floor(in.cfg.overlap_cap_s * s.rate_hz)));
        ov = std::max<std::size_t>(ov, 1);
        ov = std::min(ov, len_b);
        spans[j].extended_end = spans[j].end + ov;
    }

    ChannelTensor acc = synthesize_segment(in, spans[0]);
    double mse_linear = 0.0;
    std::size_t merges = 0;
    for (std::size_t j = 1; j < spans.size(); ++j) {
        ChannelTensor next = synthesize_segment(in, spans[j]);
        std::size_t ov = spans[j - 1].extended_end - spans[j - 1].end;
        acc = merge_segments(acc, next, ov);
        if (std::isfinite(acc.ds_mse_db)) {
            mse_linear += std::pow(10.0, acc.ds_mse_db / 10.0);
            ++merges;
        } else if (acc.ds_mse_db == -std::numeric_limits<double>::infinity()) {
            ++merges;
        }
    }
    if (merges > 0) {
        acc.ds_mse_db = mse_linear > 0.0
                            ? 10.0 * std::log10(mse_linear / static_cast<double>(merges))
                            : -std::numeric_limits<double>::infinity();
    }
    return acc;
}

} // namespace skychan
