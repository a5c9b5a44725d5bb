// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#pragma once

#include <optional>
#include <vector>

#include "skychan/channel_tensor.hpp"
#include "skychan/geometry.hpp"
#include "skychan/lsp.hpp"
#include "skychan/pathloss.hpp"
#include "skychan/rng.hpp"
#include "skychan/state_model.hpp"

namespace skychan {

/// Cluster/sub-path synthesis knobs.
struct SynthConfig {
    int n_clusters_los = 12;
    int n_clusters_nlos = 20;
    int subpaths_per_cluster = 20;
    double r_tau_los = 2.5;
    double r_tau_nlos = 2.3;
    double per_cluster_shadow_sigma_db = 3.0;
    double cluster_asa_deg = 15.0;   // azimuth spread applied to the sub-path offsets
    double sample_density = 5.0;     // snapshots per carrier half-wavelength of motion
    double overlap_fraction = 0.25;  // crossfade length vs the shorter segment
    double overlap_cap_s = 0.1;
};

/// One multipath cluster set: excess delays (first arrival at 0), normalized
/// powers, and per-sub-path phases and azimuth angles of arrival. When
/// `has_direct` is set, row 0 is the unfaded direct path.
struct ClusterSet {
    std::vector<double> delays_s;
    std::vector<double> powers;
    bool has_direct = false;
    std::vector<std::vector<double>> subpath_phase_rad;
    std::vector<std::vector<double>> subpath_aoa_rad;

    std::size_t size() const { return delays_s.size(); }
};

enum class AntennaKind { Isotropic, Dish, Patch };

/// Transmit/receive element pattern. `beamwidth_deg` is the dish roll-off
/// scale: the parabolic attenuation min(12 (theta/beamwidth)^2, 30) dB.
/// The patch is cos^2(zenith)-shaped with zero gain below the horizon.
struct AntennaPattern {
    AntennaKind kind = AntennaKind::Isotropic;
    double boresight_gain_dbi = 0.0;
    double beamwidth_deg = 10.0;

    /// Linear power gain at `offaxis_rad` from boresight (dish) or zenith
    /// angle (patch); ignored for isotropic.
    double gain_linear(double offaxis_rad) const;

    /// Gain toward `direction` for an antenna oriented along `pointing`.
    double gain_dbi(const Vec3& direction, const Vec3& pointing) const;
};

/// Smallest channel update rate [Hz] that keeps `sample_density` snapshots
/// per half carrier wavelength of relative motion along a path of
/// `path_length_m` covered in `duration_s`.
double min_channel_update_rate(double path_length_m, double sample_density,
                               double fc_hz, double duration_s);

/// Exponential cluster delays: -r_tau * ds * ln(u), sorted ascending with the
/// minimum subtracted, so delays[0] == 0. Not yet rescaled; the rescale to the
/// exact target delay spread happens once powers exist (generate_cluster_powers).
std::vector<double> generate_cluster_delays(double ds_s, double r_tau, int count,
                                            RandomStream& rng);

/// Single-slope cluster powers exp(-tau (r_tau - 1) / (r_tau ds)) with
/// per-cluster lognormal shadowing, normalized to sum 1. With a K-factor the
/// multipath total shrinks to 1/(K+1) and an unfaded direct path of power
/// K/(K+1) is inserted at delay 0 in front. `delays_s` is updated in place:
/// the delays are scaled so the resulting set's rms delay spread equals ds_s
/// to machine precision.
std::vector<double> generate_cluster_powers(std::vector<double>& delays_s, double ds_s,
                                            double r_tau, double shadow_sigma_db,
                                            std::optional<double> k_factor_db,
                                            RandomStream& rng);

/// Unit-rms symmetric sub-path angle offsets for m rays (the fixed 20-element
/// set for m == 20; 0 for m == 1).
std::vector<double> subpath_offsets(int m);

/// Draw per-sub-path phases (uniform) and angles of arrival: cluster azimuths
/// uniform, except the direct path which uses the geometric LOS azimuth;
/// sub-paths spread around the cluster azimuth by cluster_asa_deg times the
/// fixed offsets.
void synthesize_subpaths(ClusterSet& cs, int subpaths_per_cluster, double cluster_asa_deg,
                         double los_azimuth_rad, RandomStream& rng);

/// Full cluster set for one segment.
ClusterSet make_cluster_set(Scenario sc, double ds_s, std::optional<double> k_factor_db,
                            double los_azimuth_rad, const SynthConfig& cfg, RandomStream& rng);

/// Per-snapshot link geometry sampled at the channel update rate.
struct LinkSeries {
    double fc_hz = 0.0;
    double rate_hz = 0.0;
    std::vector<double> t_s;
    std::vector<LinkGeometry> geo;
    std::vector<double> sat_speed_mps;
    std::vector<double> rx_speed_mps;
    std::vector<double> rx_heading_rad;  // azimuth of receiver motion
    std::vector<double> rx_distance_m;   // cumulative along-track distance

    std::size_t size() const { return t_s.size(); }
};

LinkSeries sample_link_series(const Trajectory& sat, const Trajectory& rx,
                              double fc_hz, double rate_hz, double t0_s, double duration_s);

/// Large-scale and small-scale realization of one state segment.
struct SegmentRealization {
    Scenario scenario = Scenario::Los;
    LspDraw lsp;
    ClusterSet clusters;
};

struct AssembleInputs {
    const LinkSeries* series = nullptr;
    const StateSequence* states = nullptr;
    std::vector<SegmentRealization> segments; // one per state segment
    AntennaPattern tx_antenna;
    AntennaPattern rx_antenna;
    PathlossParams pl_los = PathlossParams::urban(Scenario::Los);
    PathlossParams pl_nlos = PathlossParams::urban(Scenario::Nlos);
    double atmospheric_db = 0.0;
    SynthConfig cfg;
    std::string sat_id;
};

/// Assemble the channel tensor of one link. Per segment, every cluster row is
///   h[l,t] = sqrt(P_l g(t)) / sqrt(M) * sum_m exp(j (phi_lm + 2 pi df_lm (t - t_seg)))
/// with g(t) the linear budget (antenna gains, pathloss, shadow fading) and
/// df_lm the satellite radial Doppler plus the receiver-motion Doppler at the
/// sub-path's angle of arrival, both anchored at the segment start. The direct
/// path uses the exact geometric Doppler and no sub-path averaging. Segments
/// crossfade over an overlap window via merge_segments.
ChannelTensor assemble_channel(const AssembleInputs& in);

/// Power-conserving crossfade of two segment tensors that overlap by
/// `overlap_snapshots` (tensor_b starts at tensor_a's tail). Independent
/// segments get their rows concatenated with sqrt(1-w)/sqrt(w) amplitude
/// weights; if the overlap content is element-wise identical (the same
/// segment continuing) the rows collapse pairwise with linear weights, which
/// is exact for fully correlated content. Reports the delay-spread MSE across
/// the overlap against tensor_b's target as a diagnostic.
ChannelTensor merge_segments(const ChannelTensor& a, const ChannelTensor& b,
                             std::size_t overlap_snapshots);

/// 10 log10(mean squared error) between a delay-spread series and its target;
/// -inf when the series matches exactly.
double ds_mse(const std::vector<double>& ds_values_s, double ds_target_s);

} // namespace skychan
