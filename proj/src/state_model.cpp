// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#include "skychan/state_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace skychan {

double ElevationTable::at(double elev_deg) const {
    if (elevation_deg.empty())
        throw std::invalid_argument("elevation table is empty");
    if (elevation_deg.size() != value.size())
        throw std::invalid_argument("elevation table rows are ragged");
    if (elev_deg <= elevation_deg.front())
        return value.front();
    if (elev_deg >= elevation_deg.back())
        return value.back();
    std::size_t i = 1;
    while (elevation_deg[i] < elev_deg)
        ++i;
    double w = (elev_deg - elevation_deg[i - 1]) / (elevation_deg[i] - elevation_deg[i - 1]);
    return value[i - 1] + (value[i] - value[i - 1]) * w;
}

MinDurationTable MinDurationTable::defaults() {
    // Urban dual-mobile minimum state durations [m] at 20..70 deg elevation.
    MinDurationTable t;
    t.good.elevation_deg = {20.0, 30.0, 45.0, 60.0, 70.0};
    t.good.value = {3.9889, 7.3174, 10.0, 10.0, 118.3312};
    t.bad.elevation_deg = {20.0, 30.0, 45.0, 60.0, 70.0};
    t.bad.value = {10.3114, 5.7276, 6.0, 1.9126, 4.8569};
    return t;
}

double MinDurationTable::at(StateKind state, double elev_deg) const {
    return (state == StateKind::Good ? good : bad).at(elev_deg);
}

StateKind StateSequence::state_at(double distance_m) const {
    if (segments.empty())
        throw std::invalid_argument("state sequence is empty");
    for (const auto& s : segments)
        if (distance_m < s.start_m + s.length_m)
            return s.state;
    return segments.back().state;
}

double lognormal_pdf(double x, double mu, double sigma) {
    if (x <= 0.0)
        throw std::invalid_argument("lognormal density requires x > 0");
    if (sigma <= 0.0)
        throw std::invalid_argument("lognormal density requires sigma > 0");
    double z = (std::log(x) - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * x * std::sqrt(2.0 * std::numbers::pi));
}

StateKind initial_state(double elev_deg, const ElevationTable& plos, double u) {
    if (u < 0.0 || u >= 1.0)
        throw std::invalid_argument("initial_state draw must lie in [0, 1)");
    double p = plos.at(elev_deg);
    return u < p ? StateKind::Good : StateKind::Bad;
}

double sample_duration(StateKind state, double elev_deg, const DurationParams& params,
                       const MinDurationTable& min_durations, RandomStream& rng) {
    double mu = state == StateKind::Good ? params.mu_good : params.mu_bad;
    double sigma = state == StateKind::Good ? params.sigma_good : params.sigma_bad;
    if (sigma < 0.0)
        throw std::invalid_argument("duration sigma must be non-negative");
    double min_dur = min_durations.at(state, elev_deg);

    double x = std::exp(mu + sigma * rng.normal());
    for (int attempt = 0; attempt < params.redraw_limit && x < min_dur; ++attempt)
        x = std::exp(mu + sigma * rng.normal());
    return x < min_dur ? min_dur : x;
}

StateSequence build_state_sequence(double track_length_m,
                                   const std::function<double(double)>& elevation_deg_at,
                                   const ElevationTable& plos,
                                   const DurationParams& params,
                                   const MinDurationTable& min_durations,
                                   RandomStream& rng) {
    if (track_length_m <= 0.0)
        throw std::invalid_argument("track length must be positive");

    StateSequence seq;
    seq.track_length_m = track_length_m;

    StateKind state = initial_state(elevation_deg_at(0.0), plos, rng.uniform());
    double pos = 0.0;
    while (pos < track_length_m) {
        double dur = sample_duration(state, elevation_deg_at(pos), params, min_durations, rng);
        if (pos + dur > track_length_m)
            dur = track_length_m - pos; // truncate the final segment at the track end
        seq.segments.push_back({state, pos, dur});
        pos += dur;
        state = state == StateKind::Good ? StateKind::Bad : StateKind::Good;
    }
    return seq;
}

} // namespace skychan
