// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "skychan/rng.hpp"

namespace skychan {

enum class StateKind { Good, Bad }; // Good = direct path present, Bad = obstructed

/// Lognormal state-duration parameters; durations are measured in meters
/// traveled along the receiver track. mu/sigma act on ln(duration).
struct DurationParams {
    double mu_good = 0.0;
    double sigma_good = 0.0;
    double mu_bad = 0.0;
    double sigma_bad = 0.0;
    int redraw_limit = 100;
};

/// Elevation-indexed tables: each row is (elevation_deg, value). Rows must be
/// sorted by elevation; lookups interpolate linearly and clamp outside the
/// covered range.
struct ElevationTable {
    std::vector<double> elevation_deg;
    std::vector<double> value;

    double at(double elev_deg) const;
};

/// Minimum state duration [m] per state and elevation. Defaults carry the
/// measured urban dual-mobile values for 20..70 degrees.
struct MinDurationTable {
    ElevationTable good;
    ElevationTable bad;

    static MinDurationTable defaults();
    double at(StateKind state, double elev_deg) const;
};

/// One state segment along the receiver track.
struct StateSegment {
    StateKind state = StateKind::Good;
    double start_m = 0.0;
    double length_m = 0.0;
};

struct StateSequence {
    std::vector<StateSegment> segments;
    double track_length_m = 0.0;

    StateKind state_at(double distance_m) const;
};

/// Lognormal density (1 / (sigma x sqrt(2 pi))) exp(-(ln x - mu)^2 / (2 sigma^2)).
/// x must be positive, sigma positive.
double lognormal_pdf(double x, double mu, double sigma);

/// First state by LOS-probability coin flip: Good iff u < p_los(elevation).
/// `plos` must be non-empty; u in [0, 1).
StateKind initial_state(double elev_deg, const ElevationTable& plos, double u);

/// One state duration [m]: draw exp(mu + sigma N(0,1)); while below the
/// minimum, redraw (up to redraw_limit times), then clamp to the minimum.
double sample_duration(StateKind state, double elev_deg, const DurationParams& params,
                       const MinDurationTable& min_durations, RandomStream& rng);

/// Alternating Good/Bad segments covering [0, track_length_m]. Durations are
/// drawn at each segment's starting elevation; the last segment is truncated
/// at the track end.
StateSequence build_state_sequence(double track_length_m,
                                   const std::function<double(double)>& elevation_deg_at,
                                   const ElevationTable& plos,
                                   const DurationParams& params,
                                   const MinDurationTable& min_durations,
                                   RandomStream& rng);

} // namespace skychan
