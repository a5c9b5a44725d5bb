// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "skychan/state_model.hpp"

namespace skychan {

/// Channel realization of one link: L paths by T snapshots of complex
/// coefficients and excess path delays, plus per-snapshot timestamps.
/// Coefficients absorb pathloss, shadow fading and antenna gains, so the
/// instantaneous received power (relative to the transmit power) is
/// sum_l |h[l,t]|^2.
struct ChannelTensor {
    std::size_t n_paths = 0;
    std::size_t n_snapshots = 0;
    double fc_hz = 0.0;
    double rate_hz = 0.0;

    std::vector<std::complex<double>> h; // [n_paths * n_snapshots], row-major
    std::vector<double> tau_s;           // [n_paths * n_snapshots], row-major
    std::vector<double> timestamps_s;    // [n_snapshots]

    std::string sat_id;
    std::vector<StateKind> scenario;     // per snapshot; may be empty

    // Drawn delay-spread target of the (final) segment and the mean
    // delay-spread MSE across merge overlaps, for diagnostics.
    double target_ds_s = 0.0;
    double ds_mse_db = std::numeric_limits<double>::quiet_NaN();

    std::complex<double>& at(std::size_t l, std::size_t t) { return h[l * n_snapshots + t]; }
    const std::complex<double>& at(std::size_t l, std::size_t t) const {
        return h[l * n_snapshots + t];
    }
    double& tau_at(std::size_t l, std::size_t t) { return tau_s[l * n_snapshots + t]; }
    double tau_at(std::size_t l, std::size_t t) const { return tau_s[l * n_snapshots + t]; }

    void resize(std::size_t paths, std::size_t snapshots) {
        n_paths = paths;
        n_snapshots = snapshots;
        h.assign(paths * snapshots, {0.0, 0.0});
        tau_s.assign(paths * snapshots, 0.0);
        timestamps_s.assign(snapshots, 0.0);
    }
};

} // namespace skychan
