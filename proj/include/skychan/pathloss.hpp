// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#pragma once

namespace skychan {

enum class Scenario { Los, Nlos };

/// Log-distance pathloss coefficients:
///   PL = A log10(d3d) + B + C log10(fc_GHz) + D log10(elevation_rad) + atmospheric
/// Defaults carry the urban satellite-to-ground values for both scenarios.
struct PathlossParams {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double D = 0.0;

    static PathlossParams urban(Scenario s);
};

struct LinkBudget {
    double tx_power_dbm = 0.0;
    double tx_gain_dbi = 0.0;
    double rx_gain_dbi = 0.0;
};

/// Pathloss [dB] at slant range d3d [m], carrier fc [GHz], elevation [rad].
/// `atmospheric_db` is an additive extra loss (0 unless configured).
/// All of d3d, fc and elevation must be positive (they enter through log10).
double pathloss_db(const PathlossParams& p, double d3d_m, double fc_ghz,
                   double elevation_rad, double atmospheric_db = 0.0);

/// Received power [dBm] = tx power + antenna gains - pathloss.
double received_power_dbm(const LinkBudget& budget, double pathloss_db);

} // namespace skychan
