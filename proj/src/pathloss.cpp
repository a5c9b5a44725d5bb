// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#include "skychan/pathloss.hpp"

#include <cmath>
#include <stdexcept>

namespace skychan {

PathlossParams PathlossParams::urban(Scenario s) {
    if (s == Scenario::Los)
        return {20.0, 32.55, 20.0, 0.0};
    return {20.05, 54.85, 27.9, -11.0};
}

double pathloss_db(const PathlossParams& p, double d3d_m, double fc_ghz,
                   double elevation_rad, double atmospheric_db) {
    if (d3d_m <= 0.0)
        throw std::invalid_argument("pathloss requires a positive slant range");
    if (fc_ghz <= 0.0)
        throw std::invalid_argument("pathloss requires a positive carrier frequency");
    if (elevation_rad <= 0.0)
        throw std::invalid_argument("pathloss requires a positive elevation angle");
    return p.A * std::log10(d3d_m) + p.B + p.C * std::log10(fc_ghz) +
           p.D * std::log10(elevation_rad) + atmospheric_db;
}

double received_power_dbm(const LinkBudget& budget, double pathloss_db) {
    return budget.tx_power_dbm + budget.tx_gain_dbi + budget.rx_gain_dbi - pathloss_db;
}

} // namespace skychan
