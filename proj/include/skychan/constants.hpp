// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#pragma once

namespace skychan::constants {

// Speed of light in vacuum [m/s]
inline constexpr double c = 299'792'458.0;

// Mean Earth radius, spherical model [m]
inline constexpr double earth_radius = 6'371'000.0;

// Standard gravitational parameter of Earth [m^3/s^2]
inline constexpr double mu_earth = 3.986004418e14;

} // namespace skychan::constants
