// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace skychan {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const;
};

/// Timestamped ECEF path of one body (satellite or receiver). Positions are
/// required; velocities are filled by finite differences when absent.
/// Timestamps must be strictly increasing.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(std::vector<double> t_s, std::vector<Vec3> pos_m);
    Trajectory(std::vector<double> t_s, std::vector<Vec3> pos_m, std::vector<Vec3> vel_mps);

    std::size_t size() const { return t_.size(); }
    double t_begin() const { return t_.front(); }
    double t_end() const { return t_.back(); }

    const std::vector<double>& timestamps() const { return t_; }
    const std::vector<Vec3>& positions() const { return pos_; }
    const std::vector<Vec3>& velocities() const { return vel_; }

    /// Linear interpolation; t outside the span is an error.
    Vec3 position_at(double t) const;
    Vec3 velocity_at(double t) const;

    /// Cumulative along-track distance from the first sample to time t.
    double distance_at(double t) const;
    /// Inverse of distance_at (first time the given distance is reached).
    double time_at_distance(double d) const;
    /// Total along-track path length.
    double path_length() const { return cumdist_.back(); }

    /// Same path expressed relative to a reference point (pure translation;
    /// velocities are unchanged).
    Trajectory translated(const Vec3& offset) const;

private:
    void finish_init();
    std::size_t segment_index(double t) const;

    std::vector<double> t_;
    std::vector<Vec3> pos_;
    std::vector<Vec3> vel_;
    std::vector<double> cumdist_;
};

/// Instantaneous geometry of one satellite-receiver link.
struct LinkGeometry {
    double d3d_m = 0.0;            // slant range, > 0
    double elevation_rad = 0.0;    // above local horizon at the receiver
    double azimuth_rad = 0.0;      // clockwise from North
    double theta_sat_rad = 0.0;    // Doppler angle: satellite velocity vs LOS to receiver
    double theta_rx_rad = 0.0;     // Doppler angle: receiver velocity vs LOS to satellite
    double radial_velocity_mps = 0.0; // positive while the bodies approach
    bool sat_zero_speed = false;   // Doppler angle undefined, pinned to pi/2
    bool rx_zero_speed = false;
};

/// Elevation and azimuth of `sat` as seen from `rx`, spherical-Earth ENU
/// frame at the receiver. Throws if rx sits at the Earth center or the two
/// positions coincide.
void elevation_azimuth(const Vec3& sat_ecef, const Vec3& rx_ecef,
                       double& elevation_rad, double& azimuth_rad);

/// Angles between each body's velocity and the line of sight toward the other
/// body. A zero-speed body gets angle pi/2 and its flag set (zero velocity has
/// no direction, and pi/2 keeps its Doppler contribution at zero).
void doppler_angles(const Vec3& sat_pos, const Vec3& sat_vel,
                    const Vec3& rx_pos, const Vec3& rx_vel,
                    double& theta_sat_rad, double& theta_rx_rad,
                    bool& sat_zero_speed, bool& rx_zero_speed);

/// Relative radial velocity v_sat*cos(theta_sat) + v_rx*cos(theta_rx),
/// positive while the range shrinks.
double radial_relative_velocity(const Vec3& sat_pos, const Vec3& sat_vel,
                                const Vec3& rx_pos, const Vec3& rx_vel);

/// Feasible Doppler-angle interval [lo, hi] for a satellite moving at
/// `sat_speed_mps`, given that the radial speed toward a ground receiver
/// never exceeds 929 m/s (GPS geometry bound). Below that speed the whole
/// [0, pi] range is feasible.
void doppler_angle_bounds(double sat_speed_mps, double& lo_rad, double& hi_rad);

LinkGeometry compute_link_geometry(const Vec3& sat_pos, const Vec3& sat_vel,
                                   const Vec3& rx_pos, const Vec3& rx_vel);

/// Per-interval speeds from a movement profile (cumulative distance vs time):
/// forward differences delta_d / delta_t. Duplicate timestamps are an error.
std::vector<double> speeds_from_movement_profile(const std::vector<double>& t_s,
                                                 const std::vector<double>& distance_m);

/// Circular Kepler orbit around a spherical Earth, sampled every `step_s`.
/// No Earth rotation and no perturbations; speed is sqrt(mu / (R_E + alt)).
/// Angles in radians: `inclination` vs the equatorial plane, `raan` from the
/// +X axis, `phase` along the orbit at t0.
Trajectory circular_orbit_ephemeris(double altitude_m, double inclination_rad,
                                    double raan_rad, double phase_rad,
                                    double t0_s, double duration_s, double step_s);

/// Orbit elements (inclination, raan, phase) of the circular orbit that puts
/// the satellite, at t = 0, at elevation/azimuth as seen from `rx_ecef` with
/// its velocity headed along `vel_azimuth` in the local sky. Lets tests and
/// configs place satellites by the geometry they should present.
void orbit_elements_for_placement(const Vec3& rx_ecef, double elevation_rad,
                                  double azimuth_rad, double vel_azimuth_rad,
                                  double altitude_m, double& inclination_rad,
                                  double& raan_rad, double& phase_rad);

/// Constant-speed great-circle ground track on the spherical Earth starting
/// at the given latitude/longitude, headed along `heading_rad` (clockwise
/// from North).
Trajectory make_ground_track(double lat_rad, double lon_rad, double heading_rad,
                             double speed_mps, double duration_s, double step_s);

/// Geodetic (spherical) to ECEF on the mean-radius sphere.
Vec3 lat_lon_to_ecef(double lat_rad, double lon_rad, double height_m = 0.0);

} // namespace skychan
