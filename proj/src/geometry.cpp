// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#include "skychan/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

#include "skychan/constants.hpp"

namespace skychan {

namespace {
constexpr double kTiny = 1e-12;

// Maximum radial speed of a medium-orbit navigation satellite toward a ground
// receiver; pins the feasible Doppler-angle cone.
constexpr double kMaxRadialSpeed = 929.0;
} // namespace

Vec3 Vec3::normalized() const {
    double n = norm();
    if (n <= 0.0)
        throw std::invalid_argument("cannot normalize a zero vector");
    return *this / n;
}

// ---------- Trajectory ----------

Trajectory::Trajectory(std::vector<double> t_s, std::vector<Vec3> pos_m)
    : t_(std::move(t_s)), pos_(std::move(pos_m)) {
    finish_init();
}

Trajectory::Trajectory(std::vector<double> t_s, std::vector<Vec3> pos_m, std::vector<Vec3> vel_mps)
    : t_(std::move(t_s)), pos_(std::move(pos_m)), vel_(std::move(vel_mps)) {
    if (!vel_.empty() && vel_.size() != pos_.size())
        throw std::invalid_argument("trajectory velocity count does not match positions");
    finish_init();
}

void Trajectory::finish_init() {
    if (t_.size() < 2)
        throw std::invalid_argument("trajectory needs at least two samples");
    if (t_.size() != pos_.size())
        throw std::invalid_argument("trajectory timestamp count does not match positions");
    for (std::size_t i = 1; i < t_.size(); ++i)
        if (t_[i] <= t_[i - 1])
            throw std::invalid_argument("trajectory timestamps must be strictly increasing");

    if (vel_.empty()) {
        // Central differences inside, one-sided at the ends.
        vel_.resize(pos_.size());
        std::size_t n = pos_.size();
        vel_[0] = (pos_[1] - pos_[0]) / (t_[1] - t_[0]);
        vel_[n - 1] = (pos_[n - 1] - pos_[n - 2]) / (t_[n - 1] - t_[n - 2]);
        for (std::size_t i = 1; i + 1 < n; ++i)
            vel_[i] = (pos_[i + 1] - pos_[i - 1]) / (t_[i + 1] - t_[i - 1]);
    }

    cumdist_.resize(pos_.size());
    cumdist_[0] = 0.0;
    for (std::size_t i = 1; i < pos_.size(); ++i)
        cumdist_[i] = cumdist_[i - 1] + (pos_[i] - pos_[i - 1]).norm();
}

std::size_t Trajectory::segment_index(double t) const {
    if (t < t_.front() - 1e-9 || t > t_.back() + 1e-9)
        throw std::invalid_argument("time outside trajectory span");
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - t_.begin());
    if (i == 0)
        return 0;
    if (i >= t_.size())
        return t_.size() - 2;
    return i - 1;
}

Vec3 Trajectory::position_at(double t) const {
    std::size_t i = segment_index(t);
    double w = (t - t_[i]) / (t_[i + 1] - t_[i]);
    return pos_[i] + (pos_[i + 1] - pos_[i]) * w;
}

Vec3 Trajectory::velocity_at(double t) const {
    std::size_t i = segment_index(t);
    double w = (t - t_[i]) / (t_[i + 1] - t_[i]);
    return vel_[i] + (vel_[i + 1] - vel_[i]) * w;
}

double Trajectory::distance_at(double t) const {
    std::size_t i = segment_index(t);
    double w = (t - t_[i]) / (t_[i + 1] - t_[i]);
    return cumdist_[i] + (cumdist_[i + 1] - cumdist_[i]) * w;
}

double Trajectory::time_at_distance(double d) const {
    if (d < -1e-9 || d > cumdist_.back() + 1e-9)
        throw std::invalid_argument("distance outside trajectory span");
    d = std::clamp(d, 0.0, cumdist_.back());
    auto it = std::lower_bound(cumdist_.begin(), cumdist_.end(), d);
    std::size_t i = static_cast<std::size_t>(it - cumdist_.begin());
    if (i == 0)
        return t_.front();
    double seg = cumdist_[i] - cumdist_[i - 1];
    if (seg <= 0.0)
        return t_[i];
    double w = (d - cumdist_[i - 1]) / seg;
    return t_[i - 1] + (t_[i] - t_[i - 1]) * w;
}

Trajectory Trajectory::translated(const Vec3& offset) const {
    std::vector<Vec3> p(pos_.size());
    for (std::size_t i = 0; i < pos_.size(); ++i)
        p[i] = pos_[i] + offset;
    return Trajectory(t_, std::move(p), vel_);
}

// ---------- link geometry ----------

void elevation_azimuth(const Vec3& sat_ecef, const Vec3& rx_ecef,
                       double& elevation_rad, double& azimuth_rad) {
    double rx_norm = rx_ecef.norm();
    if (rx_norm < kTiny)
        throw std::invalid_argument("receiver position is at the Earth center");
    Vec3 los = sat_ecef - rx_ecef;
    double range = los.norm();
    if (range < kTiny)
        throw std::invalid_argument("satellite and receiver positions coincide");

    Vec3 up = rx_ecef / rx_norm;
    Vec3 z{0.0, 0.0, 1.0};
    Vec3 east = z.cross(up);
    double east_norm = east.norm();
    if (east_norm < kTiny) {
        // Receiver on the pole: East is degenerate, pick an arbitrary one.
        east = {0.0, 1.0, 0.0};
    } else {
        east = east / east_norm;
    }
    Vec3 north = up.cross(east);

    Vec3 u = los / range;
    elevation_rad = std::asin(std::clamp(u.dot(up), -1.0, 1.0));
    azimuth_rad = std::atan2(u.dot(east), u.dot(north));
    if (azimuth_rad < 0.0)
        azimuth_rad += 2.0 * std::numbers::pi;
}

void doppler_angles(const Vec3& sat_pos, const Vec3& sat_vel,
                    const Vec3& rx_pos, const Vec3& rx_vel,
                    double& theta_sat_rad, double& theta_rx_rad,
                    bool& sat_zero_speed, bool& rx_zero_speed) {
    Vec3 los = rx_pos - sat_pos;
    double range = los.norm();
    if (range < kTiny)
        throw std::invalid_argument("satellite and receiver positions coincide");

    auto angle_to = [&](const Vec3& vel, const Vec3& toward, bool& zero_flag) {
        double speed = vel.norm();
        if (speed < kTiny) {
            zero_flag = true;
            return std::numbers::pi / 2.0;
        }
        zero_flag = false;
        double c = vel.dot(toward) / (speed * toward.norm());
        return std::acos(std::clamp(c, -1.0, 1.0));
    };

    theta_sat_rad = angle_to(sat_vel, los, sat_zero_speed);
    theta_rx_rad = angle_to(rx_vel, los * -1.0, rx_zero_speed);
}

double radial_relative_velocity(const Vec3& sat_pos, const Vec3& sat_vel,
                                const Vec3& rx_pos, const Vec3& rx_vel) {
    double th_s = 0.0, th_r = 0.0;
    bool zs = false, zr = false;
    doppler_angles(sat_pos, sat_vel, rx_pos, rx_vel, th_s, th_r, zs, zr);
    double v_s = zs ? 0.0 : sat_vel.norm();
    double v_r = zr ? 0.0 : rx_vel.norm();
    return v_s * std::cos(th_s) + v_r * std::cos(th_r);
}

void doppler_angle_bounds(double sat_speed_mps, double& lo_rad, double& hi_rad) {
    if (sat_speed_mps <= 0.0)
        throw std::invalid_argument("satellite speed must be positive");
    if (sat_speed_mps <= kMaxRadialSpeed) {
        lo_rad = 0.0;
        hi_rad = std::numbers::pi;
        return;
    }
    lo_rad = std::acos(kMaxRadialSpeed / sat_speed_mps);
    hi_rad = std::numbers::pi - lo_rad;
}

LinkGeometry compute_link_geometry(const Vec3& sat_pos, const Vec3& sat_vel,
                                   const Vec3& rx_pos, const Vec3& rx_vel) {
    LinkGeometry g;
    g.d3d_m = (sat_pos - rx_pos).norm();
    if (g.d3d_m < kTiny)
        throw std::invalid_argument("satellite and receiver positions coincide");
    elevation_azimuth(sat_pos, rx_pos, g.elevation_rad, g.azimuth_rad);
    doppler_angles(sat_pos, sat_vel, rx_pos, rx_vel,
                   g.theta_sat_rad, g.theta_rx_rad, g.sat_zero_speed, g.rx_zero_speed);
    double v_s = g.sat_zero_speed ? 0.0 : sat_vel.norm();
    double v_r = g.rx_zero_speed ? 0.0 : rx_vel.norm();
    g.radial_velocity_mps = v_s * std::cos(g.theta_sat_rad) + v_r * std::cos(g.theta_rx_rad);
    return g;
}

std::vector<double> speeds_from_movement_profile(const std::vector<double>& t_s,
                                                 const std::vector<double>& distance_m) {
    if (t_s.size() != distance_m.size())
        throw std::invalid_argument("movement profile arrays differ in length");
    if (t_s.size() < 2)
        throw std::invalid_argument("movement profile needs at least two samples");
    std::vector<double> v(t_s.size() - 1);
    for (std::size_t i = 0; i + 1 < t_s.size(); ++i) {
        double dt = t_s[i + 1] - t_s[i];
        if (dt <= 0.0)
            throw std::invalid_argument("movement profile timestamps must be strictly increasing");
        v[i] = (distance_m[i + 1] - distance_m[i]) / dt;
    }
    return v;
}

// ---------- generators ----------

namespace {
Vec3 rotate_about(const Vec3& v, const Vec3& axis_unit, double angle) {
    // Rodrigues rotation.
    double c = std::cos(angle), s = std::sin(angle);
    return v * c + axis_unit.cross(v) * s + axis_unit * (axis_unit.dot(v) * (1.0 - c));
}
} // namespace

Trajectory circular_orbit_ephemeris(double altitude_m, double inclination_rad,
                                    double raan_rad, double phase_rad,
                                    double t0_s, double duration_s, double step_s) {
    if (altitude_m <= 0.0)
        throw std::invalid_argument("orbit altitude must be positive");
    if (duration_s <= 0.0 || step_s <= 0.0)
        throw std::invalid_argument("orbit duration and step must be positive");

    double r = constants::earth_radius + altitude_m;
    double speed = std::sqrt(constants::mu_earth / r);
    double omega = speed / r;

    // In-plane basis: e1 along the ascending node, e2 90 degrees ahead.
    double cr = std::cos(raan_rad), sr = std::sin(raan_rad);
    double ci = std::cos(inclination_rad), si = std::sin(inclination_rad);
    Vec3 e1{cr, sr, 0.0};
    Vec3 e2{-sr * ci, cr * ci, si};

    std::size_t n = static_cast<std::size_t>(std::floor(duration_s / step_s)) + 1;
    std::vector<double> t(n);
    std::vector<Vec3> pos(n), vel(n);
    for (std::size_t k = 0; k < n; ++k) {
        double tk = t0_s + static_cast<double>(k) * step_s;
        double a = phase_rad + omega * (tk - t0_s);
        double ca = std::cos(a), sa = std::sin(a);
        t[k] = tk;
        pos[k] = (e1 * ca + e2 * sa) * r;
        vel[k] = (e1 * -sa + e2 * ca) * speed;
    }
    return Trajectory(std::move(t), std::move(pos), std::move(vel));
}

void orbit_elements_for_placement(const Vec3& rx_ecef, double elevation_rad,
                                  double azimuth_rad, double vel_azimuth_rad,
                                  double altitude_m, double& inclination_rad,
                                  double& raan_rad, double& phase_rad) {
    if (altitude_m <= 0.0)
        throw std::invalid_argument("orbit altitude must be positive");
    double rx_norm = rx_ecef.norm();
    if (rx_norm < kTiny)
        throw std::invalid_argument("receiver position is at the Earth center");

    double r_orb = constants::earth_radius + altitude_m;

    // Central angle between receiver and sub-satellite point that yields the
    // requested elevation: tan(el) = (cos(psi) - R/r) / sin(psi).
    double ratio = rx_norm / r_orb;
    double el = elevation_rad;
    // Solve cos(psi) - ratio = tan(el) * sin(psi) with bisection on (0, pi/2).
    double lo = 1e-9, hi = std::acos(ratio);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double f = std::cos(mid) - ratio - std::tan(el) * std::sin(mid);
        (f > 0.0 ? lo : hi) = mid;
    }
    double psi = 0.5 * (lo + hi);

    Vec3 up = rx_ecef / rx_norm;
    Vec3 z{0.0, 0.0, 1.0};
    Vec3 east = z.cross(up);
    double en = east.norm();
    east = en < kTiny ? Vec3{0.0, 1.0, 0.0} : east / en;
    Vec3 north = up.cross(east);

    // Walk psi radians from the receiver along the requested azimuth.
    Vec3 dir = north * std::cos(azimuth_rad) + east * std::sin(azimuth_rad);
    Vec3 axis = up.cross(dir).normalized();
    Vec3 sat_unit = rotate_about(up, axis, psi);
    Vec3 sat_pos = sat_unit * r_orb;

    // Velocity direction: tangent plane at the satellite, headed along
    // vel_azimuth in the satellite's own local frame.
    Vec3 s_up = sat_unit;
    Vec3 s_east = z.cross(s_up);
    double sen = s_east.norm();
    s_east = sen < kTiny ? Vec3{0.0, 1.0, 0.0} : s_east / sen;
    Vec3 s_north = s_up.cross(s_east);
    Vec3 vel_dir = s_north * std::cos(vel_azimuth_rad) + s_east * std::sin(vel_azimuth_rad);

    Vec3 h = sat_unit.cross(vel_dir);
    if (h.norm() < kTiny)
        throw std::invalid_argument("velocity azimuth is radial; orbit plane undefined");
    h = h.normalized();

    inclination_rad = std::acos(std::clamp(h.z, -1.0, 1.0));
    Vec3 node = z.cross(h);
    if (node.norm() < kTiny) {
        // Equatorial orbit, ascending node undefined; measure phase from +X.
        raan_rad = 0.0;
        node = {1.0, 0.0, 0.0};
    } else {
        node = node.normalized();
        raan_rad = std::atan2(node.y, node.x);
    }
    Vec3 in_plane = h.cross(node);
    phase_rad = std::atan2(sat_unit.dot(in_plane), sat_unit.dot(node));

    (void)sat_pos;
}

Vec3 lat_lon_to_ecef(double lat_rad, double lon_rad, double height_m) {
    double r = constants::earth_radius + height_m;
    return {r * std::cos(lat_rad) * std::cos(lon_rad),
            r * std::cos(lat_rad) * std::sin(lon_rad),
            r * std::sin(lat_rad)};
}

Trajectory make_ground_track(double lat_rad, double lon_rad, double heading_rad,
                             double speed_mps, double duration_s, double step_s) {
    if (speed_mps < 0.0)
        throw std::invalid_argument("ground speed must be non-negative");
    if (duration_s <= 0.0 || step_s <= 0.0)
        throw std::invalid_argument("track duration and step must be positive");

    Vec3 start = lat_lon_to_ecef(lat_rad, lon_rad);
    Vec3 up = start.normalized();
    Vec3 z{0.0, 0.0, 1.0};
    Vec3 east = z.cross(up);
    double en = east.norm();
    east = en < kTiny ? Vec3{0.0, 1.0, 0.0} : east / en;
    Vec3 north = up.cross(east);
    Vec3 dir = north * std::cos(heading_rad) + east * std::sin(heading_rad);

    std::size_t n = static_cast<std::size_t>(std::floor(duration_s / step_s)) + 1;
    std::vector<double> t(n);
    std::vector<Vec3> pos(n), vel(n);

    if (speed_mps == 0.0) {
        for (std::size_t k = 0; k < n; ++k) {
            t[k] = static_cast<double>(k) * step_s;
            pos[k] = start;
            vel[k] = {0.0, 0.0, 0.0};
        }
        return Trajectory(std::move(t), std::move(pos), std::move(vel));
    }

    // Great circle: rotate the start point about (up x dir) at v/R.
    Vec3 axis = up.cross(dir).normalized();
    double rate = speed_mps / constants::earth_radius;
    for (std::size_t k = 0; k < n; ++k) {
        double tk = static_cast<double>(k) * step_s;
        t[k] = tk;
        Vec3 u = rotate_about(up, axis, rate * tk);
        Vec3 d = rotate_about(dir, axis, rate * tk);
        pos[k] = u * constants::earth_radius;
        vel[k] = d * speed_mps;
    }
    return Trajectory(std::move(t), std::move(pos), std::move(vel));
}

} // namespace skychan
