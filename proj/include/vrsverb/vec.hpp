// Small 3-vector math used throughout the simulator.
//
// Coordinate convention: right-handed, +x front (0 deg azimuth / elevation),
// +y left, +z up. Azimuth counts counterclockwise from +x (seen from above),
// elevation positive upward.
#pragma once

#include <cmath>

namespace vrsverb {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        const double n = norm();
        return {x / n, y / n, z / n};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline Vec3 from_az_el(double az_deg, double el_deg) {
    const double az = deg2rad(az_deg);
    const double el = deg2rad(el_deg);
    return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

inline double azimuth_deg(const Vec3& v) { return rad2deg(std::atan2(v.y, v.x)); }

inline double elevation_deg(const Vec3& v) {
    return rad2deg(std::atan2(v.z, std::sqrt(v.x * v.x + v.y * v.y)));
}

inline Vec3 rotate_z(const Vec3& v, double angle_deg) {
    const double a = deg2rad(angle_deg);
    const double c = std::cos(a), s = std::sin(a);
    return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

inline Vec3 rotate_x(const Vec3& v, double angle_deg) {
    const double a = deg2rad(angle_deg);
    const double c = std::cos(a), s = std::sin(a);
    return {v.x, c * v.y - s * v.z, s * v.y + c * v.z};
}

// Angle between two directions, robust near 0 and 180 deg.
inline double angle_between_deg(const Vec3& a, const Vec3& b) {
    const Vec3 an = a.normalized(), bn = b.normalized();
    return rad2deg(2.0 * std::asin(0.5 * (an - bn).norm()));
}

}  // namespace vrsverb
