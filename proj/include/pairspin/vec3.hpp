#pragma once

#include <cmath>
#include <stdexcept>

namespace pairspin {

// Plain 3-vector. Positions are in meters unless a function says otherwise;
// lattice enumeration uses the integer SiteIndex below (units of a0/4) so
// lattice-unit vectors keep exact integer components.
struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& v) const { return {x + v.x, y + v.y, z + v.z}; }
    Vec3 operator-(const Vec3& v) const { return {x - v.x, y - v.y, z - v.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }

    double dot(const Vec3& v) const { return x * v.x + y * v.y + z * v.z; }
    Vec3 cross(const Vec3& v) const {
        return {y * v.z - z * v.y, z * v.x - x * v.z, x * v.y - y * v.x};
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }

    Vec3 normalized() const {
        const double n = norm();
        if (n == 0.0) throw std::domain_error("cannot normalize zero vector");
        return *this / n;
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Lattice position in units of a0/4.
struct SiteIndex {
    int x = 0, y = 0, z = 0;

    SiteIndex() = default;
    SiteIndex(int x_, int y_, int z_) : x(x_), y(y_), z(z_) {}

    SiteIndex operator+(const SiteIndex& s) const { return {x + s.x, y + s.y, z + s.z}; }
    SiteIndex operator-(const SiteIndex& s) const { return {x - s.x, y - s.y, z - s.z}; }
    bool operator==(const SiteIndex& s) const { return x == s.x && y == s.y && z == s.z; }

    Vec3 to_meters(double a0) const {
        const double q = a0 / 4.0;
        return {q * x, q * y, q * z};
    }
    double norm_lattice() const {
        return std::sqrt(double(x) * x + double(y) * y + double(z) * z);
    }
};

}  // namespace pairspin
