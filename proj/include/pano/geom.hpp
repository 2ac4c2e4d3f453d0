#pragma once

#include <array>
#include <cmath>

namespace pano {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
};

inline double dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    return n > 0 ? v / n : v;
}

// Row-major 3x3 matrix.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    double operator()(int r, int c) const { return m[3 * r + c]; }
    double& operator()(int r, int c) { return m[3 * r + c]; }

    static Mat3 identity() { return {}; }

    static Mat3 rotation_y(double angle) {
        const double c = std::cos(angle), s = std::sin(angle);
        Mat3 r;
        r.m = {c, 0, s, 0, 1, 0, -s, 0, c};
        return r;
    }

    static Mat3 rotation_x(double angle) {
        const double c = std::cos(angle), s = std::sin(angle);
        Mat3 r;
        r.m = {1, 0, 0, 0, c, -s, 0, s, c};
        return r;
    }

    static Mat3 rotation_z(double angle) {
        const double c = std::cos(angle), s = std::sin(angle);
        Mat3 r;
        r.m = {c, -s, 0, s, c, 0, 0, 0, 1};
        return r;
    }

    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }
};

inline Vec3 operator*(const Mat3& a, const Vec3& v) {
    return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
            a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
            a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z};
}

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

inline double determinant(const Mat3& a) {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

// Orthonormal with determinant +1, within tol.
inline bool is_rotation(const Mat3& a, double tol = 1e-9) {
    const Mat3 p = a * a.transposed();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double want = i == j ? 1.0 : 0.0;
            if (std::abs(p(i, j) - want) > tol) return false;
        }
    return std::abs(determinant(a) - 1.0) <= tol;
}

// Unit quaternion (x, y, z, w) to rotation matrix.
inline Mat3 quat_to_mat(double qx, double qy, double qz, double qw) {
    Mat3 r;
    r.m = {1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qz * qw), 2 * (qx * qz + qy * qw),
           2 * (qx * qy + qz * qw),     1 - 2 * (qx * qx + qz * qz), 2 * (qy * qz - qx * qw),
           2 * (qx * qz - qy * qw),     2 * (qy * qz + qx * qw), 1 - 2 * (qx * qx + qy * qy)};
    return r;
}

// Rotation matrix to unit quaternion (x, y, z, w), w >= 0.
inline std::array<double, 4> mat_to_quat(const Mat3& a) {
    const double tr = a(0, 0) + a(1, 1) + a(2, 2);
    double qx, qy, qz, qw;
    if (tr > 0) {
        const double s = std::sqrt(tr + 1.0) * 2;
        qw = 0.25 * s;
        qx = (a(2, 1) - a(1, 2)) / s;
        qy = (a(0, 2) - a(2, 0)) / s;
        qz = (a(1, 0) - a(0, 1)) / s;
    } else if (a(0, 0) > a(1, 1) && a(0, 0) > a(2, 2)) {
        const double s = std::sqrt(1.0 + a(0, 0) - a(1, 1) - a(2, 2)) * 2;
        qw = (a(2, 1) - a(1, 2)) / s;
        qx = 0.25 * s;
        qy = (a(0, 1) + a(1, 0)) / s;
        qz = (a(0, 2) + a(2, 0)) / s;
    } else if (a(1, 1) > a(2, 2)) {
        const double s = std::sqrt(1.0 + a(1, 1) - a(0, 0) - a(2, 2)) * 2;
        qw = (a(0, 2) - a(2, 0)) / s;
        qx = (a(0, 1) + a(1, 0)) / s;
        qy = 0.25 * s;
        qz = (a(1, 2) + a(2, 1)) / s;
    } else {
        const double s = std::sqrt(1.0 + a(2, 2) - a(0, 0) - a(1, 1)) * 2;
        qw = (a(1, 0) - a(0, 1)) / s;
        qx = (a(0, 2) + a(2, 0)) / s;
        qy = (a(1, 2) + a(2, 1)) / s;
        qz = 0.25 * s;
    }
    if (qw < 0) {
        qx = -qx;
        qy = -qy;
        qz = -qz;
        qw = -qw;
    }
    return {qx, qy, qz, qw};
}

}  // namespace pano
