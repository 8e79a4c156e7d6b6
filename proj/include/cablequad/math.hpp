// Copyright 2026 The cablequad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CABLEQUAD_MATH_HPP_
#define CABLEQUAD_MATH_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace cablequad {

// ---------------------------------------------------------------------------
// Vec3: 3-element double vector
// ---------------------------------------------------------------------------
struct Vec3 {
    double x{0.0}, y{0.0}, z{0.0};

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    double  operator()(int i) const { return (&x)[i]; }
    double& operator()(int i)       { return (&x)[i]; }

    Vec3 operator+(const Vec3& v) const { return {x + v.x, y + v.y, z + v.z}; }
    Vec3 operator-(const Vec3& v) const { return {x - v.x, y - v.y, z - v.z}; }
    Vec3 operator*(double s)      const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s)      const { return {x / s, y / s, z / s}; }
    Vec3 operator-()              const { return {-x, -y, -z}; }

    Vec3& operator+=(const Vec3& v) { x += v.x; y += v.y; z += v.z; return *this; }
    Vec3& operator-=(const Vec3& v) { x -= v.x; y -= v.y; z -= v.z; return *this; }
    Vec3& operator*=(double s)      { x *= s; y *= s; z *= s; return *this; }

    double dot(const Vec3& v)  const { return x * v.x + y * v.y + z * v.z; }
    double norm_squared()      const { return dot(*this); }
    double norm()              const { return std::sqrt(norm_squared()); }

    Vec3 cross(const Vec3& v) const {
        return {y * v.z - z * v.y,
                z * v.x - x * v.z,
                x * v.y - y * v.x};
    }

    Vec3 normalized() const {
        double n = norm();
        if (n < 1e-12) return {0.0, 0.0, 0.0};
        return *this / n;
    }

    Vec3 cwise_clamped(double lo, double hi) const {
        return {std::clamp(x, lo, hi),
                std::clamp(y, lo, hi),
                std::clamp(z, lo, hi)};
    }

    Vec3 cwise_product(const Vec3& v) const { return {x * v.x, y * v.y, z * v.z}; }

    bool all_finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }

    static Vec3 zero()  { return {0.0, 0.0, 0.0}; }
    static Vec3 unit_x() { return {1.0, 0.0, 0.0}; }
    static Vec3 unit_y() { return {0.0, 1.0, 0.0}; }
    static Vec3 unit_z() { return {0.0, 0.0, 1.0}; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// ---------------------------------------------------------------------------
// Mat3: 3x3 matrix, row-major. Rotation matrices are body->inertial.
// ---------------------------------------------------------------------------
struct Mat3 {
    std::array<double, 9> m{};  // row-major

    Mat3() = default;

    double  operator()(int r, int c) const { return m[3 * r + c]; }
    double& operator()(int r, int c)       { return m[3 * r + c]; }

    Vec3 row(int r) const { return {m[3 * r], m[3 * r + 1], m[3 * r + 2]}; }
    Vec3 col(int c) const { return {m[c], m[3 + c], m[6 + c]}; }

    Vec3 operator*(const Vec3& v) const {
        return {row(0).dot(v), row(1).dot(v), row(2).dot(v)};
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r(i, j) = row(i).dot(o.col(j));
        return r;
    }

    Mat3 operator+(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] + o.m[i];
        return r;
    }

    Mat3 operator-(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] - o.m[i];
        return r;
    }

    Mat3 operator*(double s) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] * s;
        return r;
    }

    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r(i, j) = (*this)(j, i);
        return r;
    }

    double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7])
             - m[1] * (m[3] * m[8] - m[5] * m[6])
             + m[2] * (m[3] * m[7] - m[4] * m[6]);
    }

    Mat3 inversed() const {
        double d = det();
        Mat3 r;
        double inv = 1.0 / d;
        r.m[0] =  (m[4] * m[8] - m[5] * m[7]) * inv;
        r.m[1] = -(m[1] * m[8] - m[2] * m[7]) * inv;
        r.m[2] =  (m[1] * m[5] - m[2] * m[4]) * inv;
        r.m[3] = -(m[3] * m[8] - m[5] * m[6]) * inv;
        r.m[4] =  (m[0] * m[8] - m[2] * m[6]) * inv;
        r.m[5] = -(m[0] * m[5] - m[2] * m[3]) * inv;
        r.m[6] =  (m[3] * m[7] - m[4] * m[6]) * inv;
        r.m[7] = -(m[0] * m[7] - m[1] * m[6]) * inv;
        r.m[8] =  (m[0] * m[4] - m[1] * m[3]) * inv;
        return r;
    }

    bool all_finite() const {
        for (double v : m)
            if (!std::isfinite(v)) return false;
        return true;
    }

    static Mat3 identity() {
        Mat3 r;
        r.m[0] = r.m[4] = r.m[8] = 1.0;
        return r;
    }

    static Mat3 diag(double a, double b, double c) {
        Mat3 r;
        r.m[0] = a; r.m[4] = b; r.m[8] = c;
        return r;
    }

    static Mat3 diag(const Vec3& v) { return diag(v.x, v.y, v.z); }

    // Outer product a b^T
    static Mat3 outer(const Vec3& a, const Vec3& b) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r(i, j) = a(i) * b(j);
        return r;
    }
};

using Rot3 = Mat3;

// Skew-symmetric matrix S with S*w == v x w.
inline Mat3 hat(const Vec3& v) {
    Mat3 s;
    s(0, 1) = -v.z; s(0, 2) =  v.y;
    s(1, 0) =  v.z; s(1, 2) = -v.x;
    s(2, 0) = -v.y; s(2, 1) =  v.x;
    return s;
}

// Rodrigues formula. Second-order Taylor branch below 1e-8 keeps the
// coefficients finite at w = 0.
inline Rot3 so3_exp(const Vec3& w) {
    double theta2 = w.norm_squared();
    double theta = std::sqrt(theta2);
    double a, b;  // R = I + a*S + b*S^2
    if (theta < 1e-8) {
        a = 1.0 - theta2 / 6.0;
        b = 0.5 - theta2 / 24.0;
    } else {
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / theta2;
    }
    Mat3 s = hat(w);
    return Mat3::identity() + s * a + (s * s) * b;
}

// Symmetric first-order orthonormality correction: R (3I - R^T R)/2.
// Contracts round-off drift accumulated by repeated exponential updates.
inline Rot3 reorthonormalized(const Rot3& r) {
    Mat3 rtr = r.transposed() * r;
    Mat3 c = Mat3::identity() * 3.0 - rtr;
    return (r * c) * 0.5;
}

// Max abs entry of R^T R - I; 0 for a perfectly orthonormal matrix.
inline double orthonormality_error(const Rot3& r) {
    Mat3 e = r.transposed() * r - Mat3::identity();
    double mx = 0.0;
    for (double v : e.m) mx = std::max(mx, std::abs(v));
    return mx;
}

// ZYX (yaw-pitch-roll) Euler angles of a body->inertial rotation.
struct EulerZyx {
    double roll{0.0}, pitch{0.0}, yaw{0.0};
};

inline EulerZyx euler_zyx(const Rot3& r) {
    EulerZyx e;
    e.pitch = std::asin(-std::clamp(r(2, 0), -1.0, 1.0));
    if (std::abs(r(2, 0)) < 0.9999999) {
        e.roll = std::atan2(r(2, 1), r(2, 2));
        e.yaw  = std::atan2(r(1, 0), r(0, 0));
    } else {
        e.roll = std::atan2(-r(1, 2), r(1, 1));
        e.yaw  = 0.0;
    }
    return e;
}

inline Rot3 rot_from_euler_zyx(double roll, double pitch, double yaw) {
    return so3_exp(Vec3{0, 0, yaw}) * so3_exp(Vec3{0, pitch, 0}) *
           so3_exp(Vec3{roll, 0, 0});
}

// ---------------------------------------------------------------------------
// RngStream: counter-based deterministic stream (splitmix64 core).
// Same seed gives the same sequence; streams never share state.
// ---------------------------------------------------------------------------
class RngStream {
public:
    RngStream() : state_(0x9e3779b97f4a7c15ULL) {}
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1): 53 mantissa bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    // Box-Muller, cosine branch. Two uniforms consumed per draw.
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 <= 0.0) u1 = std::numeric_limits<double>::min();
        double z = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * 3.14159265358979323846 * u2);
        return mean + stddev * z;
    }

    double normal_clipped(double stddev, double clip) {
        return std::clamp(normal(0.0, stddev), -clip, clip);
    }

    Vec3 uniform_box(double lo, double hi) {
        return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)};
    }

    Vec3 normal_clipped_vec(double stddev, double clip) {
        return {normal_clipped(stddev, clip), normal_clipped(stddev, clip),
                normal_clipped(stddev, clip)};
    }

    Vec3 unit_sphere() {
        double z = uniform(-1.0, 1.0);
        double phi = uniform(0.0, 2.0 * 3.14159265358979323846);
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }

    Vec3 upper_hemisphere() {
        Vec3 v = unit_sphere();
        if (v.z < 0.0) v.z = -v.z;
        return v;
    }

    // Decorrelated child stream; the parent advances once.
    RngStream substream(std::uint64_t salt) {
        std::uint64_t s = next_u64();
        return RngStream(s ^ (salt * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
    }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

constexpr double kPi = 3.14159265358979323846;

}  // namespace cablequad

#endif  // CABLEQUAD_MATH_HPP_
