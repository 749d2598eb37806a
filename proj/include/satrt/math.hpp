// SPDX-License-Identifier: Apache-2.0
//
// satrt - satellite-to-urban ray-tracing channel simulator
// Copyright (C) 2026 The satrt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace satrt
{

using cdouble = std::complex<double>;

namespace constants
{
inline constexpr double pi = std::numbers::pi;
inline constexpr double c0 = 299792458.0;            // m/s
inline constexpr double eps0 = 8.8541878128e-12;     // F/m
inline constexpr double eta0 = 376.730313668;        // ohm
inline constexpr double earth_radius = 6371.0e3;     // m, spherical Earth
} // namespace constants

inline constexpr double deg2rad(double d) { return d * constants::pi / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / constants::pi; }

struct Vec3
{
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3 &operator+=(const Vec3 &o)
    {
        x += o.x, y += o.y, z += o.z;
        return *this;
    }
    constexpr Vec3 &operator-=(const Vec3 &o)
    {
        x -= o.x, y -= o.y, z -= o.z;
        return *this;
    }
    constexpr bool operator==(const Vec3 &) const = default;
};

inline constexpr Vec3 operator*(double s, const Vec3 &v) { return v * s; }
inline constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline constexpr Vec3 cross(const Vec3 &a, const Vec3 &b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3 &a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalize(const Vec3 &a) { return a / norm(a); }
inline double distance(const Vec3 &a, const Vec3 &b) { return norm(a - b); }

// Mirror image of a point across the plane through `p0` with unit normal `n`.
inline Vec3 mirror_point(const Vec3 &pt, const Vec3 &p0, const Vec3 &n)
{
    return pt - n * (2.0 * dot(pt - p0, n));
}

// Specular reflection of a direction about a unit normal.
inline Vec3 reflect_direction(const Vec3 &d, const Vec3 &n) { return d - n * (2.0 * dot(d, n)); }

// Spherical unit vectors (theta-hat, phi-hat) of a propagation direction. At the poles
// phi is taken as 0, which still yields a right-handed orthonormal triad
// (theta_hat x phi_hat = dir).
inline std::array<Vec3, 2> spherical_basis(const Vec3 &dir)
{
    const double ct = std::clamp(dir.z, -1.0, 1.0);
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double phi = (std::abs(dir.x) < 1e-15 && std::abs(dir.y) < 1e-15) ? 0.0 : std::atan2(dir.y, dir.x);
    const double cp = std::cos(phi), sp = std::sin(phi);
    return {Vec3{ct * cp, ct * sp, -st}, Vec3{-sp, cp, 0.0}};
}

// Complex 3-vector (field phasor).
struct CVec3
{
    cdouble x{}, y{}, z{};

    CVec3() = default;
    CVec3(cdouble x_, cdouble y_, cdouble z_) : x(x_), y(y_), z(z_) {}
    explicit CVec3(const Vec3 &v) : x(v.x), y(v.y), z(v.z) {}

    CVec3 operator+(const CVec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    CVec3 operator-(const CVec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    CVec3 operator*(cdouble s) const { return {x * s, y * s, z * s}; }
    CVec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    CVec3 &operator+=(const CVec3 &o)
    {
        x += o.x, y += o.y, z += o.z;
        return *this;
    }
    bool operator==(const CVec3 &) const = default;
};

inline CVec3 operator*(cdouble s, const CVec3 &v) { return v * s; }
inline CVec3 operator*(double s, const CVec3 &v) { return v * s; }
inline CVec3 operator*(cdouble s, const Vec3 &v) { return {s * v.x, s * v.y, s * v.z}; }

// Bilinear product a . b (no conjugation).
inline cdouble dot(const CVec3 &a, const CVec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline cdouble dot(const CVec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
// Hermitian product a . conj(b).
inline cdouble hdot(const CVec3 &a, const CVec3 &b)
{
    return a.x * std::conj(b.x) + a.y * std::conj(b.y) + a.z * std::conj(b.z);
}
inline double norm(const CVec3 &a) { return std::sqrt(std::norm(a.x) + std::norm(a.y) + std::norm(a.z)); }

// Component of `a` transverse to the unit vector `k`.
inline CVec3 transverse_part(const CVec3 &a, const Vec3 &k) { return a - dot(a, k) * k; }

// 3x3 complex matrix used for interaction dyadics. Row-major.
struct Mat3c
{
    std::array<cdouble, 9> m{};

    static Mat3c identity()
    {
        Mat3c r;
        r.m[0] = r.m[4] = r.m[8] = 1.0;
        return r;
    }

    // Outer product a b^T scaled by s.
    static Mat3c outer(cdouble s, const Vec3 &a, const Vec3 &b)
    {
        Mat3c r;
        const double av[3] = {a.x, a.y, a.z}, bv[3] = {b.x, b.y, b.z};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r.m[3 * i + j] = s * (av[i] * bv[j]);
        return r;
    }

    cdouble operator()(int i, int j) const { return m[3 * i + j]; }

    Mat3c operator+(const Mat3c &o) const
    {
        Mat3c r;
        for (int i = 0; i < 9; ++i)
            r.m[i] = m[i] + o.m[i];
        return r;
    }
    Mat3c operator*(cdouble s) const
    {
        Mat3c r;
        for (int i = 0; i < 9; ++i)
            r.m[i] = m[i] * s;
        return r;
    }
    Mat3c operator*(const Mat3c &o) const
    {
        Mat3c r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r.m[3 * i + j] = m[3 * i] * o.m[j] + m[3 * i + 1] * o.m[3 + j] + m[3 * i + 2] * o.m[6 + j];
        return r;
    }
    CVec3 operator*(const CVec3 &v) const
    {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }
    Mat3c transposed() const
    {
        Mat3c r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r.m[3 * i + j] = m[3 * j + i];
        return r;
    }
};

} // namespace satrt
