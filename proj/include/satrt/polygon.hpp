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
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace satrt
{

struct Vec2
{
    double x = 0.0, y = 0.0;

    constexpr Vec2 operator+(const Vec2 &o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2 &o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2 &) const = default;
};

inline constexpr double cross2(const Vec2 &a, const Vec2 &b) { return a.x * b.y - a.y * b.x; }
inline constexpr double dot2(const Vec2 &a, const Vec2 &b) { return a.x * b.x + a.y * b.y; }
inline double norm2d(const Vec2 &a) { return std::hypot(a.x, a.y); }

namespace polygon
{

// Shoelace signed area; positive for counter-clockwise vertex order.
inline double signed_area(std::span<const Vec2> poly)
{
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        a += cross2(poly[i], poly[(i + 1) % n]);
    return 0.5 * a;
}

inline double area(std::span<const Vec2> poly) { return std::abs(signed_area(poly)); }

inline Vec2 centroid(std::span<const Vec2> poly)
{
    const double a = signed_area(poly);
    const std::size_t n = poly.size();
    if (std::abs(a) < 1e-300)
    {
        Vec2 c;
        for (const auto &p : poly)
            c = c + p;
        return c * (1.0 / static_cast<double>(n));
    }
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const Vec2 &p = poly[i], &q = poly[(i + 1) % n];
        const double w = cross2(p, q);
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    return {cx / (6.0 * a), cy / (6.0 * a)};
}

inline double point_segment_distance(const Vec2 &p, const Vec2 &a, const Vec2 &b)
{
    const Vec2 ab = b - a;
    const double len2 = dot2(ab, ab);
    double t = len2 > 0.0 ? dot2(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm2d(p - (a + ab * t));
}

inline double boundary_distance(const Vec2 &p, std::span<const Vec2> poly)
{
    double d = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        d = std::min(d, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
    return d;
}

// Even-odd crossing test. Points exactly on the boundary may go either way; use
// contains_strict / contains_closed when the boundary matters.
inline bool crossing_test(const Vec2 &p, std::span<const Vec2> poly)
{
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
    {
        const Vec2 &a = poly[i], &b = poly[j];
        if ((a.y > p.y) != (b.y > p.y))
        {
            const double xint = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xint)
                inside = !inside;
        }
    }
    return inside;
}

// Inside and farther than `tol` from every edge.
inline bool contains_strict(const Vec2 &p, std::span<const Vec2> poly, double tol)
{
    return crossing_test(p, poly) && boundary_distance(p, poly) > tol;
}

// Inside or within `tol` of the boundary.
inline bool contains_closed(const Vec2 &p, std::span<const Vec2> poly, double tol)
{
    return crossing_test(p, poly) || boundary_distance(p, poly) <= tol;
}

inline bool segments_intersect(const Vec2 &p1, const Vec2 &p2, const Vec2 &q1, const Vec2 &q2)
{
    const auto orient = [](const Vec2 &a, const Vec2 &b, const Vec2 &c) { return cross2(b - a, c - a); };
    const auto on_seg = [](const Vec2 &a, const Vec2 &b, const Vec2 &c) {
        return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
               c.y <= std::max(a.y, b.y);
    };
    const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
    const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_seg(q1, q2, p1))
        return true;
    if (d2 == 0 && on_seg(q1, q2, p2))
        return true;
    if (d3 == 0 && on_seg(p1, p2, q1))
        return true;
    if (d4 == 0 && on_seg(p1, p2, q2))
        return true;
    return false;
}

// Simple polygon check: >= 3 vertices, non-zero area, no two non-adjacent edges touch,
// no repeated consecutive vertices. O(n^2), fine for building footprints.
inline bool is_simple(std::span<const Vec2> poly)
{
    const std::size_t n = poly.size();
    if (n < 3)
        return false;
    if (area(poly) <= 1e-12)
        return false;
    for (std::size_t i = 0; i < n; ++i)
        if (poly[i] == poly[(i + 1) % n])
            return false;
    for (std::size_t i = 0; i < n; ++i)
    {
        const Vec2 &a1 = poly[i], &a2 = poly[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j)
        {
            if (j == i + 1 || (i == 0 && j == n - 1))
                continue; // adjacent edges share a vertex
            if (segments_intersect(a1, a2, poly[j], poly[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

// Sutherland-Hodgman clip of an arbitrary simple polygon against an axis-aligned box.
// Concave subjects may produce zero-width bridges, which do not affect area or centroid.
inline std::vector<Vec2> clip_to_box(std::span<const Vec2> poly, Vec2 lo, Vec2 hi)
{
    std::vector<Vec2> out(poly.begin(), poly.end());
    const auto clip = [&out](auto inside, auto intersect) {
        std::vector<Vec2> in;
        in.swap(out);
        const std::size_t n = in.size();
        for (std::size_t i = 0; i < n; ++i)
        {
            const Vec2 &cur = in[i], &prev = in[(i + n - 1) % n];
            const bool ci = inside(cur), pi = inside(prev);
            if (ci)
            {
                if (!pi)
                    out.push_back(intersect(prev, cur));
                out.push_back(cur);
            }
            else if (pi)
                out.push_back(intersect(prev, cur));
        }
    };
    const auto lerp_x = [](const Vec2 &a, const Vec2 &b, double x) {
        const double t = (x - a.x) / (b.x - a.x);
        return Vec2{x, a.y + t * (b.y - a.y)};
    };
    const auto lerp_y = [](const Vec2 &a, const Vec2 &b, double y) {
        const double t = (y - a.y) / (b.y - a.y);
        return Vec2{a.x + t * (b.x - a.x), y};
    };
    clip([&](const Vec2 &p) { return p.x >= lo.x; }, [&](const Vec2 &a, const Vec2 &b) { return lerp_x(a, b, lo.x); });
    if (out.empty())
        return out;
    clip([&](const Vec2 &p) { return p.x <= hi.x; }, [&](const Vec2 &a, const Vec2 &b) { return lerp_x(a, b, hi.x); });
    if (out.empty())
        return out;
    clip([&](const Vec2 &p) { return p.y >= lo.y; }, [&](const Vec2 &a, const Vec2 &b) { return lerp_y(a, b, lo.y); });
    if (out.empty())
        return out;
    clip([&](const Vec2 &p) { return p.y <= hi.y; }, [&](const Vec2 &a, const Vec2 &b) { return lerp_y(a, b, hi.y); });
    return out;
}

} // namespace polygon
} // namespace satrt
