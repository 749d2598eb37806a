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

// Brute-force reference implementations used as test oracles. They share only the
// basic vector and face types with the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <satrt/satrt.hpp>

namespace oracle
{

using satrt::Face;
using satrt::Vec2;
using satrt::Vec3;

inline Face make_face(Vec3 origin, Vec3 u, Vec3 v, std::vector<Vec2> poly, int owner = 0)
{
    Face f;
    f.owner = owner;
    f.kind = satrt::FaceKind::wall;
    f.origin = origin;
    f.u_axis = satrt::normalize(u);
    f.v_axis = satrt::normalize(v);
    f.normal = satrt::cross(f.u_axis, f.v_axis);
    f.polygon = std::move(poly);
    return f;
}

inline Face rect_face(Vec3 origin, Vec3 u, Vec3 v, double w, double h, int owner = 0)
{
    return make_face(origin, u, v, {{0, 0}, {w, 0}, {w, h}, {0, h}}, owner);
}

inline Face ground_face(double half)
{
    Face f = rect_face({-half, -half, 0}, {1, 0, 0}, {0, 1, 0}, 2 * half, 2 * half, satrt::Face::terrain_owner);
    f.kind = satrt::FaceKind::terrain;
    return f;
}

// Even-odd point in polygon on the face plane.
inline bool inside(const Face &f, const Vec3 &p, double tol = 1e-9)
{
    if (std::abs(satrt::dot(p - f.origin, f.normal)) > tol)
        return false;
    const Vec2 q{satrt::dot(p - f.origin, f.u_axis), satrt::dot(p - f.origin, f.v_axis)};
    bool in = false;
    const auto &poly = f.polygon;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
    {
        if ((poly[i].y > q.y) != (poly[j].y > q.y))
        {
            const double x = poly[j].x + (q.y - poly[j].y) * (poly[i].x - poly[j].x) / (poly[i].y - poly[j].y);
            if (q.x < x)
                in = !in;
        }
    }
    return in;
}

// Segment a-b is blocked if it crosses the interior of any face away from both ends.
inline bool visible(const std::vector<Face> &faces, const Vec3 &a, const Vec3 &b, double eps = 1e-6)
{
    const double len = satrt::distance(a, b);
    for (const auto &f : faces)
    {
        const double da = satrt::dot(a - f.origin, f.normal), db = satrt::dot(b - f.origin, f.normal);
        if ((da > 0) == (db > 0) || da == db)
            continue;
        const double t = da / (da - db);
        if (t * len <= eps || (1 - t) * len <= eps)
            continue;
        const Vec3 p = a + (b - a) * t;
        if (inside(f, p, 1e-6))
            return false;
    }
    return true;
}

struct SpecularPath
{
    std::vector<std::uint32_t> faces;
    std::vector<Vec3> vertices;
};

// Exhaustive image tree: every face sequence without immediate repeats, no pruning.
inline std::vector<SpecularPath> image_tree(const std::vector<Face> &faces, const Vec3 &tx, const Vec3 &rx, int max_refl)
{
    std::vector<SpecularPath> out;
    std::vector<std::uint32_t> seq;
    std::function<void()> rec = [&] {
        if (!seq.empty())
        {
            // Images of tx through the sequence.
            std::vector<Vec3> img;
            Vec3 s = tx;
            for (auto fi : seq)
            {
                const Face &f = faces[fi];
                s = s - f.normal * (2 * satrt::dot(s - f.origin, f.normal));
                img.push_back(s);
            }
            std::vector<Vec3> pts(seq.size());
            Vec3 target = rx;
            bool ok = true;
            for (int j = static_cast<int>(seq.size()) - 1; j >= 0 && ok; --j)
            {
                const Face &f = faces[seq[j]];
                const double dt = satrt::dot(target - f.origin, f.normal), di = satrt::dot(img[j] - f.origin, f.normal);
                if (!(dt > 0 && di < 0))
                {
                    ok = false;
                    break;
                }
                pts[j] = target + (img[j] - target) * (dt / (dt - di));
                ok = inside(f, pts[j]);
                target = pts[j];
            }
            if (ok)
            {
                std::vector<Vec3> v{tx};
                v.insert(v.end(), pts.begin(), pts.end());
                v.push_back(rx);
                // Every bounce happens on the front side.
                for (std::size_t j = 0; j < seq.size() && ok; ++j)
                {
                    const Face &f = faces[seq[j]];
                    ok = satrt::dot(v[j] - f.origin, f.normal) > 1e-9 && satrt::dot(v[j + 2] - f.origin, f.normal) > 1e-9;
                }
                for (std::size_t j = 0; j + 1 < v.size() && ok; ++j)
                    ok = visible(faces, v[j], v[j + 1]);
                if (ok)
                    out.push_back({seq, v});
            }
        }
        if (static_cast<int>(seq.size()) == max_refl)
            return;
        for (std::uint32_t fi = 0; fi < faces.size(); ++fi)
        {
            if (!seq.empty() && seq.back() == fi)
                continue;
            seq.push_back(fi);
            rec();
            seq.pop_back();
        }
    };
    rec();
    return out;
}

// Golden-section minimum of |a - q(t)| + |q(t) - b| along an edge.
inline double golden_keller(const satrt::Edge &e, const Vec3 &a, const Vec3 &b)
{
    const auto len = [&](double t) { return satrt::distance(a, e.point_at(t)) + satrt::distance(e.point_at(t), b); };
    const double g = (std::sqrt(5.0) - 1) / 2;
    double lo = 0, hi = e.length;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = len(x1), f2 = len(x2);
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i)
    {
        if (f1 < f2)
            hi = x2, x2 = x1, f2 = f1, x1 = hi - g * (hi - lo), f1 = len(x1);
        else
            lo = x1, x1 = x2, f1 = f2, x2 = lo + g * (hi - lo), f2 = len(x2);
    }
    return 0.5 * (lo + hi);
}

// Random scenes of at most four planar quads above or on the ground.
inline std::vector<Face> random_face_scene(std::mt19937_64 &rng, int nfaces)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Face> faces;
    if (u(rng) < 0.5)
        faces.push_back(ground_face(200));
    while (static_cast<int>(faces.size()) < nfaces)
    {
        const double az = 2 * satrt::constants::pi * u(rng);
        const double tilt = (u(rng) - 0.5) * 0.6;
        const Vec3 uu{std::cos(az), std::sin(az), 0};
        const Vec3 vv = satrt::normalize(Vec3{-std::sin(az) * std::sin(tilt), std::cos(az) * std::sin(tilt), std::cos(tilt)});
        const Vec3 o{(u(rng) - 0.5) * 60, (u(rng) - 0.5) * 60, u(rng) * 3};
        faces.push_back(rect_face(o, uu, vv, 10 + 30 * u(rng), 5 + 20 * u(rng), static_cast<int>(faces.size())));
    }
    return faces;
}

} // namespace oracle
