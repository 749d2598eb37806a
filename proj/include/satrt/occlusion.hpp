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
#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

#include "math.hpp"
#include "polygon.hpp"
#include "scene.hpp"

namespace satrt
{

// Default trim applied at both ends of every visibility segment so that the surface an
// interaction happens on never occludes its own outgoing or incoming ray.
inline constexpr double self_intersection_eps = 1e-6;

// Segment-vs-solid occlusion for prism scenes, accelerated by a uniform 2D grid of
// footprint bounding boxes. Terrain never occludes.
class PrismOccluder
{
  public:
    explicit PrismOccluder(const Scene &scene, double cell_size = 0.0)
    {
        for (const auto &b : scene.buildings)
        {
            Prism p;
            p.footprint = b.footprint;
            p.height = b.height;
            p.lo = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
            p.hi = {-p.lo.x, -p.lo.y};
            for (const auto &v : b.footprint)
            {
                p.lo = {std::min(p.lo.x, v.x), std::min(p.lo.y, v.y)};
                p.hi = {std::max(p.hi.x, v.x), std::max(p.hi.y, v.y)};
            }
            max_height_ = std::max(max_height_, b.height);
            prisms_.push_back(std::move(p));
        }
        lo_ = {scene.bounds.xmin - 1.0, scene.bounds.ymin - 1.0};
        hi_ = {scene.bounds.xmax + 1.0, scene.bounds.ymax + 1.0};
        cell_ = cell_size > 0.0 ? cell_size : 16.0;
        nx_ = std::max(1, static_cast<int>(std::ceil((hi_.x - lo_.x) / cell_)));
        ny_ = std::max(1, static_cast<int>(std::ceil((hi_.y - lo_.y) / cell_)));
        cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
        for (std::uint32_t i = 0; i < prisms_.size(); ++i)
        {
            const auto &p = prisms_[i];
            const int x0 = cell_x(p.lo.x), x1 = cell_x(p.hi.x), y0 = cell_y(p.lo.y), y1 = cell_y(p.hi.y);
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x)
                    cells_[static_cast<std::size_t>(y) * nx_ + x].push_back(i);
        }
    }

    // True when the open segment (a, b), trimmed by `eps` metres at both ends, passes
    // through the interior of any building.
    bool blocked(const Vec3 &a, const Vec3 &b, double eps = self_intersection_eps) const
    {
        if (prisms_.empty())
            return false;
        const Vec3 d = b - a;
        const double len = norm(d);
        if (len <= 2.0 * eps)
            return false;
        double t0 = eps / len, t1 = 1.0 - eps / len;

        // Only the part of the segment below the tallest roof can hit anything.
        if (std::abs(d.z) > 0.0)
        {
            const double tz = (max_height_ - a.z) / d.z;
            if (d.z > 0.0)
                t1 = std::min(t1, tz);
            else
                t0 = std::max(t0, tz);
        }
        else if (a.z >= max_height_)
            return false;
        if (t0 >= t1)
            return false;

        // Clip to the grid rectangle (Liang-Barsky).
        if (!clip_axis(a.x, d.x, lo_.x, hi_.x, t0, t1) || !clip_axis(a.y, d.y, lo_.y, hi_.y, t0, t1))
            return false;

        thread_local std::vector<std::uint32_t> tested;
        tested.clear();
        const auto test_cell = [&](int cx, int cy) {
            for (std::uint32_t id : cells_[static_cast<std::size_t>(cy) * nx_ + cx])
            {
                if (std::find(tested.begin(), tested.end(), id) != tested.end())
                    continue;
                tested.push_back(id);
                if (hits_prism(prisms_[id], a, d, len, t0, t1))
                    return true;
            }
            return false;
        };

        // Amanatides-Woo traversal of the cells the 2D projection crosses.
        const double px = a.x + t0 * d.x, py = a.y + t0 * d.y;
        int cx = cell_x(px), cy = cell_y(py);
        const int ex = cell_x(a.x + t1 * d.x), ey = cell_y(a.y + t1 * d.y);
        const int sx = d.x > 0 ? 1 : (d.x < 0 ? -1 : 0), sy = d.y > 0 ? 1 : (d.y < 0 ? -1 : 0);
        const double inf = std::numeric_limits<double>::infinity();
        const double tdx = sx != 0 ? cell_ / std::abs(d.x) : inf;
        const double tdy = sy != 0 ? cell_ / std::abs(d.y) : inf;
        double tmx = sx > 0 ? (lo_.x + (cx + 1) * cell_ - a.x) / d.x : (sx < 0 ? (lo_.x + cx * cell_ - a.x) / d.x : inf);
        double tmy = sy > 0 ? (lo_.y + (cy + 1) * cell_ - a.y) / d.y : (sy < 0 ? (lo_.y + cy * cell_ - a.y) / d.y : inf);
        const int max_steps = nx_ + ny_ + 4;
        for (int step = 0; step < max_steps; ++step)
        {
            if (test_cell(cx, cy))
                return true;
            if (cx == ex && cy == ey)
                break;
            if (tmx < tmy)
            {
                if (tmx > t1)
                    break;
                cx += sx, tmx += tdx;
            }
            else
            {
                if (tmy > t1)
                    break;
                cy += sy, tmy += tdy;
            }
            if (cx < 0 || cy < 0 || cx >= nx_ || cy >= ny_)
                break;
        }
        return false;
    }

    // Point strictly inside some building volume.
    bool inside_solid(const Vec3 &p, double tol = 1e-9) const
    {
        if (p.x < lo_.x || p.y < lo_.y || p.x > hi_.x || p.y > hi_.y)
            return false;
        for (std::uint32_t id : cells_[static_cast<std::size_t>(cell_y(p.y)) * nx_ + cell_x(p.x)])
        {
            const auto &pr = prisms_[id];
            if (p.z > tol && p.z < pr.height - tol && polygon::contains_strict({p.x, p.y}, pr.footprint, tol))
                return true;
        }
        return false;
    }

  private:
    struct Prism
    {
        std::vector<Vec2> footprint;
        double height = 0.0;
        Vec2 lo, hi;
    };

    int cell_x(double x) const { return std::clamp(static_cast<int>(std::floor((x - lo_.x) / cell_)), 0, nx_ - 1); }
    int cell_y(double y) const { return std::clamp(static_cast<int>(std::floor((y - lo_.y) / cell_)), 0, ny_ - 1); }

    static bool clip_axis(double p, double d, double lo, double hi, double &t0, double &t1)
    {
        if (d == 0.0)
            return p >= lo && p <= hi;
        double ta = (lo - p) / d, tb = (hi - p) / d;
        if (ta > tb)
            std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        return t0 < t1;
    }

    static bool hits_prism(const Prism &pr, const Vec3 &a, const Vec3 &d, double len, double t0, double t1)
    {
        constexpr double tol = 1e-9;
        // Parameter range strictly between terrain and roof.
        if (d.z != 0.0)
        {
            double ta = (tol - a.z) / d.z, tb = (pr.height - tol - a.z) / d.z;
            if (ta > tb)
                std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
        }
        else if (!(a.z > tol && a.z < pr.height - tol))
            return false;
        if (t0 >= t1)
            return false;

        const Vec2 a2{a.x, a.y}, d2{d.x, d.y};
        const Vec2 p0 = a2 + d2 * t0, p1 = a2 + d2 * t1;
        if (std::max(p0.x, p1.x) < pr.lo.x - tol || std::min(p0.x, p1.x) > pr.hi.x + tol ||
            std::max(p0.y, p1.y) < pr.lo.y - tol || std::min(p0.y, p1.y) > pr.hi.y + tol)
            return false;

        const double len2d = norm2d(d2);
        if (len2d * (t1 - t0) < 1e-12)
            return polygon::contains_strict(a2 + d2 * (0.5 * (t0 + t1)), pr.footprint, tol);

        thread_local std::vector<double> ts;
        ts.clear();
        ts.push_back(t0);
        const std::size_t n = pr.footprint.size();
        for (std::size_t i = 0; i < n; ++i)
        {
            const Vec2 q = pr.footprint[i], e = pr.footprint[(i + 1) % n] - q;
            const double den = cross2(d2, e);
            if (std::abs(den) < 1e-300)
                continue;
            const Vec2 w = q - a2;
            const double t = cross2(w, e) / den;
            const double s = cross2(w, d2) / den;
            if (s >= -1e-12 && s <= 1.0 + 1e-12 && t > t0 && t < t1)
                ts.push_back(t);
        }
        ts.push_back(t1);
        std::sort(ts.begin(), ts.end());
        const double min_dt = 1e-9 / std::max(len2d, 1e-300);
        for (std::size_t i = 0; i + 1 < ts.size(); ++i)
        {
            if (ts[i + 1] - ts[i] <= min_dt)
                continue;
            if (polygon::contains_strict(a2 + d2 * (0.5 * (ts[i] + ts[i + 1])), pr.footprint, tol))
                return true;
        }
        (void)len;
        return false;
    }

    std::vector<Prism> prisms_;
    double max_height_ = 0.0;
    Vec2 lo_, hi_;
    double cell_ = 16.0;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<std::uint32_t>> cells_;
};

// Brute-force occlusion against a list of thin planar faces. Used for hand-built
// scenes that are not prism cities.
class FaceOccluder
{
  public:
    explicit FaceOccluder(std::vector<Face> faces) : faces_(std::move(faces)) {}

    bool blocked(const Vec3 &a, const Vec3 &b, double eps = self_intersection_eps) const
    {
        const double len = distance(a, b);
        if (len <= 2.0 * eps)
            return false;
        const double t0 = eps / len, t1 = 1.0 - eps / len;
        for (const auto &f : faces_)
        {
            const double da = f.signed_distance(a), db = f.signed_distance(b);
            if ((da > 0.0) == (db > 0.0) || da == db)
                continue;
            const double t = da / (da - db);
            if (t <= t0 || t >= t1)
                continue;
            const Vec3 p = a + (b - a) * t;
            if (polygon::contains_strict(f.to_plane(p), f.polygon, 1e-9))
                return true;
        }
        return false;
    }

  private:
    std::vector<Face> faces_;
};

class Occluder
{
  public:
    explicit Occluder(PrismOccluder p) : impl_(std::move(p)) {}
    explicit Occluder(FaceOccluder f) : impl_(std::move(f)) {}

    bool blocked(const Vec3 &a, const Vec3 &b, double eps = self_intersection_eps) const
    {
        return std::visit([&](const auto &o) { return o.blocked(a, b, eps); }, impl_);
    }
    bool visible(const Vec3 &a, const Vec3 &b, double eps = self_intersection_eps) const { return !blocked(a, b, eps); }

  private:
    std::variant<PrismOccluder, FaceOccluder> impl_;
};

// LoS between two points of a prism scene: true iff the open segment crosses no building.
inline bool los_test(const Scene &scene, const Vec3 &a, const Vec3 &b)
{
    return !PrismOccluder(scene).blocked(a, b, 0.0);
}

} // namespace satrt
