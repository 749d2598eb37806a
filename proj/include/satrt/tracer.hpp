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

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "antennas.hpp"
#include "environment.hpp"
#include "errors.hpp"
#include "math.hpp"

namespace satrt
{

// ---------------------------------------------------------------- satellite pose

struct SatellitePose
{
    double elevation_deg = 90.0;
    double azimuth_deg = 0.0;
    double altitude_m = 500e3;
};

struct SatelliteLocation
{
    Vec3 position;
    double slant_range = 0.0;
    Vec3 direction; // unit vector from the scene origin towards the satellite
};

// Spherical-Earth slant range from a ground point to a satellite at `altitude_m`.
inline double slant_range(double elevation_deg, double altitude_m)
{
    if (!(elevation_deg > 0.0 && elevation_deg <= 90.0))
        throw argument_error("elevation must be in (0, 90] degrees, got " + std::to_string(elevation_deg));
    const double re = constants::earth_radius;
    const double s = std::sin(deg2rad(elevation_deg));
    return -re * s + std::sqrt(re * re * s * s + 2.0 * re * altitude_m + altitude_m * altitude_m);
}

// Azimuth is counter-clockwise from +x (east).
inline Vec3 direction_from_angles(double elevation_deg, double azimuth_deg)
{
    const double el = deg2rad(elevation_deg), az = deg2rad(azimuth_deg);
    return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

inline SatelliteLocation satellite_position(const SatellitePose &pose, const Vec3 &scene_origin)
{
    SatelliteLocation loc;
    loc.slant_range = slant_range(pose.elevation_deg, pose.altitude_m);
    loc.direction = direction_from_angles(pose.elevation_deg, pose.azimuth_deg);
    loc.position = scene_origin + loc.direction * loc.slant_range;
    return loc;
}

// ---------------------------------------------------------------- receiver grid

struct RxGridSpec
{
    Vec3 center;
    double side = 4.0;
    int points_per_side = 15;
    MountHeight height_mode = MountHeight::ground;

    std::size_t size() const { return static_cast<std::size_t>(points_per_side) * points_per_side; }

    // Offset l_n of point n = row * points_per_side + col from the center.
    Vec3 offset(std::size_t n) const
    {
        if (points_per_side <= 1)
            return {};
        const auto row = static_cast<int>(n / points_per_side), col = static_cast<int>(n % points_per_side);
        const double step = side / (points_per_side - 1);
        return {-0.5 * side + col * step, -0.5 * side + row * step, 0.0};
    }
    Vec3 point(std::size_t n) const { return center + offset(n); }
    std::vector<Vec3> points() const
    {
        std::vector<Vec3> p(size());
        for (std::size_t n = 0; n < p.size(); ++n)
            p[n] = point(n);
        return p;
    }
};

// ---------------------------------------------------------------- paths

enum class InteractionKind : std::uint8_t
{
    reflection,
    diffraction,
    scattering
};

struct Interaction
{
    InteractionKind kind = InteractionKind::reflection;
    std::uint32_t index = 0; // face, edge or tile index in the Environment

    bool operator==(const Interaction &) const = default;
};

enum class Mechanism : std::uint8_t
{
    L,
    R,
    RD,
    D,
    S,
    RS
};

inline constexpr std::array<Mechanism, 6> all_mechanisms{Mechanism::L, Mechanism::R, Mechanism::RD,
                                                         Mechanism::D, Mechanism::S, Mechanism::RS};

inline const char *to_string(Mechanism m)
{
    switch (m)
    {
    case Mechanism::L: return "L";
    case Mechanism::R: return "R";
    case Mechanism::RD: return "RD";
    case Mechanism::D: return "D";
    case Mechanism::S: return "S";
    case Mechanism::RS: return "RS";
    }
    return "?";
}

struct InteractionCounts
{
    int reflections = 0, diffractions = 0, scatterings = 0;
};

inline InteractionCounts count_interactions(const std::vector<Interaction> &seq)
{
    InteractionCounts c;
    for (const auto &i : seq)
    {
        if (i.kind == InteractionKind::reflection)
            ++c.reflections;
        else if (i.kind == InteractionKind::diffraction)
            ++c.diffractions;
        else
            ++c.scatterings;
    }
    return c;
}

inline Mechanism classify(const std::vector<Interaction> &seq)
{
    const auto c = count_interactions(seq);
    if (c.scatterings > 0)
    {
        if (c.diffractions > 0)
            throw contract_error("diffraction combined with scattering is outside the interaction budget");
        return c.reflections > 0 ? Mechanism::RS : Mechanism::S;
    }
    if (c.diffractions > 0)
        return c.reflections > 0 ? Mechanism::RD : Mechanism::D;
    return c.reflections > 0 ? Mechanism::R : Mechanism::L;
}

inline std::uint64_t hash_interactions(const std::vector<Interaction> &seq)
{
    std::uint64_t h = 1469598103934665603ull;
    const auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b)
        {
            h ^= (v >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    mix(seq.size());
    for (const auto &i : seq)
        mix((static_cast<std::uint64_t>(i.kind) << 32) | i.index);
    return h;
}

struct RayPath
{
    std::vector<Interaction> interactions;
    std::vector<Vec3> vertices; // tx, interaction points..., rx
    std::vector<double> segment_lengths;
    Mechanism label = Mechanism::L;
    std::uint64_t path_id = 0;

    double total_length() const
    {
        double s = 0.0;
        for (double r : segment_lengths)
            s += r;
        return s;
    }
    Vec3 departure() const { return normalize(vertices[1] - vertices[0]); }
    Vec3 arrival() const { return normalize(vertices.back() - vertices[vertices.size() - 2]); }
};

inline RayPath make_path(std::vector<Interaction> seq, std::vector<Vec3> vertices)
{
    RayPath p;
    p.segment_lengths.reserve(vertices.size() - 1);
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
        p.segment_lengths.push_back(distance(vertices[i], vertices[i + 1]));
    p.label = classify(seq);
    p.path_id = hash_interactions(seq);
    p.interactions = std::move(seq);
    p.vertices = std::move(vertices);
    return p;
}

// Same geometry traversed rx to tx.
inline RayPath reversed(const RayPath &p)
{
    std::vector<Interaction> seq(p.interactions.rbegin(), p.interactions.rend());
    std::vector<Vec3> v(p.vertices.rbegin(), p.vertices.rend());
    return make_path(std::move(seq), std::move(v));
}

// ---------------------------------------------------------------- options

struct InteractionBudget
{
    int reflections = 3;
    int diffractions = 2;
    int scatterings = 1;
    int reflections_diffractions = 2;
    int reflections_scatterings = 2;
    int diffractions_scatterings = 0;
};

struct TraceOptions
{
    InteractionBudget budget;
    // Faces and tiles farther than this (horizontally) from the receiver are ignored.
    double roi_radius_m = 100.0;
    double diffraction_roi_radius_m = 60.0;
    bool include_los = true;
};

// Indices of entities close enough to the receiver to be traced.
struct Candidates
{
    std::vector<std::uint32_t> faces, edges, tiles;
};

inline Candidates select_candidates(const Environment &env, const Vec3 &rx, const TraceOptions &opt)
{
    Candidates c;
    const double roi = opt.roi_radius_m > 0.0 ? opt.roi_radius_m : std::numeric_limits<double>::infinity();
    const double droi = opt.diffraction_roi_radius_m > 0.0 ? opt.diffraction_roi_radius_m
                                                            : std::numeric_limits<double>::infinity();
    for (std::uint32_t i = 0; i < env.faces().size(); ++i)
        if (env.horizontal_distance(i, rx) <= roi)
            c.faces.push_back(i);
    for (std::uint32_t i = 0; i < env.edges().size(); ++i)
    {
        const Edge &e = env.edges()[i];
        if (e.open_angle <= constants::pi + 1e-9)
            continue; // concave or flat wedges are not diffracting
        const double d = polygon::point_segment_distance({rx.x, rx.y}, {e.start.x, e.start.y}, {e.end.x, e.end.y});
        if (d <= droi)
            c.edges.push_back(i);
    }
    for (std::uint32_t i = 0; i < env.tiles().size(); ++i)
    {
        const Vec3 &p = env.tiles()[i].center;
        if (std::hypot(p.x - rx.x, p.y - rx.y) <= roi)
            c.tiles.push_back(i);
    }
    return c;
}

namespace detail
{

inline constexpr double front_tol = 1e-9;

inline bool visible_chain(const Environment &env, const std::vector<Vec3> &v)
{
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (!env.visible(v[i], v[i + 1]))
            return false;
    return true;
}

// Point where segment a->b crosses the plane of `f` (a and b on opposite sides).
inline Vec3 plane_crossing(const Face &f, const Vec3 &a, const Vec3 &b)
{
    const double da = f.signed_distance(a), db = f.signed_distance(b);
    return a + (b - a) * (da / (da - db));
}

inline bool in_air(const Edge &e, double angle)
{
    constexpr double tol = 1e-9;
    return angle > tol && angle < e.open_angle - tol;
}

} // namespace detail

// Keller point on edge `e` for a path a -> edge -> b, as the edge parameter in [0, length].
// Unfolding both points into the edge's plane makes the condition a straight line.
inline std::optional<double> keller_parameter(const Edge &e, const Vec3 &a, const Vec3 &b)
{
    const double za = dot(a - e.start, e.direction), zb = dot(b - e.start, e.direction);
    const double ra = norm(a - e.start - e.direction * za);
    const double rb = norm(b - e.start - e.direction * zb);
    const double rs = ra + rb;
    if (!(rs > 0.0))
        return std::nullopt;
    const double t = za * (rb / rs) + zb * (ra / rs);
    const double tol = 1e-9 * std::max(1.0, e.length);
    if (t <= tol || t >= e.length - tol)
        return std::nullopt;
    return t;
}

// Joint Keller points on two edges for a -> e1 -> e2 -> b (Newton on the convex length).
inline std::optional<std::array<double, 2>> keller_parameters(const Edge &e1, const Edge &e2, const Vec3 &a,
                                                              const Vec3 &b)
{
    const Vec3 mid2 = e2.point_at(0.5 * e2.length);
    double t1 = keller_parameter(e1, a, mid2).value_or(0.5 * e1.length);
    double t2 = keller_parameter(e2, e1.point_at(t1), b).value_or(0.5 * e2.length);

    const auto length = [&](double s1, double s2) {
        const Vec3 q1 = e1.point_at(s1), q2 = e2.point_at(s2);
        return distance(a, q1) + distance(q1, q2) + distance(q2, b);
    };
    // Gradient of the length: the Keller residuals on both edges.
    const auto gradient = [&](double s1, double s2) {
        const Vec3 q1 = e1.point_at(s1), q2 = e2.point_at(s2);
        const Vec3 u = normalize(q1 - a), v = normalize(q2 - q1), w = normalize(b - q2);
        return std::array<double, 2>{dot(e1.direction, u) - dot(e1.direction, v),
                                     dot(e2.direction, v) - dot(e2.direction, w)};
    };
    for (int it = 0; it < 60; ++it)
    {
        const Vec3 q1 = e1.point_at(t1), q2 = e2.point_at(t2);
        const Vec3 d0 = q1 - a, d1 = q2 - q1, d2 = b - q2;
        const double l0 = norm(d0), l1 = norm(d1), l2 = norm(d2);
        if (l0 <= 0.0 || l1 <= 0.0 || l2 <= 0.0)
            return std::nullopt;
        const Vec3 u = d0 / l0, v = d1 / l1, w = d2 / l2;
        const double a1 = dot(e1.direction, u), b1 = dot(e1.direction, v);
        const double a2 = dot(e2.direction, v), b2 = dot(e2.direction, w);
        const double g1 = a1 - b1, g2 = a2 - b2;
        const double h11 = (1.0 - a1 * a1) / l0 + (1.0 - b1 * b1) / l1;
        const double h22 = (1.0 - a2 * a2) / l1 + (1.0 - b2 * b2) / l2;
        const double h12 = -(dot(e1.direction, e2.direction) - b1 * a2) / l1;
        const double gn = std::abs(g1) + std::abs(g2);
        if (gn < 1e-14)
            break;
        double det = h11 * h22 - h12 * h12;
        double s1, s2;
        if (det > 1e-300 && h11 > 0.0)
        {
            s1 = -(h22 * g1 - h12 * g2) / det;
            s2 = -(h11 * g2 - h12 * g1) / det;
        }
        else
        {
            s1 = -g1, s2 = -g2;
        }
        // Far sources make the length flat to rounding near the optimum; there the
        // gradient norm decides.
        const double f0 = length(t1, t2);
        const double flat = 4.0 * std::numeric_limits<double>::epsilon() * f0;
        double step = 1.0;
        bool moved = false;
        for (int k = 0; k < 40; ++k, step *= 0.5)
        {
            const double n1 = t1 + step * s1, n2 = t2 + step * s2;
            const double f = length(n1, n2);
            bool accept = f < f0 - flat;
            if (!accept && f <= f0 + flat)
            {
                const auto g = gradient(n1, n2);
                accept = std::abs(g[0]) + std::abs(g[1]) < gn;
            }
            if (accept)
            {
                moved = (n1 != t1 || n2 != t2);
                t1 = n1, t2 = n2;
                break;
            }
        }
        if (!moved)
            break;
    }
    const double tol1 = 1e-9 * std::max(1.0, e1.length), tol2 = 1e-9 * std::max(1.0, e2.length);
    if (t1 <= tol1 || t1 >= e1.length - tol1 || t2 <= tol2 || t2 >= e2.length - tol2)
        return std::nullopt;
    return std::array<double, 2>{t1, t2};
}

// ---------------------------------------------------------------- LoS

inline std::optional<RayPath> los_path(const Environment &env, const Vec3 &tx, const Vec3 &rx)
{
    if (!env.visible(tx, rx))
        return std::nullopt;
    return make_path({}, {tx, rx});
}

// ---------------------------------------------------------------- specular

namespace detail
{

// Back-tracks the image chain from rx and validates every reflection point.
inline bool unfold_specular(const Environment &env, const Vec3 &tx, const Vec3 &rx, const std::uint32_t *seq,
                            const Vec3 *images, int depth, std::vector<Vec3> &out)
{
    const auto &faces = env.faces();
    if (faces[seq[depth - 1]].signed_distance(rx) <= front_tol)
        return false;
    std::array<Vec3, 4> pts;
    Vec3 target = rx;
    for (int j = depth - 1; j >= 0; --j)
    {
        const Face &f = faces[seq[j]];
        if (j < depth - 1 && f.signed_distance(target) <= front_tol)
            return false;
        const Vec3 p = plane_crossing(f, target, images[j]);
        if (!f.contains(p))
            return false;
        pts[j] = p;
        target = p;
    }
    out.clear();
    out.push_back(tx);
    for (int j = 0; j < depth; ++j)
        out.push_back(pts[j]);
    out.push_back(rx);
    return visible_chain(env, out);
}

inline void specular_recurse(const Environment &env, const Candidates &cand, const Vec3 &tx, const Vec3 &rx,
                             int max_depth, int depth, std::array<std::uint32_t, 3> &seq,
                             std::array<Vec3, 3> &images, std::vector<RayPath> &out, std::vector<Vec3> &scratch)
{
    const auto &faces = env.faces();
    const Vec3 source = depth == 0 ? tx : images[depth - 1];
    for (std::uint32_t fi : cand.faces)
    {
        if (depth > 0 && (fi == seq[depth - 1] || !env.facing(seq[depth - 1], fi)))
            continue;
        const Face &f = faces[fi];
        if (f.signed_distance(source) <= front_tol)
            continue;
        seq[depth] = fi;
        images[depth] = mirror_point(source, f.origin, f.normal);
        if (unfold_specular(env, tx, rx, seq.data(), images.data(), depth + 1, scratch))
        {
            std::vector<Interaction> inter;
            for (int j = 0; j <= depth; ++j)
                inter.push_back({InteractionKind::reflection, seq[j]});
            out.push_back(make_path(std::move(inter), scratch));
        }
        if (depth + 1 < max_depth)
            specular_recurse(env, cand, tx, rx, max_depth, depth + 1, seq, images, out, scratch);
    }
}

} // namespace detail

inline std::vector<RayPath> enumerate_specular(const Environment &env, const Candidates &cand, const Vec3 &tx,
                                               const Vec3 &rx, int max_refl)
{
    if (max_refl > 3)
        throw argument_error("at most 3 reflections are supported");
    std::vector<RayPath> out;
    if (max_refl <= 0)
        return out;
    std::array<std::uint32_t, 3> seq{};
    std::array<Vec3, 3> images{};
    std::vector<Vec3> scratch;
    detail::specular_recurse(env, cand, tx, rx, max_refl, 0, seq, images, out, scratch);
    return out;
}

inline std::vector<RayPath> enumerate_specular(const Environment &env, const Vec3 &tx, const Vec3 &rx,
                                               int max_refl = 3, const TraceOptions &opt = {})
{
    return enumerate_specular(env, select_candidates(env, rx, opt), tx, rx, max_refl);
}

// ---------------------------------------------------------------- diffraction

inline std::vector<RayPath> enumerate_diffraction(const Environment &env, const Candidates &cand, const Vec3 &tx,
                                                  const Vec3 &rx, const InteractionBudget &budget)
{
    std::vector<RayPath> out;
    const auto &edges = env.edges();
    const auto &faces = env.faces();
    using detail::front_tol;
    using detail::in_air;

    if (budget.diffractions >= 1)
    {
        for (std::uint32_t ei : cand.edges)
        {
            const Edge &e = edges[ei];
            if (!in_air(e, e.angle_of(tx)) || !in_air(e, e.angle_of(rx)))
                continue;
            const auto t = keller_parameter(e, tx, rx);
            if (!t)
                continue;
            std::vector<Vec3> v{tx, e.point_at(*t), rx};
            if (detail::visible_chain(env, v))
                out.push_back(make_path({{InteractionKind::diffraction, ei}}, std::move(v)));
        }
    }

    if (budget.diffractions >= 2)
    {
        for (std::uint32_t i1 : cand.edges)
        {
            const Edge &e1 = edges[i1];
            if (!in_air(e1, e1.angle_of(tx)))
                continue;
            for (std::uint32_t i2 : cand.edges)
            {
                if (i1 == i2)
                    continue;
                const Edge &e2 = edges[i2];
                if (!in_air(e2, e2.angle_of(rx)))
                    continue;
                // The solid sector of a convex wedge is convex: a segment with both ends
                // inside it cannot reach the air region.
                if (!in_air(e1, e1.angle_of(e2.start)) && !in_air(e1, e1.angle_of(e2.end)))
                    continue;
                if (!in_air(e2, e2.angle_of(e1.start)) && !in_air(e2, e2.angle_of(e1.end)))
                    continue;
                const auto t = keller_parameters(e1, e2, tx, rx);
                if (!t)
                    continue;
                const Vec3 p1 = e1.point_at((*t)[0]), p2 = e2.point_at((*t)[1]);
                if (!in_air(e1, e1.angle_of(p2)) || !in_air(e2, e2.angle_of(p1)))
                    continue;
                std::vector<Vec3> v{tx, p1, p2, rx};
                if (detail::visible_chain(env, v))
                    out.push_back(make_path(
                        {{InteractionKind::diffraction, i1}, {InteractionKind::diffraction, i2}}, std::move(v)));
            }
        }
    }

    if (budget.reflections_diffractions >= 2 && budget.reflections >= 1 && budget.diffractions >= 1)
    {
        for (std::uint32_t fi : cand.faces)
        {
            const Face &f = faces[fi];
            const bool tx_front = f.signed_distance(tx) > front_tol;
            const bool rx_front = f.signed_distance(rx) > front_tol;
            if (!tx_front && !rx_front)
                continue;
            const Vec3 tx_img = mirror_point(tx, f.origin, f.normal);
            const Vec3 rx_img = mirror_point(rx, f.origin, f.normal);
            for (std::uint32_t ei : cand.edges)
            {
                const Edge &e = edges[ei];
                if (e.face0 == fi || e.face_n == fi)
                    continue;
                // Reflection then diffraction: tx -> R -> P -> rx.
                if (tx_front && in_air(e, e.angle_of(rx)))
                {
                    if (const auto t = keller_parameter(e, tx_img, rx))
                    {
                        const Vec3 p = e.point_at(*t);
                        if (f.signed_distance(p) > front_tol)
                        {
                            const Vec3 r = detail::plane_crossing(f, p, tx_img);
                            if (f.contains(r) && in_air(e, e.angle_of(r)))
                            {
                                std::vector<Vec3> v{tx, r, p, rx};
                                if (detail::visible_chain(env, v))
                                    out.push_back(make_path(
                                        {{InteractionKind::reflection, fi}, {InteractionKind::diffraction, ei}},
                                        std::move(v)));
                            }
                        }
                    }
                }
                // Diffraction then reflection: tx -> P -> R -> rx.
                if (rx_front && in_air(e, e.angle_of(tx)))
                {
                    if (const auto t = keller_parameter(e, tx, rx_img))
                    {
                        const Vec3 p = e.point_at(*t);
                        if (f.signed_distance(p) > front_tol)
                        {
                            const Vec3 r = detail::plane_crossing(f, p, rx_img);
                            if (f.contains(r) && in_air(e, e.angle_of(r)))
                            {
                                std::vector<Vec3> v{tx, p, r, rx};
                                if (detail::visible_chain(env, v))
                                    out.push_back(make_path(
                                        {{InteractionKind::diffraction, ei}, {InteractionKind::reflection, fi}},
                                        std::move(v)));
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

inline std::vector<RayPath> enumerate_diffraction(const Environment &env, const Vec3 &tx, const Vec3 &rx,
                                                  const InteractionBudget &budget = {}, const TraceOptions &opt = {})
{
    return enumerate_diffraction(env, select_candidates(env, rx, opt), tx, rx, budget);
}

// ---------------------------------------------------------------- scattering

inline std::vector<RayPath> enumerate_scattering(const Environment &env, const Candidates &cand, const Vec3 &tx,
                                                 const Vec3 &rx, const InteractionBudget &budget)
{
    std::vector<RayPath> out;
    if (budget.scatterings < 1)
        return out;
    const auto &tiles = env.tiles();
    const auto &faces = env.faces();
    using detail::front_tol;

    // Lazily evaluated per-tile visibility from tx (lit) and towards rx (seen).
    enum : std::uint8_t
    {
        unknown = 0,
        yes = 1,
        no = 2
    };
    std::vector<std::uint8_t> lit(tiles.size(), unknown), seen(tiles.size(), unknown);
    const auto is_lit = [&](std::uint32_t ti) {
        if (lit[ti] == unknown)
        {
            const auto &t = tiles[ti];
            lit[ti] = (dot(tx - t.center, t.normal) > front_tol && env.visible(tx, t.center)) ? yes : no;
        }
        return lit[ti] == yes;
    };
    const auto is_seen = [&](std::uint32_t ti) {
        if (seen[ti] == unknown)
        {
            const auto &t = tiles[ti];
            seen[ti] = (dot(rx - t.center, t.normal) > front_tol && env.visible(t.center, rx)) ? yes : no;
        }
        return seen[ti] == yes;
    };

    for (std::uint32_t ti : cand.tiles)
        if (is_lit(ti) && is_seen(ti))
            out.push_back(make_path({{InteractionKind::scattering, ti}}, {tx, tiles[ti].center, rx}));

    if (budget.reflections_scatterings < 2 || budget.reflections < 1)
        return out;

    for (std::uint32_t fi : cand.faces)
    {
        const Face &f = faces[fi];
        const bool tx_front = f.signed_distance(tx) > front_tol;
        const bool rx_front = f.signed_distance(rx) > front_tol;
        if (!tx_front && !rx_front)
            continue;
        const Vec3 tx_img = mirror_point(tx, f.origin, f.normal);
        const Vec3 rx_img = mirror_point(rx, f.origin, f.normal);
        for (std::uint32_t ti : cand.tiles)
        {
            const auto &t = tiles[ti];
            if (t.id.face == fi || f.signed_distance(t.center) <= front_tol)
                continue;
            // Reflection then scattering: tx -> R -> tile -> rx.
            if (tx_front && dot(tx_img - t.center, t.normal) > front_tol && is_seen(ti))
            {
                const Vec3 r = detail::plane_crossing(f, t.center, tx_img);
                if (dot(r - t.center, t.normal) > front_tol && f.contains(r) && env.visible(tx, r) &&
                    env.visible(r, t.center))
                    out.push_back(make_path({{InteractionKind::reflection, fi}, {InteractionKind::scattering, ti}},
                                            {tx, r, t.center, rx}));
            }
            // Scattering then reflection: tx -> tile -> R -> rx.
            if (rx_front && dot(rx_img - t.center, t.normal) > front_tol && is_lit(ti))
            {
                const Vec3 r = detail::plane_crossing(f, t.center, rx_img);
                if (dot(r - t.center, t.normal) > front_tol && f.contains(r) && env.visible(t.center, r) &&
                    env.visible(r, rx))
                    out.push_back(make_path({{InteractionKind::scattering, ti}, {InteractionKind::reflection, fi}},
                                            {tx, t.center, r, rx}));
            }
        }
    }
    return out;
}

inline std::vector<RayPath> enumerate_scattering(const Environment &env, const Vec3 &tx, const Vec3 &rx,
                                                 const InteractionBudget &budget = {}, const TraceOptions &opt = {})
{
    return enumerate_scattering(env, select_candidates(env, rx, opt), tx, rx, budget);
}

// ---------------------------------------------------------------- everything

inline std::vector<RayPath> trace_paths(const Environment &env, const Vec3 &tx, const Vec3 &rx,
                                        const TraceOptions &opt = {})
{
    const Candidates cand = select_candidates(env, rx, opt);
    std::vector<RayPath> out;
    if (opt.include_los)
        if (auto p = los_path(env, tx, rx))
            out.push_back(std::move(*p));
    auto spec = enumerate_specular(env, cand, tx, rx, std::min(opt.budget.reflections, 3));
    auto diff = enumerate_diffraction(env, cand, tx, rx, opt.budget);
    auto scat = enumerate_scattering(env, cand, tx, rx, opt.budget);
    out.reserve(out.size() + spec.size() + diff.size() + scat.size());
    for (auto *v : {&spec, &diff, &scat})
        for (auto &p : *v)
            out.push_back(std::move(p));
    return out;
}

// ---------------------------------------------------------------- dump

inline const char *interaction_code(InteractionKind k)
{
    switch (k)
    {
    case InteractionKind::reflection: return "R";
    case InteractionKind::diffraction: return "D";
    case InteractionKind::scattering: return "S";
    }
    return "?";
}

// One JSON object per line: label, path_id, interactions, vertices, lengths.
inline void write_paths_jsonl(std::ostream &os, const std::vector<RayPath> &paths)
{
    const auto old_prec = os.precision(17);
    for (const auto &p : paths)
    {
        os << "{\"path_id\":" << p.path_id << ",\"label\":\"" << to_string(p.label) << "\",\"interactions\":[";
        for (std::size_t i = 0; i < p.interactions.size(); ++i)
            os << (i ? "," : "") << "[\"" << interaction_code(p.interactions[i].kind) << "\","
               << p.interactions[i].index << "]";
        os << "],\"vertices\":[";
        for (std::size_t i = 0; i < p.vertices.size(); ++i)
            os << (i ? "," : "") << "[" << p.vertices[i].x << "," << p.vertices[i].y << "," << p.vertices[i].z << "]";
        os << "],\"lengths\":[";
        for (std::size_t i = 0; i < p.segment_lengths.size(); ++i)
            os << (i ? "," : "") << p.segment_lengths[i];
        os << "]}\n";
    }
    os.precision(old_prec);
}

} // namespace satrt
