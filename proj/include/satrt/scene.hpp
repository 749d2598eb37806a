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
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "material.hpp"
#include "math.hpp"
#include "polygon.hpp"

namespace satrt
{

struct Bounds
{
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

    double width() const { return xmax - xmin; }
    double depth() const { return ymax - ymin; }
    double area() const { return width() * depth(); }
    Vec2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
    bool contains(const Vec2 &p, double tol = 0.0) const
    {
        return p.x >= xmin - tol && p.x <= xmax + tol && p.y >= ymin - tol && p.y <= ymax + tol;
    }
    bool operator==(const Bounds &) const = default;
};

// Vertical extrusion of a footprint polygon from the terrain (z = 0) to `height`.
struct BuildingPrism
{
    std::string id;
    std::vector<Vec2> footprint; // counter-clockwise after validation
    double height = 0.0;
    Material wall_material;
    bool explicit_material = false; // false: band defaults apply

    double footprint_area() const { return polygon::area(footprint); }
    bool operator==(const BuildingPrism &) const = default;
};

struct Scene
{
    std::vector<BuildingPrism> buildings;
    Material terrain_material;
    bool explicit_terrain = false;
    bool has_terrain = true; // false: no ground plane (free space)
    Bounds bounds;
    Scenario scenario = Scenario::custom;

    // Orients every footprint counter-clockwise and checks all invariants.
    void normalize_and_validate()
    {
        if (!(bounds.xmax > bounds.xmin) || !(bounds.ymax > bounds.ymin))
            throw validation_error("scene bounds are empty or inverted");
        terrain_material.validate();
        std::set<std::string> ids;
        for (auto &b : buildings)
        {
            const auto fail = [&b](const std::string &why) {
                throw validation_error("building '" + b.id + "': " + why);
            };
            if (b.footprint.size() < 3)
                fail("footprint needs at least 3 vertices, got " + std::to_string(b.footprint.size()));
            if (!(b.height > 0.0))
                fail("height must be > 0, got " + std::to_string(b.height));
            if (!polygon::is_simple(b.footprint))
                fail("footprint is not a simple polygon");
            if (polygon::signed_area(b.footprint) < 0.0)
                std::reverse(b.footprint.begin(), b.footprint.end());
            for (const auto &p : b.footprint)
                if (!bounds.contains(p, 1e-9))
                    fail("footprint vertex outside scene bounds");
            try
            {
                b.wall_material.validate();
            }
            catch (const validation_error &e)
            {
                fail(e.what());
            }
            if (!ids.insert(b.id).second)
                fail("duplicate building id");
        }
    }

    double mean_building_height() const
    {
        if (buildings.empty())
            return 0.0;
        double s = 0.0;
        for (const auto &b : buildings)
            s += b.height;
        return s / static_cast<double>(buildings.size());
    }

    double max_building_height() const
    {
        double m = 0.0;
        for (const auto &b : buildings)
            m = std::max(m, b.height);
        return m;
    }

    bool operator==(const Scene &) const = default;
};

// Per-band EM parameters, indexed like Scene::buildings. Buildings that carry explicit
// parameters keep them in every band.
struct MaterialSet
{
    std::vector<Material> walls;
    Material terrain;

    static MaterialSet nominal(const Scene &scene)
    {
        MaterialSet m;
        m.terrain = scene.terrain_material;
        for (const auto &b : scene.buildings)
            m.walls.push_back(b.wall_material);
        return m;
    }

    static MaterialSet for_band(const Scene &scene, Band band)
    {
        MaterialSet m;
        m.terrain = scene.explicit_terrain ? scene.terrain_material : default_terrain_material(band, scene.scenario);
        for (const auto &b : scene.buildings)
            m.walls.push_back(b.explicit_material ? b.wall_material : default_wall_material(band));
        return m;
    }

    const Material &of_owner(int owner) const
    {
        return owner < 0 ? terrain : walls.at(static_cast<std::size_t>(owner));
    }
};

enum class FaceKind : std::uint8_t
{
    wall,
    roof,
    terrain
};

// Planar polygonal face. Points in the plane are (origin + u*u_axis + v*v_axis) and
// u_axis x v_axis = normal, so `polygon` is counter-clockwise seen from the front.
struct Face
{
    static constexpr int terrain_owner = -1;

    int owner = terrain_owner;
    FaceKind kind = FaceKind::terrain;
    Vec3 origin;
    Vec3 normal;
    Vec3 u_axis;
    Vec3 v_axis;
    std::vector<Vec2> polygon;
    Material material;

    Vec2 to_plane(const Vec3 &p) const
    {
        const Vec3 d = p - origin;
        return {dot(d, u_axis), dot(d, v_axis)};
    }
    Vec3 to_world(const Vec2 &q) const { return origin + u_axis * q.x + v_axis * q.y; }
    double signed_distance(const Vec3 &p) const { return dot(p - origin, normal); }
    double area() const { return polygon::area(polygon); }

    // Point assumed to lie on the plane; inside or within `tol` of the boundary.
    bool contains(const Vec3 &p, double tol = 1e-9) const
    {
        return polygon::contains_closed(to_plane(p), polygon, tol);
    }
};

enum class EdgeKind : std::uint8_t
{
    vertical_corner,
    rooftop
};

// Straight wedge edge. The open (air) region is swept by rotating from face0 about
// `direction` by `open_angle`; face0 lies along `tangent0` and its outward normal is
// `normal0`, with direction = tangent0 x normal0. The UTD wedge index is open_angle / pi.
struct Edge
{
    Vec3 start;
    Vec3 end;
    Vec3 direction;
    double length = 0.0;
    std::size_t face0 = 0;
    std::size_t face_n = 0;
    double open_angle = 0.0;
    Vec3 tangent0;
    Vec3 normal0;
    EdgeKind kind = EdgeKind::vertical_corner;
    int owner = 0;

    double wedge_index() const { return open_angle / constants::pi; }
    Vec3 point_at(double t) const { return start + direction * t; }

    // Angle of `p` around the edge measured from face0 through the air region, in [0, 2pi).
    double angle_of(const Vec3 &p) const
    {
        const Vec3 w = p - start;
        const Vec3 wp = w - direction * dot(w, direction);
        double a = std::atan2(dot(wp, normal0), dot(wp, tangent0));
        if (a < 0.0)
            a += 2.0 * constants::pi;
        return a;
    }
};

struct TileId
{
    std::uint32_t face = 0;
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    auto operator<=>(const TileId &) const = default;
};

struct ScatterTile
{
    TileId id;
    Vec3 center;
    Vec3 normal;
    double area = 0.0;
    int owner = Face::terrain_owner;
    Material material;
};

struct FacesAndEdges
{
    std::vector<Face> faces;
    std::vector<Edge> edges;
};

// Faces: terrain first (index 0, absent when the scene has no ground), then per building its walls in footprint order and its roof.
// Edges: per building, vertical corners (one per footprint vertex) and rooftop edges (one per wall).
inline FacesAndEdges derive_faces_edges(const Scene &scene)
{
    FacesAndEdges out;
    if (scene.has_terrain)
    {
        Face t;
        t.owner = Face::terrain_owner;
        t.kind = FaceKind::terrain;
        t.origin = {0.0, 0.0, 0.0};
        t.normal = {0.0, 0.0, 1.0};
        t.u_axis = {1.0, 0.0, 0.0};
        t.v_axis = {0.0, 1.0, 0.0};
        const auto &b = scene.bounds;
        t.polygon = {{b.xmin, b.ymin}, {b.xmax, b.ymin}, {b.xmax, b.ymax}, {b.xmin, b.ymax}};
        t.material = scene.terrain_material;
        out.faces.push_back(std::move(t));
    }

    for (std::size_t bi = 0; bi < scene.buildings.size(); ++bi)
    {
        const auto &bld = scene.buildings[bi];
        const auto &fp = bld.footprint;
        const std::size_t n = fp.size();
        const std::size_t first_wall = out.faces.size();
        for (std::size_t i = 0; i < n; ++i)
        {
            const Vec2 a = fp[i], b = fp[(i + 1) % n];
            const double len = norm2d(b - a);
            Face w;
            w.owner = static_cast<int>(bi);
            w.kind = FaceKind::wall;
            w.origin = {a.x, a.y, 0.0};
            w.u_axis = {(b.x - a.x) / len, (b.y - a.y) / len, 0.0};
            w.v_axis = {0.0, 0.0, 1.0};
            w.normal = cross(w.u_axis, w.v_axis);
            w.polygon = {{0.0, 0.0}, {len, 0.0}, {len, bld.height}, {0.0, bld.height}};
            w.material = bld.wall_material;
            out.faces.push_back(std::move(w));
        }
        const std::size_t roof = out.faces.size();
        {
            Face r;
            r.owner = static_cast<int>(bi);
            r.kind = FaceKind::roof;
            r.origin = {0.0, 0.0, bld.height};
            r.normal = {0.0, 0.0, 1.0};
            r.u_axis = {1.0, 0.0, 0.0};
            r.v_axis = {0.0, 1.0, 0.0};
            r.polygon = fp;
            r.material = bld.wall_material;
            out.faces.push_back(std::move(r));
        }

        for (std::size_t i = 0; i < n; ++i)
        {
            const std::size_t wall_i = first_wall + i;
            const std::size_t wall_prev = first_wall + (i + n - 1) % n;
            const Vec2 p = fp[i];
            const Vec2 a = fp[(i + 1) % n] - p;
            const Vec2 b = fp[(i + n - 1) % n] - p;
            double interior = std::atan2(cross2(a, b), dot2(a, b));
            if (interior < 0.0)
                interior += 2.0 * constants::pi;

            const Face &w = out.faces[wall_i];
            Edge e;
            e.kind = EdgeKind::vertical_corner;
            e.owner = static_cast<int>(bi);
            e.face0 = wall_i;
            e.face_n = wall_prev;
            e.tangent0 = w.u_axis;
            e.normal0 = w.normal;
            e.direction = cross(e.tangent0, e.normal0); // -z for vertical walls
            e.open_angle = 2.0 * constants::pi - interior;
            e.start = {p.x, p.y, bld.height};
            e.end = {p.x, p.y, 0.0};
            e.length = bld.height;
            out.edges.push_back(e);
        }
        for (std::size_t i = 0; i < n; ++i)
        {
            const Face &w = out.faces[first_wall + i];
            const Vec2 a = fp[i], b = fp[(i + 1) % n];
            Edge e;
            e.kind = EdgeKind::rooftop;
            e.owner = static_cast<int>(bi);
            e.face0 = roof;
            e.face_n = first_wall + i;
            e.tangent0 = -w.normal;
            e.normal0 = {0.0, 0.0, 1.0};
            e.direction = cross(e.tangent0, e.normal0); // along the wall's u axis
            e.open_angle = 1.5 * constants::pi;
            e.start = {a.x, a.y, bld.height};
            e.end = {b.x, b.y, bld.height};
            e.length = norm2d(b - a);
            out.edges.push_back(e);
        }
    }
    return out;
}

// Partitions every face into a (row, col) lattice of tile_side squares anchored at the
// polygon's lower-left plane corner; boundary tiles keep their clipped area.
inline std::vector<ScatterTile> tessellate_tiles(const std::vector<Face> &faces, double tile_side = 5.0)
{
    if (!(tile_side > 0.0))
        throw argument_error("tile_side must be > 0");
    std::vector<ScatterTile> tiles;
    for (std::size_t fi = 0; fi < faces.size(); ++fi)
    {
        const Face &f = faces[fi];
        Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        Vec2 hi{-lo.x, -lo.y};
        for (const auto &p : f.polygon)
        {
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
        }
        // Guard against 12.000000000001 / 5 producing a sliver column.
        const auto cells = [tile_side](double extent) {
            return static_cast<std::uint32_t>(std::max(1.0, std::ceil(extent / tile_side - 1e-9)));
        };
        const std::uint32_t ncol = cells(hi.x - lo.x), nrow = cells(hi.y - lo.y);
        for (std::uint32_t r = 0; r < nrow; ++r)
        {
            for (std::uint32_t c = 0; c < ncol; ++c)
            {
                const Vec2 clo{lo.x + c * tile_side, lo.y + r * tile_side};
                const Vec2 chi{c + 1 == ncol ? hi.x : clo.x + tile_side, r + 1 == nrow ? hi.y : clo.y + tile_side};
                const auto piece = polygon::clip_to_box(f.polygon, clo, chi);
                if (piece.size() < 3)
                    continue;
                const double a = polygon::area(piece);
                if (a <= 1e-12)
                    continue;
                ScatterTile t;
                t.id = {static_cast<std::uint32_t>(fi), r, c};
                t.center = f.to_world(polygon::centroid(piece));
                t.normal = f.normal;
                t.area = a;
                t.owner = f.owner;
                t.material = f.material;
                tiles.push_back(t);
            }
        }
    }
    return tiles;
}

} // namespace satrt
