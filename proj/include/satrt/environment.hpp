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

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "occlusion.hpp"
#include "scene.hpp"

namespace satrt
{

// Immutable tracing context: faces, edges, scatter tiles, an occluder and a few
// precomputed pruning tables. Safe to share between threads.
class Environment
{
  public:
    static Environment from_scene(const Scene &scene, double tile_side = 5.0)
    {
        auto fe = derive_faces_edges(scene);
        Environment env(std::move(fe.faces), std::move(fe.edges), Occluder(PrismOccluder(scene)));
        env.scene_ = scene;
        env.build_tiles(tile_side);
        // Terrain tiles whose center sits under a building are unreachable.
        std::erase_if(env.tiles_, [&scene](const ScatterTile &t) {
            if (t.owner != Face::terrain_owner)
                return false;
            for (const auto &b : scene.buildings)
                if (polygon::contains_closed({t.center.x, t.center.y}, b.footprint, 1e-9))
                    return true;
            return false;
        });
        return env;
    }

    // Free-form scenes built from explicit faces (test fixtures, hand-made geometry).
    static Environment from_faces(std::vector<Face> faces, std::vector<Edge> edges = {}, double tile_side = 5.0)
    {
        auto occ = Occluder(FaceOccluder(faces));
        Environment env(std::move(faces), std::move(edges), std::move(occ));
        env.build_tiles(tile_side);
        return env;
    }

    const std::vector<Face> &faces() const { return faces_; }
    const std::vector<Edge> &edges() const { return edges_; }
    const std::vector<ScatterTile> &tiles() const { return tiles_; }
    const std::optional<Scene> &scene() const { return scene_; }
    const Occluder &occluder() const { return occluder_; }

    bool visible(const Vec3 &a, const Vec3 &b) const { return occluder_.visible(a, b); }

    // Necessary condition for face j to follow face i in a specular chain.
    bool facing(std::size_t i, std::size_t j) const { return facing_[i * faces_.size() + j] != 0; }

    // Horizontal distance from p to the face's 2D bounding box.
    double horizontal_distance(std::size_t face, const Vec3 &p) const
    {
        const auto &[lo, hi] = face_boxes_[face];
        const double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
        const double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
        return std::hypot(dx, dy);
    }

    // Per-face materials: the faces' own, or the band-specific set when a scene is attached.
    std::vector<Material> face_materials() const
    {
        std::vector<Material> m;
        m.reserve(faces_.size());
        for (const auto &f : faces_)
            m.push_back(f.material);
        return m;
    }
    std::vector<Material> face_materials(const MaterialSet &set) const
    {
        std::vector<Material> m;
        m.reserve(faces_.size());
        for (const auto &f : faces_)
            m.push_back(set.of_owner(f.owner));
        return m;
    }

  private:
    Environment(std::vector<Face> faces, std::vector<Edge> edges, Occluder occ)
        : faces_(std::move(faces)), edges_(std::move(edges)), occluder_(std::move(occ))
    {
        const std::size_t n = faces_.size();
        std::vector<std::vector<Vec3>> corners(n);
        face_boxes_.resize(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
            Vec2 hi{-lo.x, -lo.y};
            for (const auto &q : faces_[i].polygon)
            {
                const Vec3 w = faces_[i].to_world(q);
                corners[i].push_back(w);
                lo = {std::min(lo.x, w.x), std::min(lo.y, w.y)};
                hi = {std::max(hi.x, w.x), std::max(hi.y, w.y)};
            }
            face_boxes_[i] = {lo, hi};
        }
        constexpr double tol = 1e-9;
        const auto any_in_front = [&](std::size_t of, std::size_t wrt) {
            for (const auto &c : corners[of])
                if (faces_[wrt].signed_distance(c) > tol)
                    return true;
            return false;
        };
        facing_.assign(n * n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (any_in_front(i, j) && any_in_front(j, i))
                    facing_[i * n + j] = facing_[j * n + i] = 1;
    }

    void build_tiles(double tile_side) { tiles_ = tessellate_tiles(faces_, tile_side); }

    std::vector<Face> faces_;
    std::vector<Edge> edges_;
    std::vector<ScatterTile> tiles_;
    Occluder occluder_;
    std::optional<Scene> scene_;
    std::vector<std::pair<Vec2, Vec2>> face_boxes_;
    std::vector<std::uint8_t> facing_;
};

} // namespace satrt
