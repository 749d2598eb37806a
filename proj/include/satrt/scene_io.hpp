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

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "errors.hpp"
#include "scene.hpp"

namespace satrt
{

namespace detail
{

inline std::size_t line_of_offset(std::string_view text, std::size_t byte)
{
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

inline double require_number(const nlohmann::json &j, const char *key, const std::string &ctx)
{
    if (!j.contains(key))
        throw format_error(ctx + ": missing '" + key + "'");
    if (!j[key].is_number())
        throw format_error(ctx + ": '" + key + "' must be a number");
    return j[key].get<double>();
}

inline Material parse_material(const nlohmann::json &j, const std::string &ctx)
{
    if (!j.is_object())
        throw format_error(ctx + ": material must be an object");
    Material m;
    m.eps_r = require_number(j, "eps_r", ctx);
    m.sigma = require_number(j, "sigma", ctx);
    m.scattering_s = require_number(j, "S", ctx);
    return m;
}

inline nlohmann::json material_json(const Material &m)
{
    return {{"eps_r", m.eps_r}, {"sigma", m.sigma}, {"S", m.scattering_s}};
}

} // namespace detail

// Parses the JSON scene schema:
//   { "scenario": str, "bounds": [xmin,ymin,xmax,ymax], "terrain": {eps_r, sigma, S},
//     "buildings": [ { "id": str, "height_m": num, "footprint": [[x,y],...],
//                      "material": {eps_r, sigma, S} } ] }
// "terrain": null removes the ground plane. "terrain" and per-building "material" are optional; missing ones take the S/C-band
// defaults for the scenario and are re-resolved per band by MaterialSet::for_band.
inline Scene parse_scene(std::string_view text, const std::string &source = "<memory>")
{
    nlohmann::json root;
    try
    {
        root = nlohmann::json::parse(text.begin(), text.end());
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw format_error(source + ":" + std::to_string(detail::line_of_offset(text, e.byte)) +
                           ": JSON parse error: " + e.what());
    }
    if (!root.is_object())
        throw format_error(source + ": top-level value must be an object");

    Scene scene;
    scene.scenario = root.contains("scenario") ? parse_scenario(root["scenario"].get<std::string>()) : Scenario::custom;

    if (!root.contains("bounds") || !root["bounds"].is_array() || root["bounds"].size() != 4)
        throw format_error(source + ": 'bounds' must be [xmin,ymin,xmax,ymax]");
    const auto &bj = root["bounds"];
    for (const auto &v : bj)
        if (!v.is_number())
            throw format_error(source + ": 'bounds' entries must be numbers");
    scene.bounds = {bj[0].get<double>(), bj[1].get<double>(), bj[2].get<double>(), bj[3].get<double>()};

    if (root.contains("terrain") && root["terrain"].is_null())
    {
        scene.has_terrain = false;
        scene.terrain_material = default_terrain_material(Band::S, scene.scenario);
    }
    else if (root.contains("terrain"))
    {
        scene.terrain_material = detail::parse_material(root["terrain"], source + ": terrain");
        scene.explicit_terrain = true;
    }
    else
        scene.terrain_material = default_terrain_material(Band::S, scene.scenario);

    if (root.contains("buildings"))
    {
        const auto &arr = root["buildings"];
        if (!arr.is_array())
            throw format_error(source + ": 'buildings' must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i)
        {
            const auto &bj_i = arr[i];
            std::string ctx = source + ": buildings[" + std::to_string(i) + "]";
            if (!bj_i.is_object())
                throw format_error(ctx + ": must be an object");
            BuildingPrism b;
            if (bj_i.contains("id"))
            {
                if (!bj_i["id"].is_string())
                    throw format_error(ctx + ": 'id' must be a string");
                b.id = bj_i["id"].get<std::string>();
                ctx += " (id '" + b.id + "')";
            }
            else
                b.id = "b" + std::to_string(i);
            b.height = detail::require_number(bj_i, "height_m", ctx);
            if (!bj_i.contains("footprint") || !bj_i["footprint"].is_array())
                throw format_error(ctx + ": 'footprint' must be an array of [x,y] pairs");
            for (const auto &p : bj_i["footprint"])
            {
                if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                    throw format_error(ctx + ": footprint vertices must be [x,y] number pairs");
                b.footprint.push_back({p[0].get<double>(), p[1].get<double>()});
            }
            if (bj_i.contains("material"))
            {
                b.wall_material = detail::parse_material(bj_i["material"], ctx + ": material");
                b.explicit_material = true;
            }
            else
                b.wall_material = default_wall_material(Band::S);
            scene.buildings.push_back(std::move(b));
        }
    }
    scene.normalize_and_validate();
    return scene;
}

inline Scene load_scene(const std::string &path, std::string_view format = "json")
{
    if (format != "json")
        throw argument_error("unsupported scene format '" + std::string(format) + "'");
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw format_error(path + ": cannot open scene file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scene(ss.str(), path);
}

// Serializes with every material written out only when it was explicit in the source,
// so a load/save round trip is stable.
inline nlohmann::json scene_to_json(const Scene &scene)
{
    nlohmann::json j;
    j["scenario"] = std::string(to_string(scene.scenario));
    j["bounds"] = {scene.bounds.xmin, scene.bounds.ymin, scene.bounds.xmax, scene.bounds.ymax};
    if (!scene.has_terrain)
        j["terrain"] = nullptr;
    else if (scene.explicit_terrain)
        j["terrain"] = detail::material_json(scene.terrain_material);
    j["buildings"] = nlohmann::json::array();
    for (const auto &b : scene.buildings)
    {
        nlohmann::json bj;
        bj["id"] = b.id;
        bj["height_m"] = b.height;
        bj["footprint"] = nlohmann::json::array();
        for (const auto &p : b.footprint)
            bj["footprint"].push_back({p.x, p.y});
        if (b.explicit_material)
            bj["material"] = detail::material_json(b.wall_material);
        j["buildings"].push_back(std::move(bj));
    }
    return j;
}

inline void save_scene(const Scene &scene, const std::string &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error(path + ": cannot open for writing");
    out << scene_to_json(scene).dump(1) << '\n';
}

} // namespace satrt
