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

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <json.hpp>

#include "errors.hpp"
#include "scene.hpp"

namespace satrt
{

// Manhattan-grid city: rows x cols square footprints of side block_size_m, separated by
// streets of street_width_m (half a street on the outer margins), heights drawn from a
// normal distribution clamped to min_height_m.
struct SynthCityParams
{
    double block_size_m = 12.0;
    double street_width_m = 10.0;
    int rows = 14;
    int cols = 14;
    double height_mean_m = 15.0;
    double height_stddev_m = 9.0;
    double min_height_m = 3.0;
    std::uint64_t seed = 1;
    Scenario scenario = Scenario::custom;
};

struct CityStats
{
    std::size_t building_count = 0;
    double area_km2 = 0.0;
    double density_per_km2 = 0.0;
    double mean_height_m = 0.0;
    double stddev_height_m = 0.0;
};

struct SynthCity
{
    Scene scene;
    CityStats stats;
};

inline CityStats city_stats(const Scene &scene)
{
    CityStats s;
    s.building_count = scene.buildings.size();
    s.area_km2 = scene.bounds.area() * 1e-6;
    s.density_per_km2 = s.area_km2 > 0.0 ? static_cast<double>(s.building_count) / s.area_km2 : 0.0;
    if (s.building_count > 0)
    {
        s.mean_height_m = scene.mean_building_height();
        double var = 0.0;
        for (const auto &b : scene.buildings)
            var += (b.height - s.mean_height_m) * (b.height - s.mean_height_m);
        s.stddev_height_m = std::sqrt(var / static_cast<double>(s.building_count));
    }
    return s;
}

inline SynthCity synth_city(const SynthCityParams &p)
{
    if (!(p.block_size_m > 0.0) || !(p.street_width_m > 0.0))
        throw argument_error("synth_city: block size and street width must be > 0");
    if (p.rows < 1 || p.cols < 1)
        throw argument_error("synth_city: rows and cols must be >= 1");
    if (!(p.height_mean_m > 0.0) || p.height_stddev_m < 0.0 || !(p.min_height_m > 0.0))
        throw argument_error("synth_city: height mean and minimum must be > 0, stddev >= 0");

    const double pitch = p.block_size_m + p.street_width_m;
    SynthCity city;
    Scene &scene = city.scene;
    scene.scenario = p.scenario;
    scene.bounds = {0.0, 0.0, p.cols * pitch, p.rows * pitch};
    scene.terrain_material = default_terrain_material(Band::S, p.scenario);

    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> height_dist(p.height_mean_m, p.height_stddev_m);
    for (int r = 0; r < p.rows; ++r)
    {
        for (int c = 0; c < p.cols; ++c)
        {
            BuildingPrism b;
            b.id = "r" + std::to_string(r) + "c" + std::to_string(c);
            const double x0 = c * pitch + 0.5 * p.street_width_m;
            const double y0 = r * pitch + 0.5 * p.street_width_m;
            const double s = p.block_size_m;
            b.footprint = {{x0, y0}, {x0 + s, y0}, {x0 + s, y0 + s}, {x0, y0 + s}};
            const double h = p.height_stddev_m > 0.0 ? height_dist(rng) : p.height_mean_m;
            b.height = std::max(p.min_height_m, h);
            b.wall_material = default_wall_material(Band::S);
            scene.buildings.push_back(std::move(b));
        }
    }
    scene.normalize_and_validate();
    city.stats = city_stats(scene);
    return city;
}

// Grid parameters whose density and height statistics approximate the three reference
// layouts (dense urban 2028/km^2, 15 +- 9 m; urban 971/km^2, 13 +- 7 m; suburban 631/km^2, 8 +- 5 m).
inline SynthCityParams reference_city_params(Scenario s, std::uint64_t seed = 1)
{
    SynthCityParams p;
    p.seed = seed;
    p.scenario = s;
    switch (s)
    {
    case Scenario::dense_urban:
        p.block_size_m = 12.0, p.street_width_m = 10.0, p.rows = 13, p.cols = 15;
        p.height_mean_m = 15.0, p.height_stddev_m = 9.0;
        break;
    case Scenario::urban:
    case Scenario::custom:
        p.block_size_m = 18.0, p.street_width_m = 14.0, p.rows = 14, p.cols = 14;
        p.height_mean_m = 13.0, p.height_stddev_m = 7.0;
        break;
    case Scenario::suburban:
        p.block_size_m = 14.0, p.street_width_m = 26.0, p.rows = 14, p.cols = 14;
        p.height_mean_m = 8.0, p.height_stddev_m = 5.0;
        break;
    }
    return p;
}

inline SynthCityParams synth_params_from_json(const nlohmann::json &j)
{
    SynthCityParams p;
    if (j.contains("preset"))
        p = reference_city_params(parse_scenario(j["preset"].get<std::string>()));
    if (j.contains("scenario")) p.scenario = parse_scenario(j["scenario"].get<std::string>());
    if (j.contains("block_size_m")) p.block_size_m = j["block_size_m"].get<double>();
    if (j.contains("street_width_m")) p.street_width_m = j["street_width_m"].get<double>();
    if (j.contains("rows")) p.rows = j["rows"].get<int>();
    if (j.contains("cols")) p.cols = j["cols"].get<int>();
    if (j.contains("height_mean_m")) p.height_mean_m = j["height_mean_m"].get<double>();
    if (j.contains("height_stddev_m")) p.height_stddev_m = j["height_stddev_m"].get<double>();
    if (j.contains("min_height_m")) p.min_height_m = j["min_height_m"].get<double>();
    if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
    return p;
}

} // namespace satrt
