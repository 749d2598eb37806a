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
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "antennas.hpp"
#include "environment.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "material.hpp"
#include "rician.hpp"
#include "scene_io.hpp"
#include "stats.hpp"
#include "synth_city.hpp"
#include "tracer.hpp"

namespace satrt
{

inline constexpr const char *code_version = "satrt 1.0.0";
inline constexpr const char *results_schema = "satrt-results v1";

// ---------------------------------------------------------------- use cases

enum class UseCase
{
    handheld,
    vehicular,
    fixed
};

inline const char *to_string(UseCase u)
{
    switch (u)
    {
    case UseCase::handheld: return "handheld";
    case UseCase::vehicular: return "vehicular";
    case UseCase::fixed: return "fixed";
    }
    return "?";
}

inline UseCase parse_use_case(std::string_view s)
{
    if (s == "handheld")
        return UseCase::handheld;
    if (s == "vehicular")
        return UseCase::vehicular;
    if (s == "fixed")
        return UseCase::fixed;
    throw config_error("unknown use case '" + std::string(s) + "' (expected handheld, vehicular or fixed)");
}

// Terminal / band pairing of the use-case table: S and C for mobile terminals, Ka/Q/V for the dish.
inline bool compatible(UseCase u, Band b) { return (u == UseCase::fixed) == band_info(b).high; }

inline MountHeight mount_of(UseCase u) { return u == UseCase::fixed ? MountHeight::rooftop_mean : MountHeight::ground; }

inline AntennaConfig antenna_for(UseCase u, Band b)
{
    if (!compatible(u, b))
        throw config_error(std::string("use case '") + to_string(u) + "' cannot operate in band " +
                           std::string(band_info(b).name));
    switch (u)
    {
    case UseCase::handheld: return AntennaConfig::handheld();
    case UseCase::vehicular: return AntennaConfig::vehicular();
    case UseCase::fixed: return AntennaConfig::fixed_aperture(b);
    }
    return {};
}

inline const char *to_string(MountHeight m) { return m == MountHeight::ground ? "ground" : "rooftop"; }

// ---------------------------------------------------------------- config

struct BandSelection
{
    Band band = Band::C;
    double frequency_hz = 0.0;
};

struct Evaluation
{
    UseCase use_case = UseCase::handheld;
    BandSelection band;
};

struct CampaignConfig
{
    std::optional<std::string> scene_file;
    std::optional<SynthCityParams> synth;
    std::vector<Evaluation> evaluations;
    std::vector<double> elevations_deg{10, 20, 30, 40, 50, 60, 70, 80, 90};
    int azimuth_count = 6;
    int grid_count = 20;
    std::vector<Vec2> grid_centers; // explicit centers override grid_count
    double grid_side_m = 4.0;
    int grid_points_per_side = 15;
    double min_grid_separation_m = 10.0;
    double grid_clearance_m = 1.0;
    std::uint64_t master_seed = 1;
    std::string output_dir = "out";
    double altitude_m = 500e3;
    double tile_side_m = 5.0;
    TraceOptions trace;
    int threads = 0;
    bool dump_paths = false;

    // Canonical JSON form; its hash identifies the run.
    nlohmann::json to_json() const
    {
        nlohmann::json j;
        if (scene_file)
            j["scene"]["file"] = *scene_file;
        if (synth)
        {
            auto &s = j["scene"]["synth"];
            s["scenario"] = std::string(to_string(synth->scenario));
            s["block_size_m"] = synth->block_size_m;
            s["street_width_m"] = synth->street_width_m;
            s["rows"] = synth->rows;
            s["cols"] = synth->cols;
            s["height_mean_m"] = synth->height_mean_m;
            s["height_stddev_m"] = synth->height_stddev_m;
            s["min_height_m"] = synth->min_height_m;
            s["seed"] = synth->seed;
        }
        j["pairs"] = nlohmann::json::array();
        for (const auto &e : evaluations)
            j["pairs"].push_back({{"use_case", to_string(e.use_case)},
                                  {"band", std::string(band_info(e.band.band).name)},
                                  {"frequency_hz", e.band.frequency_hz}});
        j["elevations_deg"] = elevations_deg;
        j["azimuth_count"] = azimuth_count;
        if (grid_centers.empty())
            j["grids"]["count"] = grid_count;
        else
        {
            j["grids"]["centers"] = nlohmann::json::array();
            for (const auto &c : grid_centers)
                j["grids"]["centers"].push_back({c.x, c.y});
        }
        j["grids"]["side_m"] = grid_side_m;
        j["grids"]["points_per_side"] = grid_points_per_side;
        j["grids"]["min_separation_m"] = min_grid_separation_m;
        j["grids"]["clearance_m"] = grid_clearance_m;
        j["master_seed"] = master_seed;
        j["altitude_m"] = altitude_m;
        j["tile_side_m"] = tile_side_m;
        j["roi_radius_m"] = trace.roi_radius_m;
        j["diffraction_roi_radius_m"] = trace.diffraction_roi_radius_m;
        const auto &b = trace.budget;
        j["budget"] = {{"reflections", b.reflections},
                       {"diffractions", b.diffractions},
                       {"scatterings", b.scatterings},
                       {"reflections_diffractions", b.reflections_diffractions},
                       {"reflections_scatterings", b.reflections_scatterings},
                       {"diffractions_scatterings", b.diffractions_scatterings}};
        return j;
    }

    void validate() const
    {
        if (!scene_file && !synth)
            throw config_error("config needs a scene source (scene.file or scene.synth)");
        if (evaluations.empty())
            throw config_error("config selects no (use case, band) pair");
        for (const auto &e : evaluations)
            if (!compatible(e.use_case, e.band.band))
                throw config_error(std::string("use case '") + to_string(e.use_case) + "' cannot operate in band " +
                                   std::string(band_info(e.band.band).name));
        if (elevations_deg.empty())
            throw config_error("no elevations");
        for (double el : elevations_deg)
            if (!(el > 0.0 && el <= 90.0))
                throw config_error("elevation " + std::to_string(el) + " outside (0, 90]");
        if (azimuth_count < 1)
            throw config_error("azimuth_count must be >= 1");
        if (grid_centers.empty() && grid_count < 1)
            throw config_error("grid count must be >= 1");
        if (!(grid_side_m > 0.0) || grid_points_per_side < 1)
            throw config_error("invalid grid geometry");
        if (!(tile_side_m > 0.0))
            throw config_error("tile_side_m must be > 0");
        if (trace.budget.diffractions_scatterings != 0)
            throw config_error("diffraction + scattering paths are not supported");
        if (trace.budget.reflections > 3 || trace.budget.diffractions > 2 || trace.budget.scatterings > 1 ||
            trace.budget.reflections_diffractions > 2 || trace.budget.reflections_scatterings > 2)
            throw config_error("interaction budget exceeds the supported maxima (3, 2, 1, 2, 2, 0)");
    }
};

namespace detail
{

template <class T> T json_get(const nlohmann::json &j, const char *key, T fallback)
{
    if (!j.contains(key))
        return fallback;
    try
    {
        return j.at(key).get<T>();
    }
    catch (const nlohmann::json::exception &e)
    {
        throw config_error(std::string("config key '") + key + "': " + e.what());
    }
}

inline BandSelection parse_band_selection(const nlohmann::json &j)
{
    BandSelection b;
    if (j.is_string())
        b.band = parse_band(j.get<std::string>());
    else if (j.is_object() && j.contains("band"))
    {
        b.band = parse_band(j["band"].get<std::string>());
        b.frequency_hz = json_get<double>(j, "frequency_hz", 0.0);
    }
    else
        throw config_error("band entries are names or {\"band\": ..., \"frequency_hz\": ...}");
    if (b.frequency_hz == 0.0)
        b.frequency_hz = band_info(b.band).default_center_hz;
    if (band_for_frequency(b.frequency_hz) != b.band)
        throw config_error("frequency " + std::to_string(b.frequency_hz) + " Hz lies outside band " +
                           std::string(band_info(b.band).name));
    return b;
}

} // namespace detail

// Relative paths inside the config resolve against `base_dir`.
inline CampaignConfig parse_campaign_config(const nlohmann::json &j, const std::filesystem::path &base_dir = {})
{
    CampaignConfig c;
    try
    {
        if (!j.is_object())
            throw config_error("config must be a JSON object");
        if (!j.contains("scene"))
            throw config_error("config needs a 'scene' entry");
        const auto &s = j["scene"];
        if (s.contains("file"))
        {
            std::filesystem::path p = s["file"].get<std::string>();
            if (p.is_relative() && !base_dir.empty())
                p = base_dir / p;
            c.scene_file = p.string();
        }
        else if (s.contains("synth"))
            c.synth = synth_params_from_json(s["synth"]);
        else
            throw config_error("scene needs 'file' or 'synth'");

        if (j.contains("pairs"))
        {
            for (const auto &p : j["pairs"])
            {
                Evaluation e;
                if (p.is_array() && p.size() == 2)
                {
                    e.use_case = parse_use_case(p[0].get<std::string>());
                    e.band = detail::parse_band_selection(p[1]);
                }
                else
                {
                    e.use_case = parse_use_case(p.at("use_case").get<std::string>());
                    e.band = detail::parse_band_selection(p.contains("frequency_hz") ? p : p.at("band"));
                }
                if (!compatible(e.use_case, e.band.band))
                    throw config_error(std::string("use case '") + to_string(e.use_case) +
                                       "' cannot operate in band " + std::string(band_info(e.band.band).name));
                c.evaluations.push_back(e);
            }
        }
        else
        {
            std::vector<UseCase> ucs;
            for (const auto &u : j.value("use_cases", nlohmann::json::array({"handheld", "vehicular", "fixed"})))
                ucs.push_back(parse_use_case(u.get<std::string>()));
            std::vector<BandSelection> bands;
            for (const auto &b : j.value("bands", nlohmann::json::array({"S", "C", "Ka", "Q", "V"})))
                bands.push_back(detail::parse_band_selection(b));
            for (UseCase u : ucs)
            {
                bool any = false;
                for (const auto &b : bands)
                    if (compatible(u, b.band))
                        c.evaluations.push_back({u, b}), any = true;
                if (!any)
                    throw config_error(std::string("use case '") + to_string(u) + "' has no compatible band");
            }
            for (const auto &b : bands)
            {
                const bool used = std::any_of(ucs.begin(), ucs.end(), [&](UseCase u) { return compatible(u, b.band); });
                if (!used)
                    throw config_error("band " + std::string(band_info(b.band).name) +
                                       " is not usable by any selected use case");
            }
        }

        c.elevations_deg = detail::json_get(j, "elevations_deg", c.elevations_deg);
        c.azimuth_count = detail::json_get(j, "azimuth_count", c.azimuth_count);
        if (j.contains("grids"))
        {
            const auto &g = j["grids"];
            c.grid_count = detail::json_get(g, "count", c.grid_count);
            if (g.contains("centers"))
                for (const auto &p : g["centers"])
                    c.grid_centers.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            c.grid_side_m = detail::json_get(g, "side_m", c.grid_side_m);
            c.grid_points_per_side = detail::json_get(g, "points_per_side", c.grid_points_per_side);
            c.min_grid_separation_m = detail::json_get(g, "min_separation_m", c.min_grid_separation_m);
            c.grid_clearance_m = detail::json_get(g, "clearance_m", c.grid_clearance_m);
        }
        c.master_seed = detail::json_get<std::uint64_t>(j, "master_seed", c.master_seed);
        c.output_dir = detail::json_get<std::string>(j, "output_dir", c.output_dir);
        c.altitude_m = detail::json_get(j, "altitude_m", c.altitude_m);
        c.tile_side_m = detail::json_get(j, "tile_side_m", c.tile_side_m);
        c.trace.roi_radius_m = detail::json_get(j, "roi_radius_m", c.trace.roi_radius_m);
        c.trace.diffraction_roi_radius_m = detail::json_get(j, "diffraction_roi_radius_m", c.trace.diffraction_roi_radius_m);
        if (j.contains("budget"))
        {
            const auto &b = j["budget"];
            auto &t = c.trace.budget;
            t.reflections = detail::json_get(b, "reflections", t.reflections);
            t.diffractions = detail::json_get(b, "diffractions", t.diffractions);
            t.scatterings = detail::json_get(b, "scatterings", t.scatterings);
            t.reflections_diffractions = detail::json_get(b, "reflections_diffractions", t.reflections_diffractions);
            t.reflections_scatterings = detail::json_get(b, "reflections_scatterings", t.reflections_scatterings);
            t.diffractions_scatterings = detail::json_get(b, "diffractions_scatterings", t.diffractions_scatterings);
        }
        c.threads = detail::json_get(j, "threads", c.threads);
        c.dump_paths = detail::json_get(j, "dump_paths", c.dump_paths);
    }
    catch (const nlohmann::json::exception &e)
    {
        throw config_error(std::string("invalid config: ") + e.what());
    }
    catch (const format_error &e)
    {
        throw config_error(e.what());
    }
    c.validate();
    return c;
}

inline CampaignConfig load_campaign_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open config '" + path + "'");
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw config_error(path + ": " + e.what());
    }
    return parse_campaign_config(j, std::filesystem::path(path).parent_path());
}

// ---------------------------------------------------------------- grid placement

namespace detail
{

inline bool rect_overlaps_polygon(Vec2 lo, Vec2 hi, const std::vector<Vec2> &poly)
{
    Vec2 plo = poly.front(), phi = poly.front();
    for (const auto &v : poly)
    {
        plo = {std::min(plo.x, v.x), std::min(plo.y, v.y)};
        phi = {std::max(phi.x, v.x), std::max(phi.y, v.y)};
    }
    if (phi.x < lo.x || plo.x > hi.x || phi.y < lo.y || plo.y > hi.y)
        return false;
    for (const auto &v : poly)
        if (v.x >= lo.x && v.x <= hi.x && v.y >= lo.y && v.y <= hi.y)
            return true;
    const std::array<Vec2, 4> r{lo, Vec2{hi.x, lo.y}, hi, Vec2{lo.x, hi.y}};
    for (const auto &c : r)
        if (polygon::contains_closed(c, poly, 0.0))
            return true;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < 4; ++k)
            if (polygon::segments_intersect(poly[i], poly[(i + 1) % n], r[k], r[(k + 1) % 4]))
                return true;
    return false;
}

} // namespace detail

inline double mount_height(const Scene &scene, MountHeight m)
{
    if (m == MountHeight::ground || scene.buildings.empty())
        return ground_mount_height_m;
    return scene.mean_building_height();
}

// Rejection sampling of grid centres in open space: the grid square plus `clearance_m`
// must not touch any footprint. The bounds centre is tried first. Separation is relaxed
// only when `count` grids cannot be placed at `min_separation_m`.
inline std::vector<RxGridSpec> place_grids(const Scene &scene, int count, MountHeight mount, std::uint64_t seed,
                                           double side_m = 4.0, int points_per_side = 15, double clearance_m = 1.0,
                                           double min_separation_m = 10.0)
{
    if (count < 1)
        throw argument_error("grid count must be >= 1");
    const double half = 0.5 * side_m + clearance_m;
    const auto &b = scene.bounds;
    const double x0 = b.xmin + half, x1 = b.xmax - half, y0 = b.ymin + half, y1 = b.ymax - half;
    if (x0 > x1 || y0 > y1)
        throw placement_error("scene bounds are smaller than one receiver grid", 0);

    const auto free_at = [&](Vec2 c) {
        const Vec2 lo{c.x - half, c.y - half}, hi{c.x + half, c.y + half};
        for (const auto &bld : scene.buildings)
            if (detail::rect_overlaps_polygon(lo, hi, bld.footprint))
                return false;
        return true;
    };

    const double z = mount_height(scene, mount);
    std::vector<Vec2> best;
    for (double sep : {min_separation_m, 0.5 * min_separation_m, 1e-6})
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
        std::vector<Vec2> centers;
        const auto try_add = [&](Vec2 c) {
            if (!free_at(c))
                return;
            for (const auto &o : centers)
                if (norm2d(o - c) < sep)
                    return;
            centers.push_back(c);
        };
        try_add(b.center());
        const long attempts = 2000L + 500L * count;
        for (long a = 0; a < attempts && static_cast<int>(centers.size()) < count; ++a)
        {
            const double x = ux(rng);
            const double y = uy(rng);
            try_add({x, y});
        }
        if (centers.size() > best.size())
            best = centers;
        if (static_cast<int>(centers.size()) >= count)
            break;
    }
    if (static_cast<int>(best.size()) < count)
        throw placement_error("could only place " + std::to_string(best.size()) + " of " + std::to_string(count) +
                                  " receiver grids in open space",
                              best.size());
    std::vector<RxGridSpec> grids;
    for (const auto &c : best)
        grids.push_back({{c.x, c.y, z}, side_m, points_per_side, mount});
    return grids;
}

// ---------------------------------------------------------------- planning

struct TraceTask
{
    std::size_t id = 0;
    std::size_t grid = 0;
    MountHeight mount = MountHeight::ground;
    double elevation_deg = 0.0;
    double azimuth_deg = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> evaluations; // indices into CampaignConfig::evaluations
};

struct CampaignPlan
{
    std::vector<Vec2> grid_centers;
    std::vector<double> azimuth_start_deg; // per grid
    std::vector<TraceTask> tasks;
    std::size_t evaluation_count = 0;
};

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

inline std::vector<MountHeight> mounts_needed(const CampaignConfig &c)
{
    std::vector<MountHeight> m;
    for (MountHeight h : {MountHeight::ground, MountHeight::rooftop_mean})
        for (const auto &e : c.evaluations)
            if (mount_of(e.use_case) == h)
            {
                m.push_back(h);
                break;
            }
    return m;
}

// One trace per (grid, mount, elevation, azimuth); each is expanded over the
// (use case, band) evaluations sharing that mount.
inline CampaignPlan plan_campaign(const CampaignConfig &config, const Scene &scene)
{
    config.validate();
    CampaignPlan plan;
    if (!config.grid_centers.empty())
    {
        const double half = 0.5 * config.grid_side_m;
        for (const auto &c : config.grid_centers)
        {
            if (!scene.bounds.contains({c.x - half, c.y - half}) || !scene.bounds.contains({c.x + half, c.y + half}))
                throw config_error("grid centred at (" + std::to_string(c.x) + ", " + std::to_string(c.y) +
                                   ") lies outside the scene bounds");
            plan.grid_centers.push_back(c);
        }
    }
    else
    {
        const auto grids = place_grids(scene, config.grid_count, MountHeight::ground, mix_seed(config.master_seed, 1),
                                       config.grid_side_m, config.grid_points_per_side, config.grid_clearance_m,
                                       config.min_grid_separation_m);
        for (const auto &g : grids)
            plan.grid_centers.push_back({g.center.x, g.center.y});
    }
    for (std::size_t g = 0; g < plan.grid_centers.size(); ++g)
    {
        const std::uint64_t h = mix_seed(config.master_seed, 0x100000000ull + g);
        plan.azimuth_start_deg.push_back(360.0 * static_cast<double>(h >> 11) * 0x1.0p-53);
    }

    const double spacing = 360.0 / config.azimuth_count;
    for (MountHeight mount : mounts_needed(config))
    {
        std::vector<std::size_t> evals;
        for (std::size_t i = 0; i < config.evaluations.size(); ++i)
            if (mount_of(config.evaluations[i].use_case) == mount)
                evals.push_back(i);
        for (std::size_t g = 0; g < plan.grid_centers.size(); ++g)
            for (double el : config.elevations_deg)
                for (int a = 0; a < config.azimuth_count; ++a)
                {
                    TraceTask t;
                    t.id = plan.tasks.size();
                    t.grid = g;
                    t.mount = mount;
                    t.elevation_deg = el;
                    t.azimuth_deg = std::fmod(plan.azimuth_start_deg[g] + a * spacing, 360.0);
                    t.seed = mix_seed(config.master_seed, 0x200000000ull + t.id);
                    t.evaluations = evals;
                    plan.evaluation_count += evals.size();
                    plan.tasks.push_back(std::move(t));
                }
    }
    return plan;
}

// ---------------------------------------------------------------- execution

struct ResultRow
{
    std::string scenario;
    UseCase use_case = UseCase::handheld;
    Band band = Band::C;
    double frequency_hz = 0.0;
    double elevation_deg = 0.0;
    double azimuth_deg = 0.0;
    std::size_t grid_id = 0;
    MountHeight mount = MountHeight::ground;
    bool los = false;
    double los_fraction = 0.0;
    double k_ml_db = std::nan("");
    double k_moment_db = std::nan("");
    double ds_s = std::nan("");
    std::array<double, 6> shares{};
    std::size_t path_count = 0;
};

struct TaskOutcome
{
    bool ok = false;
    std::string error;
    std::size_t path_count = 0;
    bool los = false;
    double los_fraction = 0.0;
    std::vector<ResultRow> rows;
    std::string paths_jsonl;
    std::vector<std::pair<std::string, std::string>> contribution_dumps;
    double trace_s = 0.0;
    double field_s = 0.0;
};

struct CampaignResult
{
    CampaignConfig config;
    Scene scene;
    CampaignPlan plan;
    std::vector<TaskOutcome> outcomes;
    std::map<std::string, double> timing_s;
    int threads_used = 1;

    std::size_t failed_tasks() const
    {
        return static_cast<std::size_t>(std::count_if(outcomes.begin(), outcomes.end(), [](const auto &o) { return !o.ok; }));
    }
    std::vector<ResultRow> rows() const
    {
        std::vector<ResultRow> r;
        for (const auto &o : outcomes)
            r.insert(r.end(), o.rows.begin(), o.rows.end());
        return r;
    }
};

// Runs fn(i) for i in [0, n) on `threads` workers pulling indices from a shared counter.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)> &fn)
{
    const int t = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(n, 1))));
    if (t == 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < t; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++)
                fn(i);
        });
    for (auto &th : pool)
        th.join();
}

inline Scene load_campaign_scene(const CampaignConfig &c)
{
    if (c.scene_file)
        return load_scene(*c.scene_file);
    return synth_city(*c.synth).scene;
}

namespace detail
{

inline TaskOutcome run_task(const CampaignConfig &config, const Scene &scene, const Environment &env,
                            const CampaignPlan &plan, const TraceTask &task,
                            const std::map<Band, std::vector<Material>> &band_materials)
{
    using clock = std::chrono::steady_clock;
    TaskOutcome out;
    const Vec2 c2 = plan.grid_centers[task.grid];
    const RxGridSpec grid{{c2.x, c2.y, mount_height(scene, task.mount)}, config.grid_side_m,
                          config.grid_points_per_side, task.mount};
    const SatellitePose pose{task.elevation_deg, task.azimuth_deg, config.altitude_m};
    const auto sat = satellite_position(pose, grid.center);

    const auto t0 = clock::now();
    const auto paths = trace_paths(env, sat.position, grid.center, config.trace);
    std::size_t visible = 0;
    for (std::size_t n = 0; n < grid.size(); ++n)
        visible += env.visible(sat.position, grid.point(n)) ? 1 : 0;
    const auto t1 = clock::now();

    out.path_count = paths.size();
    out.los = std::any_of(paths.begin(), paths.end(), [](const RayPath &p) { return p.label == Mechanism::L; });
    out.los_fraction = static_cast<double>(visible) / static_cast<double>(grid.size());
    if (config.dump_paths)
    {
        std::ostringstream os;
        write_paths_jsonl(os, paths);
        out.paths_jsonl = os.str();
    }

    std::map<Band, std::vector<PathContribution>> by_band;
    for (std::size_t ei : task.evaluations)
    {
        const Evaluation &ev = config.evaluations[ei];
        auto it = by_band.find(ev.band.band);
        if (it == by_band.end())
        {
            FieldContext ctx;
            ctx.env = &env;
            ctx.materials = band_materials.at(ev.band.band);
            ctx.frequency_hz = ev.band.frequency_hz;
            ctx.phases = ScatterPhaseSource(task.seed);
            it = by_band.emplace(ev.band.band, compute_contributions(paths, ctx)).first;
        }
        const auto &cs = it->second;

        AntennaConfig ant = antenna_for(ev.use_case, ev.band.band);
        if (ant.pattern == PatternKind::aperture)
            ant.boresight = sat.direction;

        ResultRow row;
        row.scenario = std::string(to_string(scene.scenario));
        row.use_case = ev.use_case;
        row.band = ev.band.band;
        row.frequency_hz = ev.band.frequency_hz;
        row.elevation_deg = task.elevation_deg;
        row.azimuth_deg = task.azimuth_deg;
        row.grid_id = task.grid;
        row.mount = task.mount;
        row.los = out.los;
        row.los_fraction = out.los_fraction;
        row.path_count = paths.size();

        const auto amps = extend_to_grid(cs, grid, ant, ev.band.frequency_hz);
        std::vector<double> env_samples;
        env_samples.reserve(amps.size());
        for (const auto &a : amps)
            env_samples.push_back(std::abs(a));
        try
        {
            const EnvelopeSamples samples(env_samples);
            row.k_ml_db = fit_rician_ml(samples).k_hat_db;
            row.k_moment_db = kfactor_moment(samples).k_hat_db;
        }
        catch (const argument_error &)
        {
            // No received power anywhere on the grid: K is undefined.
        }
        catch (const insufficient_data_error &)
        {
        }
        try
        {
            row.ds_s = delay_spread(make_pdp(cs, ant));
            row.shares = mechanism_breakdown(cs, ant).share;
        }
        catch (const undefined_statistic_error &)
        {
        }
        out.rows.push_back(row);

        if (config.dump_paths)
        {
            std::ostringstream os;
            write_contributions_jsonl(os, cs);
            char name[128];
            std::snprintf(name, sizeof name, "task%05zu_%s_%s.jsonl", task.id, to_string(ev.use_case),
                          std::string(band_info(ev.band.band).name).c_str());
            out.contribution_dumps.emplace_back(name, os.str());
        }
    }
    const auto t2 = clock::now();
    out.trace_s = std::chrono::duration<double>(t1 - t0).count();
    out.field_s = std::chrono::duration<double>(t2 - t1).count();
    out.ok = true;
    return out;
}

} // namespace detail

// Executes a campaign in memory. Results are stored per task, so the merge order is
// the task order regardless of which worker finished first.
inline CampaignResult execute_campaign(const CampaignConfig &config, const Scene &scene)
{
    using clock = std::chrono::steady_clock;
    CampaignResult r;
    r.config = config;
    r.scene = scene;
    const auto t0 = clock::now();
    r.plan = plan_campaign(config, scene);
    const Environment env = Environment::from_scene(scene, config.tile_side_m);
    std::map<Band, std::vector<Material>> mats;
    for (const auto &e : config.evaluations)
        if (!mats.count(e.band.band))
            mats[e.band.band] = env.face_materials(MaterialSet::for_band(scene, e.band.band));
    (void)LobeNormalization::standard();
    const auto t1 = clock::now();

    r.threads_used = config.threads > 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    r.outcomes.resize(r.plan.tasks.size());
    parallel_for(r.plan.tasks.size(), r.threads_used, [&](std::size_t i) {
        try
        {
            r.outcomes[i] = detail::run_task(config, scene, env, r.plan, r.plan.tasks[i], mats);
        }
        catch (const std::exception &e)
        {
            r.outcomes[i].ok = false;
            r.outcomes[i].error = e.what();
        }
    });
    const auto t2 = clock::now();
    r.timing_s["prepare"] = std::chrono::duration<double>(t1 - t0).count();
    r.timing_s["tasks_wall"] = std::chrono::duration<double>(t2 - t1).count();
    double tr = 0.0, fi = 0.0;
    for (const auto &o : r.outcomes)
        tr += o.trace_s, fi += o.field_s;
    r.timing_s["trace_cpu"] = tr;
    r.timing_s["fields_cpu"] = fi;
    return r;
}

// ---------------------------------------------------------------- outputs

namespace detail
{

inline std::string fmt_num(double v)
{
    if (std::isnan(v))
        return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s)
        h = (h ^ c) * 1099511628211ull;
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline void write_file(const std::filesystem::path &p, const std::string &content)
{
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + p.string() + "'");
    out << content;
    if (!out)
        throw std::runtime_error("write failed for '" + p.string() + "'");
}

} // namespace detail

inline std::string results_csv(const std::vector<ResultRow> &rows)
{
    std::ostringstream os;
    os << "# " << results_schema << "\n";
    os << "scenario,use_case,band,frequency_hz,elevation_deg,azimuth_deg,grid_id,mount,los_flag,los_fraction,"
          "k_ml_db,k_moment_db,ds_s,share_L,share_R,share_RD,share_D,share_S,share_RS,path_count\n";
    using detail::fmt_num;
    for (const auto &r : rows)
    {
        os << r.scenario << ',' << to_string(r.use_case) << ',' << band_info(r.band).name << ','
           << fmt_num(r.frequency_hz) << ',' << fmt_num(r.elevation_deg) << ',' << fmt_num(r.azimuth_deg) << ','
           << r.grid_id << ',' << to_string(r.mount) << ',' << (r.los ? 1 : 0) << ',' << fmt_num(r.los_fraction)
           << ',' << fmt_num(r.k_ml_db) << ',' << fmt_num(r.k_moment_db) << ',' << fmt_num(r.ds_s);
        for (double s : r.shares)
            os << ',' << fmt_num(s);
        os << ',' << r.path_count << '\n';
    }
    return os.str();
}

struct ElevationSummary
{
    std::vector<double> k_ml, k_moment, ds;
    std::vector<MechanismBreakdown> shares;
};

// Group key: (use case, band, elevation).
inline std::map<std::tuple<int, int, double>, ElevationSummary> summarize(const std::vector<ResultRow> &rows)
{
    std::map<std::tuple<int, int, double>, ElevationSummary> m;
    for (const auto &r : rows)
    {
        auto &s = m[{static_cast<int>(r.use_case), static_cast<int>(r.band), r.elevation_deg}];
        if (!std::isnan(r.k_ml_db))
            s.k_ml.push_back(r.k_ml_db);
        if (!std::isnan(r.k_moment_db))
            s.k_moment.push_back(r.k_moment_db);
        if (!std::isnan(r.ds_s))
        {
            s.ds.push_back(r.ds_s);
            MechanismBreakdown b;
            b.share = r.shares;
            s.shares.push_back(b);
        }
    }
    return m;
}

inline std::map<std::string, std::string> plot_csvs(const CampaignResult &r)
{
    using detail::fmt_num;
    std::map<std::string, std::string> files;
    const std::string scen(to_string(r.scene.scenario));

    {
        // LoS probability over grid points x azimuths x grids, per mount and elevation.
        std::map<std::pair<int, double>, std::pair<std::vector<double>, std::vector<bool>>> acc;
        for (std::size_t i = 0; i < r.plan.tasks.size(); ++i)
        {
            const auto &t = r.plan.tasks[i];
            const auto &o = r.outcomes[i];
            if (!o.ok)
                continue;
            auto &a = acc[{static_cast<int>(t.mount), t.elevation_deg}];
            a.first.push_back(o.los_fraction);
            a.second.push_back(o.los);
        }
        std::ostringstream os;
        os << "scenario,mount,elevation_deg,los_probability,los_probability_center,samples\n";
        for (const auto &[k, v] : acc)
            os << scen << ',' << to_string(static_cast<MountHeight>(k.first)) << ',' << fmt_num(k.second) << ','
               << fmt_num(mean(v.first)) << ',' << fmt_num(los_probability(v.second)) << ',' << v.first.size() << '\n';
        files["los_probability.csv"] = os.str();
    }

    const auto sums = summarize(r.rows());
    std::ostringstream k, d, mech;
    k << "scenario,use_case,band,elevation_deg,median_k_ml_db,mean_k_ml_db,median_k_moment_db,mean_k_moment_db,count\n";
    d << "scenario,use_case,band,elevation_deg,median_ds_s,mean_ds_s,count\n";
    mech << "scenario,use_case,band,elevation_deg,L,R,RD,D,S,RS\n";
    for (const auto &[key, s] : sums)
    {
        const auto [uc, band, el] = key;
        const std::string head = scen + ',' + to_string(static_cast<UseCase>(uc)) + ',' +
                                  std::string(band_info(static_cast<Band>(band)).name) + ',' + fmt_num(el);
        const auto med = [](const std::vector<double> &v) { return v.empty() ? std::nan("") : median(v); };
        const auto avg = [](const std::vector<double> &v) { return v.empty() ? std::nan("") : mean(v); };
        k << head << ',' << fmt_num(med(s.k_ml)) << ',' << fmt_num(avg(s.k_ml)) << ',' << fmt_num(med(s.k_moment))
          << ',' << fmt_num(avg(s.k_moment)) << ',' << s.k_ml.size() << '\n';
        d << head << ',' << fmt_num(med(s.ds)) << ',' << fmt_num(avg(s.ds)) << ',' << s.ds.size() << '\n';
        if (!s.shares.empty())
        {
            const auto m = mean_breakdown(s.shares);
            mech << head;
            for (double v : m.share)
                mech << ',' << fmt_num(v);
            mech << '\n';
        }
    }
    files["k_vs_elevation.csv"] = k.str();
    files["ds_vs_elevation.csv"] = d.str();
    files["mechanisms.csv"] = mech.str();
    return files;
}

// Everything needed to reproduce the run; deliberately free of wall-clock data.
inline nlohmann::json manifest_json(const CampaignResult &r)
{
    nlohmann::json m;
    const auto cfg = r.config.to_json();
    m["schema"] = "satrt-manifest v1";
    m["code_version"] = code_version;
    m["config"] = cfg;
    m["config_hash"] = detail::hex64(detail::fnv1a(cfg.dump()));
    m["scene_hash"] = detail::hex64(detail::fnv1a(scene_to_json(r.scene).dump()));
    m["scenario"] = std::string(to_string(r.scene.scenario));
    m["building_count"] = r.scene.buildings.size();
    m["master_seed"] = r.config.master_seed;
    m["grids"] = nlohmann::json::array();
    for (std::size_t g = 0; g < r.plan.grid_centers.size(); ++g)
        m["grids"].push_back({{"id", g},
                              {"center", {r.plan.grid_centers[g].x, r.plan.grid_centers[g].y}},
                              {"azimuth_start_deg", r.plan.azimuth_start_deg[g]}});
    m["tasks"] = nlohmann::json::array();
    for (std::size_t i = 0; i < r.plan.tasks.size(); ++i)
    {
        const auto &t = r.plan.tasks[i];
        const auto &o = r.outcomes[i];
        nlohmann::json jt{{"id", t.id},
                          {"grid", t.grid},
                          {"mount", to_string(t.mount)},
                          {"elevation_deg", t.elevation_deg},
                          {"azimuth_deg", t.azimuth_deg},
                          {"seed", t.seed},
                          {"paths", o.path_count},
                          {"status", o.ok ? "ok" : "failed"}};
        if (!o.ok)
            jt["error"] = o.error;
        m["tasks"].push_back(std::move(jt));
    }
    m["task_count"] = r.plan.tasks.size();
    m["evaluation_count"] = r.plan.evaluation_count;
    m["failed_tasks"] = r.failed_tasks();
    return m;
}

// Writes results.csv, the plot CSVs, manifest.json and timing.json (the only
// non-deterministic file). Returns false when more than 1% of the tasks failed.
inline bool write_campaign_outputs(const CampaignResult &r, const std::filesystem::path &dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    detail::write_file(dir / "results.csv", results_csv(r.rows()));
    for (const auto &[name, content] : plot_csvs(r))
        detail::write_file(dir / name, content);
    detail::write_file(dir / "manifest.json", manifest_json(r).dump(2) + "\n");

    if (r.config.dump_paths)
    {
        fs::create_directories(dir / "paths");
        fs::create_directories(dir / "contributions");
        for (std::size_t i = 0; i < r.outcomes.size(); ++i)
        {
            char name[64];
            std::snprintf(name, sizeof name, "task%05zu.jsonl", i);
            detail::write_file(dir / "paths" / name, r.outcomes[i].paths_jsonl);
            for (const auto &[cname, content] : r.outcomes[i].contribution_dumps)
                detail::write_file(dir / "contributions" / cname, content);
        }
    }

    nlohmann::json timing;
    for (const auto &[k, v] : r.timing_s)
        timing["stages_s"][k] = v;
    timing["threads"] = r.threads_used;
    detail::write_file(dir / "timing.json", timing.dump(2) + "\n");

    return r.failed_tasks() * 100 <= r.outcomes.size();
}

inline bool campaign_succeeded(const CampaignResult &r) { return r.failed_tasks() * 100 <= r.outcomes.size(); }

inline CampaignResult run_campaign(const CampaignConfig &config)
{
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const Scene scene = load_campaign_scene(config);
    const auto t1 = clock::now();
    CampaignResult r = execute_campaign(config, scene);
    r.timing_s["load_scene"] = std::chrono::duration<double>(t1 - t0).count();
    if (!config.output_dir.empty())
    {
        const auto t2 = clock::now();
        write_campaign_outputs(r, config.output_dir);
        r.timing_s["write"] = std::chrono::duration<double>(clock::now() - t2).count();
        // Refresh timing.json with the write stage included.
        nlohmann::json timing;
        for (const auto &[k, v] : r.timing_s)
            timing["stages_s"][k] = v;
        timing["threads"] = r.threads_used;
        detail::write_file(std::filesystem::path(config.output_dir) / "timing.json", timing.dump(2) + "\n");
    }
    return r;
}

} // namespace satrt
