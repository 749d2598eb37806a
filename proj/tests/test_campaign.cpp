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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include <satrt/satrt.hpp>

using namespace satrt;
namespace fs = std::filesystem;

namespace
{

fs::path samples_dir()
{
    const char *env = std::getenv("SATRT_SAMPLES");
    return env ? fs::path(env) : fs::path(SATRT_SOURCE_DIR) / "samples";
}

fs::path scratch(const std::string &name)
{
    const fs::path p = fs::temp_directory_path() / ("satrt_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string &line, char sep = ',')
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, sep))
        out.push_back(f);
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

// Results CSV as header-keyed records.
std::vector<std::map<std::string, std::string>> read_results(const fs::path &p)
{
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "# satrt-results v1");
    std::getline(in, line);
    const auto header = split(line);
    std::vector<std::map<std::string, std::string>> rows;
    while (std::getline(in, line))
    {
        const auto f = split(line);
        EXPECT_EQ(f.size(), header.size());
        std::map<std::string, std::string> r;
        for (std::size_t i = 0; i < header.size() && i < f.size(); ++i)
            r[header[i]] = f[i];
        rows.push_back(r);
    }
    return rows;
}

CampaignConfig parse(const std::string &text) { return parse_campaign_config(nlohmann::json::parse(text), samples_dir()); }

Scene square_scene(double half = 100)
{
    Scene s;
    s.bounds = {0, 0, 2 * half, 2 * half};
    s.normalize_and_validate();
    return s;
}

int run_cli(const std::string &args, std::string *out = nullptr)
{
    const char *cli = std::getenv("SATRT_CLI");
    if (!cli)
        return -1;
    const fs::path log = fs::temp_directory_path() / "satrt_cli_out.txt";
    const std::string cmd = std::string("\"") + cli + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    if (out)
        *out = slurp(log);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Config, PairsMustMatchTheTerminalTable)
{
    EXPECT_THROW(parse(R"({"scene":{"file":"empty_scene.json"},"pairs":[["vehicular","Ka"]]})"), config_error);
    EXPECT_THROW(parse(R"({"scene":{"file":"empty_scene.json"},"pairs":[["fixed","S"]]})"), config_error);
    EXPECT_THROW(parse(R"({"scene":{"file":"empty_scene.json"},"use_cases":["vehicular"],"bands":["Ka"]})"), config_error);
    EXPECT_THROW(parse(R"({"scene":{"file":"empty_scene.json"},"use_cases":["handheld","fixed"],"bands":["S"]})"),
                 config_error);
    EXPECT_THROW(parse(R"({"scene":{"file":"empty_scene.json"},"pairs":[["handheld","X"]]})"), config_error);
    EXPECT_THROW(parse(R"({"scene":{"file":"empty_scene.json"},"pairs":[["walker","C"]]})"), config_error);

    const auto c = parse(R"({"scene":{"file":"empty_scene.json"},"use_cases":["handheld","vehicular","fixed"],
                             "bands":["S","C","Ka","Q","V"]})");
    EXPECT_EQ(c.evaluations.size(), 2u * 2 + 3);
    for (const auto &e : c.evaluations)
        EXPECT_TRUE(compatible(e.use_case, e.band.band));
}

TEST(Config, FrequencyAndRanges)
{
    const auto c = parse(R"({"scene":{"file":"empty_scene.json"},"pairs":[{"use_case":"fixed","band":{"band":"Q","frequency_hz":40e9}}]})");
    ASSERT_EQ(c.evaluations.size(), 1u);
    EXPECT_EQ(c.evaluations[0].band.frequency_hz, 40e9);
    EXPECT_THROW(parse(R"({"scene":{"file":"empty_scene.json"},"pairs":[{"use_case":"fixed","band":{"band":"Q","frequency_hz":60e9}}]})"),
                 config_error);
    EXPECT_THROW(parse(R"({"scene":{"file":"empty_scene.json"},"pairs":[["handheld","C"]],"elevations_deg":[0]})"),
                 config_error);
    EXPECT_THROW(parse(R"({"scene":{"file":"empty_scene.json"},"pairs":[["handheld","C"]],"azimuth_count":0})"),
                 config_error);
    EXPECT_THROW(parse(R"({"pairs":[["handheld","C"]]})"), config_error);
    EXPECT_THROW(parse(R"({"scene":{"file":"empty_scene.json"},"pairs":[["handheld","C"]],"budget":{"reflections":4}})"),
                 config_error);
    EXPECT_THROW(parse(R"({"scene":{"file":"empty_scene.json"},"pairs":[["handheld","C"]],"azimuth_count":"six"})"),
                 config_error);
}

TEST(Config, LoadReportsMissingAndMalformedFiles)
{
    EXPECT_THROW(load_campaign_config("/nonexistent/config.json"), config_error);
    const auto dir = scratch("badjson");
    std::ofstream(dir / "bad.json") << "{\"pairs\": [";
    EXPECT_THROW(load_campaign_config((dir / "bad.json").string()), config_error);
}

TEST(Config, RelativeSceneResolvesAgainstConfig)
{
    const auto c = load_campaign_config((samples_dir() / "minimal.json").string());
    ASSERT_TRUE(c.scene_file);
    EXPECT_TRUE(fs::exists(*c.scene_file));
    EXPECT_EQ(c.master_seed, 7u);
}

TEST(Plan, FullScaleTaskCount)
{
    CampaignConfig c;
    c.synth = reference_city_params(Scenario::dense_urban, 3);
    c.evaluations = {{UseCase::handheld, {Band::S, band_info(Band::S).default_center_hz}}};
    c.validate();
    const auto scene = synth_city(*c.synth).scene;
    const auto plan = plan_campaign(c, scene);
    EXPECT_EQ(plan.tasks.size(), 20u * 9 * 6);
    EXPECT_EQ(plan.evaluation_count, 20u * 9 * 6);
    EXPECT_EQ(plan.grid_centers.size(), 20u);
}

TEST(Plan, SharedMountSharesTasks)
{
    auto c = parse(R"({"scene":{"file":"empty_scene.json"},"pairs":[["handheld","C"],["vehicular","C"]],
                       "elevations_deg":[45],"azimuth_count":1,"grids":{"centers":[[50,50]]}})");
    const auto scene = load_campaign_scene(c);
    const auto plan = plan_campaign(c, scene);
    ASSERT_EQ(plan.tasks.size(), 1u);
    EXPECT_EQ(plan.tasks[0].evaluations.size(), 2u);
    EXPECT_EQ(plan.evaluation_count, 2u);

    c.evaluations.push_back({UseCase::fixed, {Band::Ka, band_info(Band::Ka).default_center_hz}});
    EXPECT_EQ(plan_campaign(c, scene).tasks.size(), 2u);
}

TEST(Plan, CentersOutsideTheSceneAreRejected)
{
    auto c = parse(R"({"scene":{"file":"empty_scene.json"},"pairs":[["handheld","C"]],"grids":{"centers":[[150,50]]}})");
    EXPECT_THROW(plan_campaign(c, load_campaign_scene(c)), config_error);
}

TEST(Plan, SeedsAreDistinctAndReproducible)
{
    CampaignConfig c;
    c.scene_file = (samples_dir() / "canyon_scene.json").string();
    c.evaluations = {{UseCase::handheld, {Band::C, band_info(Band::C).default_center_hz}}};
    c.grid_centers = {{60, 40}, {60, 80}};
    const auto scene = load_campaign_scene(c);
    const auto a = plan_campaign(c, scene), b = plan_campaign(c, scene);
    std::set<std::uint64_t> seeds;
    for (std::size_t i = 0; i < a.tasks.size(); ++i)
    {
        EXPECT_EQ(a.tasks[i].seed, b.tasks[i].seed);
        EXPECT_EQ(a.tasks[i].azimuth_deg, b.tasks[i].azimuth_deg);
        seeds.insert(a.tasks[i].seed);
    }
    EXPECT_EQ(seeds.size(), a.tasks.size());
    c.master_seed = 2;
    EXPECT_NE(plan_campaign(c, scene).tasks[0].seed, a.tasks[0].seed);
}

TEST(Grids, EmptySceneUsesTheCenter)
{
    const auto grids = place_grids(square_scene(), 1, MountHeight::ground, 1);
    ASSERT_EQ(grids.size(), 1u);
    EXPECT_EQ(grids[0].center.x, 100);
    EXPECT_EQ(grids[0].center.y, 100);
    EXPECT_EQ(grids[0].center.z, ground_mount_height_m);
    EXPECT_EQ(grids[0].size(), 225u);
}

TEST(Grids, FullyBuiltSceneFails)
{
    Scene s = square_scene(20);
    BuildingPrism b;
    b.id = "block";
    b.footprint = {{0, 0}, {40, 0}, {40, 40}, {0, 40}};
    b.height = 10;
    s.buildings.push_back(b);
    s.normalize_and_validate();
    try
    {
        place_grids(s, 3, MountHeight::ground, 1);
        FAIL() << "expected a placement error";
    }
    catch (const placement_error &e)
    {
        EXPECT_EQ(e.achieved_count, 0u);
    }
}

TEST(Grids, DenseCityClearanceAndSeparation)
{
    const auto city = synth_city(reference_city_params(Scenario::dense_urban, 3));
    const auto grids = place_grids(city.scene, 20, MountHeight::ground, 77);
    ASSERT_EQ(grids.size(), 20u);
    for (std::size_t i = 0; i < grids.size(); ++i)
    {
        const Vec3 c = grids[i].center;
        const double h = 0.5 * grids[i].side + 1.0;
        EXPECT_GE(c.x - h, city.scene.bounds.xmin - 1e-9);
        EXPECT_LE(c.x + h, city.scene.bounds.xmax + 1e-9);
        EXPECT_GE(c.y - h, city.scene.bounds.ymin - 1e-9);
        EXPECT_LE(c.y + h, city.scene.bounds.ymax + 1e-9);
        // Synthetic footprints are axis-aligned squares: a box overlap test is exact.
        for (const auto &b : city.scene.buildings)
        {
            double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
            for (const auto &p : b.footprint)
                x0 = std::min(x0, p.x), y0 = std::min(y0, p.y), x1 = std::max(x1, p.x), y1 = std::max(y1, p.y);
            const bool overlap = c.x - h < x1 && c.x + h > x0 && c.y - h < y1 && c.y + h > y0;
            EXPECT_FALSE(overlap) << "grid " << i << " touches " << b.id;
        }
        for (std::size_t j = 0; j < i; ++j)
            EXPECT_GE(std::hypot(c.x - grids[j].center.x, c.y - grids[j].center.y), 10.0);
    }
    // Same seed, same grids.
    const auto again = place_grids(city.scene, 20, MountHeight::ground, 77);
    for (std::size_t i = 0; i < grids.size(); ++i)
        EXPECT_EQ(grids[i].center, again[i].center);
}

TEST(Grids, RooftopMountUsesMeanHeight)
{
    const auto city = synth_city(reference_city_params(Scenario::urban, 2));
    double sum = 0;
    for (const auto &b : city.scene.buildings)
        sum += b.height;
    EXPECT_NEAR(mount_height(city.scene, MountHeight::rooftop_mean), sum / city.scene.buildings.size(), 1e-12);
    EXPECT_EQ(mount_height(city.scene, MountHeight::ground), ground_mount_height_m);
}

TEST(Run, MinimalFreeSpaceGolden)
{
    auto c = load_campaign_config((samples_dir() / "minimal.json").string());
    const auto dir = scratch("minimal");
    c.output_dir = dir.string();
    const auto r = run_campaign(c);
    EXPECT_EQ(r.failed_tasks(), 0u);
    const auto rows = read_results(dir / "results.csv");
    ASSERT_EQ(rows.size(), 1u);
    const auto &row = rows[0];
    EXPECT_EQ(row.at("use_case"), "handheld");
    EXPECT_EQ(row.at("band"), "C");
    EXPECT_EQ(row.at("frequency_hz"), "3500000000");
    EXPECT_EQ(row.at("elevation_deg"), "45");
    EXPECT_EQ(row.at("los_flag"), "1");
    EXPECT_EQ(row.at("los_fraction"), "1");
    EXPECT_EQ(row.at("k_ml_db"), "80");
    EXPECT_EQ(row.at("k_moment_db"), "80");
    EXPECT_EQ(row.at("ds_s"), "0");
    EXPECT_EQ(row.at("share_L"), "1");
    for (const char *m : {"share_R", "share_RD", "share_D", "share_S", "share_RS"})
        EXPECT_EQ(row.at(m), "0");
    EXPECT_EQ(row.at("path_count"), "1");

    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(manifest["master_seed"], 7);
    EXPECT_EQ(manifest["task_count"], 1);
    EXPECT_FALSE(manifest.dump().find("stages_s") != std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "timing.json"));
    for (const char *f : {"los_probability.csv", "k_vs_elevation.csv", "ds_vs_elevation.csv", "mechanisms.csv"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
}

TEST(Run, CanyonRerunsAreByteIdenticalAcrossThreadCounts)
{
    auto c = load_campaign_config((samples_dir() / "canyon_sweep.json").string());
    const auto a = scratch("canyon_a"), b = scratch("canyon_b");
    c.output_dir = a.string();
    c.threads = 1;
    c.dump_paths = true;
    run_campaign(c);
    c.output_dir = b.string();
    c.threads = 3;
    run_campaign(c);
    std::size_t files = 0;
    for (const auto &e : fs::recursive_directory_iterator(a))
    {
        if (!e.is_regular_file() || e.path().filename() == "timing.json")
            continue;
        const auto rel = fs::relative(e.path(), a);
        ASSERT_TRUE(fs::exists(b / rel)) << rel;
        EXPECT_EQ(slurp(e.path()), slurp(b / rel)) << rel;
        ++files;
    }
    EXPECT_GT(files, 200u);

    // A different master seed changes the scattering phases and therefore the results.
    const auto d = scratch("canyon_d");
    c.output_dir = d.string();
    c.master_seed = 12;
    c.dump_paths = false;
    run_campaign(c);
    EXPECT_NE(slurp(a / "results.csv"), slurp(d / "results.csv"));
}

TEST(Run, CanyonLosGrowsWithElevation)
{
    auto c = load_campaign_config((samples_dir() / "canyon_sweep.json").string());
    c.output_dir.clear();
    const auto r = execute_campaign(c, load_campaign_scene(c));
    EXPECT_EQ(r.failed_tasks(), 0u);
    std::map<double, std::vector<double>> ground;
    for (const auto &row : r.rows())
        if (row.mount == MountHeight::ground && row.band == Band::C)
            ground[row.elevation_deg].push_back(row.los_fraction);
    ASSERT_EQ(ground.size(), 9u);
    double prev = -1;
    for (const auto &[el, v] : ground)
    {
        const double m = mean(v);
        EXPECT_GE(m, prev - 1e-12) << el;
        prev = m;
    }
    EXPECT_LT(mean(ground.begin()->second), 0.5);
    EXPECT_EQ(mean(ground.rbegin()->second), 1.0);

    // Rooftop dishes above the canyon walls see the satellite.
    for (const auto &row : r.rows())
    {
        if (row.use_case == UseCase::fixed && row.elevation_deg >= 30)
        {
            EXPECT_TRUE(row.los);
        }
    }
}

TEST(Cli, SimulateFitAndSynth)
{
    if (!std::getenv("SATRT_CLI"))
        GTEST_SKIP() << "SATRT_CLI not set";
    const auto dir = scratch("cli");
    const auto s = samples_dir();
    std::string out;
    EXPECT_EQ(run_cli("simulate --config \"" + (s / "minimal.json").string() + "\" --out \"" + (dir / "run").string() +
                          "\" --threads 1 --seed 9 --dump-paths",
                      &out),
              0)
        << out;
    EXPECT_TRUE(fs::exists(dir / "run" / "results.csv"));
    EXPECT_TRUE(fs::exists(dir / "run" / "paths" / "task00000.jsonl"));
    EXPECT_EQ(nlohmann::json::parse(slurp(dir / "run" / "manifest.json"))["master_seed"], 9);

    ASSERT_EQ(run_cli("fit-rician --csv \"" + (s / "amplitudes.csv").string() + "\"", &out), 0) << out;
    const auto fit = nlohmann::json::parse(out);
    EXPECT_EQ(fit["samples"], 225);
    EXPECT_NEAR(fit["ml"]["k_db"].get<double>(), 5.0, 1.5);
    EXPECT_TRUE(fit["ml"]["converged"].get<bool>());

    ASSERT_EQ(run_cli("synth-city --params \"" + (s / "city_params.json").string() + "\" --out \"" +
                          (dir / "city.json").string() + "\"",
                      &out),
              0)
        << out;
    const auto scene = load_scene((dir / "city.json").string());
    EXPECT_GT(scene.buildings.size(), 100u);

    std::ofstream(dir / "bad.json") << R"({"scene":{"file":"nowhere.json"},"pairs":[["fixed","S"]]})";
    EXPECT_EQ(run_cli("simulate --config \"" + (dir / "bad.json").string() + "\"", &out), 2) << out;
    EXPECT_NE(out.find("config error"), std::string::npos);
    EXPECT_NE(run_cli("simulate", &out), 0);
}
