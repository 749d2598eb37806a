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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <satrt/satrt.hpp>

namespace
{

int run_simulate(const std::string &config_path, const std::string &out_dir, bool dump_paths, int threads,
                 const std::optional<std::uint64_t> &seed)
{
    satrt::CampaignConfig config = satrt::load_campaign_config(config_path);
    if (!out_dir.empty())
        config.output_dir = out_dir;
    if (dump_paths)
        config.dump_paths = true;
    if (threads > 0)
        config.threads = threads;
    if (seed)
        config.master_seed = *seed;

    const auto result = satrt::run_campaign(config);
    const std::size_t failed = result.failed_tasks();
    std::printf("%zu trace tasks, %zu evaluations, %zu failed; outputs in %s\n", result.plan.tasks.size(),
                result.plan.evaluation_count, failed, config.output_dir.c_str());
    for (std::size_t i = 0; i < result.outcomes.size(); ++i)
        if (!result.outcomes[i].ok)
            std::fprintf(stderr, "task %zu failed: %s\n", i, result.outcomes[i].error.c_str());
    if (!satrt::campaign_succeeded(result))
    {
        std::fprintf(stderr, "error: more than 1%% of tasks failed\n");
        return 3;
    }
    return 0;
}

int run_synth_city(const std::string &params_path, const std::string &out_path)
{
    std::ifstream in(params_path);
    if (!in)
        throw satrt::config_error("cannot open params '" + params_path + "'");
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw satrt::config_error(params_path + ": " + e.what());
    }
    const auto city = satrt::synth_city(satrt::synth_params_from_json(j));
    satrt::save_scene(city.scene, out_path);
    std::printf("%zu buildings, %.4g km2, %.1f buildings/km2, height %.2f +/- %.2f m -> %s\n",
                city.stats.building_count, city.stats.area_km2, city.stats.density_per_km2,
                city.stats.mean_height_m, city.stats.stddev_height_m, out_path.c_str());
    return 0;
}

// Accepts one or more numbers per line separated by commas or whitespace; non-numeric
// lines (headers, comments) are skipped.
std::vector<double> read_amplitudes(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw satrt::argument_error("cannot open '" + path + "'");
    std::vector<double> v;
    std::string line;
    while (std::getline(in, line))
    {
        for (char &c : line)
            if (c == ',' || c == ';' || c == '\t')
                c = ' ';
        std::istringstream ls(line);
        std::string tok;
        std::vector<double> row;
        bool numeric = true;
        while (ls >> tok)
        {
            try
            {
                std::size_t used = 0;
                const double x = std::stod(tok, &used);
                if (used != tok.size())
                    numeric = false;
                row.push_back(x);
            }
            catch (const std::exception &)
            {
                numeric = false;
            }
        }
        if (numeric)
            v.insert(v.end(), row.begin(), row.end());
    }
    return v;
}

int run_fit_rician(const std::string &csv_path)
{
    const satrt::EnvelopeSamples samples(read_amplitudes(csv_path));
    const auto ml = satrt::fit_rician_ml(samples);
    const auto mom = satrt::kfactor_moment(samples);
    nlohmann::json j;
    j["samples"] = samples.size();
    j["ml"] = {{"k_db", ml.k_hat_db},
               {"nu", ml.nu_hat},
               {"sigma", ml.sigma_hat},
               {"log_likelihood", ml.log_likelihood},
               {"converged", ml.converged},
               {"iterations", ml.iterations}};
    j["moment"] = {{"k_db", mom.k_hat_db}, {"nu", mom.nu_hat}, {"sigma", mom.sigma_hat}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Satellite-to-urban ray-tracing channel simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    bool dump_paths = false;
    int threads = 0;
    std::uint64_t seed = 0;
    auto *sim = app.add_subcommand("simulate", "Run a measurement campaign described by a JSON config");
    sim->add_option("--config", config_path, "Campaign config (JSON)")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out_dir, "Output directory (overrides config)");
    sim->add_flag("--dump-paths", dump_paths, "Write per-task ray paths and contributions");
    sim->add_option("--threads", threads, "Worker threads (default: hardware concurrency)")->check(CLI::PositiveNumber);
    auto *seed_opt = sim->add_option("--seed", seed, "Master seed (overrides config)");

    std::string params_path, scene_out;
    auto *synth = app.add_subcommand("synth-city", "Generate a Manhattan-grid city scene");
    synth->add_option("--params", params_path, "City parameters (JSON)")->required()->check(CLI::ExistingFile);
    synth->add_option("--out", scene_out, "Scene output file")->required();

    std::string csv_path;
    auto *fit = app.add_subcommand("fit-rician", "Fit a Rician K-factor to envelope amplitudes");
    fit->add_option("--csv", csv_path, "Amplitude samples (CSV)")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*sim)
            return run_simulate(config_path, out_dir, dump_paths, threads,
                                *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt);
        if (*synth)
            return run_synth_city(params_path, scene_out);
        if (*fit)
            return run_fit_rician(csv_path);
    }
    catch (const satrt::config_error &e)
    {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    catch (const satrt::placement_error &e)
    {
        std::fprintf(stderr, "placement error: %s (placed %zu)\n", e.what(), e.achieved_count);
        return 2;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
