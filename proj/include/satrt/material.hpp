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
#include <complex>
#include <optional>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "math.hpp"

namespace satrt
{

// Electromagnetic surface parameters. `scattering_s` is the effective-roughness
// scattering parameter S; the specular reduction factor follows from S^2 + R^2 = 1.
struct Material
{
    double eps_r = 5.0;
    double sigma = 0.01;        // S/m
    double scattering_s = 0.0;  // [0, 1]

    double specular_reduction() const { return std::sqrt(1.0 - scattering_s * scattering_s); }

    // eps_r - j sigma / (omega eps0), e^{+j omega t} convention.
    cdouble complex_permittivity(double frequency_hz) const
    {
        return {eps_r, -sigma / (2.0 * constants::pi * frequency_hz * constants::eps0)};
    }

    void validate() const
    {
        if (!(eps_r >= 1.0) || !(sigma >= 0.0) || !(scattering_s >= 0.0 && scattering_s <= 1.0))
            throw validation_error("material out of range: eps_r=" + std::to_string(eps_r) +
                                   " sigma=" + std::to_string(sigma) + " S=" + std::to_string(scattering_s));
    }

    bool operator==(const Material &) const = default;
};

enum class Scenario
{
    dense_urban,
    urban,
    suburban,
    custom
};

inline std::string_view to_string(Scenario s)
{
    switch (s)
    {
    case Scenario::dense_urban: return "dense-urban";
    case Scenario::urban: return "urban";
    case Scenario::suburban: return "suburban";
    case Scenario::custom: return "custom";
    }
    return "custom";
}

inline Scenario parse_scenario(std::string_view s)
{
    if (s == "dense-urban") return Scenario::dense_urban;
    if (s == "urban") return Scenario::urban;
    if (s == "suburban") return Scenario::suburban;
    if (s == "custom") return Scenario::custom;
    throw format_error("unknown scenario label '" + std::string(s) + "'");
}

enum class Band
{
    S,
    C,
    Ka,
    Q,
    V
};

struct BandInfo
{
    Band band;
    std::string_view name;
    double f_min_hz;
    double f_max_hz;
    double default_center_hz;
    bool high; // Ka/Q/V share one EM parameter set, S/C the other
};

inline constexpr std::array<BandInfo, 5> band_table{{
    {Band::S, "S", 1.98e9, 2.2e9, 2.1e9, false},
    {Band::C, "C", 3.4e9, 3.9e9, 3.5e9, false},
    {Band::Ka, "Ka", 17.0e9, 30.0e9, 23.5e9, true},
    {Band::Q, "Q", 36.0e9, 46.0e9, 41.0e9, true},
    {Band::V, "V", 46.0e9, 56.0e9, 51.0e9, true},
}};

inline const BandInfo &band_info(Band b) { return band_table[static_cast<std::size_t>(b)]; }

inline Band parse_band(std::string_view s)
{
    for (const auto &b : band_table)
        if (b.name == s)
            return b.band;
    throw config_error("unknown band '" + std::string(s) + "'");
}

// Band containing `f`. Q owns the shared 46 GHz edge.
inline Band band_for_frequency(double f)
{
    for (const auto &b : band_table)
        if (f >= b.f_min_hz && f <= b.f_max_hz)
            return b.band;
    throw config_error("frequency " + std::to_string(f) + " Hz lies outside every supported band");
}

// Default building-wall parameters per band group.
inline Material default_wall_material(Band b)
{
    return band_info(b).high ? Material{5.5, 0.4, 0.6} : Material{5.0, 0.01, 0.4};
}

// Default terrain parameters per band group and scenario. Custom scenes use the urban column.
inline Material default_terrain_material(Band b, Scenario s)
{
    const bool high = band_info(b).high;
    double S = 0.0;
    switch (s)
    {
    case Scenario::dense_urban: S = high ? 0.75 : 0.5; break;
    case Scenario::suburban: S = high ? 0.375 : 0.25; break;
    case Scenario::urban:
    case Scenario::custom: S = high ? 0.6 : 0.4; break;
    }
    return high ? Material{5.5, 0.4, S} : Material{5.0, 0.01, S};
}

} // namespace satrt
