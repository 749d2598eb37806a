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
#include <string>
#include <string_view>

#include "errors.hpp"
#include "material.hpp"
#include "math.hpp"

namespace satrt
{

enum class Polarization
{
    linear_vertical,
    rhcp,
    lhcp
};

enum class PatternKind
{
    isotropic,
    patch,
    aperture
};

enum class MountHeight
{
    ground,      // 1.5 m above terrain
    rooftop_mean // mean building height of the scene
};

inline constexpr double ground_mount_height_m = 1.5;

struct AntennaConfig
{
    PatternKind pattern = PatternKind::isotropic;
    Vec3 boresight{0.0, 0.0, 1.0};
    Polarization polarization = Polarization::linear_vertical;
    double directivity_dbi = 0.0;
    double hpbw_deg = 0.0;            // unused for isotropic
    double aperture_diameter_m = 0.0; // aperture only
    MountHeight mount = MountHeight::ground;

    // Handheld terminal: isotropic, vertical polarization, street level.
    static AntennaConfig handheld() { return {}; }

    // Car-roof patch: cos(theta) power pattern (peak 4, i.e. 6.02 dBi, HPBW 120 deg), zenith boresight.
    static AntennaConfig vehicular()
    {
        AntennaConfig a;
        a.pattern = PatternKind::patch;
        a.directivity_dbi = 10.0 * std::log10(4.0);
        a.hpbw_deg = 120.0;
        return a;
    }

    // 60 cm rooftop dish, circularly polarized, boresight set per pose to track the satellite.
    static AntennaConfig fixed_aperture(Band band)
    {
        AntennaConfig a;
        a.pattern = PatternKind::aperture;
        a.polarization = Polarization::rhcp;
        a.aperture_diameter_m = 0.6;
        a.mount = MountHeight::rooftop_mean;
        switch (band)
        {
        case Band::Ka: a.directivity_dbi = 44.0, a.hpbw_deg = 2.9; break;
        case Band::Q: a.directivity_dbi = 48.0, a.hpbw_deg = 1.8; break;
        case Band::V: a.directivity_dbi = 50.0, a.hpbw_deg = 1.5; break;
        default: throw config_error("the fixed aperture terminal only operates in Ka, Q or V band");
        }
        return a;
    }
};

// Directivity of a uniformly illuminated circular aperture, (pi D / lambda)^2.
inline double uniform_aperture_directivity(double diameter_m, double frequency_hz)
{
    const double lambda = constants::c0 / frequency_hz;
    const double x = constants::pi * diameter_m / lambda;
    return x * x;
}

namespace detail
{
inline void require_unit(const Vec3 &d, const char *what)
{
    if (std::abs(norm(d) - 1.0) > 1e-9)
        throw argument_error(std::string(what) + " must be a unit vector");
}
} // namespace detail

// Linear power gain toward `direction` (unit vector pointing from the antenna outward).
inline double gain(const AntennaConfig &ant, const Vec3 &direction)
{
    detail::require_unit(direction, "gain direction");
    switch (ant.pattern)
    {
    case PatternKind::isotropic:
        return 1.0;
    case PatternKind::patch: {
        const double c = dot(direction, ant.boresight);
        return c > 0.0 ? 4.0 * c : 0.0;
    }
    case PatternKind::aperture: {
        // Gaussian main beam: G0 exp(-4 ln2 (theta / hpbw)^2), half power at theta = hpbw / 2.
        const double theta = std::acos(std::clamp(dot(direction, ant.boresight), -1.0, 1.0));
        const double hp = deg2rad(ant.hpbw_deg);
        const double g0 = std::pow(10.0, ant.directivity_dbi / 10.0);
        return g0 * std::exp(-4.0 * std::log(2.0) * (theta / hp) * (theta / hp));
    }
    }
    return 0.0;
}

// Unit polarization vector of a wave travelling along `propagation` (e^{+j omega t}).
// RHCP = (theta_hat - j phi_hat) / sqrt 2 in the IEEE sense; "vertical" is the
// upward-pointing transverse vector -theta_hat.
inline CVec3 polarization_vector(Polarization pol, const Vec3 &propagation)
{
    const auto [th, ph] = spherical_basis(propagation);
    const double s = 1.0 / std::sqrt(2.0);
    switch (pol)
    {
    case Polarization::linear_vertical:
        return CVec3(-th);
    case Polarization::rhcp:
        return CVec3(th) * s + cdouble(0.0, -s) * ph;
    case Polarization::lhcp:
        return CVec3(th) * s + cdouble(0.0, s) * ph;
    }
    return {};
}

// Isotropic satellite transmitter. |E(1 m)|^2 / (2 eta0) * 4 pi (1 m)^2 = power_w.
struct TxFieldSpec
{
    Polarization polarization = Polarization::rhcp;
    double power_w = 1.0;

    double magnitude_at_1m() const { return std::sqrt(2.0 * constants::eta0 * power_w / (4.0 * constants::pi)); }

    CVec3 field_at_1m(const Vec3 &direction) const
    {
        return polarization_vector(polarization, direction) * magnitude_at_1m();
    }
};

inline CVec3 tx_field_at_1m(Polarization pol, const Vec3 &direction, double power_w = 1.0)
{
    detail::require_unit(direction, "transmit direction");
    return TxFieldSpec{pol, power_w}.field_at_1m(direction);
}

// Open-circuit-equivalent received amplitude sqrt(G) (E . p_rx*) for a wave travelling
// along `incidence`. Polarization mismatch is included through the projection.
inline cdouble rx_weight(const AntennaConfig &ant, const Vec3 &incidence, const CVec3 &field)
{
    detail::require_unit(incidence, "arrival direction");
    const double e = norm(field);
    if (e == 0.0)
        return 0.0;
    if (std::abs(dot(field, incidence)) > 1e-6 * e)
        throw contract_error("rx_weight: incident field is not transverse to its arrival direction");
    const double g = gain(ant, -incidence);
    if (g == 0.0)
        return 0.0;
    const CVec3 p = polarization_vector(ant.polarization, incidence);
    return std::sqrt(g) * hdot(field, p);
}

inline std::string_view to_string(Polarization p)
{
    switch (p)
    {
    case Polarization::linear_vertical: return "linear-vertical";
    case Polarization::rhcp: return "rhcp";
    case Polarization::lhcp: return "lhcp";
    }
    return "?";
}

} // namespace satrt
