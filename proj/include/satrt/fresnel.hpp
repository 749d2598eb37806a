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

#include "errors.hpp"
#include "material.hpp"
#include "math.hpp"

namespace satrt
{

struct FresnelCoefficients
{
    cdouble perp; // soft, E normal to the plane of incidence
    cdouble par;  // hard, E in the plane of incidence
};

// 2x2 dyadic in the (soft, hard) ray-fixed basis.
struct Dyadic2
{
    std::array<cdouble, 4> m{};
    cdouble operator()(int i, int j) const { return m[2 * i + j]; }
    static Dyadic2 diag(cdouble a, cdouble b) { return {{a, 0.0, 0.0, b}}; }
};

// Coefficients for a plane wave hitting a half-space of permittivity `eps` at
// cos(theta_i) = cos_i in [0, 1]. With the basis e_par = k x e_perp a PEC gives
// perp = -1, par = +1, and both tend to -1 at grazing incidence.
inline FresnelCoefficients fresnel_coefficients(cdouble eps, double cos_i)
{
    cos_i = std::clamp(cos_i, 0.0, 1.0);
    const double sin2 = 1.0 - cos_i * cos_i;
    const cdouble root = std::sqrt(eps - sin2);
    return {(cos_i - root) / (cos_i + root), (eps * cos_i - root) / (eps * cos_i + root)};
}

inline FresnelCoefficients fresnel_coefficients(const Material &m, double cos_i, double frequency_hz)
{
    return fresnel_coefficients(m.complex_permittivity(frequency_hz), cos_i);
}

// diag(perp, par) scaled by the specular reduction sqrt(1 - S^2).
inline Dyadic2 fresnel_dyadic(const Material &m, double incidence_angle, double frequency_hz)
{
    if (!(incidence_angle >= 0.0 && incidence_angle < constants::pi / 2))
        throw argument_error("incidence angle must be in [0, pi/2)");
    const auto g = fresnel_coefficients(m, std::cos(incidence_angle), frequency_hz);
    const double r = m.specular_reduction();
    return Dyadic2::diag(g.perp * r, g.par * r);
}

// World-frame reflection dyadic mapping the incident field onto the reflected one:
// perp e_perp e_perp^T + par e_par_r e_par_i^T with e_perp = k_in x n / |k_in x n|.
inline Mat3c reflection_dyadic(const Material &m, const Vec3 &k_in, const Vec3 &n, double frequency_hz,
                               bool specular_reduction = true)
{
    const double cos_i = -dot(k_in, n);
    const Vec3 k_out = reflect_direction(k_in, n);
    Vec3 e_perp = cross(k_in, n);
    const double s = norm(e_perp);
    if (s < 1e-12)
    {
        // Normal incidence: any direction in the plane works.
        const Vec3 t = std::abs(n.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
        e_perp = normalize(cross(t, n));
    }
    else
        e_perp = e_perp / s;
    const Vec3 e_par_i = cross(k_in, e_perp), e_par_r = cross(k_out, e_perp);
    auto g = fresnel_coefficients(m, cos_i, frequency_hz);
    if (specular_reduction)
    {
        const double r = m.specular_reduction();
        g.perp *= r, g.par *= r;
    }
    return Mat3c::outer(g.perp, e_perp, e_perp) + Mat3c::outer(g.par, e_par_r, e_par_i);
}

} // namespace satrt
