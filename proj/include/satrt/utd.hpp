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
#include <complex>

#include "errors.hpp"
#include "fresnel.hpp"
#include "math.hpp"
#include "scene.hpp"

namespace satrt
{

// Transition function F(X) = 2j sqrt(X) e^{jX} int_{sqrt X}^inf e^{-j t^2} dt.
inline cdouble utd_transition(double x_arg)
{
    using namespace std::complex_literals;
    if (!(x_arg > 0.0))
        return 0.0;
    const double x = std::sqrt(x_arg);
    if (x_arg <= 4.0)
    {
        // int_0^x e^{-j t^2} dt as a power series.
        cdouble term = x, sum = x;
        for (int n = 1; n < 200; ++n)
        {
            term *= -1i * (x * x) / static_cast<double>(n);
            const cdouble add = term / static_cast<double>(2 * n + 1);
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum))
                break;
        }
        const cdouble full = 0.5 * std::sqrt(constants::pi) * std::exp(-0.25i * constants::pi);
        return 2i * x * std::exp(1i * x_arg) * (full - sum);
    }
    // Laplace continued fraction for the complementary integral (modified Lentz).
    const cdouble z = std::exp(0.25i * constants::pi) * x;
    constexpr double tiny = 1e-300;
    cdouble f = z, c = z, d = 0.0;
    for (int k = 1; k < 5000; ++k)
    {
        const double a = 0.5 * k;
        d = z + a * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = z + a / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const cdouble delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16)
            break;
    }
    return 1i * x * std::exp(-0.25i * constants::pi) / f;
}

struct UtdCoefficients
{
    cdouble soft;
    cdouble hard;
};

// Wedge geometry in the edge-fixed frame. Angles are measured from face 0 through the air.
struct WedgeGeometry
{
    double n = 1.5;       // open angle / pi
    double phi_in = 0.0;  // phi'
    double phi_out = 0.0; // phi
    double beta0 = constants::pi / 2;
    double s_in = 1.0;  // s'
    double s_out = 1.0; // s
};

namespace detail
{

// cot((pi + sign*beta) / 2n) F(k L a(beta)) with the boundary limit handled explicitly.
inline cdouble utd_term(double n, double beta, int sign, double k_l)
{
    using namespace std::complex_literals;
    const double two_pi_n = 2.0 * constants::pi * n;
    double eps;
    double a;
    if (sign > 0)
    {
        const double big_n = std::round((beta + constants::pi) / two_pi_n);
        eps = constants::pi + beta - two_pi_n * big_n;
        const double c = std::cos(0.5 * (two_pi_n * big_n - beta));
        a = 2.0 * c * c;
    }
    else
    {
        const double big_n = std::round((beta - constants::pi) / two_pi_n);
        eps = constants::pi - beta + two_pi_n * big_n;
        const double c = std::cos(0.5 * (two_pi_n * big_n - beta));
        a = 2.0 * c * c;
    }
    if (std::abs(eps) < 1e-6)
    {
        const double sgn = eps >= 0.0 ? 1.0 : -1.0;
        const cdouble e4 = std::exp(0.25i * constants::pi);
        return n * (std::sqrt(2.0 * constants::pi * k_l) * sgn - 2.0 * k_l * eps * e4) * e4;
    }
    const double arg = (constants::pi + sign * beta) / (2.0 * n);
    return (std::cos(arg) / std::sin(arg)) * utd_transition(k_l * a);
}

inline FresnelCoefficients face_coefficients(const Material &m, double grazing, double sin_beta0, double f)
{
    const double cos_i = std::abs(std::sin(grazing)) * sin_beta0;
    return fresnel_coefficients(m, cos_i, f);
}

} // namespace detail

// Soft and hard diffraction coefficients of a lossy wedge: the reflection-boundary terms
// are weighted by the Fresnel coefficients of face 0 (at phi') and face n (at n pi - phi).
inline UtdCoefficients utd_coefficients(const WedgeGeometry &g, double k, const Material &face0,
                                        const Material &face_n, double frequency_hz)
{
    using namespace std::complex_literals;
    const double n = g.n;
    if (!(n > 0.0 && n < 2.0))
        throw geometry_error("degenerate wedge (interior angle 0 or 2 pi)");
    const double sb = std::sin(g.beta0);
    if (!(sb > 1e-12))
        throw geometry_error("ray grazes along the edge (sin beta0 = 0)");
    const double l = g.s_in * g.s_out * sb * sb / (g.s_in + g.s_out);
    const double kl = k * l;

    const double bm = g.phi_out - g.phi_in, bp = g.phi_out + g.phi_in;
    const cdouble t1 = detail::utd_term(n, bm, +1, kl);
    const cdouble t2 = detail::utd_term(n, bm, -1, kl);
    const cdouble t3 = detail::utd_term(n, bp, -1, kl);
    const cdouble t4 = detail::utd_term(n, bp, +1, kl);

    const auto r0 = detail::face_coefficients(face0, g.phi_in, sb, frequency_hz);
    const auto rn = detail::face_coefficients(face_n, n * constants::pi - g.phi_out, sb, frequency_hz);

    const cdouble pre = -std::exp(-0.25i * constants::pi) / (2.0 * n * std::sqrt(2.0 * constants::pi * k) * sb);
    return {pre * (t1 + t2 + r0.perp * t3 + rn.perp * t4), pre * (t1 + t2 + r0.par * t3 + rn.par * t4)};
}

struct DiffractionResult
{
    Mat3c dyadic;      // maps the incident field at the edge onto the diffracted field direction
    double spreading;  // sqrt(s' / (s (s + s')))
    UtdCoefficients coefficients;
    WedgeGeometry geometry;
};

// Diffraction at a point of `e` for an incident ray along k_in and a diffracted ray
// along k_out; s_in / s_out are the caustic distances. Edge-fixed basis:
// phi' = -(e x s') / |.|, beta0' = phi' x s', phi = (e x s) / |.|, beta0 = phi x s,
// dyadic = -Ds beta0 beta0'^T - Dh phi phi'^T.
inline DiffractionResult diffraction_dyadic(const Edge &e, const Vec3 &point, const Vec3 &k_in, const Vec3 &k_out,
                                            double s_in, double s_out, const Material &face0,
                                            const Material &face_n, double frequency_hz)
{
    if (!(e.open_angle > 0.0 && e.open_angle < 2.0 * constants::pi))
        throw geometry_error("degenerate wedge (interior angle 0 or 2 pi)");
    const Vec3 &ed = e.direction;
    const Vec3 c_in = cross(ed, k_in), c_out = cross(ed, k_out);
    const double n_in = norm(c_in), n_out = norm(c_out);
    if (n_in < 1e-12 || n_out < 1e-12)
        throw geometry_error("ray parallel to the diffracting edge");
    const Vec3 phi_i = -(c_in / n_in), beta_i = cross(phi_i, k_in);
    const Vec3 phi_o = c_out / n_out, beta_o = cross(phi_o, k_out);

    WedgeGeometry g;
    g.n = e.wedge_index();
    g.phi_in = e.angle_of(point - k_in);
    g.phi_out = e.angle_of(point + k_out);
    g.beta0 = std::acos(std::clamp(dot(k_in, ed), -1.0, 1.0));
    g.s_in = s_in;
    g.s_out = s_out;
    const double k = 2.0 * constants::pi * frequency_hz / constants::c0;
    const auto c = utd_coefficients(g, k, face0, face_n, frequency_hz);

    DiffractionResult r;
    r.dyadic = Mat3c::outer(-c.soft, beta_o, beta_i) + Mat3c::outer(-c.hard, phi_o, phi_i);
    r.spreading = std::sqrt(s_in / (s_out * (s_out + s_in)));
    r.coefficients = c;
    r.geometry = g;
    return r;
}

} // namespace satrt
