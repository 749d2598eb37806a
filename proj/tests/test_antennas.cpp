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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <satrt/satrt.hpp>

using namespace satrt;

namespace
{

Vec3 from_angles(double theta, double phi)
{
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

// Midpoint rule over the sphere in (theta, phi); returns the mean gain.
double sphere_mean(const AntennaConfig &a, int nt, int np)
{
    double s = 0.0;
    const double dt = constants::pi / nt, dp = 2 * constants::pi / np;
    for (int i = 0; i < nt; ++i)
    {
        const double t = (i + 0.5) * dt;
        for (int j = 0; j < np; ++j)
            s += gain(a, from_angles(t, (j + 0.5) * dp)) * std::sin(t) * dt * dp;
    }
    return s / (4 * constants::pi);
}

} // namespace

TEST(Gain, IsotropicIsUnity)
{
    const auto a = AntennaConfig::handheld();
    for (const Vec3 d : {Vec3{0, 0, 1}, Vec3{0, 0, -1}, normalize(Vec3{1, 2, -3})})
        EXPECT_DOUBLE_EQ(gain(a, d), 1.0);
}

TEST(Gain, PatchHalfPowerAtSixtyDegrees)
{
    const auto a = AntennaConfig::vehicular();
    EXPECT_DOUBLE_EQ(gain(a, {0, 0, 1}), 4.0);
    EXPECT_NEAR(gain(a, from_angles(deg2rad(60), 0.3)), 2.0, 1e-12);
    EXPECT_DOUBLE_EQ(gain(a, from_angles(deg2rad(120), 0.0)), 0.0);
    EXPECT_NEAR(a.directivity_dbi, 6.0206, 1e-4);
    EXPECT_DOUBLE_EQ(a.hpbw_deg, 120.0);
}

TEST(Gain, ApertureBoresightAndHalfPower)
{
    const std::pair<Band, double> peaks[] = {{Band::Ka, 44}, {Band::Q, 48}, {Band::V, 50}};
    for (const auto &[b, dbi] : peaks)
    {
        auto a = AntennaConfig::fixed_aperture(b);
        a.boresight = normalize(Vec3{0.3, -0.2, 0.9});
        EXPECT_NEAR(gain(a, a.boresight), std::pow(10.0, dbi / 10), 1e-9 * std::pow(10.0, dbi / 10));
        // Half power at hpbw/2 off boresight.
        const Vec3 t = spherical_basis(a.boresight)[0];
        const double off = deg2rad(a.hpbw_deg / 2);
        const Vec3 d = normalize(a.boresight * std::cos(off) + t * std::sin(off));
        EXPECT_NEAR(gain(a, d) / gain(a, a.boresight), 0.5, 1e-9);
    }
    EXPECT_NEAR(gain(AntennaConfig::fixed_aperture(Band::Ka), {0, 0, 1}), 25118.864315, 1e-5);
}

TEST(Gain, ApertureRejectsLowBands) { EXPECT_THROW(AntennaConfig::fixed_aperture(Band::S), config_error); }

TEST(Gain, RejectsNonUnitDirection) { EXPECT_THROW(gain(AntennaConfig::handheld(), {0, 0, 2}), argument_error); }

TEST(Gain, PatchPatternIsNormalized) { EXPECT_NEAR(sphere_mean(AntennaConfig::vehicular(), 400, 64), 1.0, 0.02); }

TEST(Gain, ApertureSphereIntegralMatchesGaussianBeam)
{
    // The beam is specified by (peak, HPBW) and is not power-normalized: its mean over
    // the sphere is G0 * hpbw^2 / (16 ln 2) in the small-angle limit.
    auto a = AntennaConfig::fixed_aperture(Band::Ka);
    a.boresight = {0, 0, 1};
    double s = 0.0;
    const int n = 20000;
    const double tmax = 0.3, dt = tmax / n;
    for (int i = 0; i < n; ++i)
    {
        const double t = (i + 0.5) * dt;
        s += gain(a, from_angles(t, 0.0)) * std::sin(t) * dt * 2 * constants::pi;
    }
    s /= 4 * constants::pi;
    const double hp = deg2rad(2.9);
    EXPECT_NEAR(s, 25118.864315 * hp * hp / (16 * std::log(2.0)), 1e-3);
    EXPECT_NEAR(s, 5.8015, 1e-3);
}

TEST(Gain, UniformApertureDirectivity)
{
    const std::pair<double, double> cases[] = {{23.5e9, 43.4}, {41e9, 48.2}, {51e9, 50.1}};
    for (const auto &[f, dbi] : cases)
        EXPECT_NEAR(10 * std::log10(uniform_aperture_directivity(0.6, f)), dbi, 0.05);
    EXPECT_NEAR(10 * std::log10(uniform_aperture_directivity(0.6, 23.5e9)), 44.0, 1.0);
}

TEST(Polarization, CircularIdentities)
{
    for (const Vec3 d : {Vec3{0, 0, -1}, normalize(Vec3{1, -2, -0.5}), Vec3{1, 0, 0}})
    {
        for (auto pol : {Polarization::rhcp, Polarization::lhcp})
        {
            const CVec3 p = polarization_vector(pol, d);
            EXPECT_NEAR(std::abs(dot(p, p)), 0.0, 1e-15);
            EXPECT_NEAR(hdot(p, p).real(), 1.0, 1e-15);
            EXPECT_NEAR(std::abs(dot(p, d)), 0.0, 1e-15);
        }
        const CVec3 v = polarization_vector(Polarization::linear_vertical, d);
        EXPECT_NEAR(std::abs(dot(v, v) - 1.0), 0.0, 1e-15);
        // RHCP and LHCP are orthogonal.
        EXPECT_NEAR(std::abs(hdot(polarization_vector(Polarization::rhcp, d), polarization_vector(Polarization::lhcp, d))),
                    0.0, 1e-15);
    }
}

TEST(TxField, ReferenceMagnitude)
{
    const double e = norm(tx_field_at_1m(Polarization::rhcp, {0, 0, -1}));
    EXPECT_NEAR(e, 7.7433, 1e-4);
    EXPECT_NEAR(e, std::sqrt(2 * constants::eta0 / (4 * constants::pi)), 1e-12);
    // Power check: |E|^2 / (2 eta0) * 4 pi = 1 W.
    EXPECT_NEAR(e * e / (2 * constants::eta0) * 4 * constants::pi, 1.0, 1e-12);
    EXPECT_NEAR(norm(tx_field_at_1m(Polarization::rhcp, {0, 0, -1}, 4.0)), 2 * e, 1e-12);
}

TEST(TxField, Isotropic)
{
    const Vec3 d = normalize(Vec3{0.2, 0.4, -0.9});
    EXPECT_NEAR(norm(tx_field_at_1m(Polarization::rhcp, d)), norm(tx_field_at_1m(Polarization::rhcp, -d)), 1e-12);
    const CVec3 p = tx_field_at_1m(Polarization::rhcp, {0, 0, -1});
    EXPECT_NEAR(std::abs(dot(p, p)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(p.z), 0.0, 1e-15);
}

TEST(RxWeight, MatchedVerticalFromHorizon)
{
    const Vec3 k{1, 0, 0}; // arriving from -x, travelling +x
    const CVec3 e = polarization_vector(Polarization::linear_vertical, k);
    EXPECT_NEAR(e.z.real(), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(rx_weight(AntennaConfig::handheld(), k, e)), 1.0, 1e-12);
}

TEST(RxWeight, CircularToLinearMismatch)
{
    const Vec3 k = normalize(Vec3{0.3, 0.1, -1});
    const CVec3 e = polarization_vector(Polarization::rhcp, k);
    EXPECT_NEAR(std::abs(rx_weight(AntennaConfig::handheld(), k, e)), 1 / std::sqrt(2.0), 1e-12);
}

TEST(RxWeight, MatchedCircularDish)
{
    const Vec3 k = normalize(Vec3{0.3, 0.1, -1});
    auto a = AntennaConfig::fixed_aperture(Band::Q);
    a.boresight = -k;
    const CVec3 e = polarization_vector(Polarization::rhcp, k);
    EXPECT_NEAR(std::abs(rx_weight(a, k, e)), std::sqrt(std::pow(10.0, 4.8)), 1e-6);
    EXPECT_NEAR(std::abs(rx_weight(a, k, polarization_vector(Polarization::lhcp, k))), 0.0, 1e-9);
}

TEST(RxWeight, PatchBelowHorizonIsZero)
{
    const Vec3 k{0, 0, 1}; // travelling upward, i.e. arriving from below
    EXPECT_EQ(rx_weight(AntennaConfig::vehicular(), k, CVec3{1, 0, 0}), cdouble(0.0));
}

TEST(RxWeight, LinearInField)
{
    const Vec3 k = normalize(Vec3{-0.5, 0.2, -0.8});
    const auto [t, p] = spherical_basis(k);
    const CVec3 a = CVec3(t) * cdouble(0.3, 0.7), b = CVec3(p) * cdouble(-1.1, 0.2);
    const cdouble alpha(0.4, -2.0);
    const auto ant = AntennaConfig::vehicular();
    const cdouble lhs = rx_weight(ant, k, a * alpha + b);
    const cdouble rhs = alpha * rx_weight(ant, k, a) + rx_weight(ant, k, b);
    EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-12);
}

TEST(RxWeight, NonTransverseFieldIsAContractViolation)
{
    EXPECT_THROW(rx_weight(AntennaConfig::handheld(), {0, 0, -1}, CVec3{0, 0, 1}), contract_error);
}
