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

constexpr double ns = 1e-9;

std::vector<double> rician_draws(std::mt19937_64 &rng, double nu, double sigma, int n)
{
    std::normal_distribution<double> g(0.0, sigma);
    std::vector<double> x(n);
    for (auto &v : x)
        v = std::hypot(nu + g(rng), g(rng));
    return x;
}

double k_db(double nu, double sigma) { return 10 * std::log10(nu * nu / (2 * sigma * sigma)); }

PathContribution contribution(Mechanism m, double amplitude, double delay)
{
    PathContribution c;
    c.arrival_direction = {0, 0, -1};
    c.e_field = CVec3(Vec3{amplitude, 0, 0});
    c.delay_s = delay;
    c.label = m;
    return c;
}

// Receive weight of a linearly polarized isotropic antenna for the field above.
double weight_power(double amplitude)
{
    const auto c = contribution(Mechanism::L, amplitude, 0);
    return std::norm(rx_weight(AntennaConfig::handheld(), c.arrival_direction, c.e_field));
}

} // namespace

TEST(DelaySpread, ReferenceProfiles)
{
    EXPECT_EQ(delay_spread({{{1.0, 40 * ns}}}), 0.0);
    EXPECT_NEAR(delay_spread({{{1.0, 0.0}, {1.0, 100 * ns}}}), 50 * ns, 1e-12 * 50 * ns);
    EXPECT_NEAR(mean_excess_delay({{{1.0, 0.0}, {1.0, 100 * ns}}}), 50 * ns, 1e-12 * 50 * ns);

    // Mean 500/7 ns, second moment 110000/7 ns^2, so DS = sqrt(520000) / 7 ns.
    const PowerDelayProfile three{{{1.0, 0.0}, {0.5, 100 * ns}, {0.25, 300 * ns}}};
    EXPECT_NEAR(mean_excess_delay(three), 500.0 / 7 * ns, 1e-12 * 71.43 * ns);
    const double want = std::sqrt(520000.0) / 7 * ns;
    EXPECT_NEAR(want, 103.0158 * ns, 1e-4 * ns);
    EXPECT_NEAR(delay_spread(three), want, 1e-12 * want);
}

TEST(DelaySpread, ShiftAndScale)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 50; ++t)
    {
        PowerDelayProfile p;
        for (int i = 0; i < 12; ++i)
            p.taps.push_back({u(rng), 500 * ns * u(rng)});
        const double ds = delay_spread(p);
        PowerDelayProfile shifted = p, slower = p, louder = p;
        for (auto &tap : shifted.taps)
            tap.delay_s += 1.7e-3;
        for (auto &tap : slower.taps)
            tap.delay_s *= 3.0;
        for (auto &tap : louder.taps)
            tap.power *= 1e-9;
        EXPECT_NEAR(delay_spread(shifted), ds, 1e-6 * ds);
        EXPECT_NEAR(delay_spread(slower), 3 * ds, 1e-12 * ds);
        EXPECT_NEAR(delay_spread(louder), ds, 1e-12 * ds);
    }
}

TEST(DelaySpread, Errors)
{
    EXPECT_THROW(delay_spread({}), undefined_statistic_error);
    EXPECT_THROW(delay_spread({{{0.0, 0.0}, {0.0, 1e-9}}}), undefined_statistic_error);
    EXPECT_THROW(delay_spread({{{-1.0, 0.0}}}), argument_error);
    EXPECT_THROW(delay_spread({{{1.0, NAN}}}), argument_error);
}

TEST(DelaySpread, TapsFromContributions)
{
    const std::vector<PathContribution> cs{contribution(Mechanism::L, 1.0, 0.0),
                                           contribution(Mechanism::R, 1.0, 100 * ns)};
    const auto pdp = make_pdp(cs, AntennaConfig::handheld());
    ASSERT_EQ(pdp.taps.size(), 2u);
    EXPECT_NEAR(pdp.taps[0].power, weight_power(1.0), 1e-15);
    EXPECT_NEAR(delay_spread(pdp), 50 * ns, 1e-12 * 50 * ns);
}

TEST(Bessel, AgainstStandardLibrary)
{
    for (double z : {0.0, 1e-3, 0.5, 3.0, 10.0, 19.9, 20.0, 20.1, 50.0, 300.0, 700.0})
    {
        EXPECT_NEAR(bessel::log_i0(z), std::log(std::cyl_bessel_i(0.0, z)), 1e-13 * std::max(1.0, z)) << z;
        const double r = z == 0.0 ? 0.0 : std::cyl_bessel_i(1.0, z) / std::cyl_bessel_i(0.0, z);
        EXPECT_NEAR(bessel::i1_over_i0(z), r, 1e-13) << z;
    }
    // Far beyond the double range of I0 itself.
    EXPECT_TRUE(std::isfinite(bessel::log_i0(1e6)));
    EXPECT_NEAR(bessel::i1_over_i0(1e6), 1 - 0.5e-6, 1e-12);
}

TEST(Rician, GradientMatchesFiniteDifferences)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 100; ++t)
    {
        const double nu = 0.05 + 2 * u(rng), sigma = 0.05 + u(rng);
        auto x = rician_draws(rng, 0.2 + 2 * u(rng), 0.1 + 0.5 * u(rng), 40);
        const RicianLikelihood like{x};
        const double s = std::log(sigma);
        const auto g = like.gradient(nu, s);
        const double h = 1e-6;
        const double gn = (like.value(nu + h, s) - like.value(nu - h, s)) / (2 * h);
        const double gs = (like.value(nu, s + h) - like.value(nu, s - h)) / (2 * h);
        EXPECT_NEAR(g[0], gn, 1e-4 * std::max(1.0, std::abs(gn)));
        EXPECT_NEAR(g[1], gs, 1e-4 * std::max(1.0, std::abs(gs)));
    }
}

TEST(Rician, RecoversKnownK)
{
    std::mt19937_64 rng(2024);
    const double nu = 1.0, sigma = 0.1;
    std::vector<double> ml, gap;
    for (int t = 0; t < 200; ++t)
    {
        const EnvelopeSamples s(rician_draws(rng, nu, sigma, 225));
        const auto a = fit_rician_ml(s), b = kfactor_moment(s);
        EXPECT_TRUE(a.converged);
        // Self-consistency at the optimum.
        const auto g = RicianLikelihood{s.values()}.gradient(a.nu_hat, std::log(a.sigma_hat));
        EXPECT_LT(std::hypot(g[0], g[1]), 1e-6);
        EXPECT_NEAR(a.k_hat_db, k_db(a.nu_hat, a.sigma_hat), 1e-12);
        ml.push_back(a.k_hat_db);
        gap.push_back(std::abs(a.k_hat_db - b.k_hat_db));
    }
    EXPECT_NEAR(median(ml), k_db(nu, sigma), 0.7);
    EXPECT_LE(median(gap), 1.5);
}

TEST(Rician, RayleighFitIsTheGlobalMaximum)
{
    // For nu = 0 the estimate sits on the boundary about half the time; the rest
    // scatter around -10 dB. Compare against a brute-force profile maximization.
    std::mt19937_64 rng(99);
    int floor_hits = 0;
    for (int t = 0; t < 20; ++t)
    {
        const EnvelopeSamples s(rician_draws(rng, 0.0, 1.0, 225));
        const RicianLikelihood like{s.values()};
        const auto fit = fit_rician_ml(s);
        double best = -1e300;
        for (int i = 0; i <= 120; ++i)
        {
            const double nu = 0.01 * i;
            double lo = std::log(0.2), hi = std::log(2.0);
            for (int k = 0; k < 80; ++k)
            {
                const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
                if (like.value(nu, m1) < like.value(nu, m2))
                    lo = m1;
                else
                    hi = m2;
            }
            best = std::max(best, like.value(nu, 0.5 * (lo + hi)));
        }
        EXPECT_GE(fit.log_likelihood, best - 1e-9);
        floor_hits += fit.k_hat_db == k_floor_db;
    }
    EXPECT_GE(floor_hits, 4);
}

TEST(Rician, DegenerateInputs)
{
    const std::vector<double> flat(30, 2.5);
    EXPECT_EQ(fit_rician_ml(EnvelopeSamples(flat)).k_hat_db, 80.0);
    EXPECT_TRUE(fit_rician_ml(EnvelopeSamples(flat)).converged);
    EXPECT_EQ(kfactor_moment(EnvelopeSamples(flat)).k_hat_db, 80.0);

    // x^2 in {0, 2}: var(x^2) = mean(x^2)^2, the Rayleigh limit of the moment method.
    std::vector<double> two;
    for (int i = 0; i < 20; ++i)
        two.push_back(i % 2 ? std::sqrt(2.0) : 0.0);
    EXPECT_EQ(kfactor_moment(EnvelopeSamples(two)).k_hat_db, -40.0);

    EXPECT_THROW(EnvelopeSamples(std::vector<double>(9, 1.0)), insufficient_data_error);
    std::vector<double> neg(20, 1.0);
    neg[4] = -0.1;
    EXPECT_THROW(EnvelopeSamples{neg}, argument_error);
    EXPECT_THROW(EnvelopeSamples(std::vector<double>(20, 0.0)), argument_error);
}

TEST(Rician, NormalizationAndScale)
{
    std::mt19937_64 rng(5);
    const auto x = rician_draws(rng, 1.0, 0.3, 225);
    const EnvelopeSamples s(x);
    double m = 0;
    for (double v : s.values())
        m += v;
    EXPECT_NEAR(m / 225, 1.0, 1e-12);

    const double base = fit_rician_ml(s).k_hat_db;
    for (double c : {0.25, 8.0, 1024.0})
    {
        std::vector<double> y = x;
        for (auto &v : y)
            v *= c;
        EXPECT_EQ(fit_rician_ml(EnvelopeSamples(y)).k_hat_db, base) << c;
    }
    for (double c : {1e-3, 3.7, 12345.678})
    {
        std::vector<double> y = x;
        for (auto &v : y)
            v *= c;
        EXPECT_NEAR(fit_rician_ml(EnvelopeSamples(y)).k_hat_db, base, 1e-9) << c;
    }
}

TEST(Breakdown, Shares)
{
    const auto ant = AntennaConfig::handheld();
    const auto only = mechanism_breakdown({contribution(Mechanism::L, 2.0, 0)}, ant);
    EXPECT_EQ(only[Mechanism::L], 1.0);
    for (auto m : all_mechanisms)
    {
        if (m != Mechanism::L)
        {
            EXPECT_EQ(only[m], 0.0);
        }
    }

    const auto two = mechanism_breakdown({contribution(Mechanism::L, 1.0, 0), contribution(Mechanism::R, 0.5, 1e-9)}, ant);
    EXPECT_NEAR(two[Mechanism::L], 0.8, 1e-15);
    EXPECT_NEAR(two[Mechanism::R], 0.2, 1e-15);

    EXPECT_EQ(classify({{InteractionKind::reflection, 0}, {InteractionKind::scattering, 1}}), Mechanism::RS);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<PathContribution> cs;
    for (int i = 0; i < 60; ++i)
        cs.push_back(contribution(all_mechanisms[i % 6], u(rng), 0));
    const auto b = mechanism_breakdown(cs, ant);
    double sum = 0;
    for (double v : b.share)
    {
        EXPECT_GE(v, 0.0);
        sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);

    EXPECT_THROW(mechanism_breakdown({}, ant), undefined_statistic_error);
    EXPECT_THROW(mechanism_breakdown({contribution(Mechanism::L, 0.0, 0)}, ant), undefined_statistic_error);
}

TEST(Breakdown, MeanOfShares)
{
    MechanismBreakdown a, b;
    a.share = {1, 0, 0, 0, 0, 0};
    b.share = {0.5, 0.5, 0, 0, 0, 0};
    const auto m = mean_breakdown({a, b});
    EXPECT_DOUBLE_EQ(m[Mechanism::L], 0.75);
    EXPECT_DOUBLE_EQ(m[Mechanism::R], 0.25);
    EXPECT_THROW(mean_breakdown({}), undefined_statistic_error);
}

TEST(Aggregates, LosProbabilityMedianMean)
{
    EXPECT_EQ(los_probability({true, false, true, true}), 0.75);
    EXPECT_EQ(los_probability({false}), 0.0);
    EXPECT_THROW(los_probability({}), argument_error);
    EXPECT_EQ(median({3, 1, 2}), 2);
    EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
    EXPECT_EQ(mean({1, 2, 6}), 3);
    EXPECT_THROW(median({}), undefined_statistic_error);
}

TEST(Aggregates, EmptySceneIsAlwaysLos)
{
    Scene s;
    s.bounds = {0, 0, 100, 100};
    s.normalize_and_validate();
    const auto env = Environment::from_scene(s);
    const RxGridSpec grid{{50, 50, 1.5}};
    for (double el = 10; el <= 90; el += 10)
    {
        std::vector<bool> flags;
        const auto sat = satellite_position({el, 30, 500e3}, grid.center);
        for (const auto &p : grid.points())
            flags.push_back(env.visible(sat.position, p));
        EXPECT_EQ(los_probability(flags), 1.0) << el;
    }
}

TEST(Aggregates, EnclosedReceiverIsNeverLos)
{
    // A 10 m square courtyard with 200 m walls: the shadow covers it below ~86 degrees.
    Scene s;
    s.bounds = {-100, -100, 100, 100};
    const double w = 5, t = 3, h = 200;
    const std::vector<std::vector<Vec2>> walls{{{-w - t, -w - t}, {w + t, -w - t}, {w + t, -w}, {-w - t, -w}},
                                               {{-w - t, w}, {w + t, w}, {w + t, w + t}, {-w - t, w + t}},
                                               {{-w - t, -w}, {-w, -w}, {-w, w}, {-w - t, w}},
                                               {{w, -w}, {w + t, -w}, {w + t, w}, {w, w}}};
    for (std::size_t i = 0; i < walls.size(); ++i)
    {
        BuildingPrism b;
        b.id = "wall" + std::to_string(i);
        b.footprint = walls[i];
        b.height = h;
        s.buildings.push_back(b);
    }
    s.normalize_and_validate();
    const auto env = Environment::from_scene(s);
    const RxGridSpec grid{{0, 0, 1.5}};
    for (double el = 10; el <= 80; el += 10)
        for (double az = 0; az < 360; az += 60)
        {
            std::vector<bool> flags;
            const auto sat = satellite_position({el, az, 500e3}, grid.center);
            for (const auto &p : grid.points())
                flags.push_back(env.visible(sat.position, p));
            EXPECT_EQ(los_probability(flags), 0.0) << el << " " << az;
        }
}
