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
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "antennas.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "rician.hpp"
#include "tracer.hpp"

namespace satrt
{

struct Tap
{
    double power = 0.0;
    double delay_s = 0.0;
};

struct PowerDelayProfile
{
    std::vector<Tap> taps;
};

// RMS delay spread. Delays are taken relative to the earliest tap first so that
// millisecond absolute delays do not swamp nanosecond differences.
inline double delay_spread(const PowerDelayProfile &pdp)
{
    if (pdp.taps.empty())
        throw undefined_statistic_error("delay spread of an empty power delay profile");
    double t0 = pdp.taps.front().delay_s;
    for (const auto &t : pdp.taps)
    {
        if (!(t.power >= 0.0) || !std::isfinite(t.delay_s))
            throw argument_error("taps need non-negative power and finite delay");
        t0 = std::min(t0, t.delay_s);
    }
    double p = 0.0, m1 = 0.0;
    for (const auto &t : pdp.taps)
    {
        p += t.power;
        m1 += t.power * (t.delay_s - t0);
    }
    if (!(p > 0.0))
        throw undefined_statistic_error("delay spread of a zero-power profile");
    const double mean = m1 / p;
    double m2 = 0.0;
    for (const auto &t : pdp.taps)
    {
        const double d = t.delay_s - t0 - mean;
        m2 += t.power * d * d;
    }
    return std::sqrt(m2 / p);
}

inline double mean_excess_delay(const PowerDelayProfile &pdp)
{
    double p = 0.0, m1 = 0.0;
    for (const auto &t : pdp.taps)
        p += t.power, m1 += t.power * t.delay_s;
    if (!(p > 0.0))
        throw undefined_statistic_error("mean delay of a zero-power profile");
    return m1 / p;
}

// One tap per contribution, weighted by the receive antenna.
inline PowerDelayProfile make_pdp(const std::vector<PathContribution> &cs, const AntennaConfig &antenna)
{
    PowerDelayProfile pdp;
    pdp.taps.reserve(cs.size());
    for (const auto &c : cs)
        pdp.taps.push_back({std::norm(rx_weight(antenna, c.arrival_direction, c.e_field)), c.delay_s});
    return pdp;
}

struct MechanismBreakdown
{
    std::array<double, 6> share{}; // indexed like all_mechanisms

    double operator[](Mechanism m) const { return share[static_cast<std::size_t>(m)]; }
};

inline MechanismBreakdown mechanism_breakdown(const std::vector<PathContribution> &cs, const AntennaConfig &antenna)
{
    if (cs.empty())
        throw undefined_statistic_error("mechanism breakdown without contributions");
    MechanismBreakdown b;
    double total = 0.0;
    for (const auto &c : cs)
    {
        const double p = std::norm(rx_weight(antenna, c.arrival_direction, c.e_field));
        b.share[static_cast<std::size_t>(c.label)] += p;
        total += p;
    }
    if (!(total > 0.0))
        throw undefined_statistic_error("mechanism breakdown of zero received power");
    for (double &s : b.share)
        s /= total;
    return b;
}

inline MechanismBreakdown mechanism_breakdown(const ChannelRealization &r)
{
    return mechanism_breakdown(r.contributions, r.antenna);
}

// Aggregation across grids: mean of the per-grid shares.
inline MechanismBreakdown mean_breakdown(const std::vector<MechanismBreakdown> &parts)
{
    if (parts.empty())
        throw undefined_statistic_error("no breakdowns to average");
    MechanismBreakdown m;
    for (const auto &p : parts)
        for (std::size_t i = 0; i < m.share.size(); ++i)
            m.share[i] += p.share[i];
    for (double &s : m.share)
        s /= static_cast<double>(parts.size());
    return m;
}

inline double los_probability(const std::vector<bool> &flags)
{
    if (flags.empty())
        throw argument_error("LoS probability needs at least one flag");
    const auto n = std::count(flags.begin(), flags.end(), true);
    return static_cast<double>(n) / static_cast<double>(flags.size());
}

inline double median(std::vector<double> v)
{
    if (v.empty())
        throw undefined_statistic_error("median of an empty set");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double mean(const std::vector<double> &v)
{
    if (v.empty())
        throw undefined_statistic_error("mean of an empty set");
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

// Envelope statistics of one realization.
struct ChannelStats
{
    bool los = false;
    double los_fraction = 0.0;
    RicianFit k_ml;
    RicianFit k_moment;
    double ds_s = 0.0;
    MechanismBreakdown shares;
};

} // namespace satrt
