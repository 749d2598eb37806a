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
#include <bit>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "antennas.hpp"
#include "environment.hpp"
#include "errors.hpp"
#include "fresnel.hpp"
#include "tracer.hpp"
#include "utd.hpp"

namespace satrt
{

inline double wavenumber(double frequency_hz) { return 2.0 * constants::pi * frequency_hz / constants::c0; }

// ---------------------------------------------------------------- scattering lobe

// Single-lobe pattern ((1 + cos psi) / 2)^alpha around the specular direction.
inline double scattering_lobe(double cos_psi, double alpha = 2.0)
{
    return std::pow(0.5 * (1.0 + cos_psi), alpha);
}

// F(theta_i): integral of the lobe over the half-space in front of the surface,
// tabulated every 0.5 degree and linearly interpolated.
class LobeNormalization
{
  public:
    static constexpr double step_deg = 0.5;
    static constexpr int entries = 181;

    explicit LobeNormalization(double alpha = 2.0) : alpha_(alpha)
    {
        for (int i = 0; i < entries; ++i)
            table_[i] = integrate(deg2rad(i * step_deg), alpha);
    }

    static const LobeNormalization &standard()
    {
        static const LobeNormalization instance(2.0);
        return instance;
    }

    double alpha() const { return alpha_; }

    double operator()(double theta_i) const
    {
        const double x = std::clamp(rad2deg(theta_i) / step_deg, 0.0, static_cast<double>(entries - 1));
        const int i = std::min(static_cast<int>(x), entries - 2);
        const double w = x - i;
        return table_[i] * (1.0 - w) + table_[i + 1] * w;
    }

    // Gauss-Legendre in cos(theta_s) times the trapezoid rule in azimuth.
    static double integrate(double theta_i, double alpha)
    {
        constexpr int nu = 64, nphi = 256;
        static const auto gl = gauss_legendre<nu>();
        const Vec3 kr{std::sin(theta_i), 0.0, std::cos(theta_i)};
        double sum = 0.0;
        for (int a = 0; a < nu; ++a)
        {
            const double u = 0.5 * (gl.first[a] + 1.0), wu = 0.5 * gl.second[a];
            const double st = std::sqrt(std::max(0.0, 1.0 - u * u));
            double ring = 0.0;
            for (int b = 0; b < nphi; ++b)
            {
                const double ph = 2.0 * constants::pi * b / nphi;
                const Vec3 ks{st * std::cos(ph), st * std::sin(ph), u};
                ring += scattering_lobe(dot(kr, ks), alpha);
            }
            sum += wu * ring * (2.0 * constants::pi / nphi);
        }
        return sum;
    }

  private:
    template <int N> static std::pair<std::array<double, N>, std::array<double, N>> gauss_legendre()
    {
        std::array<double, N> x{}, w{};
        for (int i = 0; i < N; ++i)
        {
            double z = std::cos(constants::pi * (i + 0.75) / (N + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it)
            {
                double p0 = 1.0, p1 = z;
                for (int k = 2; k <= N; ++k)
                {
                    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1, p1 = p2;
                }
                dp = N * (z * p1 - p0) / (z * z - 1.0);
                const double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-15)
                    break;
            }
            x[i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        return {x, w};
    }

    double alpha_;
    std::array<double, entries> table_{};
};

// ---------------------------------------------------------------- scattering phase

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// chi_s uniform in [-pi, pi), a pure function of (seed, tile, path, frequency).
class ScatterPhaseSource
{
  public:
    explicit ScatterPhaseSource(std::uint64_t master_seed = 0) : seed_(master_seed) {}

    std::uint64_t master_seed() const { return seed_; }

    double phase(const TileId &tile, std::uint64_t path_id, double frequency_hz) const
    {
        std::uint64_t h = splitmix64(seed_);
        h = splitmix64(h ^ tile.face);
        h = splitmix64(h ^ (static_cast<std::uint64_t>(tile.row) << 32 | tile.col));
        h = splitmix64(h ^ path_id);
        h = splitmix64(h ^ std::bit_cast<std::uint64_t>(frequency_hz));
        const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
        return -constants::pi + 2.0 * constants::pi * u;
    }

  private:
    std::uint64_t seed_;
};

// ---------------------------------------------------------------- contributions

struct PathContribution
{
    CVec3 e_field;
    double delay_s = 0.0;
    Vec3 arrival_direction;
    Mechanism label = Mechanism::L;
    std::uint64_t path_id = 0;
};

// Everything needed to turn geometry into fields at one frequency.
struct FieldContext
{
    const Environment *env = nullptr;
    std::span<const Material> materials; // one per face
    double frequency_hz = 0.0;
    TxFieldSpec tx;
    ScatterPhaseSource phases;
    const LobeNormalization *lobe = &LobeNormalization::standard();
};

// Dyadic chain and spreading of a path without scattering:
// E(rx) = dyadic . E_tx(1 m) . spreading . exp(-j k length).
struct PathTransfer
{
    Mat3c dyadic = Mat3c::identity();
    double spreading = 1.0;
    double length = 0.0;
};

namespace detail
{

inline void check_segments(const RayPath &p)
{
    if (p.vertices.size() != p.interactions.size() + 2 || p.segment_lengths.size() + 1 != p.vertices.size())
        throw geometry_error("malformed ray path");
    for (double r : p.segment_lengths)
        if (!(r > 0.0))
            throw geometry_error("zero-length ray segment");
}

inline const Material &material_of(const FieldContext &ctx, std::size_t face)
{
    if (face >= ctx.materials.size())
        throw config_error("no material for face " + std::to_string(face));
    return ctx.materials[face];
}

// Chain over vertices [first, last] (indices into path.vertices); interactions at the
// interior vertices are reflections or diffractions. Spreading starts from an isotropic
// point source at `first` when `point_source` is set.
inline PathTransfer chain_transfer(const RayPath &p, std::size_t first, std::size_t last, const FieldContext &ctx,
                                   bool point_source)
{
    PathTransfer t;
    const auto &v = p.vertices;
    const auto &len = p.segment_lengths;
    for (std::size_t i = first; i < last; ++i)
        t.length += len[i];

    // Unfolded distance between consecutive diffraction points (or chain ends).
    std::vector<double> groups{0.0};
    for (std::size_t i = first; i < last; ++i)
    {
        groups.back() += len[i];
        if (i + 1 < last && p.interactions[i].kind == InteractionKind::diffraction)
            groups.push_back(0.0);
    }
    t.spreading = point_source ? 1.0 / groups.front() : 1.0;

    std::size_t group = 0;
    for (std::size_t i = first + 1; i < last; ++i)
    {
        const Interaction &it = p.interactions[i - 1];
        const Vec3 k_in = (v[i] - v[i - 1]) / len[i - 1];
        const Vec3 k_out = (v[i + 1] - v[i]) / len[i];
        if (it.kind == InteractionKind::reflection)
        {
            const Face &f = ctx.env->faces()[it.index];
            t.dyadic = reflection_dyadic(material_of(ctx, it.index), k_in, f.normal, ctx.frequency_hz) * t.dyadic;
        }
        else if (it.kind == InteractionKind::diffraction)
        {
            const Edge &e = ctx.env->edges()[it.index];
            const auto d = diffraction_dyadic(e, v[i], k_in, k_out, groups[group], groups[group + 1],
                                              material_of(ctx, e.face0), material_of(ctx, e.face_n),
                                              ctx.frequency_hz);
            t.dyadic = d.dyadic * t.dyadic;
            t.spreading *= d.spreading;
            ++group;
        }
        else
            throw contract_error("scattering inside a coherent chain");
    }
    return t;
}

} // namespace detail

inline PathTransfer path_transfer(const RayPath &p, const FieldContext &ctx)
{
    detail::check_segments(p);
    return detail::chain_transfer(p, 0, p.vertices.size() - 1, ctx, true);
}

// Coherent field for L/R/D/RD paths.
inline PathContribution coherent_field(const RayPath &p, const FieldContext &ctx)
{
    const PathTransfer t = path_transfer(p, ctx);
    const double k = wavenumber(ctx.frequency_hz);
    const CVec3 e0 = ctx.tx.field_at_1m(p.departure());
    const cdouble ph = std::polar(t.spreading, -k * t.length);
    PathContribution c;
    c.e_field = (t.dyadic * e0) * ph;
    c.delay_s = t.length / constants::c0;
    c.arrival_direction = p.arrival();
    c.label = p.label;
    c.path_id = p.path_id;
    return c;
}

// Effective-roughness diffuse field of a path with exactly one scattering tile. Legs
// before and after the tile may contain one reflection, handled by Fresnel cascading.
inline PathContribution scattered_field(const RayPath &p, const FieldContext &ctx)
{
    detail::check_segments(p);
    std::size_t s = 0;
    int count = 0;
    for (std::size_t i = 0; i < p.interactions.size(); ++i)
        if (p.interactions[i].kind == InteractionKind::scattering)
            s = i + 1, ++count;
    if (count != 1)
        throw contract_error("scattered_field needs exactly one scattering interaction");

    const ScatterTile &tile = ctx.env->tiles()[p.interactions[s - 1].index];
    const Material &mat = detail::material_of(ctx, tile.id.face);
    const Vec3 k_in = (p.vertices[s] - p.vertices[s - 1]) / p.segment_lengths[s - 1];
    const Vec3 k_s = (p.vertices[s + 1] - p.vertices[s]) / p.segment_lengths[s];
    const double cos_i = -dot(k_in, tile.normal);
    if (!(cos_i > 0.0))
        throw contract_error("scattering tile is back-facing the incident ray");

    // Incident field at the tile centre (phase is replaced by chi_s below).
    const PathTransfer in = detail::chain_transfer(p, 0, s, ctx, true);
    const CVec3 e_inc = (in.dyadic * ctx.tx.field_at_1m(p.departure())) * in.spreading;
    const double e_mag = norm(e_inc);

    PathContribution c;
    c.delay_s = p.total_length() / constants::c0;
    c.arrival_direction = p.arrival();
    c.label = p.label;
    c.path_id = p.path_id;
    if (e_mag == 0.0 || mat.scattering_s == 0.0)
        return c;

    const CVec3 pol = e_inc * (1.0 / e_mag);
    const double gamma = norm(reflection_dyadic(mat, k_in, tile.normal, ctx.frequency_hz, false) * pol);
    const Vec3 k_r = reflect_direction(k_in, tile.normal);
    const double f = scattering_lobe(dot(k_r, k_s), ctx.lobe->alpha());
    const double big_f = (*ctx.lobe)(std::acos(std::min(1.0, cos_i)));

    // Incident polarization projected transverse to the scattered direction.
    CVec3 ps = transverse_part(pol, k_s);
    double pn = norm(ps);
    if (pn < 1e-9)
    {
        ps = CVec3(spherical_basis(k_s)[0]);
        pn = 1.0;
    }
    ps = ps * (1.0 / pn);

    // Spherical spreading from the tile, unfolded through any later reflection.
    const PathTransfer out = detail::chain_transfer(p, s, p.vertices.size() - 1, ctx, false);
    const double amp = e_mag * mat.scattering_s * gamma / out.length * std::sqrt(f / big_f * tile.area * cos_i);
    const double chi = ctx.phases.phase(tile.id, p.path_id, ctx.frequency_hz);
    c.e_field = (out.dyadic * ps) * std::polar(amp, chi);
    return c;
}

inline PathContribution path_field(const RayPath &p, const FieldContext &ctx)
{
    return p.label == Mechanism::S || p.label == Mechanism::RS ? scattered_field(p, ctx) : coherent_field(p, ctx);
}

inline std::vector<PathContribution> compute_contributions(const std::vector<RayPath> &paths, const FieldContext &ctx)
{
    std::vector<PathContribution> out;
    out.reserve(paths.size());
    for (const auto &p : paths)
        out.push_back(path_field(p, ctx));
    return out;
}

// Re-evaluates the same geometry at another frequency with that band's materials.
inline std::vector<PathContribution> retarget_frequency(const std::vector<RayPath> &paths, const FieldContext &base,
                                                        double new_frequency_hz,
                                                        std::span<const Material> materials_at_new_band)
{
    if (materials_at_new_band.size() != base.env->faces().size())
        throw config_error("band material table does not match the scene faces");
    for (const auto &m : materials_at_new_band)
        m.validate();
    FieldContext ctx = base;
    ctx.frequency_hz = new_frequency_hz;
    ctx.materials = materials_at_new_band;
    return compute_contributions(paths, ctx);
}

// ---------------------------------------------------------------- grid extension

// Narrowband-array extension: a_n = sum_m w_m exp(-j k k_m . l_n). The grid lattice is
// separable, so each ray needs only one phase factor per row and per column.
inline std::vector<cdouble> extend_to_grid(const std::vector<PathContribution> &contributions,
                                           const RxGridSpec &grid, const AntennaConfig &antenna,
                                           double frequency_hz)
{
    const std::size_t m = static_cast<std::size_t>(std::max(1, grid.points_per_side));
    std::vector<cdouble> out(m * m, 0.0);
    std::vector<double> xs(m), ys(m);
    for (std::size_t i = 0; i < m; ++i)
    {
        xs[i] = grid.offset(i).x;
        ys[i] = grid.offset(i * m).y;
    }
    const double k = wavenumber(frequency_hz);
    std::vector<cdouble> px(m), py(m);
    for (const auto &c : contributions)
    {
        const cdouble w = rx_weight(antenna, c.arrival_direction, c.e_field);
        if (w == 0.0)
            continue;
        for (std::size_t i = 0; i < m; ++i)
        {
            px[i] = std::polar(1.0, -k * c.arrival_direction.x * xs[i]);
            py[i] = w * std::polar(1.0, -k * c.arrival_direction.y * ys[i]);
        }
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t col = 0; col < m; ++col)
                out[r * m + col] += py[r] * px[col];
    }
    return out;
}

// Received amplitude at a single point from contributions computed at that point.
inline cdouble received_amplitude(const std::vector<PathContribution> &contributions, const AntennaConfig &antenna)
{
    cdouble a = 0.0;
    for (const auto &c : contributions)
        a += rx_weight(antenna, c.arrival_direction, c.e_field);
    return a;
}

struct ChannelRealization
{
    std::vector<PathContribution> contributions;
    double frequency_hz = 0.0;
    SatellitePose pose;
    RxGridSpec grid;
    AntennaConfig antenna;
    std::vector<cdouble> rx_amplitudes;
    std::uint64_t seed = 0;
};

inline ChannelRealization realize(std::vector<PathContribution> contributions, double frequency_hz,
                                  const SatellitePose &pose, const RxGridSpec &grid, const AntennaConfig &antenna,
                                  std::uint64_t seed)
{
    ChannelRealization r;
    r.rx_amplitudes = extend_to_grid(contributions, grid, antenna, frequency_hz);
    r.contributions = std::move(contributions);
    r.frequency_hz = frequency_hz;
    r.pose = pose;
    r.grid = grid;
    r.antenna = antenna;
    r.seed = seed;
    return r;
}

// One JSON object per line: path_id, label, delay, field components, arrival angles.
inline void write_contributions_jsonl(std::ostream &os, const std::vector<PathContribution> &cs)
{
    const auto old = os.precision(17);
    for (const auto &c : cs)
    {
        const Vec3 from = -c.arrival_direction;
        const double az = rad2deg(std::atan2(from.y, from.x));
        const double el = rad2deg(std::asin(std::clamp(from.z, -1.0, 1.0)));
        os << "{\"path_id\":" << c.path_id << ",\"label\":\"" << to_string(c.label) << "\",\"delay_s\":" << c.delay_s
           << ",\"e\":[" << c.e_field.x.real() << "," << c.e_field.x.imag() << "," << c.e_field.y.real() << ","
           << c.e_field.y.imag() << "," << c.e_field.z.real() << "," << c.e_field.z.imag()
           << "],\"arrival_azimuth_deg\":" << az << ",\"arrival_elevation_deg\":" << el << "}\n";
    }
    os.precision(old);
}

} // namespace satrt
