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
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "errors.hpp"

namespace satrt
{

inline constexpr double k_floor_db = -40.0;
inline constexpr double k_cap_db = 80.0;

inline double clamp_k_db(double k_linear)
{
    if (!(k_linear > 0.0))
        return k_floor_db;
    if (std::isinf(k_linear))
        return k_cap_db;
    return std::clamp(10.0 * std::log10(k_linear), k_floor_db, k_cap_db);
}

// Amplitude samples divided by their mean, so the fit is insensitive to absolute level.
class EnvelopeSamples
{
  public:
    static constexpr std::size_t min_samples = 10;

    explicit EnvelopeSamples(std::span<const double> raw)
    {
        if (raw.size() < min_samples)
            throw insufficient_data_error("at least " + std::to_string(min_samples) + " samples are required, got " +
                                          std::to_string(raw.size()));
        double sum = 0.0;
        for (double x : raw)
        {
            if (!(x >= 0.0) || !std::isfinite(x))
                throw argument_error("envelope samples must be finite and non-negative");
            sum += x;
        }
        if (!(sum > 0.0))
            throw argument_error("envelope samples are all zero");
        normalization_ = sum / static_cast<double>(raw.size());
        values_.reserve(raw.size());
        for (double x : raw)
            values_.push_back(x / normalization_);
    }

    const std::vector<double> &values() const { return values_; }
    double normalization() const { return normalization_; }
    std::size_t size() const { return values_.size(); }

  private:
    std::vector<double> values_;
    double normalization_ = 1.0;
};

enum class FitMethod
{
    ml,
    moment
};

struct RicianFit
{
    double nu_hat = 0.0;
    double sigma_hat = 1.0;
    double k_hat_db = k_floor_db;
    double log_likelihood = 0.0;
    FitMethod method = FitMethod::ml;
    bool converged = false;
    int iterations = 0;
};

namespace bessel
{

// log I0(z) for z >= 0.
inline double log_i0(double z)
{
    if (z < 20.0)
    {
        const double q = 0.25 * z * z;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 500; ++k)
        {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < 1e-17 * sum)
                break;
        }
        return std::log(sum);
    }
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 60; ++k)
    {
        const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (k * 8.0 * z);
        if (next > term)
            break;
        term = next;
        sum += term;
        if (term < 1e-17 * sum)
            break;
    }
    return z - 0.5 * std::log(2.0 * 3.14159265358979323846 * z) + std::log(sum);
}

// I1(z) / I0(z) for z >= 0.
inline double i1_over_i0(double z)
{
    if (z < 20.0)
    {
        const double q = 0.25 * z * z;
        double t0 = 1.0, s0 = 1.0, t1 = 0.5 * z, s1 = 0.5 * z;
        for (int k = 1; k < 500; ++k)
        {
            t0 *= q / (static_cast<double>(k) * k);
            t1 *= q / (static_cast<double>(k) * (k + 1));
            s0 += t0;
            s1 += t1;
            if (t0 < 1e-17 * s0 && t1 < 1e-17 * s1)
                break;
        }
        return s1 / s0;
    }
    // Hankel expansions with mu = 4 nu^2 for nu = 0 and nu = 1.
    const auto series = [z](double mu) {
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 60; ++k)
        {
            const double odd = 2.0 * k - 1.0;
            const double next = -term * (mu - odd * odd) / (k * 8.0 * z);
            if (std::abs(next) > std::abs(term))
                break;
            term = next;
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum))
                break;
        }
        return sum;
    };
    return series(4.0) / series(0.0);
}

} // namespace bessel

// Rician log-likelihood and its gradient in (nu, s = ln sigma).
struct RicianLikelihood
{
    std::span<const double> x;

    double value(double nu, double s) const
    {
        const double sig2 = std::exp(2.0 * s);
        double l = 0.0;
        for (double xi : x)
        {
            const double z = xi * std::abs(nu) / sig2;
            l += (xi > 0.0 ? std::log(xi) : -745.0) - 2.0 * s - (xi * xi + nu * nu) / (2.0 * sig2) + bessel::log_i0(z);
        }
        return l;
    }

    std::array<double, 2> gradient(double nu, double s) const
    {
        const double sig2 = std::exp(2.0 * s);
        const double sgn = nu < 0.0 ? -1.0 : 1.0;
        double gn = 0.0, gs = 0.0;
        for (double xi : x)
        {
            const double z = xi * std::abs(nu) / sig2;
            const double r = bessel::i1_over_i0(z);
            gn += -nu / sig2 + sgn * (xi / sig2) * r;
            gs += -2.0 + (xi * xi + nu * nu) / sig2 - 2.0 * z * r;
        }
        return {gn, gs};
    }
};

namespace detail
{

inline double rician_k_db(double nu, double sigma) { return clamp_k_db(nu * nu / (2.0 * sigma * sigma)); }

inline RicianFit capped_fit(FitMethod m, const std::vector<double> &x)
{
    RicianFit f;
    f.method = m;
    f.nu_hat = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    f.sigma_hat = f.nu_hat * std::pow(10.0, -k_cap_db / 20.0) / std::sqrt(2.0);
    f.k_hat_db = k_cap_db;
    f.converged = true;
    f.log_likelihood = std::numeric_limits<double>::infinity();
    return f;
}

inline double sample_variance(const std::vector<double> &x)
{
    const double n = static_cast<double>(x.size());
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double v = 0.0;
    for (double xi : x)
        v += (xi - m) * (xi - m);
    return v / n;
}

} // namespace detail

// Greenstein moment estimator: gamma = var(x^2) / mean(x^2)^2, K = sqrt(1-g) / (1 - sqrt(1-g)).
inline RicianFit kfactor_moment(const EnvelopeSamples &samples)
{
    const auto &x = samples.values();
    if (detail::sample_variance(x) < 1e-12)
        return detail::capped_fit(FitMethod::moment, x);
    const double n = static_cast<double>(x.size());
    double m2 = 0.0;
    for (double xi : x)
        m2 += xi * xi;
    m2 /= n;
    double v2 = 0.0;
    for (double xi : x)
        v2 += (xi * xi - m2) * (xi * xi - m2);
    v2 /= n;
    const double gamma = v2 / (m2 * m2);

    RicianFit f;
    f.method = FitMethod::moment;
    f.converged = true;
    double k = 0.0;
    if (gamma < 1.0)
    {
        const double r = std::sqrt(1.0 - gamma);
        k = r / (1.0 - r);
    }
    f.nu_hat = std::sqrt(m2 * k / (k + 1.0));
    f.sigma_hat = std::sqrt(m2 / (2.0 * (k + 1.0)));
    f.k_hat_db = clamp_k_db(k);
    f.log_likelihood = RicianLikelihood{x}.value(f.nu_hat, std::log(f.sigma_hat));
    return f;
}

// Maximum-likelihood Rician fit: BFGS with Armijo backtracking on -log L over (nu, ln sigma).
inline RicianFit fit_rician_ml(const EnvelopeSamples &samples)
{
    const auto &x = samples.values();
    if (detail::sample_variance(x) < 1e-12)
        return detail::capped_fit(FitMethod::ml, x);

    const RicianLikelihood like{x};
    const auto init = kfactor_moment(samples);
    double m2 = 0.0;
    for (double xi : x)
        m2 += xi * xi;
    m2 /= static_cast<double>(x.size());
    // nu = 0 is a stationary point of the likelihood; start away from it.
    std::array<double, 2> p{std::max(init.nu_hat, 0.3 * std::sqrt(m2)), std::log(init.sigma_hat)};

    const auto f = [&](const std::array<double, 2> &q) { return -like.value(q[0], q[1]); };
    const auto g = [&](const std::array<double, 2> &q) {
        const auto gr = like.gradient(q[0], q[1]);
        return std::array<double, 2>{-gr[0], -gr[1]};
    };

    std::array<double, 4> h{1.0, 0.0, 0.0, 1.0}; // inverse Hessian approximation
    double fx = f(p);
    auto gx = g(p);
    RicianFit fit;
    fit.method = FitMethod::ml;
    int it = 0;
    for (; it < 200; ++it)
    {
        if (std::hypot(gx[0], gx[1]) < 1e-8)
        {
            fit.converged = true;
            break;
        }
        std::array<double, 2> d{-(h[0] * gx[0] + h[1] * gx[1]), -(h[2] * gx[0] + h[3] * gx[1])};
        double slope = d[0] * gx[0] + d[1] * gx[1];
        if (!(slope < 0.0))
        {
            h = {1.0, 0.0, 0.0, 1.0};
            d = {-gx[0], -gx[1]};
            slope = d[0] * gx[0] + d[1] * gx[1];
        }
        double step = 1.0;
        std::array<double, 2> pn{};
        std::array<double, 2> gn{};
        double fn = fx;
        bool accepted = false;
        // Near the optimum the decrease drops below the resolution of -log L; a step
        // that keeps the value flat but shrinks the gradient is then accepted instead.
        const double flat = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(fx));
        const double gnorm = std::hypot(gx[0], gx[1]);
        for (int k = 0; k < 60; ++k, step *= 0.5)
        {
            pn = {p[0] + step * d[0], p[1] + step * d[1]};
            fn = f(pn);
            if (!std::isfinite(fn))
                continue;
            const bool armijo = fn <= fx + 1e-4 * step * slope;
            if (!armijo && std::abs(fn - fx) > flat)
                continue;
            gn = g(pn);
            if (armijo || std::hypot(gn[0], gn[1]) < gnorm)
            {
                accepted = true;
                break;
            }
        }
        if (!accepted)
            break;
        const std::array<double, 2> s{pn[0] - p[0], pn[1] - p[1]};
        const std::array<double, 2> y{gn[0] - gx[0], gn[1] - gx[1]};
        const double sy = s[0] * y[0] + s[1] * y[1];
        if (sy > 1e-14)
        {
            // H+ = (I - r s y^T) H (I - r y s^T) + r s s^T
            const double r = 1.0 / sy;
            const std::array<double, 2> hy{h[0] * y[0] + h[1] * y[1], h[2] * y[0] + h[3] * y[1]};
            const double yhy = y[0] * hy[0] + y[1] * hy[1];
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    h[2 * i + j] += -r * (hy[i] * s[j] + s[i] * hy[j]) + (r * r * yhy + r) * s[i] * s[j];
        }
        p = pn, fx = fn, gx = gn;
    }
    if (!fit.converged && std::hypot(gx[0], gx[1]) < 1e-6)
        fit.converged = true;
    fit.iterations = it;
    fit.nu_hat = std::abs(p[0]);
    fit.sigma_hat = std::exp(p[1]);
    fit.k_hat_db = detail::rician_k_db(fit.nu_hat, fit.sigma_hat);
    fit.log_likelihood = -fx;
    return fit;
}

} // namespace satrt
