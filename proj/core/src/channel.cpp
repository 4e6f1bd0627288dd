// SPDX-License-Identifier: Apache-2.0
//
// beamforge: beam-training workbench for THz ultra-massive MIMO links
// Copyright (C) 2026 The beamforge authors
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

#include "beamforge/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace beamforge {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

} // namespace

void ThzParams::validate() const
{
    if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz))
        throw std::invalid_argument("carrier_hz must be positive and finite");
    if (!(kappa_per_m >= 0.0) || !std::isfinite(kappa_per_m))
        throw std::invalid_argument("kappa_per_m must be non-negative and finite");
    if (!std::isfinite(tx_snr_db))
        throw std::invalid_argument("tx_snr_db must be finite");
    if (gain_tx_db && !std::isfinite(*gain_tx_db))
        throw std::invalid_argument("gain_tx_db must be finite");
    if (gain_rx_db && !std::isfinite(*gain_rx_db))
        throw std::invalid_argument("gain_rx_db must be finite");
    if (!(noise_power >= 0.0) || !std::isfinite(noise_power))
        throw std::invalid_argument("noise_power must be non-negative");
}

double ThzParams::snr_linear() const { return db_to_linear(tx_snr_db); }

double ThzParams::gain_linear(std::size_t n_tx, std::size_t n_rx) const
{
    const double gt = gain_tx_db.value_or(antenna_gain_db(n_tx));
    const double gr = gain_rx_db.value_or(antenna_gain_db(n_rx));
    return db_to_linear(gt + gr);
}

void LinkGeometry::validate() const
{
    if (!(distance_m > 0.0) || !std::isfinite(distance_m))
        throw std::domain_error("link distance must be positive, got " + std::to_string(distance_m));
    if (!(std::abs(aod_u) <= 1.0))
        throw std::domain_error("aod_u outside [-1, 1]: " + std::to_string(aod_u));
    if (!(std::abs(aoa_u) <= 1.0))
        throw std::domain_error("aoa_u outside [-1, 1]: " + std::to_string(aoa_u));
}

cdouble ChannelRealization::amplitude() const
{
    return std::sqrt(gain_linear * static_cast<double>(n_rx * n_tx)) * alpha * psi;
}

double ChannelRealization::frobenius_norm() const
{
    double acc = 0.0;
    for (const auto& h : matrix)
        acc += std::norm(h);
    return std::sqrt(acc);
}

CVector steering_vector(std::size_t n_elements, double u)
{
    if (n_elements == 0)
        throw std::domain_error("steering_vector: n_elements must be >= 1");
    if (!(std::abs(u) <= 1.0))
        throw std::domain_error("steering_vector: |u| > 1 (u = " + std::to_string(u) + ")");

    const double scale = 1.0 / std::sqrt(static_cast<double>(n_elements));
    CVector a(n_elements);
    for (std::size_t i = 0; i < n_elements; ++i)
        a[i] = std::polar(scale, std::numbers::pi * static_cast<double>(i) * u);
    return a;
}

double path_loss_alpha(const ThzParams& params, double distance_m)
{
    if (!(distance_m > 0.0))
        throw std::domain_error("path_loss_alpha: distance must be positive");
    const double free_space = speed_of_light / (4.0 * std::numbers::pi * params.carrier_hz * distance_m);
    return free_space * std::exp(-0.5 * params.kappa_per_m * distance_m);
}

double antenna_gain_db(std::size_t n_elements)
{
    if (n_elements == 0)
        throw std::domain_error("antenna_gain_db: n_elements must be >= 1");
    return 4.0 + 10.0 * std::log10(std::sqrt(static_cast<double>(n_elements)));
}

ChannelRealization make_channel(const ThzParams& params, std::size_t n_tx, std::size_t n_rx,
                                const LinkGeometry& geometry, cdouble psi)
{
    params.validate();
    geometry.validate();
    if (n_tx == 0 || n_rx == 0)
        throw std::domain_error("make_channel: array sizes must be >= 1");

    ChannelRealization ch;
    ch.n_tx = n_tx;
    ch.n_rx = n_rx;
    ch.psi = psi;
    ch.alpha = path_loss_alpha(params, geometry.distance_m);
    ch.gain_linear = params.gain_linear(n_tx, n_rx);
    ch.geometry = geometry;

    const CVector a_rx = steering_vector(n_rx, geometry.aoa_u);
    const CVector a_tx = steering_vector(n_tx, geometry.aod_u);
    const cdouble amp = ch.amplitude();

    ch.matrix.resize(n_rx * n_tx);
    for (std::size_t r = 0; r < n_rx; ++r) {
        const cdouble row_scale = amp * a_rx[r];
        for (std::size_t t = 0; t < n_tx; ++t)
            ch.matrix[r * n_tx + t] = row_scale * std::conj(a_tx[t]);
    }
    return ch;
}

ChannelRealization draw_channel(const ThzParams& params, std::size_t n_tx, std::size_t n_rx,
                                const LinkGeometry& geometry, std::uint64_t rng_seed)
{
    Rng rng(rng_seed);
    const cdouble psi = complex_gaussian(rng);
    return make_channel(params, n_tx, n_rx, geometry, psi);
}

cdouble inner_product(std::span<const cdouble> w, std::span<const cdouble> v)
{
    if (w.size() != v.size())
        throw ContractViolation("inner_product: length mismatch");
    cdouble acc{0.0, 0.0};
    for (std::size_t i = 0; i < w.size(); ++i)
        acc += std::conj(w[i]) * v[i];
    return acc;
}

double euclidean_norm(std::span<const cdouble> v)
{
    double acc = 0.0;
    for (const auto& x : v)
        acc += std::norm(x);
    return std::sqrt(acc);
}

double received_power(std::span<const cdouble> w_tx, std::span<const cdouble> w_rx,
                      const ChannelRealization& channel, const ThzParams& params, Rng* noise_rng)
{
    if (w_tx.size() != channel.n_tx || w_rx.size() != channel.n_rx)
        throw ContractViolation("received_power: beam length does not match the channel");
    if (std::abs(euclidean_norm(w_tx) - 1.0) > 1e-9)
        throw ContractViolation("received_power: w_tx is not unit-norm");
    if (std::abs(euclidean_norm(w_rx) - 1.0) > 1e-9)
        throw ContractViolation("received_power: w_rx is not unit-norm");

    cdouble combined{0.0, 0.0};
    for (std::size_t r = 0; r < channel.n_rx; ++r) {
        cdouble row{0.0, 0.0};
        for (std::size_t t = 0; t < channel.n_tx; ++t)
            row += channel.at(r, t) * w_tx[t];
        combined += std::conj(w_rx[r]) * row;
    }
    combined *= std::sqrt(params.snr_linear());

    if (params.noise_enabled) {
        if (noise_rng == nullptr)
            throw ContractViolation("received_power: noise enabled but no noise stream supplied");
        combined += std::sqrt(params.noise_power) * complex_gaussian(*noise_rng);
    }
    return std::norm(combined);
}

} // namespace beamforge
