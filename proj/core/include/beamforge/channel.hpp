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

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "beamforge/random.hpp"

namespace beamforge {

using cdouble = std::complex<double>;
using CVector = std::vector<cdouble>;

inline constexpr double speed_of_light = 299'792'458.0;

/// Raised when a caller hands in arguments that break an operation's
/// precondition (as opposed to a bad configuration value).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Link-budget parameters of the THz link. Powers are kept linear internally;
/// only the SNR and antenna gains are expressed in dB here.
struct ThzParams {
    double carrier_hz = 0.14e12;
    double kappa_per_m = 6e-5;
    double tx_snr_db = 0.0;
    std::optional<double> gain_tx_db; // unset: derived from the array size
    std::optional<double> gain_rx_db;
    bool noise_enabled = false;
    double noise_power = 1.0;

    /// Throws std::invalid_argument on a non-physical parameter set.
    void validate() const;

    double snr_linear() const;

    /// G = G_t * G_r in linear scale for the given array sizes.
    double gain_linear(std::size_t n_tx, std::size_t n_rx) const;
};

struct LinkGeometry {
    double distance_m = 1.0;
    double aod_u = 0.0; // cos(AoD)
    double aoa_u = 0.0; // cos(AoA)

    void validate() const;
};

/// Rank-1 LoS channel H = sqrt(G Nr Nt) psi a_R a_T^H alpha, stored row-major
/// (n_rx rows, n_tx columns).
struct ChannelRealization {
    std::size_t n_tx = 0;
    std::size_t n_rx = 0;
    std::vector<cdouble> matrix;
    cdouble psi{1.0, 0.0};
    double alpha = 0.0;
    double gain_linear = 1.0;
    LinkGeometry geometry;

    cdouble at(std::size_t row, std::size_t col) const { return matrix[row * n_tx + col]; }

    /// sqrt(G Nr Nt) * psi * alpha, the scalar in front of the outer product.
    cdouble amplitude() const;

    double frobenius_norm() const;
};

/// ULA response with half-wavelength spacing: element i is exp(j pi i u)/sqrt(N).
CVector steering_vector(std::size_t n_elements, double u);

/// Free-space plus molecular-absorption amplitude loss at `distance_m`.
double path_loss_alpha(const ThzParams& params, double distance_m);

/// Per-side antenna gain 4 + 10 log10(sqrt(N)) in dB.
double antenna_gain_db(std::size_t n_elements);

/// Builds H for a given fading coefficient. draw_channel() is this plus a
/// seeded CN(0,1) draw of psi.
ChannelRealization make_channel(const ThzParams& params, std::size_t n_tx, std::size_t n_rx,
                                const LinkGeometry& geometry, cdouble psi);

ChannelRealization draw_channel(const ThzParams& params, std::size_t n_tx, std::size_t n_rx,
                                const LinkGeometry& geometry, std::uint64_t rng_seed);

/// gamma |w_rx^H H w_tx|^2, evaluated on the full matrix. With
/// params.noise_enabled a CN(0, noise_power) sample is added to the combined
/// signal before squaring; `noise_rng` must then be non-null.
double received_power(std::span<const cdouble> w_tx, std::span<const cdouble> w_rx,
                      const ChannelRealization& channel, const ThzParams& params,
                      Rng* noise_rng = nullptr);

/// w^H v
cdouble inner_product(std::span<const cdouble> w, std::span<const cdouble> v);

double euclidean_norm(std::span<const cdouble> v);

} // namespace beamforge
