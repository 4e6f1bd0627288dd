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

#include "beamforge/nn/predict.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace beamforge::nn {

std::size_t snap_to_codebook(std::span<const float> raw_vec, std::span<const Codeword> narrow)
{
    if (narrow.empty())
        throw std::invalid_argument("snap_to_codebook: empty codebook");
    const std::size_t n = narrow.front().coeffs.size();
    if (raw_vec.size() != 2 * n)
        throw std::invalid_argument("snap_to_codebook: raw vector must hold 2N = " + std::to_string(2 * n) +
                                    " values, got " + std::to_string(raw_vec.size()));

    CVector w_hat(n);
    bool any_nonzero = false;
    for (std::size_t i = 0; i < n; ++i) {
        w_hat[i] = {static_cast<double>(raw_vec[i]), static_cast<double>(raw_vec[n + i])};
        any_nonzero = any_nonzero || w_hat[i] != cdouble{0.0, 0.0};
    }
    if (!any_nonzero)
        throw std::domain_error("snap_to_codebook: all-zero vector has no direction");

    std::size_t best_index = 0;
    double best = -1.0;
    for (const auto& cw : narrow) {
        const double corr = std::norm(inner_product(cw.coeffs, w_hat));
        if (corr > best || (corr == best && cw.index < best_index)) {
            best = corr;
            best_index = cw.index;
        }
    }
    return best_index;
}

Tensor make_codebook_input(const CodebookPair& codebooks)
{
    const std::size_t n = codebooks.tx.n_antennas();
    if (codebooks.rx.n_antennas() != n)
        throw std::invalid_argument("codebook input needs N_T == N_R");
    Tensor x({4, n, n});
    const auto fill = [&](std::span<const Codeword> narrow, std::size_t channel) {
        for (std::size_t row = 0; row < n; ++row)
            for (std::size_t col = 0; col < n; ++col) {
                const cdouble c = narrow[row].coeffs[col];
                x.at(channel, row, col) = static_cast<float>(c.real());
                x.at(channel + 1, row, col) = static_cast<float>(c.imag());
            }
    };
    fill(codebooks.tx.narrow(), 0);
    fill(codebooks.rx.narrow(), 2);
    return x;
}

Tensor make_power_input(std::span<const double> first_layer_powers, const NormalizationConstants& norms)
{
    if (first_layer_powers.size() % 2 != 0)
        throw std::invalid_argument("first-layer powers must hold M Tx values followed by M Rx values");
    const std::size_t m = first_layer_powers.size() / 2;
    Tensor v({first_layer_powers.size()});
    for (std::size_t i = 0; i < first_layer_powers.size(); ++i) {
        const double p = first_layer_powers[i];
        if (!(p >= 0.0))
            throw std::invalid_argument("first-layer powers must be non-negative");
        const PowerBounds& b = i < m ? norms.tx : norms.rx;
        v[i] = static_cast<float>(normalize_power(p, b.floor, b.ceil));
    }
    return v;
}

Prediction predict(const ComputationGraph& graph, std::span<const double> first_layer_powers,
                   const std::optional<NormalizationConstants>& norms, const CodebookPair& codebooks)
{
    return predict(graph, first_layer_powers, norms, codebooks, make_codebook_input(codebooks));
}

Prediction predict(const ComputationGraph& graph, std::span<const double> first_layer_powers,
                   const std::optional<NormalizationConstants>& norms, const CodebookPair& codebooks,
                   const Tensor& codebook_input)
{
    if (!norms)
        throw std::invalid_argument("predict: normalization constants are missing");
    const auto& m = graph.manifest();
    if (codebooks.tx.n_antennas() != m.n_antennas || codebooks.tx.branching() != m.branching)
        throw ShapeMismatchError("codebooks do not match the graph's N, M");
    if (first_layer_powers.size() != 2 * m.branching)
        throw ShapeMismatchError("predict expects 2M = " + std::to_string(2 * m.branching) + " powers");

    const ForwardOutput out = graph.forward(codebook_input, make_power_input(first_layer_powers, *norms));

    Prediction p;
    p.raw_tx_vec.assign(out.tx.data().begin(), out.tx.data().end());
    p.raw_rx_vec.assign(out.rx.data().begin(), out.rx.data().end());
    // A raw head that collapses to zero carries no direction; fall back to
    // the first codeword rather than failing the whole prediction.
    const auto snap_or_first = [](std::span<const float> raw, std::span<const Codeword> narrow) -> std::size_t {
        const bool zero = std::all_of(raw.begin(), raw.end(), [](float v) { return v == 0.0f; });
        return zero ? 1 : snap_to_codebook(raw, narrow);
    };
    p.tx_index = snap_or_first(p.raw_tx_vec, codebooks.tx.narrow());
    p.rx_index = snap_or_first(p.raw_rx_vec, codebooks.rx.narrow());
    const double power = std::isfinite(out.power_norm) ? static_cast<double>(out.power_norm) : 0.0;
    p.predicted_power_norm = std::clamp(power, 0.0, 1.0);
    return p;
}

} // namespace beamforge::nn
