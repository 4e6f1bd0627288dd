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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "beamforge/codebook.hpp"
#include "beamforge/datagen.hpp"
#include "beamforge/nn/graph.hpp"

namespace beamforge::nn {

struct Prediction {
    std::size_t tx_index = 1; // narrow-layer, 1-based
    std::size_t rx_index = 1;
    double predicted_power_norm = 0.0; // clamped to [0, 1]
    std::vector<float> raw_tx_vec; // 2N: real parts, then imaginary parts
    std::vector<float> raw_rx_vec;
};

/// Reads a 2N raw output as the complex N-vector (re[0..N), im[0..N)) and
/// returns argmax_n |w(K, n)^H w_hat| over the narrow codewords, lowest index
/// on ties. Throws std::domain_error for an all-zero vector.
std::size_t snap_to_codebook(std::span<const float> raw_vec, std::span<const Codeword> narrow);

/// The constant ConvPath input: (Tx-re, Tx-im, Rx-re, Rx-im) channels of the
/// narrow-layer codebook matrices, one codeword per row.
Tensor make_codebook_input(const CodebookPair& codebooks);

/// Normalizes [p_1^T..p_M^T, p_1^R..p_M^R] with the dataset bounds into the
/// VecPath input.
Tensor make_power_input(std::span<const double> first_layer_powers, const NormalizationConstants& norms);

/// Predicts the beam pair from the 2M first-layer powers alone. `norms` must
/// come from the training manifest; a missing value is an error.
Prediction predict(const ComputationGraph& graph, std::span<const double> first_layer_powers,
                   const std::optional<NormalizationConstants>& norms, const CodebookPair& codebooks);

/// Same, with a prebuilt codebook input tensor (avoids rebuilding it per call).
Prediction predict(const ComputationGraph& graph, std::span<const double> first_layer_powers,
                   const std::optional<NormalizationConstants>& norms, const CodebookPair& codebooks,
                   const Tensor& codebook_input);

} // namespace beamforge::nn
