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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "beamforge/nn/tensor.hpp"

namespace beamforge::nn {

inline constexpr std::uint32_t weight_format_version = 1;
inline constexpr std::string_view weight_magic{"THZNN1\0\0", 8};

// Load failures. Each failure class has its own type so callers and tests can
// tell them apart.
class WeightFileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
/// Bad magic, version, JSON, or checksum.
class WeightFormatError : public WeightFileError {
public:
    using WeightFileError::WeightFileError;
};
/// A tensor region that falls outside the blob.
class CorruptBlobError : public WeightFileError {
public:
    using WeightFileError::WeightFileError;
};
/// A layer names a tensor or input node that does not exist.
class DanglingReferenceError : public WeightFileError {
public:
    using WeightFileError::WeightFileError;
};
class UnsupportedLayerError : public WeightFileError {
public:
    using WeightFileError::WeightFileError;
};
class ShapeMismatchError : public WeightFileError {
public:
    using WeightFileError::WeightFileError;
};

enum class LayerKind {
    conv2d,
    depthwise_conv2d,
    linear,
    relu,
    maxpool2x2,
    global_avgpool,
    concat,
    residual_add,
    flatten,
    reshape_broadcast_add,
};

std::string_view to_string(LayerKind kind);
/// Throws UnsupportedLayerError for unknown kinds.
LayerKind parse_layer_kind(std::string_view name);

/// One node of the computation graph. Batch norm is folded into the preceding
/// conv/linear weights before export, so it has no kind of its own.
struct LayerSpec {
    std::string name;
    LayerKind kind = LayerKind::relu;
    std::vector<std::string> inputs;
    std::size_t in_channels = 0; // in_features for linear
    std::size_t out_channels = 0; // out_features for linear
    std::size_t kernel_h = 1;
    std::size_t kernel_w = 1;
    std::size_t stride = 1;
    std::size_t pad_h = 0;
    std::size_t pad_w = 0;
    std::string weight; // tensor name, empty when the kind has none
    std::string bias;   // tensor name, optional

    bool operator==(const LayerSpec&) const = default;
};

/// A float32 tensor stored in the blob at byte `offset`.
struct TensorRecord {
    std::string name;
    Dims dims;
    std::uint64_t offset = 0;
    std::uint64_t count = 0;

    bool operator==(const TensorRecord&) const = default;
};

struct GraphManifest {
    std::uint32_t format_version = weight_format_version;
    std::size_t n_antennas = 0;
    std::size_t branching = 2;
    std::string conv_input = "conv_in"; // (4, N, N)
    std::string vec_input = "vec_in";   // (2M)
    std::string tx_output;              // (2N), optional
    std::string rx_output;              // (2N), optional
    std::string power_output;           // (1), optional
    std::vector<LayerSpec> layers;      // topological order
    std::vector<TensorRecord> tensors;

    Dims conv_input_dims() const { return {4, n_antennas, n_antennas}; }
    Dims vec_input_dims() const { return {2 * branching}; }
    bool has_heads() const { return !tx_output.empty() && !rx_output.empty() && !power_output.empty(); }

    bool operator==(const GraphManifest&) const = default;
};

/// Manifest plus raw little-endian float32 blob. The file carries a checksum
/// over the canonical manifest (without the checksum key) and the blob.
struct WeightFile {
    GraphManifest manifest;
    std::string blob;

    /// Canonical manifest JSON including the "checksum" key.
    std::string manifest_json() const;
    std::string serialize() const;
    static WeightFile parse(std::string_view bytes);

    void write(const std::filesystem::path& path) const;
    static WeightFile read(const std::filesystem::path& path);

    /// Decodes one tensor from the blob; throws CorruptBlobError when the
    /// record does not fit.
    Tensor tensor(const TensorRecord& record) const;
    const TensorRecord* find_tensor(std::string_view name) const;
};

} // namespace beamforge::nn
