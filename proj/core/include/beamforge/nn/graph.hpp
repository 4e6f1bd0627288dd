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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "beamforge/nn/tensor.hpp"
#include "beamforge/nn/weight_file.hpp"

namespace beamforge::nn {

struct ForwardOutput {
    Tensor tx; // (2N): real parts then imaginary parts
    Tensor rx; // (2N)
    float power_norm = 0.0f;
};

/// Immutable executable graph. All shape checks happen in the constructor;
/// forward() only re-checks the two input tensors. Safe to share across
/// threads: each call owns its activations.
class ComputationGraph {
public:
    explicit ComputationGraph(const WeightFile& file);

    const GraphManifest& manifest() const { return manifest_; }
    std::size_t node_count() const { return nodes_.size(); }
    const Dims& node_dims(std::size_t i) const { return nodes_[i].out_dims; }
    std::optional<std::size_t> find_node(std::string_view name) const;

    /// Every node's activation, in manifest order.
    std::vector<Tensor> run(const Tensor& conv_input, const Tensor& vec_input) const;

    /// Runs the graph and returns the three declared heads. Throws
    /// ShapeMismatchError if the graph declares no heads.
    ForwardOutput forward(const Tensor& conv_input, const Tensor& vec_input) const;

private:
    struct Node {
        LayerSpec spec;
        std::vector<std::ptrdiff_t> inputs; // -1: conv input, -2: vec input, else node index
        std::optional<Tensor> weight;
        std::optional<Tensor> bias;
        Dims out_dims;
    };

    Dims infer_dims(const Node& node, const std::vector<const Dims*>& in) const;
    Tensor execute(const Node& node, const std::vector<const Tensor*>& in) const;
    void check_inputs(const Tensor& conv_input, const Tensor& vec_input) const;

    GraphManifest manifest_;
    std::vector<Node> nodes_;
    std::ptrdiff_t tx_node_ = -1;
    std::ptrdiff_t rx_node_ = -1;
    std::ptrdiff_t power_node_ = -1;
};

ComputationGraph load_weights(const std::filesystem::path& path);

} // namespace beamforge::nn
