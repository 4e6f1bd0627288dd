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
#include <string>
#include <vector>

#include "beamforge/nn/weight_file.hpp"
#include "beamforge/random.hpp"

namespace beamforge::nn {

/// Incrementally assembles a WeightFile: tensors are appended to the blob in
/// insertion order, layers must be added in topological order.
class GraphBuilder {
public:
    GraphBuilder(std::size_t n_antennas, std::size_t branching);

    /// Appends a float32 tensor and returns its name.
    std::string add_tensor(const std::string& name, Dims dims, const std::vector<float>& values);

    /// Appends a layer and returns its name (usable as an input of later layers).
    const std::string& add_layer(LayerSpec spec);

    const std::string& conv_input() const { return file_.manifest.conv_input; }
    const std::string& vec_input() const { return file_.manifest.vec_input; }

    void set_outputs(std::string tx, std::string rx, std::string power);

    WeightFile build() const { return file_; }

private:
    WeightFile file_;
};

/// Layer widths of the Incept-ResNet. Each inception block splits its output
/// channels evenly over the 1x1, 1x3, 3x1 and 3x3 branches.
struct InceptResNetOptions {
    std::vector<std::size_t> block_channels{32, 64, 128};
    std::size_t vec_width = 64;
    std::size_t head_width = 128;
};

/// Builds the two-path network (ConvPath over the stacked codebooks, VecPath
/// over the 2M first-layer powers, bidirectional fusion after blocks 1 and 2,
/// and tx/rx/power heads) with seeded He-normal weights. Inference-form graph:
/// batch norm folded, no dropout.
WeightFile build_incept_resnet(std::size_t n_antennas, std::size_t branching, std::uint64_t seed,
                               const InceptResNetOptions& options = {});

} // namespace beamforge::nn
