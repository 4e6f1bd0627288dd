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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamforge::nn {

using Dims = std::vector<std::size_t>;

std::size_t element_count(std::span<const std::size_t> dims);
std::string dims_to_string(std::span<const std::size_t> dims);

/// Dense row-major float tensor. Feature maps are (channels, height, width);
/// vectors are rank 1.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Dims dims, float fill = 0.0f);
    Tensor(Dims dims, std::vector<float> data);

    const Dims& dims() const { return dims_; }
    std::size_t rank() const { return dims_.size(); }
    std::size_t size() const { return data_.size(); }

    std::span<float> data() { return data_; }
    std::span<const float> data() const { return data_; }

    float& operator[](std::size_t i) { return data_[i]; }
    float operator[](std::size_t i) const { return data_[i]; }

    // (c, h, w) access for rank-3 tensors.
    float& at(std::size_t c, std::size_t h, std::size_t w) { return data_[(c * dims_[1] + h) * dims_[2] + w]; }
    float at(std::size_t c, std::size_t h, std::size_t w) const { return data_[(c * dims_[1] + h) * dims_[2] + w]; }

    bool all_finite() const;

    bool operator==(const Tensor&) const = default;

private:
    Dims dims_;
    std::vector<float> data_;
};

} // namespace beamforge::nn
