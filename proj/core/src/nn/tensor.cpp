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

#include "beamforge/nn/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace beamforge::nn {

std::size_t element_count(std::span<const std::size_t> dims)
{
    std::size_t n = 1;
    for (auto d : dims)
        n *= d;
    return n;
}

std::string dims_to_string(std::span<const std::size_t> dims)
{
    std::string s = "[";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i)
            s += "x";
        s += std::to_string(dims[i]);
    }
    return s + "]";
}

Tensor::Tensor(Dims dims, float fill) : dims_(std::move(dims)), data_(element_count(dims_), fill) {}

Tensor::Tensor(Dims dims, std::vector<float> data) : dims_(std::move(dims)), data_(std::move(data))
{
    if (data_.size() != element_count(dims_))
        throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) +
                                    " does not match dims " + dims_to_string(dims_));
}

bool Tensor::all_finite() const
{
    return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

} // namespace beamforge::nn
