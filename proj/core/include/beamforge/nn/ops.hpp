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

#include "beamforge/nn/tensor.hpp"

namespace beamforge::nn {

struct Conv2dParams {
    std::size_t stride = 1;
    std::size_t pad_h = 0;
    std::size_t pad_w = 0;
};

/// Output extent of a zero-padded strided window; 0 when the window does not fit.
std::size_t conv_output_extent(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t pad);

/// x: (C_in, H, W); weight: (C_out, C_in, kh, kw); bias: (C_out) or null.
Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor* bias, const Conv2dParams& p);

/// x: (C, H, W); weight: (C, 1, kh, kw); each channel convolved with its own kernel.
Tensor depthwise_conv2d(const Tensor& x, const Tensor& weight, const Tensor* bias, const Conv2dParams& p);

/// y = W vec(x) + b with weight (out, in), in = x.size().
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor* bias);

Tensor relu(const Tensor& x);

/// 2x2 window, stride 2. Odd extents round up; edge windows are clipped to
/// the input, so a 1x1 map stays 1x1.
Tensor maxpool2x2(const Tensor& x);

/// (C, H, W) -> (C)
Tensor global_avgpool(const Tensor& x);

/// Channel concat of rank-3 maps with equal H, W, or concat of rank-1 vectors.
Tensor concat(std::span<const Tensor* const> parts);

Tensor residual_add(const Tensor& a, const Tensor& b);

Tensor flatten(const Tensor& x);

/// x: (C, H, W), v: (C); adds v[c] to every element of channel c.
Tensor reshape_broadcast_add(const Tensor& x, const Tensor& v);

} // namespace beamforge::nn
