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

#include "beamforge/nn/ops.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

namespace beamforge::nn {

namespace {

void require_rank(const Tensor& x, std::size_t rank, const char* op)
{
    if (x.rank() != rank)
        throw std::invalid_argument(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                                    dims_to_string(x.dims()));
}

// Adds w * x[ih, iw] into out[oh, ow] for every output position whose input
// tap (oh*s - ph + kh, ow*s - pw + kw) lies inside the map.
void accumulate_tap(const float* in, std::size_t h, std::size_t w, double weight, std::size_t kh, std::size_t kw,
                    const Conv2dParams& p, double* out, std::size_t ho, std::size_t wo)
{
    for (std::size_t oh = 0; oh < ho; ++oh) {
        const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * p.stride + kh) - static_cast<std::ptrdiff_t>(p.pad_h);
        if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(h))
            continue;
        const float* row = in + static_cast<std::size_t>(ih) * w;
        double* out_row = out + oh * wo;
        for (std::size_t ow = 0; ow < wo; ++ow) {
            const std::ptrdiff_t iw =
                static_cast<std::ptrdiff_t>(ow * p.stride + kw) - static_cast<std::ptrdiff_t>(p.pad_w);
            if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(w))
                continue;
            out_row[ow] += weight * row[iw];
        }
    }
}

} // namespace

std::size_t conv_output_extent(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t pad)
{
    if (stride == 0 || in + 2 * pad < kernel)
        return 0;
    return (in + 2 * pad - kernel) / stride + 1;
}

Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor* bias, const Conv2dParams& p)
{
    require_rank(x, 3, "conv2d");
    require_rank(weight, 4, "conv2d weight");
    const std::size_t cin = x.dims()[0], h = x.dims()[1], w = x.dims()[2];
    const std::size_t cout = weight.dims()[0], kh = weight.dims()[2], kw = weight.dims()[3];
    if (weight.dims()[1] != cin)
        throw std::invalid_argument("conv2d: weight expects " + std::to_string(weight.dims()[1]) +
                                    " input channels, got " + std::to_string(cin));
    const std::size_t ho = conv_output_extent(h, kh, p.stride, p.pad_h);
    const std::size_t wo = conv_output_extent(w, kw, p.stride, p.pad_w);
    if (ho == 0 || wo == 0)
        throw std::invalid_argument("conv2d: kernel does not fit the input");

    Tensor y({cout, ho, wo});
    const std::size_t plane = ho * wo;
    std::vector<double> acc(plane);
    for (std::size_t oc = 0; oc < cout; ++oc) {
        std::fill(acc.begin(), acc.end(), bias ? static_cast<double>((*bias)[oc]) : 0.0);
        for (std::size_t ic = 0; ic < cin; ++ic) {
            const float* in = x.data().data() + ic * h * w;
            for (std::size_t a = 0; a < kh; ++a)
                for (std::size_t b = 0; b < kw; ++b)
                    accumulate_tap(in, h, w, weight[((oc * cin + ic) * kh + a) * kw + b], a, b, p, acc.data(), ho, wo);
        }
        std::copy(acc.begin(), acc.end(), y.data().begin() + static_cast<std::ptrdiff_t>(oc * plane));
    }
    return y;
}

Tensor depthwise_conv2d(const Tensor& x, const Tensor& weight, const Tensor* bias, const Conv2dParams& p)
{
    require_rank(x, 3, "depthwise_conv2d");
    require_rank(weight, 4, "depthwise_conv2d weight");
    const std::size_t c = x.dims()[0], h = x.dims()[1], w = x.dims()[2];
    const std::size_t kh = weight.dims()[2], kw = weight.dims()[3];
    if (weight.dims()[0] != c || weight.dims()[1] != 1)
        throw std::invalid_argument("depthwise_conv2d: weight must be (C, 1, kh, kw)");
    const std::size_t ho = conv_output_extent(h, kh, p.stride, p.pad_h);
    const std::size_t wo = conv_output_extent(w, kw, p.stride, p.pad_w);
    if (ho == 0 || wo == 0)
        throw std::invalid_argument("depthwise_conv2d: kernel does not fit the input");

    Tensor y({c, ho, wo});
    const std::size_t plane = ho * wo;
    std::vector<double> acc(plane);
    for (std::size_t ch = 0; ch < c; ++ch) {
        std::fill(acc.begin(), acc.end(), bias ? static_cast<double>((*bias)[ch]) : 0.0);
        const float* in = x.data().data() + ch * h * w;
        for (std::size_t a = 0; a < kh; ++a)
            for (std::size_t b = 0; b < kw; ++b)
                accumulate_tap(in, h, w, weight[(ch * kh + a) * kw + b], a, b, p, acc.data(), ho, wo);
        std::copy(acc.begin(), acc.end(), y.data().begin() + static_cast<std::ptrdiff_t>(ch * plane));
    }
    return y;
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor* bias)
{
    require_rank(weight, 2, "linear weight");
    const std::size_t out_features = weight.dims()[0], in_features = weight.dims()[1];
    if (x.size() != in_features)
        throw std::invalid_argument("linear: expected " + std::to_string(in_features) + " inputs, got " +
                                    std::to_string(x.size()));
    Tensor y({out_features});
    for (std::size_t o = 0; o < out_features; ++o) {
        double acc = bias ? (*bias)[o] : 0.0;
        const float* row = weight.data().data() + o * in_features;
        for (std::size_t i = 0; i < in_features; ++i)
            acc += static_cast<double>(row[i]) * x[i];
        y[o] = static_cast<float>(acc);
    }
    return y;
}

Tensor relu(const Tensor& x)
{
    Tensor y = x;
    for (auto& v : y.data())
        v = v > 0.0f ? v : 0.0f;
    return y;
}

Tensor maxpool2x2(const Tensor& x)
{
    require_rank(x, 3, "maxpool2x2");
    const std::size_t c = x.dims()[0], h = x.dims()[1], w = x.dims()[2];
    const std::size_t ho = (h + 1) / 2, wo = (w + 1) / 2;
    Tensor y({c, ho, wo});
    for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t oh = 0; oh < ho; ++oh)
            for (std::size_t ow = 0; ow < wo; ++ow) {
                float best = -std::numeric_limits<float>::infinity();
                for (std::size_t ih = 2 * oh; ih < std::min(2 * oh + 2, h); ++ih)
                    for (std::size_t iw = 2 * ow; iw < std::min(2 * ow + 2, w); ++iw)
                        best = std::max(best, x.at(ch, ih, iw));
                y.at(ch, oh, ow) = best;
            }
    return y;
}

Tensor global_avgpool(const Tensor& x)
{
    require_rank(x, 3, "global_avgpool");
    const std::size_t c = x.dims()[0], plane = x.dims()[1] * x.dims()[2];
    Tensor y({c});
    for (std::size_t ch = 0; ch < c; ++ch) {
        float acc = 0.0f;
        const float* in = x.data().data() + ch * plane;
        for (std::size_t i = 0; i < plane; ++i)
            acc += in[i];
        y[ch] = acc / static_cast<float>(plane);
    }
    return y;
}

Tensor concat(std::span<const Tensor* const> parts)
{
    if (parts.empty())
        throw std::invalid_argument("concat: no inputs");
    const Tensor& first = *parts.front();
    if (first.rank() != 1 && first.rank() != 3)
        throw std::invalid_argument("concat: inputs must be rank 1 or rank 3");

    Dims dims = first.dims();
    dims[0] = 0;
    for (const Tensor* t : parts) {
        if (t->rank() != first.rank() ||
            (first.rank() == 3 && (t->dims()[1] != first.dims()[1] || t->dims()[2] != first.dims()[2])))
            throw std::invalid_argument("concat: incompatible input dims " + dims_to_string(t->dims()));
        dims[0] += t->dims()[0];
    }
    std::vector<float> data;
    data.reserve(element_count(dims));
    for (const Tensor* t : parts)
        data.insert(data.end(), t->data().begin(), t->data().end());
    return Tensor(std::move(dims), std::move(data));
}

Tensor residual_add(const Tensor& a, const Tensor& b)
{
    if (a.dims() != b.dims())
        throw std::invalid_argument("residual_add: dims " + dims_to_string(a.dims()) + " vs " +
                                    dims_to_string(b.dims()));
    Tensor y = a;
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] += b[i];
    return y;
}

Tensor flatten(const Tensor& x)
{
    return Tensor({x.size()}, std::vector<float>(x.data().begin(), x.data().end()));
}

Tensor reshape_broadcast_add(const Tensor& x, const Tensor& v)
{
    require_rank(x, 3, "reshape_broadcast_add");
    if (v.size() != x.dims()[0])
        throw std::invalid_argument("reshape_broadcast_add: vector length must equal channel count");
    Tensor y = x;
    const std::size_t plane = x.dims()[1] * x.dims()[2];
    for (std::size_t ch = 0; ch < x.dims()[0]; ++ch) {
        float* out = y.data().data() + ch * plane;
        for (std::size_t i = 0; i < plane; ++i)
            out[i] += v[ch];
    }
    return y;
}

} // namespace beamforge::nn
