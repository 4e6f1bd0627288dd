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

#include "beamforge/nn/builder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace beamforge::nn {

GraphBuilder::GraphBuilder(std::size_t n_antennas, std::size_t branching)
{
    file_.manifest.n_antennas = n_antennas;
    file_.manifest.branching = branching;
}

std::string GraphBuilder::add_tensor(const std::string& name, Dims dims, const std::vector<float>& values)
{
    if (values.size() != element_count(dims))
        throw std::invalid_argument("tensor '" + name + "': value count does not match dims");
    TensorRecord rec;
    rec.name = name;
    rec.dims = std::move(dims);
    rec.offset = file_.blob.size();
    rec.count = values.size();
    for (float v : values) {
        const auto bits = std::bit_cast<std::uint32_t>(v);
        for (int b = 0; b < 4; ++b)
            file_.blob.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
    }
    file_.manifest.tensors.push_back(std::move(rec));
    return name;
}

const std::string& GraphBuilder::add_layer(LayerSpec spec)
{
    file_.manifest.layers.push_back(std::move(spec));
    return file_.manifest.layers.back().name;
}

void GraphBuilder::set_outputs(std::string tx, std::string rx, std::string power)
{
    file_.manifest.tx_output = std::move(tx);
    file_.manifest.rx_output = std::move(rx);
    file_.manifest.power_output = std::move(power);
}

namespace {

class InceptResNetWriter {
public:
    InceptResNetWriter(std::size_t n, std::size_t m, std::uint64_t seed) : b_(n, m), rng_(seed) {}

    GraphBuilder& builder() { return b_; }

    std::string conv(const std::string& name, const std::string& in, std::size_t cin, std::size_t cout,
                     std::size_t kh, std::size_t kw, std::size_t stride, std::size_t ph, std::size_t pw)
    {
        LayerSpec s;
        s.name = name;
        s.kind = LayerKind::conv2d;
        s.inputs = {in};
        s.in_channels = cin;
        s.out_channels = cout;
        s.kernel_h = kh;
        s.kernel_w = kw;
        s.stride = stride;
        s.pad_h = ph;
        s.pad_w = pw;
        s.weight = b_.add_tensor(name + ".weight", {cout, cin, kh, kw}, he_normal(cout * cin * kh * kw, cin * kh * kw));
        s.bias = b_.add_tensor(name + ".bias", {cout}, small_normal(cout));
        return b_.add_layer(std::move(s));
    }

    std::string depthwise(const std::string& name, const std::string& in, std::size_t c, std::size_t stride)
    {
        LayerSpec s;
        s.name = name;
        s.kind = LayerKind::depthwise_conv2d;
        s.inputs = {in};
        s.in_channels = c;
        s.out_channels = c;
        s.kernel_h = 3;
        s.kernel_w = 3;
        s.stride = stride;
        s.pad_h = 1;
        s.pad_w = 1;
        s.weight = b_.add_tensor(name + ".weight", {c, 1, 3, 3}, he_normal(c * 9, 9));
        s.bias = b_.add_tensor(name + ".bias", {c}, small_normal(c));
        return b_.add_layer(std::move(s));
    }

    std::string linear(const std::string& name, const std::string& in, std::size_t fin, std::size_t fout)
    {
        LayerSpec s;
        s.name = name;
        s.kind = LayerKind::linear;
        s.inputs = {in};
        s.in_channels = fin;
        s.out_channels = fout;
        s.weight = b_.add_tensor(name + ".weight", {fout, fin}, he_normal(fout * fin, fin));
        s.bias = b_.add_tensor(name + ".bias", {fout}, small_normal(fout));
        return b_.add_layer(std::move(s));
    }

    std::string op(const std::string& name, LayerKind kind, std::vector<std::string> inputs)
    {
        LayerSpec s;
        s.name = name;
        s.kind = kind;
        s.inputs = std::move(inputs);
        return b_.add_layer(std::move(s));
    }

    std::string relu(const std::string& in) { return op(in + ".relu", LayerKind::relu, {in}); }

private:
    std::vector<float> he_normal(std::size_t count, std::size_t fan_in)
    {
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
        std::vector<float> v(count);
        for (auto& x : v)
            x = static_cast<float>(dist(rng_));
        return v;
    }

    std::vector<float> small_normal(std::size_t count)
    {
        std::normal_distribution<double> dist(0.0, 0.01);
        std::vector<float> v(count);
        for (auto& x : v)
            x = static_cast<float>(dist(rng_));
        return v;
    }

    GraphBuilder b_;
    Rng rng_;
};

} // namespace

WeightFile build_incept_resnet(std::size_t n_antennas, std::size_t branching, std::uint64_t seed,
                               const InceptResNetOptions& options)
{
    if (n_antennas < 1 || branching < 2)
        throw std::invalid_argument("build_incept_resnet: need N >= 1 and M >= 2");
    if (options.block_channels.empty())
        throw std::invalid_argument("build_incept_resnet: need at least one inception block");
    for (auto c : options.block_channels)
        if (c == 0 || c % 4 != 0)
            throw std::invalid_argument("build_incept_resnet: block widths must be positive multiples of 4");

    InceptResNetWriter w(n_antennas, branching, seed);
    GraphBuilder& b = w.builder();
    const std::size_t vec_width = options.vec_width;
    const std::size_t n_fusions = std::min<std::size_t>(2, options.block_channels.size() - 1);

    // VecPath layer 1.
    std::string h = w.relu(w.linear("vec1", b.vec_input(), 2 * branching, vec_width));
    std::size_t vec_layers = 1;

    std::string x = b.conv_input();
    std::size_t cin = 4;
    for (std::size_t blk = 0; blk < options.block_channels.size(); ++blk) {
        const std::size_t cout = options.block_channels[blk];
        const std::size_t q = cout / 4;
        const std::string p = "block" + std::to_string(blk + 1);

        // Inception: four parallel kernels, concatenated along channels.
        const std::string f1 = w.relu(w.conv(p + ".b1x1", x, cin, q, 1, 1, 1, 0, 0));
        const std::string f2 = w.relu(w.conv(p + ".b1x3", x, cin, q, 1, 3, 1, 0, 1));
        const std::string f3 = w.relu(w.conv(p + ".b3x1", x, cin, q, 3, 1, 1, 1, 0));
        const std::string f4 = w.relu(w.conv(p + ".b3x3", x, cin, q, 3, 3, 1, 1, 1));
        const std::string incept = w.op(p + ".concat", LayerKind::concat, {f1, f2, f3, f4});

        // Residual: F(Y) + Y, then ReLU and 2x2 max pool (stride 2).
        const std::string residual = w.conv(p + ".residual", incept, cout, cout, 3, 3, 1, 1, 1);
        const std::string sum = w.relu(w.op(p + ".add", LayerKind::residual_add, {residual, incept}));
        x = w.op(p + ".pool", LayerKind::maxpool2x2, {sum});

        if (blk < n_fusions) {
            const std::string f = "fusion" + std::to_string(blk + 1);
            // conv -> vec
            const std::string a = w.relu(w.conv(f + ".conv3x3", x, cout, cout, 3, 3, 1, 1, 1));
            const std::string d = w.relu(w.depthwise(f + ".dw3x3", a, cout, 2));
            const std::string c = w.relu(w.conv(f + ".conv1x1", d, cout, cout, 1, 1, 1, 0, 0));
            const std::string g = w.op(f + ".gap", LayerKind::global_avgpool, {c});
            const std::string to_vec = w.linear(f + ".to_vec", g, cout, vec_width);
            // vec -> conv, from the VecPath state before this exchange
            const std::string to_conv = w.linear(f + ".to_conv", h, vec_width, cout);
            const std::string h_fused = w.op(f + ".vec_add", LayerKind::residual_add, {h, to_vec});
            x = w.op(f + ".conv_add", LayerKind::reshape_broadcast_add, {x, to_conv});

            ++vec_layers;
            h = w.relu(w.linear("vec" + std::to_string(vec_layers), h_fused, vec_width, vec_width));
        }
        cin = cout;
    }
    while (vec_layers < 4) {
        ++vec_layers;
        h = w.relu(w.linear("vec" + std::to_string(vec_layers), h, vec_width, vec_width));
    }

    const std::string pooled = w.op("conv.gap", LayerKind::global_avgpool, {x});
    const std::string flat = w.op("conv.flatten", LayerKind::flatten, {pooled});
    const std::string joined = w.op("head.concat", LayerKind::concat, {flat, h});
    const std::size_t joined_width = cin + vec_width;
    const std::string z = w.relu(w.linear("head.hidden", joined, joined_width, options.head_width));
    const std::string tx = w.linear("head.tx", z, options.head_width, 2 * n_antennas);
    const std::string rx = w.linear("head.rx", z, options.head_width, 2 * n_antennas);
    const std::string power = w.linear("head.power", z, options.head_width, 1);
    b.set_outputs(tx, rx, power);
    return b.build();
}

} // namespace beamforge::nn
