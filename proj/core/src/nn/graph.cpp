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

#include "beamforge/nn/graph.hpp"

#include <unordered_map>

#include "beamforge/nn/ops.hpp"

namespace beamforge::nn {

namespace {

constexpr std::ptrdiff_t conv_input_id = -1;
constexpr std::ptrdiff_t vec_input_id = -2;

bool takes_weights(LayerKind k)
{
    return k == LayerKind::conv2d || k == LayerKind::depthwise_conv2d || k == LayerKind::linear;
}

std::size_t expected_arity(LayerKind k)
{
    switch (k) {
    case LayerKind::residual_add:
    case LayerKind::reshape_broadcast_add: return 2;
    case LayerKind::concat: return 0; // variadic
    default: return 1;
    }
}

[[noreturn]] void shape_error(const LayerSpec& spec, const std::string& what)
{
    throw ShapeMismatchError("layer '" + spec.name + "' (" + std::string(to_string(spec.kind)) + "): " + what);
}

} // namespace

ComputationGraph::ComputationGraph(const WeightFile& file) : manifest_(file.manifest)
{
    const auto& m = manifest_;
    if (m.n_antennas == 0 || m.branching < 2)
        throw ShapeMismatchError("manifest must declare N >= 1 and M >= 2");

    std::unordered_map<std::string, std::ptrdiff_t> ids;
    ids[m.conv_input] = conv_input_id;
    ids[m.vec_input] = vec_input_id;
    const Dims conv_dims = m.conv_input_dims();
    const Dims vec_dims = m.vec_input_dims();

    nodes_.reserve(m.layers.size());
    for (const auto& spec : m.layers) {
        if (ids.count(spec.name))
            throw ShapeMismatchError("duplicate node name '" + spec.name + "'");

        Node node;
        node.spec = spec;
        const std::size_t arity = expected_arity(spec.kind);
        if ((arity != 0 && spec.inputs.size() != arity) || spec.inputs.empty())
            shape_error(spec, "wrong number of inputs (" + std::to_string(spec.inputs.size()) + ")");

        std::vector<const Dims*> in_dims;
        for (const auto& name : spec.inputs) {
            // Inputs must refer to earlier nodes, which also rules out cycles.
            auto it = ids.find(name);
            if (it == ids.end())
                throw DanglingReferenceError("layer '" + spec.name + "' reads unknown node '" + name + "'");
            node.inputs.push_back(it->second);
            in_dims.push_back(it->second == conv_input_id  ? &conv_dims
                              : it->second == vec_input_id ? &vec_dims
                                                           : &nodes_[static_cast<std::size_t>(it->second)].out_dims);
        }

        if (takes_weights(spec.kind)) {
            const TensorRecord* w = file.find_tensor(spec.weight);
            if (!w)
                throw DanglingReferenceError("layer '" + spec.name + "' references missing weight tensor '" +
                                             spec.weight + "'");
            node.weight = file.tensor(*w);
            if (!spec.bias.empty()) {
                const TensorRecord* b = file.find_tensor(spec.bias);
                if (!b)
                    throw DanglingReferenceError("layer '" + spec.name + "' references missing bias tensor '" +
                                                 spec.bias + "'");
                node.bias = file.tensor(*b);
            }
        } else if (!spec.weight.empty() || !spec.bias.empty()) {
            shape_error(spec, "this layer kind takes no weights");
        }

        node.out_dims = infer_dims(node, in_dims);
        ids[spec.name] = static_cast<std::ptrdiff_t>(nodes_.size());
        nodes_.push_back(std::move(node));
    }

    const auto resolve_head = [&](const std::string& name, const Dims& want, std::ptrdiff_t& slot) {
        if (name.empty())
            return;
        auto it = ids.find(name);
        if (it == ids.end() || it->second < 0)
            throw DanglingReferenceError("output '" + name + "' is not a layer of the graph");
        const Dims& got = nodes_[static_cast<std::size_t>(it->second)].out_dims;
        if (got != want)
            throw ShapeMismatchError("output '" + name + "' has dims " + dims_to_string(got) + ", expected " +
                                     dims_to_string(want));
        slot = it->second;
    };
    resolve_head(m.tx_output, {2 * m.n_antennas}, tx_node_);
    resolve_head(m.rx_output, {2 * m.n_antennas}, rx_node_);
    resolve_head(m.power_output, {1}, power_node_);
}

Dims ComputationGraph::infer_dims(const Node& node, const std::vector<const Dims*>& in) const
{
    const LayerSpec& s = node.spec;
    const Dims& x = *in.front();
    switch (s.kind) {
    case LayerKind::conv2d:
    case LayerKind::depthwise_conv2d: {
        if (x.size() != 3)
            shape_error(s, "input must be (C, H, W), got " + dims_to_string(x));
        if (x[0] != s.in_channels)
            shape_error(s, "declares " + std::to_string(s.in_channels) + " input channels, input has " +
                               std::to_string(x[0]));
        const bool depthwise = s.kind == LayerKind::depthwise_conv2d;
        if (depthwise && s.out_channels != s.in_channels)
            shape_error(s, "depthwise conv must keep the channel count");
        const Dims want{s.out_channels, depthwise ? std::size_t{1} : s.in_channels, s.kernel_h, s.kernel_w};
        if (node.weight->dims() != want)
            shape_error(s, "weight dims " + dims_to_string(node.weight->dims()) + ", expected " +
                               dims_to_string(want));
        if (node.bias && node.bias->dims() != Dims{s.out_channels})
            shape_error(s, "bias dims " + dims_to_string(node.bias->dims()));
        const std::size_t ho = conv_output_extent(x[1], s.kernel_h, s.stride, s.pad_h);
        const std::size_t wo = conv_output_extent(x[2], s.kernel_w, s.stride, s.pad_w);
        if (ho == 0 || wo == 0)
            shape_error(s, "kernel does not fit input " + dims_to_string(x));
        return {s.out_channels, ho, wo};
    }
    case LayerKind::linear: {
        const std::size_t n = element_count(x);
        if (n != s.in_channels)
            shape_error(s, "declares " + std::to_string(s.in_channels) + " inputs, input has " + std::to_string(n));
        const Dims want{s.out_channels, s.in_channels};
        if (node.weight->dims() != want)
            shape_error(s, "weight dims " + dims_to_string(node.weight->dims()) + ", expected " +
                               dims_to_string(want));
        if (node.bias && node.bias->dims() != Dims{s.out_channels})
            shape_error(s, "bias dims " + dims_to_string(node.bias->dims()));
        return {s.out_channels};
    }
    case LayerKind::relu: return x;
    case LayerKind::maxpool2x2:
        if (x.size() != 3)
            shape_error(s, "input must be (C, H, W)");
        return {x[0], (x[1] + 1) / 2, (x[2] + 1) / 2};
    case LayerKind::global_avgpool:
        if (x.size() != 3)
            shape_error(s, "input must be (C, H, W)");
        return {x[0]};
    case LayerKind::concat: {
        if (x.size() != 1 && x.size() != 3)
            shape_error(s, "inputs must be rank 1 or rank 3");
        Dims out = x;
        out[0] = 0;
        for (const Dims* d : in) {
            if (d->size() != x.size() || (x.size() == 3 && ((*d)[1] != x[1] || (*d)[2] != x[2])))
                shape_error(s, "incompatible input " + dims_to_string(*d));
            out[0] += (*d)[0];
        }
        return out;
    }
    case LayerKind::residual_add:
        if (*in[0] != *in[1])
            shape_error(s, "operands " + dims_to_string(*in[0]) + " and " + dims_to_string(*in[1]));
        return x;
    case LayerKind::flatten: return {element_count(x)};
    case LayerKind::reshape_broadcast_add:
        if (x.size() != 3 || in[1]->size() != 1 || (*in[1])[0] != x[0])
            shape_error(s, "needs (C, H, W) and (C), got " + dims_to_string(x) + " and " + dims_to_string(*in[1]));
        return x;
    }
    throw UnsupportedLayerError("layer '" + s.name + "' has an unsupported kind");
}

Tensor ComputationGraph::execute(const Node& node, const std::vector<const Tensor*>& in) const
{
    const LayerSpec& s = node.spec;
    const Tensor* bias = node.bias ? &*node.bias : nullptr;
    const Conv2dParams cp{s.stride, s.pad_h, s.pad_w};
    switch (s.kind) {
    case LayerKind::conv2d: return conv2d(*in[0], *node.weight, bias, cp);
    case LayerKind::depthwise_conv2d: return depthwise_conv2d(*in[0], *node.weight, bias, cp);
    case LayerKind::linear: return linear(*in[0], *node.weight, bias);
    case LayerKind::relu: return relu(*in[0]);
    case LayerKind::maxpool2x2: return maxpool2x2(*in[0]);
    case LayerKind::global_avgpool: return global_avgpool(*in[0]);
    case LayerKind::concat: return concat(in);
    case LayerKind::residual_add: return residual_add(*in[0], *in[1]);
    case LayerKind::flatten: return flatten(*in[0]);
    case LayerKind::reshape_broadcast_add: return reshape_broadcast_add(*in[0], *in[1]);
    }
    throw UnsupportedLayerError("layer '" + s.name + "' has an unsupported kind");
}

void ComputationGraph::check_inputs(const Tensor& conv_input, const Tensor& vec_input) const
{
    if (conv_input.dims() != manifest_.conv_input_dims())
        throw ShapeMismatchError("conv input has dims " + dims_to_string(conv_input.dims()) + ", graph expects " +
                                 dims_to_string(manifest_.conv_input_dims()));
    if (vec_input.dims() != manifest_.vec_input_dims())
        throw ShapeMismatchError("vec input has dims " + dims_to_string(vec_input.dims()) + ", graph expects " +
                                 dims_to_string(manifest_.vec_input_dims()));
}

std::optional<std::size_t> ComputationGraph::find_node(std::string_view name) const
{
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].spec.name == name)
            return i;
    return std::nullopt;
}

std::vector<Tensor> ComputationGraph::run(const Tensor& conv_input, const Tensor& vec_input) const
{
    check_inputs(conv_input, vec_input);
    std::vector<Tensor> values(nodes_.size());
    std::vector<const Tensor*> in;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        in.clear();
        for (auto id : nodes_[i].inputs)
            in.push_back(id == conv_input_id  ? &conv_input
                         : id == vec_input_id ? &vec_input
                                              : &values[static_cast<std::size_t>(id)]);
        values[i] = execute(nodes_[i], in);
    }
    return values;
}

ForwardOutput ComputationGraph::forward(const Tensor& conv_input, const Tensor& vec_input) const
{
    if (tx_node_ < 0 || rx_node_ < 0 || power_node_ < 0)
        throw ShapeMismatchError("graph declares no tx/rx/power output heads");
    check_inputs(conv_input, vec_input);

    // Free each activation after its last consumer to bound peak memory.
    std::vector<std::size_t> last_use(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        for (auto id : nodes_[i].inputs)
            if (id >= 0)
                last_use[static_cast<std::size_t>(id)] = i;
    for (auto head : {tx_node_, rx_node_, power_node_})
        last_use[static_cast<std::size_t>(head)] = nodes_.size();

    std::vector<Tensor> values(nodes_.size());
    std::vector<const Tensor*> in;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        in.clear();
        for (auto id : nodes_[i].inputs)
            in.push_back(id == conv_input_id  ? &conv_input
                         : id == vec_input_id ? &vec_input
                                              : &values[static_cast<std::size_t>(id)]);
        values[i] = execute(nodes_[i], in);
        for (auto id : nodes_[i].inputs)
            if (id >= 0 && last_use[static_cast<std::size_t>(id)] == i)
                values[static_cast<std::size_t>(id)] = Tensor();
    }

    ForwardOutput out;
    out.tx = std::move(values[static_cast<std::size_t>(tx_node_)]);
    out.rx = std::move(values[static_cast<std::size_t>(rx_node_)]);
    out.power_norm = values[static_cast<std::size_t>(power_node_)][0];
    return out;
}

ComputationGraph load_weights(const std::filesystem::path& path) { return ComputationGraph(WeightFile::read(path)); }

} // namespace beamforge::nn
