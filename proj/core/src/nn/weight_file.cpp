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

#include "beamforge/nn/weight_file.hpp"

#include <array>

#include <json.hpp>

#include "beamforge/detail/binary_io.hpp"

namespace beamforge::nn {

using json = nlohmann::json;

namespace {

constexpr std::array<std::pair<LayerKind, std::string_view>, 10> kind_names{{
    {LayerKind::conv2d, "conv2d"},
    {LayerKind::depthwise_conv2d, "depthwise_conv2d"},
    {LayerKind::linear, "linear"},
    {LayerKind::relu, "relu"},
    {LayerKind::maxpool2x2, "maxpool2x2"},
    {LayerKind::global_avgpool, "global_avgpool"},
    {LayerKind::concat, "concat"},
    {LayerKind::residual_add, "residual_add"},
    {LayerKind::flatten, "flatten"},
    {LayerKind::reshape_broadcast_add, "reshape_broadcast_add"},
}};

json manifest_to_json(const GraphManifest& m)
{
    json layers = json::array();
    for (const auto& l : m.layers) {
        layers.push_back({
            {"name", l.name},
            {"kind", std::string(to_string(l.kind))},
            {"inputs", l.inputs},
            {"in_channels", l.in_channels},
            {"out_channels", l.out_channels},
            {"kernel", {l.kernel_h, l.kernel_w}},
            {"stride", l.stride},
            {"padding", {l.pad_h, l.pad_w}},
            {"weight", l.weight},
            {"bias", l.bias},
        });
    }
    json tensors = json::array();
    for (const auto& t : m.tensors)
        tensors.push_back({{"name", t.name}, {"dims", t.dims}, {"offset", t.offset}, {"count", t.count}});

    json j;
    j["format_version"] = m.format_version;
    j["n_antennas"] = m.n_antennas;
    j["branching"] = m.branching;
    j["inputs"] = {{"conv", m.conv_input}, {"vec", m.vec_input}};
    j["outputs"] = {{"tx", m.tx_output}, {"rx", m.rx_output}, {"power", m.power_output}};
    j["layers"] = std::move(layers);
    j["tensors"] = std::move(tensors);
    return j;
}

GraphManifest manifest_from_json(const json& j)
{
    GraphManifest m;
    m.format_version = j.at("format_version").get<std::uint32_t>();
    m.n_antennas = j.at("n_antennas").get<std::size_t>();
    m.branching = j.at("branching").get<std::size_t>();
    m.conv_input = j.at("inputs").at("conv").get<std::string>();
    m.vec_input = j.at("inputs").at("vec").get<std::string>();
    m.tx_output = j.at("outputs").at("tx").get<std::string>();
    m.rx_output = j.at("outputs").at("rx").get<std::string>();
    m.power_output = j.at("outputs").at("power").get<std::string>();
    for (const auto& l : j.at("layers")) {
        LayerSpec s;
        s.name = l.at("name").get<std::string>();
        s.kind = parse_layer_kind(l.at("kind").get<std::string>());
        s.inputs = l.at("inputs").get<std::vector<std::string>>();
        s.in_channels = l.at("in_channels").get<std::size_t>();
        s.out_channels = l.at("out_channels").get<std::size_t>();
        const auto kernel = l.at("kernel").get<std::vector<std::size_t>>();
        const auto padding = l.at("padding").get<std::vector<std::size_t>>();
        if (kernel.size() != 2 || padding.size() != 2)
            throw WeightFormatError("layer '" + s.name + "': kernel and padding must have two entries");
        s.kernel_h = kernel[0];
        s.kernel_w = kernel[1];
        s.pad_h = padding[0];
        s.pad_w = padding[1];
        s.stride = l.at("stride").get<std::size_t>();
        s.weight = l.at("weight").get<std::string>();
        s.bias = l.at("bias").get<std::string>();
        m.layers.push_back(std::move(s));
    }
    for (const auto& t : j.at("tensors")) {
        TensorRecord r;
        r.name = t.at("name").get<std::string>();
        r.dims = t.at("dims").get<Dims>();
        r.offset = t.at("offset").get<std::uint64_t>();
        r.count = t.at("count").get<std::uint64_t>();
        m.tensors.push_back(std::move(r));
    }
    return m;
}

std::string checksum_of(const std::string& canonical_manifest, std::string_view blob)
{
    return detail::hex64(detail::fnv1a64(blob, detail::fnv1a64(canonical_manifest)));
}

} // namespace

std::string_view to_string(LayerKind kind)
{
    for (const auto& [k, name] : kind_names)
        if (k == kind)
            return name;
    return "unknown";
}

LayerKind parse_layer_kind(std::string_view name)
{
    for (const auto& [k, n] : kind_names)
        if (n == name)
            return k;
    throw UnsupportedLayerError("unsupported layer kind '" + std::string(name) + "'");
}

std::string WeightFile::manifest_json() const
{
    json j = manifest_to_json(manifest);
    const std::string body = j.dump();
    j["checksum"] = checksum_of(body, blob);
    return j.dump();
}

std::string WeightFile::serialize() const
{
    detail::ByteWriter w;
    w.put_bytes(weight_magic);
    w.put<std::uint32_t>(manifest.format_version);
    const std::string text = manifest_json();
    w.put<std::uint64_t>(text.size());
    w.put_bytes(text);
    w.put_bytes(blob);
    return w.release();
}

WeightFile WeightFile::parse(std::string_view bytes)
{
    WeightFile wf;
    std::string recorded_checksum;
    std::string canonical;
    try {
        detail::ByteReader r(bytes);
        if (r.get_bytes(weight_magic.size()) != weight_magic)
            throw WeightFormatError("not a weight file (bad magic)");
        const auto version = r.get<std::uint32_t>();
        if (version != weight_format_version)
            throw WeightFormatError("unsupported weight format version " + std::to_string(version));
        const auto len = r.get<std::uint64_t>();
        if (len > r.remaining())
            throw WeightFormatError("manifest length exceeds file size");
        json j = json::parse(r.get_bytes(len));
        recorded_checksum = j.at("checksum").get<std::string>();
        j.erase("checksum");
        canonical = j.dump();
        wf.manifest = manifest_from_json(j);
        if (wf.manifest.format_version != version)
            throw WeightFormatError("manifest format_version disagrees with the header");
        wf.blob = std::string(r.get_bytes(r.remaining()));
    } catch (const json::exception& e) {
        throw WeightFormatError(std::string("invalid weight manifest: ") + e.what());
    } catch (const detail::FormatError& e) {
        throw WeightFormatError(e.what());
    }

    for (const auto& t : wf.manifest.tensors) {
        if (t.count != element_count(t.dims))
            throw ShapeMismatchError("tensor '" + t.name + "' declares dims " + dims_to_string(t.dims) + " but " +
                                     std::to_string(t.count) + " floats");
        if (t.offset > wf.blob.size() || t.count * sizeof(float) > wf.blob.size() - t.offset)
            throw CorruptBlobError("tensor '" + t.name + "' extends past the end of the weight blob");
    }

    if (checksum_of(canonical, wf.blob) != recorded_checksum)
        throw WeightFormatError("weight file checksum mismatch");
    return wf;
}

void WeightFile::write(const std::filesystem::path& path) const { detail::write_file(path, serialize()); }

WeightFile WeightFile::read(const std::filesystem::path& path)
{
    const std::string bytes = detail::read_file(path);
    return parse(bytes);
}

const TensorRecord* WeightFile::find_tensor(std::string_view name) const
{
    for (const auto& t : manifest.tensors)
        if (t.name == name)
            return &t;
    return nullptr;
}

Tensor WeightFile::tensor(const TensorRecord& record) const
{
    if (record.count != element_count(record.dims))
        throw ShapeMismatchError("tensor '" + record.name + "' count does not match its dims");
    if (record.offset > blob.size() || record.count * sizeof(float) > blob.size() - record.offset)
        throw CorruptBlobError("tensor '" + record.name + "' extends past the end of the weight blob");
    detail::ByteReader r(std::string_view(blob).substr(record.offset, record.count * sizeof(float)));
    std::vector<float> data(record.count);
    for (auto& v : data)
        v = r.get<float>();
    return Tensor(record.dims, std::move(data));
}

} // namespace beamforge::nn
