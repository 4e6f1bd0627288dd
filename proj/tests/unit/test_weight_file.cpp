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

#include <catch_amalgamated.hpp>

#include <filesystem>

#include <json.hpp>

#include "beamforge/detail/binary_io.hpp"
#include "beamforge/nn/builder.hpp"
#include "beamforge/nn/graph.hpp"
#include "beamforge/nn/weight_file.hpp"

using namespace beamforge;
using namespace beamforge::nn;
namespace fs = std::filesystem;

namespace {

// A head-only graph on N=2, M=2: gap(conv_in) ++ vec_in -> three linear heads.
WeightFile tiny_graph()
{
    GraphBuilder b(2, 2);
    LayerSpec gap;
    gap.name = "gap";
    gap.kind = LayerKind::global_avgpool;
    gap.inputs = {b.conv_input()};
    b.add_layer(gap);
    LayerSpec cat;
    cat.name = "cat";
    cat.kind = LayerKind::concat;
    cat.inputs = {"gap", b.vec_input()};
    b.add_layer(cat);
    const auto head = [&](const std::string& name, std::size_t out) {
        LayerSpec s;
        s.name = name;
        s.kind = LayerKind::linear;
        s.inputs = {"cat"};
        s.in_channels = 8;
        s.out_channels = out;
        std::vector<float> w(out * 8);
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = 0.01f * static_cast<float>(i) - 0.1f;
        s.weight = b.add_tensor(name + ".weight", {out, 8}, w);
        s.bias = b.add_tensor(name + ".bias", {out}, std::vector<float>(out, 0.5f));
        b.add_layer(s);
    };
    head("tx", 4);
    head("rx", 4);
    head("power", 1);
    b.set_outputs("tx", "rx", "power");
    return b.build();
}

// Re-signs edited manifest JSON so only the intended defect remains.
std::string assemble(nlohmann::json manifest, const std::string& blob)
{
    manifest.erase("checksum");
    const std::string body = manifest.dump();
    manifest["checksum"] = detail::hex64(detail::fnv1a64(blob, detail::fnv1a64(body)));
    const std::string text = manifest.dump();
    detail::ByteWriter w;
    w.put_bytes(weight_magic);
    w.put<std::uint32_t>(weight_format_version);
    w.put<std::uint64_t>(text.size());
    w.put_bytes(text);
    w.put_bytes(blob);
    return w.release();
}

template <typename E>
std::string error_text(const std::string& bytes)
{
    try {
        ComputationGraph g(WeightFile::parse(bytes));
    } catch (const E& e) {
        return e.what();
    }
    return "<no error>";
}

} // namespace

TEST_CASE("weight files round-trip byte for byte", "[nn][weights]")
{
    for (const WeightFile& wf : {tiny_graph(), build_incept_resnet(4, 2, 1), build_incept_resnet(16, 4, 2)}) {
        const std::string bytes = wf.serialize();
        const WeightFile back = WeightFile::parse(bytes);
        CHECK(back.manifest == wf.manifest);
        CHECK(back.blob == wf.blob);
        CHECK(back.serialize() == bytes);
    }
}

TEST_CASE("weight file header and canonical manifest", "[nn][weights]")
{
    const WeightFile wf = tiny_graph();
    const std::string bytes = wf.serialize();
    CHECK(bytes.substr(0, 8) == std::string("THZNN1\0\0", 8));
    const std::string text = wf.manifest_json();
    const auto j = nlohmann::json::parse(text);
    CHECK(j.dump() == text);
    CHECK(j.at("n_antennas") == 2);
    CHECK(j.at("branching") == 2);
    CHECK(j.at("inputs").at("conv") == "conv_in");
    CHECK(j.at("outputs").at("power") == "power");
    CHECK(j.at("checksum").get<std::string>().size() == 16);
}

TEST_CASE("weight files survive disk I/O", "[nn][weights]")
{
    const fs::path path = fs::temp_directory_path() / "beamforge_test_weights.thznn";
    const WeightFile wf = build_incept_resnet(8, 2, 3);
    wf.write(path);
    CHECK(WeightFile::read(path).serialize() == wf.serialize());
    const ComputationGraph g = load_weights(path);
    CHECK(g.manifest().n_antennas == 8);
    fs::remove(path);
    CHECK_THROWS(load_weights(path));
}

TEST_CASE("a 5x4 linear weight backed by 12 floats is a shape error", "[nn][weights]")
{
    WeightFile wf = tiny_graph();
    auto j = nlohmann::json::parse(wf.manifest_json());
    for (auto& t : j["tensors"])
        if (t["name"] == "tx.weight") {
            t["dims"] = {5, 4};
            t["count"] = 12;
        }
    CHECK_THROWS_AS(WeightFile::parse(assemble(j, wf.blob)), ShapeMismatchError);

    // Consistent record, but the layer expects (4, 8).
    WeightFile wrong = tiny_graph();
    for (auto& t : wrong.manifest.tensors)
        if (t.name == "tx.weight")
            t.dims = {8, 4};
    const std::string msg = error_text<ShapeMismatchError>(wrong.serialize());
    CHECK(msg.find("tx") != std::string::npos);
}

TEST_CASE("a truncated blob names the offending tensor", "[nn][weights]")
{
    WeightFile wf = tiny_graph();
    wf.blob.resize(wf.blob.size() - 4);
    try {
        WeightFile::parse(wf.serialize());
        FAIL("expected CorruptBlobError");
    } catch (const CorruptBlobError& e) {
        CHECK(std::string(e.what()).find("power.bias") != std::string::npos);
    }

    // A truncated file fails the same way or at the header.
    const std::string full = tiny_graph().serialize();
    CHECK_THROWS_AS(WeightFile::parse(full.substr(0, full.size() - 1)), CorruptBlobError);
    CHECK_THROWS_AS(WeightFile::parse(full.substr(0, 30)), WeightFormatError);
}

TEST_CASE("dangling references are rejected at load", "[nn][weights]")
{
    WeightFile missing_tensor = tiny_graph();
    missing_tensor.manifest.layers.back().weight = "nope.weight";
    CHECK(error_text<DanglingReferenceError>(missing_tensor.serialize()).find("nope.weight") != std::string::npos);

    WeightFile missing_input = tiny_graph();
    missing_input.manifest.layers[1].inputs = {"gap", "ghost"};
    CHECK(error_text<DanglingReferenceError>(missing_input.serialize()).find("ghost") != std::string::npos);

    // Forward references would make a cycle possible; only earlier nodes are visible.
    WeightFile forward_ref = tiny_graph();
    forward_ref.manifest.layers[0].inputs = {"cat"};
    CHECK(error_text<DanglingReferenceError>(forward_ref.serialize()) != "<no error>");

    WeightFile missing_output = tiny_graph();
    missing_output.manifest.tx_output = "nowhere";
    CHECK(error_text<DanglingReferenceError>(missing_output.serialize()) != "<no error>");
}

TEST_CASE("unsupported layer kinds are rejected", "[nn][weights]")
{
    const WeightFile wf = tiny_graph();
    auto j = nlohmann::json::parse(wf.manifest_json());
    j["layers"][0]["kind"] = "batchnorm";
    CHECK_THROWS_AS(WeightFile::parse(assemble(j, wf.blob)), UnsupportedLayerError);
    CHECK_THROWS_AS(parse_layer_kind("softmax"), UnsupportedLayerError);
    CHECK(parse_layer_kind("reshape_broadcast_add") == LayerKind::reshape_broadcast_add);
}

TEST_CASE("format errors: magic, version, checksum, JSON", "[nn][weights]")
{
    const std::string good = tiny_graph().serialize();

    std::string bad_magic = good;
    bad_magic[3] = 'X';
    CHECK_THROWS_AS(WeightFile::parse(bad_magic), WeightFormatError);

    std::string bad_version = good;
    bad_version[8] = 9;
    CHECK_THROWS_AS(WeightFile::parse(bad_version), WeightFormatError);

    std::string flipped = good;
    flipped.back() = static_cast<char>(flipped.back() ^ 0x01);
    CHECK_THROWS_AS(WeightFile::parse(flipped), WeightFormatError);

    const WeightFile wf = tiny_graph();
    auto j = nlohmann::json::parse(wf.manifest_json());
    j["n_antennas"] = 3;
    std::string text = j.dump();
    detail::ByteWriter w;
    w.put_bytes(weight_magic);
    w.put<std::uint32_t>(weight_format_version);
    w.put<std::uint64_t>(text.size());
    w.put_bytes(text);
    w.put_bytes(wf.blob);
    CHECK_THROWS_AS(WeightFile::parse(w.release()), WeightFormatError);

    detail::ByteWriter junk;
    junk.put_bytes(weight_magic);
    junk.put<std::uint32_t>(weight_format_version);
    junk.put<std::uint64_t>(5);
    junk.put_bytes("{oops");
    CHECK_THROWS_AS(WeightFile::parse(junk.release()), WeightFormatError);
}

TEST_CASE("all load errors share one base class", "[nn][weights]")
{
    WeightFile wf = tiny_graph();
    wf.blob.resize(4);
    CHECK_THROWS_AS(WeightFile::parse(wf.serialize()), WeightFileError);
}
