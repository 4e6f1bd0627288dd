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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "beamforge/beamsearch.hpp"
#include "beamforge/channel.hpp"
#include "beamforge/codebook.hpp"

namespace beamforge {

inline constexpr std::uint32_t dataset_format_version = 1;
inline constexpr std::string_view dataset_magic{"THZBT1\0\0", 8};

/// Where the Rx may be placed: distance uniform in (min_distance_m, radius_m],
/// both spatial frequencies uniform in [-1, 1].
struct GeometryDraw {
    double min_distance_m = 1.0;
    double radius_m = 50.0;

    void validate() const;
    LinkGeometry draw(Rng& rng) const;
};

enum class LabelSource { hierarchical, exhaustive };

std::string_view to_string(LabelSource s);
LabelSource parse_label_source(std::string_view name);

/// One training example.
struct Sample {
    double distance_m = 0.0;
    double aod_u = 0.0;
    double aoa_u = 0.0;
    double psi_re = 0.0;
    double psi_im = 0.0;
    std::vector<double> p_rx; // M log_M N_R
    std::vector<double> p_tx; // M log_M N_T
    std::vector<double> first_layer_powers; // [p_1^T..p_M^T, p_1^R..p_M^R]
    std::uint32_t label_tx_index = 1;
    std::uint32_t label_rx_index = 1;
    double label_power = 0.0;

    LinkGeometry geometry() const { return {distance_m, aod_u, aoa_u}; }
    cdouble psi() const { return {psi_re, psi_im}; }

    bool operator==(const Sample&) const = default;
};

/// Draws geometry and fading from `seed`, then runs the one-side M-tree search
/// (Rx sweep under the omni Tx, Tx sweep under the directional Rx) to fill the
/// power traces and labels.
Sample generate_sample(const ThzParams& params, const CodebookPair& codebooks, const GeometryDraw& geometry_draw,
                       std::uint64_t seed, LabelSource labels = LabelSource::hierarchical);

/// Rebuilds the channel a sample was measured on.
ChannelRealization reconstruct_channel(const ThzParams& params, const CodebookPair& codebooks, const Sample& sample);

/// Bounded logarithmic normalization into [0, 1].
double normalize_power(double p, double p_floor, double p_ceil);

struct PowerBounds {
    double floor = 0.0;
    double ceil = 1.0;

    bool operator==(const PowerBounds&) const = default;
};

struct NormalizationConstants {
    PowerBounds tx;
    PowerBounds rx;

    bool operator==(const NormalizationConstants&) const = default;
};

/// Linear-interpolated percentile (q in [0, 100]) of a non-empty set.
double percentile(std::vector<double> values, double q);

/// 0.1 / 99.9 percentile bounds per side over all p_tx and p_rx entries.
NormalizationConstants compute_normalization(std::span<const Sample> train);

struct DatasetManifest {
    std::uint32_t format_version = dataset_format_version;
    std::size_t n_antennas = 0;
    std::size_t branching = 2;
    ThzParams params;
    double radius_m = 50.0;
    double min_distance_m = 1.0;
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    std::uint64_t seed = 0;
    std::string split = "train";
    LabelSource label_source = LabelSource::hierarchical;
    NormalizationConstants norm;

    void validate() const;
    std::size_t trace_length() const; // M log_M N
    std::size_t record_size() const;  // bytes per packed sample
    std::size_t expected_count() const { return split == "test" ? test_count : train_count; }

    /// Canonical JSON text, keys sorted, no whitespace.
    std::string to_json() const;
    static DatasetManifest from_json(std::string_view text);
};

struct Dataset {
    DatasetManifest manifest;
    std::vector<Sample> samples;
};

std::string serialize_dataset(const Dataset& dataset);
Dataset parse_dataset(std::string_view bytes);

void write_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset(const std::filesystem::path& path);

struct DatagenConfig {
    std::size_t n_antennas = 16;
    std::size_t branching = 2;
    ThzParams params;
    GeometryDraw geometry;
    std::size_t train_count = 10000;
    std::size_t test_count = 2000;
    LabelSource labels = LabelSource::hierarchical;
    std::size_t threads = 1;

    void validate() const;
};

struct DatasetSplits {
    Dataset train;
    Dataset test;
};

/// Per-sample seeds are derived from (seed, split, index), so the splits never
/// share a seed. Normalization constants come from the train split only and
/// are stored in both manifests.
DatasetSplits generate_dataset(const DatagenConfig& config, std::uint64_t seed);

/// Writes train.thzbt and test.thzbt into `out_dir` and returns their paths.
std::pair<std::filesystem::path, std::filesystem::path> write_dataset_files(const std::filesystem::path& out_dir,
                                                                            const DatasetSplits& splits);

} // namespace beamforge
