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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "beamforge/beamsearch.hpp"
#include "beamforge/channel.hpp"
#include "beamforge/datagen.hpp"
#include "beamforge/nn/graph.hpp"

namespace beamforge {

/// Shortest round-trip text form of a double ("%.17g").
std::string format_double(double v);

// ---------- metrics --------------------------------------------------------------

/// (p_exh - p_prop) / p_exh
double normalized_gain_loss(double p_exh, double p_prop);

struct GainLossRecord {
    double p_exh = 0.0;
    double p_prop = 0.0;
    double delta_norm = 0.0;
};

struct CdfPoint {
    double x = 0.0;
    double f = 0.0;
};

/// Right-continuous empirical CDF: one point per distinct value, sorted, with
/// F(x) = #{v <= x} / n. The last point has F = 1.
std::vector<CdfPoint> empirical_cdf(std::span<const double> values);

/// Evaluates the step function at an arbitrary x.
double cdf_at(std::span<const CdfPoint> cdf, double x);

struct SummaryStats {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double p80 = 0.0;
    double p95 = 0.0;
};

SummaryStats summarize(std::span<const double> values);

// ---------- configuration ----------------------------------------------------------

/// Evaluation-time beam selectors. The classical protocols run a search; the
/// rest select from the 2M first-layer measurements (or nothing, for random).
enum class Selector { exhaustive, one_side, one_side_tree, both_side_tree, adaptive, proposed, random, first_layer };

std::string_view to_string(Selector s);
Selector parse_selector(std::string_view name);
std::optional<Protocol> as_protocol(Selector s);

struct EvalConfig {
    std::size_t n_antennas = 64;
    std::size_t branching = 2;
    ThzParams params;
    GeometryDraw geometry;
    std::size_t distance_bins = 10;
    std::size_t trials = 10000;
    std::vector<Selector> selectors{Selector::exhaustive, Selector::one_side_tree};
    std::uint64_t seed = 1;
    std::size_t threads = 1;

    void validate() const;
    /// Bin edges: distance_bins equal-width bins over [min_distance_m, radius_m].
    std::vector<double> bin_edges() const;
    std::size_t bin_of(double distance_m) const;
};

/// Network and normalization used by the `proposed` selector.
struct LearnedPredictor {
    const nn::ComputationGraph* graph = nullptr;
    std::optional<NormalizationConstants> norms;
};

// ---------- experiments ----------------------------------------------------------

struct TrialOutcome {
    std::size_t trial = 0;
    double distance_m = 0.0;
    Selector selector = Selector::exhaustive;
    std::size_t tx_index = 1;
    std::size_t rx_index = 1;
    double power = 0.0;
    std::size_t measurements = 0;
};

/// Draws the channel of evaluation trial `trial` and runs one selector on it.
/// The reported power is the noiseless power of the chosen narrow pair.
TrialOutcome run_selector(Selector selector, const EvalConfig& config, const CodebookPair& codebooks,
                          const ChannelRealization& channel, std::size_t trial, const LearnedPredictor& learned);

ChannelRealization draw_trial_channel(const EvalConfig& config, std::size_t trial);

struct PowerVsDistance {
    std::vector<double> bin_edges;
    std::vector<Selector> selectors;
    std::vector<std::size_t> counts;            // per bin
    std::vector<std::vector<double>> mean_power; // [bin][selector]
    std::vector<TrialOutcome> outcomes;          // trial-major, selector-minor

    std::string table_csv() const;
    std::string trials_csv() const;
};

/// Throws std::invalid_argument when `proposed` is requested without a graph.
PowerVsDistance power_vs_distance(const EvalConfig& config, const LearnedPredictor& learned = {});

struct ComplexityRow {
    std::string protocol;
    std::size_t n = 0;
    std::size_t m = 0;
    double formula = 0.0;
    std::optional<std::size_t> measured; // empty for protocols not simulated
};

/// Formula and oracle-measured counts for every protocol at each N.
std::vector<ComplexityRow> complexity_table(std::span<const std::size_t> n_list, std::size_t m,
                                            std::size_t n_rf = 4, std::uint64_t seed = 1);
std::string complexity_csv(std::span<const ComplexityRow> rows);

struct GainLossCdf {
    Selector selector = Selector::proposed;
    std::vector<GainLossRecord> records;
    std::vector<CdfPoint> cdf;
    SummaryStats stats;

    std::string cdf_csv() const;
    std::string summary_csv() const;
};

/// Delta_norm of `selector` against exhaustive search over config.trials
/// independent channel draws.
GainLossCdf run_gain_loss_cdf(const EvalConfig& config, Selector selector, const LearnedPredictor& learned = {});

} // namespace beamforge
