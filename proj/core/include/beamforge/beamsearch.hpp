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
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "beamforge/channel.hpp"
#include "beamforge/codebook.hpp"

namespace beamforge {

class SearchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The only path by which search code touches the channel. Every call to
/// measure() is one beam-pair power measurement and bumps the counter by one.
/// Not thread-safe; use one oracle per search.
class MeasurementOracle {
public:
    virtual ~MeasurementOracle() = default;

    double measure(const Codeword& tx, const Codeword& rx)
    {
        ++count_;
        return evaluate(tx, rx);
    }

    std::size_t count() const { return count_; }
    void reset_count() { count_ = 0; }

protected:
    virtual double evaluate(const Codeword& tx, const Codeword& rx) = 0;

private:
    std::size_t count_ = 0;
};

/// Measures gamma |w_R^H H w_T|^2 on a rank-1 channel realization using the
/// factored form, caching the per-codeword array projections of the codebook
/// pair it was built over. Holds references: channel, params and codebooks
/// must outlive the oracle.
class ChannelOracle final : public MeasurementOracle {
public:
    ChannelOracle(const ChannelRealization& channel, const ThzParams& params, const CodebookPair& codebooks,
                  std::uint64_t noise_seed = 0);

    /// Noiseless power of a pair without counting a measurement. Used to score
    /// a pair after a protocol has finished.
    double true_power(const Codeword& tx, const Codeword& rx);

protected:
    double evaluate(const Codeword& tx, const Codeword& rx) override;

private:
    cdouble projection(const Codeword& w, const HierarchicalCodebook& book, const CVector& response,
                       std::vector<std::vector<std::optional<cdouble>>>& cache, bool conjugate_beam) const;
    cdouble combined(const Codeword& tx, const Codeword& rx);

    const ChannelRealization* channel_;
    const ThzParams* params_;
    const CodebookPair* codebooks_;
    CVector a_tx_;
    CVector a_rx_;
    cdouble scale_;
    Rng noise_rng_;
    std::vector<std::vector<std::optional<cdouble>>> tx_cache_;
    std::vector<std::vector<std::optional<cdouble>>> rx_cache_;
};

/// Wraps an arbitrary callable; mostly for tests.
class FunctionOracle final : public MeasurementOracle {
public:
    using Fn = std::function<double(const Codeword&, const Codeword&)>;
    explicit FunctionOracle(Fn fn) : fn_(std::move(fn)) {}

protected:
    double evaluate(const Codeword& tx, const Codeword& rx) override { return fn_(tx, rx); }

private:
    Fn fn_;
};

struct SearchResult {
    std::size_t tx_layer = 0;
    std::size_t tx_index = 1;
    std::size_t rx_layer = 0;
    std::size_t rx_index = 1;
    double power = 0.0;
    std::size_t measurements = 0;
    /// Rx-side powers in measurement order (stage-major for tree searches).
    std::vector<double> p_rx_trace;
    /// Tx-side powers in measurement order.
    std::vector<double> p_tx_trace;
    /// Joint-pair powers (exhaustive, both-side tree) in measurement order.
    std::vector<double> joint_trace;
};

enum class Protocol { exhaustive, one_side, one_side_tree, both_side_tree, adaptive };

std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view name);
std::span<const Protocol> all_protocols();

/// Every (tx, rx) pair of the two narrow-layer codebooks. Ties go to the
/// lexicographically smallest (tx_index, rx_index), independent of the order
/// in which the spans list the codewords.
SearchResult exhaustive_search(MeasurementOracle& oracle, std::span<const Codeword> tx_narrow,
                               std::span<const Codeword> rx_narrow);

/// Rx sweep of all N narrow beams under the omni Tx, then Tx sweep under the
/// winning Rx beam: 2N measurements.
SearchResult one_side_sweep(MeasurementOracle& oracle, const CodebookPair& codebooks);

/// M-way descent of the Rx tree under the omni Tx, then of the Tx tree with
/// the Rx held at its narrow winner: 2M log_M N measurements.
SearchResult one_side_tree_search(MeasurementOracle& oracle, const CodebookPair& codebooks, std::size_t branching);

/// Joint descent testing all M x M child pairs per stage: M^2 log_M N.
SearchResult both_side_tree_search(MeasurementOracle& oracle, const CodebookPair& codebooks, std::size_t branching);

/// Adaptive search is the binary both-side tree (4 log2 N measurements).
SearchResult adaptive_search(MeasurementOracle& oracle, const CodebookPair& codebooks);

SearchResult run_protocol(Protocol protocol, MeasurementOracle& oracle, const CodebookPair& codebooks);

/// The 2M live measurements consumed by the learned predictor: the M
/// first-layer Rx beams under the omni Tx, then the M first-layer Tx beams
/// with the Rx held at its best first-layer beam.
struct FirstLayerMeasurement {
    std::vector<double> tx_powers;
    std::vector<double> rx_powers;
    std::size_t rx_wide_index = 1;

    /// [p_1^T .. p_M^T, p_1^R .. p_M^R]
    std::vector<double> stacked() const;
};

FirstLayerMeasurement first_layer_sweep(MeasurementOracle& oracle, const CodebookPair& codebooks);

/// Closed-form measurement counts of the beam-training protocols.
namespace complexity {

std::uint64_t exhaustive(std::uint64_t n);
std::uint64_t one_side(std::uint64_t n);
std::uint64_t adaptive(std::uint64_t n);
double parallel(std::uint64_t n, std::uint64_t n_rf);
std::uint64_t one_side_tree(std::uint64_t n, std::uint64_t m);
std::uint64_t both_side_tree(std::uint64_t n, std::uint64_t m);
std::uint64_t proposed(std::uint64_t m);

std::uint64_t formula(Protocol protocol, std::uint64_t n, std::uint64_t m);

} // namespace complexity

} // namespace beamforge
