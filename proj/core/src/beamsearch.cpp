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

#include "beamforge/beamsearch.hpp"

#include <array>
#include <cmath>

namespace beamforge {

// ---------- oracle ------------------------------------------------------------

namespace {

std::vector<std::vector<std::optional<cdouble>>> make_cache(const HierarchicalCodebook& book)
{
    std::vector<std::vector<std::optional<cdouble>>> cache(book.depth() + 1);
    for (std::size_t k = 0; k <= book.depth(); ++k)
        cache[k].resize(book.layer(k).size());
    return cache;
}

} // namespace

ChannelOracle::ChannelOracle(const ChannelRealization& channel, const ThzParams& params,
                             const CodebookPair& codebooks, std::uint64_t noise_seed)
    : channel_(&channel),
      params_(&params),
      codebooks_(&codebooks),
      a_tx_(steering_vector(channel.n_tx, channel.geometry.aod_u)),
      a_rx_(steering_vector(channel.n_rx, channel.geometry.aoa_u)),
      scale_(std::sqrt(params.snr_linear()) * channel.amplitude()),
      noise_rng_(noise_seed),
      tx_cache_(make_cache(codebooks.tx)),
      rx_cache_(make_cache(codebooks.rx))
{
    if (codebooks.tx.n_antennas() != channel.n_tx || codebooks.rx.n_antennas() != channel.n_rx)
        throw SearchError("codebook sizes do not match the channel dimensions");
}

cdouble ChannelOracle::projection(const Codeword& w, const HierarchicalCodebook& book, const CVector& response,
                                  std::vector<std::vector<std::optional<cdouble>>>& cache,
                                  bool conjugate_beam) const
{
    const auto direct = [&] {
        return conjugate_beam ? inner_product(w.coeffs, response) : inner_product(response, w.coeffs);
    };
    // Cache hits only for codewords that live inside the codebook we were
    // built over; anything else is evaluated directly.
    if (w.layer > book.depth())
        return direct();
    const auto layer = book.layer(w.layer);
    if (w.index < 1 || w.index > layer.size() || &layer[w.index - 1] != &w)
        return direct();
    auto& slot = cache[w.layer][w.index - 1];
    if (!slot)
        slot = direct();
    return *slot;
}

cdouble ChannelOracle::combined(const Codeword& tx, const Codeword& rx)
{
    if (tx.coeffs.size() != channel_->n_tx || rx.coeffs.size() != channel_->n_rx)
        throw ContractViolation("oracle: codeword length does not match the channel");
    const cdouble rx_gain = projection(rx, codebooks_->rx, a_rx_, rx_cache_, true);
    const cdouble tx_gain = projection(tx, codebooks_->tx, a_tx_, tx_cache_, false);
    return scale_ * rx_gain * tx_gain;
}

double ChannelOracle::evaluate(const Codeword& tx, const Codeword& rx)
{
    cdouble y = combined(tx, rx);
    if (params_->noise_enabled)
        y += std::sqrt(params_->noise_power) * complex_gaussian(noise_rng_);
    return std::norm(y);
}

double ChannelOracle::true_power(const Codeword& tx, const Codeword& rx) { return std::norm(combined(tx, rx)); }

// ---------- protocol names -----------------------------------------------------

namespace {

constexpr std::array<Protocol, 5> protocol_list{Protocol::exhaustive, Protocol::one_side, Protocol::one_side_tree,
                                                Protocol::both_side_tree, Protocol::adaptive};

} // namespace

std::string_view to_string(Protocol p)
{
    switch (p) {
    case Protocol::exhaustive: return "exhaustive";
    case Protocol::one_side: return "one-side";
    case Protocol::one_side_tree: return "one-side-tree";
    case Protocol::both_side_tree: return "both-side-tree";
    case Protocol::adaptive: return "adaptive";
    }
    return "unknown";
}

Protocol parse_protocol(std::string_view name)
{
    for (auto p : protocol_list)
        if (to_string(p) == name)
            return p;
    throw SearchError("unknown protocol '" + std::string(name) + "'");
}

std::span<const Protocol> all_protocols() { return protocol_list; }

// ---------- protocols ----------------------------------------------------------

namespace {

void require_branching(const CodebookPair& codebooks, std::size_t branching)
{
    if (codebooks.tx.branching() != branching || codebooks.rx.branching() != branching)
        throw SearchError("search branching " + std::to_string(branching) +
                          " does not match the codebook branching factor");
}

void require_tree(const CodebookPair& codebooks)
{
    if (codebooks.tx.depth() == 0 || codebooks.rx.depth() == 0)
        throw SearchError("tree search needs at least one layer below the omni codeword (N >= M)");
}

void require_square(const CodebookPair& codebooks)
{
    if (codebooks.tx.n_antennas() != codebooks.rx.n_antennas())
        throw SearchError("protocol requires N_T == N_R");
}

/// Descends one side's tree with the other side fixed. `measure_child(cw)`
/// returns the power with the child codeword on the descending side.
template <typename MeasureFn>
std::size_t descend(const HierarchicalCodebook& book, std::vector<double>& trace, MeasureFn&& measure_child,
                    double& best_power)
{
    std::size_t index = 1;
    best_power = 0.0;
    for (std::size_t k = 0; k < book.depth(); ++k) {
        std::size_t best_child = 0;
        double best = -1.0;
        for (std::size_t child : book.children(k, index)) {
            const double p = measure_child(book.codeword(k + 1, child));
            trace.push_back(p);
            if (p > best) {
                best = p;
                best_child = child;
            }
        }
        index = best_child;
        best_power = best;
    }
    return index;
}

} // namespace

SearchResult exhaustive_search(MeasurementOracle& oracle, std::span<const Codeword> tx_narrow,
                               std::span<const Codeword> rx_narrow)
{
    if (tx_narrow.empty() || rx_narrow.empty())
        throw SearchError("exhaustive_search: empty codebook");

    const std::size_t start = oracle.count();
    SearchResult r;
    r.joint_trace.reserve(tx_narrow.size() * rx_narrow.size());
    bool have_best = false;
    for (const auto& tx : tx_narrow) {
        for (const auto& rx : rx_narrow) {
            const double p = oracle.measure(tx, rx);
            r.joint_trace.push_back(p);
            const bool better = !have_best || p > r.power ||
                                (p == r.power && std::pair(tx.index, rx.index) < std::pair(r.tx_index, r.rx_index));
            if (better) {
                have_best = true;
                r.power = p;
                r.tx_layer = tx.layer;
                r.tx_index = tx.index;
                r.rx_layer = rx.layer;
                r.rx_index = rx.index;
            }
        }
    }
    r.measurements = oracle.count() - start;
    return r;
}

SearchResult one_side_sweep(MeasurementOracle& oracle, const CodebookPair& codebooks)
{
    require_square(codebooks);
    const std::size_t start = oracle.count();
    SearchResult r;

    const Codeword& omni = codebooks.tx.omni();
    const auto rx_narrow = codebooks.rx.narrow();
    const Codeword* best_rx = nullptr;
    double best = -1.0;
    for (const auto& rx : rx_narrow) {
        const double p = oracle.measure(omni, rx);
        r.p_rx_trace.push_back(p);
        if (p > best) {
            best = p;
            best_rx = &rx;
        }
    }

    best = -1.0;
    const Codeword* best_tx = nullptr;
    for (const auto& tx : codebooks.tx.narrow()) {
        const double p = oracle.measure(tx, *best_rx);
        r.p_tx_trace.push_back(p);
        if (p > best) {
            best = p;
            best_tx = &tx;
        }
    }

    r.tx_layer = best_tx->layer;
    r.tx_index = best_tx->index;
    r.rx_layer = best_rx->layer;
    r.rx_index = best_rx->index;
    r.power = best;
    r.measurements = oracle.count() - start;
    return r;
}

SearchResult one_side_tree_search(MeasurementOracle& oracle, const CodebookPair& codebooks, std::size_t branching)
{
    require_branching(codebooks, branching);
    require_tree(codebooks);
    const std::size_t start = oracle.count();
    SearchResult r;
    r.p_rx_trace.reserve(branching * codebooks.rx.depth());
    r.p_tx_trace.reserve(branching * codebooks.tx.depth());

    const Codeword& omni = codebooks.tx.omni();
    double rx_power = 0.0;
    const std::size_t rx_index = descend(
        codebooks.rx, r.p_rx_trace, [&](const Codeword& rx) { return oracle.measure(omni, rx); }, rx_power);
    const std::size_t rx_layer = codebooks.rx.depth();
    const Codeword& rx_best = codebooks.rx.codeword(rx_layer, rx_index);

    double tx_power = 0.0;
    const std::size_t tx_index = descend(
        codebooks.tx, r.p_tx_trace, [&](const Codeword& tx) { return oracle.measure(tx, rx_best); }, tx_power);

    r.rx_layer = rx_layer;
    r.rx_index = rx_index;
    r.tx_layer = codebooks.tx.depth();
    r.tx_index = tx_index;
    r.power = tx_power;
    r.measurements = oracle.count() - start;
    return r;
}

SearchResult both_side_tree_search(MeasurementOracle& oracle, const CodebookPair& codebooks, std::size_t branching)
{
    require_branching(codebooks, branching);
    require_tree(codebooks);
    require_square(codebooks);
    const std::size_t start = oracle.count();
    SearchResult r;

    const auto& tx_book = codebooks.tx;
    const auto& rx_book = codebooks.rx;
    std::size_t tx_index = 1;
    std::size_t rx_index = 1;
    double best_power = 0.0;
    for (std::size_t k = 0; k < tx_book.depth(); ++k) {
        std::size_t best_tx = 0;
        std::size_t best_rx = 0;
        double best = -1.0;
        for (std::size_t t : tx_book.children(k, tx_index)) {
            const Codeword& tx = tx_book.codeword(k + 1, t);
            for (std::size_t q : rx_book.children(k, rx_index)) {
                const double p = oracle.measure(tx, rx_book.codeword(k + 1, q));
                r.joint_trace.push_back(p);
                if (p > best) {
                    best = p;
                    best_tx = t;
                    best_rx = q;
                }
            }
        }
        tx_index = best_tx;
        rx_index = best_rx;
        best_power = best;
    }

    r.tx_layer = tx_book.depth();
    r.tx_index = tx_index;
    r.rx_layer = rx_book.depth();
    r.rx_index = rx_index;
    r.power = best_power;
    r.measurements = oracle.count() - start;
    return r;
}

SearchResult adaptive_search(MeasurementOracle& oracle, const CodebookPair& codebooks)
{
    return both_side_tree_search(oracle, codebooks, 2);
}

SearchResult run_protocol(Protocol protocol, MeasurementOracle& oracle, const CodebookPair& codebooks)
{
    switch (protocol) {
    case Protocol::exhaustive: return exhaustive_search(oracle, codebooks.tx.narrow(), codebooks.rx.narrow());
    case Protocol::one_side: return one_side_sweep(oracle, codebooks);
    case Protocol::one_side_tree: return one_side_tree_search(oracle, codebooks, codebooks.tx.branching());
    case Protocol::both_side_tree: return both_side_tree_search(oracle, codebooks, codebooks.tx.branching());
    case Protocol::adaptive: return adaptive_search(oracle, codebooks);
    }
    throw SearchError("unhandled protocol");
}

// ---------- first-layer measurements -------------------------------------------

std::vector<double> FirstLayerMeasurement::stacked() const
{
    std::vector<double> out(tx_powers);
    out.insert(out.end(), rx_powers.begin(), rx_powers.end());
    return out;
}

FirstLayerMeasurement first_layer_sweep(MeasurementOracle& oracle, const CodebookPair& codebooks)
{
    if (codebooks.tx.depth() == 0 || codebooks.rx.depth() == 0)
        throw SearchError("first_layer_sweep: codebooks have no first layer");

    FirstLayerMeasurement m;
    const Codeword& omni = codebooks.tx.omni();
    double best = -1.0;
    for (const auto& rx : codebooks.rx.layer(1)) {
        const double p = oracle.measure(omni, rx);
        m.rx_powers.push_back(p);
        if (p > best) {
            best = p;
            m.rx_wide_index = rx.index;
        }
    }
    const Codeword& rx_wide = codebooks.rx.codeword(1, m.rx_wide_index);
    for (const auto& tx : codebooks.tx.layer(1))
        m.tx_powers.push_back(oracle.measure(tx, rx_wide));
    return m;
}

// ---------- closed-form counts ---------------------------------------------------

namespace complexity {

namespace {

std::uint64_t log_exact(std::uint64_t n, std::uint64_t m)
{
    return exact_log(static_cast<std::size_t>(n), static_cast<std::size_t>(m));
}

} // namespace

std::uint64_t exhaustive(std::uint64_t n) { return n * n; }
std::uint64_t one_side(std::uint64_t n) { return 2 * n; }
std::uint64_t adaptive(std::uint64_t n) { return 4 * log_exact(n, 2); }
double parallel(std::uint64_t n, std::uint64_t n_rf)
{
    if (n_rf == 0)
        throw SearchError("parallel search needs at least one RF chain");
    return static_cast<double>(n * n) / static_cast<double>(n_rf);
}
std::uint64_t one_side_tree(std::uint64_t n, std::uint64_t m) { return 2 * m * log_exact(n, m); }
std::uint64_t both_side_tree(std::uint64_t n, std::uint64_t m) { return m * m * log_exact(n, m); }
std::uint64_t proposed(std::uint64_t m) { return 2 * m; }

std::uint64_t formula(Protocol protocol, std::uint64_t n, std::uint64_t m)
{
    switch (protocol) {
    case Protocol::exhaustive: return exhaustive(n);
    case Protocol::one_side: return one_side(n);
    case Protocol::one_side_tree: return one_side_tree(n, m);
    case Protocol::both_side_tree: return both_side_tree(n, m);
    case Protocol::adaptive: return adaptive(n);
    }
    throw SearchError("unhandled protocol");
}

} // namespace complexity

} // namespace beamforge
