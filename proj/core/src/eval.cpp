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

#include "beamforge/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "beamforge/nn/predict.hpp"
#include "beamforge/parallel.hpp"

namespace beamforge {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------- metrics --------------------------------------------------------------

double normalized_gain_loss(double p_exh, double p_prop)
{
    if (!(p_exh > 0.0))
        throw std::invalid_argument("normalized_gain_loss: p_exh must be positive");
    if (!(p_prop >= 0.0))
        throw std::invalid_argument("normalized_gain_loss: p_prop must be non-negative");
    return (p_exh - p_prop) / p_exh;
}

std::vector<CdfPoint> empirical_cdf(std::span<const double> values)
{
    if (values.empty())
        throw std::invalid_argument("empirical_cdf: no values");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<CdfPoint> cdf;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i])
            continue;
        cdf.push_back({sorted[i], static_cast<double>(i + 1) / n});
    }
    cdf.back().f = 1.0;
    return cdf;
}

double cdf_at(std::span<const CdfPoint> cdf, double x)
{
    auto it = std::upper_bound(cdf.begin(), cdf.end(), x, [](double v, const CdfPoint& p) { return v < p.x; });
    if (it == cdf.begin())
        return 0.0;
    return std::prev(it)->f;
}

SummaryStats summarize(std::span<const double> values)
{
    if (values.empty())
        throw std::invalid_argument("summarize: no values");
    SummaryStats s;
    s.count = values.size();
    double acc = 0.0;
    for (double v : values)
        acc += v;
    s.mean = acc / static_cast<double>(values.size());
    const std::vector<double> v(values.begin(), values.end());
    s.median = percentile(v, 50.0);
    s.p80 = percentile(v, 80.0);
    s.p95 = percentile(v, 95.0);
    return s;
}

// ---------- selectors ------------------------------------------------------------

namespace {

constexpr std::array<std::pair<Selector, std::string_view>, 8> selector_names{{
    {Selector::exhaustive, "exhaustive"},
    {Selector::one_side, "one-side"},
    {Selector::one_side_tree, "one-side-tree"},
    {Selector::both_side_tree, "both-side-tree"},
    {Selector::adaptive, "adaptive"},
    {Selector::proposed, "proposed"},
    {Selector::random, "random"},
    {Selector::first_layer, "first-layer"},
}};

} // namespace

std::string_view to_string(Selector s)
{
    for (const auto& [k, name] : selector_names)
        if (k == s)
            return name;
    return "unknown";
}

Selector parse_selector(std::string_view name)
{
    for (const auto& [k, n] : selector_names)
        if (n == name)
            return k;
    throw std::invalid_argument("unknown protocol/predictor '" + std::string(name) + "'");
}

std::optional<Protocol> as_protocol(Selector s)
{
    switch (s) {
    case Selector::exhaustive: return Protocol::exhaustive;
    case Selector::one_side: return Protocol::one_side;
    case Selector::one_side_tree: return Protocol::one_side_tree;
    case Selector::both_side_tree: return Protocol::both_side_tree;
    case Selector::adaptive: return Protocol::adaptive;
    default: return std::nullopt;
    }
}

// ---------- config -----------------------------------------------------------------

void EvalConfig::validate() const
{
    params.validate();
    geometry.validate();
    exact_log(n_antennas, branching);
    if (n_antennas < branching)
        throw std::invalid_argument("evaluation needs N >= M");
    if (distance_bins == 0)
        throw std::invalid_argument("need at least one distance bin");
    if (trials == 0)
        throw std::invalid_argument("trials must be positive");
    if (selectors.empty())
        throw std::invalid_argument("no protocols requested");
}

std::vector<double> EvalConfig::bin_edges() const
{
    std::vector<double> edges(distance_bins + 1);
    const double lo = geometry.min_distance_m, hi = geometry.radius_m;
    for (std::size_t i = 0; i <= distance_bins; ++i)
        edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(distance_bins);
    return edges;
}

std::size_t EvalConfig::bin_of(double distance_m) const
{
    const double lo = geometry.min_distance_m, hi = geometry.radius_m;
    const double pos = (distance_m - lo) / (hi - lo) * static_cast<double>(distance_bins);
    if (!(pos >= 0.0))
        return 0;
    return std::min(static_cast<std::size_t>(pos), distance_bins - 1);
}

// ---------- trials -------------------------------------------------------------------

ChannelRealization draw_trial_channel(const EvalConfig& config, std::size_t trial)
{
    Rng rng(derive_seed(config.seed, SeedStream::eval_trial, trial));
    const LinkGeometry g = config.geometry.draw(rng);
    const cdouble psi = complex_gaussian(rng);
    return make_channel(config.params, config.n_antennas, config.n_antennas, g, psi);
}

namespace {

std::uint64_t selector_seed(const EvalConfig& config, std::size_t trial, Selector s)
{
    return mix64(derive_seed(config.seed, SeedStream::noise, trial) + static_cast<std::uint64_t>(s));
}

// Narrow beam at the lower middle of the best first-layer beam's subtree.
std::size_t first_layer_guess(std::span<const double> powers, std::size_t n, std::size_t m)
{
    const auto best = static_cast<std::size_t>(std::max_element(powers.begin(), powers.end()) - powers.begin());
    const std::size_t span = n / m;
    return best * span + std::max<std::size_t>(span / 2, 1);
}

} // namespace

TrialOutcome run_selector(Selector selector, const EvalConfig& config, const CodebookPair& codebooks,
                          const ChannelRealization& channel, std::size_t trial, const LearnedPredictor& learned)
{
    ChannelOracle oracle(channel, config.params, codebooks, selector_seed(config, trial, selector));
    TrialOutcome out;
    out.trial = trial;
    out.distance_m = channel.geometry.distance_m;
    out.selector = selector;

    if (auto protocol = as_protocol(selector)) {
        const SearchResult r = run_protocol(*protocol, oracle, codebooks);
        out.tx_index = r.tx_index;
        out.rx_index = r.rx_index;
    } else if (selector == Selector::random) {
        Rng rng(selector_seed(config, trial, selector));
        std::uniform_int_distribution<std::size_t> pick(1, config.n_antennas);
        out.tx_index = pick(rng);
        out.rx_index = pick(rng);
    } else {
        const FirstLayerMeasurement m = first_layer_sweep(oracle, codebooks);
        if (selector == Selector::proposed) {
            if (learned.graph == nullptr)
                throw std::invalid_argument("the proposed selector needs a weights file");
            const std::vector<double> powers = m.stacked();
            const nn::Prediction p = nn::predict(*learned.graph, powers, learned.norms, codebooks);
            out.tx_index = p.tx_index;
            out.rx_index = p.rx_index;
        } else {
            out.tx_index = first_layer_guess(m.tx_powers, config.n_antennas, config.branching);
            out.rx_index = first_layer_guess(m.rx_powers, config.n_antennas, config.branching);
        }
    }

    out.measurements = oracle.count();
    const std::size_t k = codebooks.tx.depth();
    out.power = oracle.true_power(codebooks.tx.codeword(k, out.tx_index), codebooks.rx.codeword(k, out.rx_index));
    return out;
}

namespace {

void require_learned(std::span<const Selector> selectors, const LearnedPredictor& learned)
{
    for (auto s : selectors)
        if (s == Selector::proposed && learned.graph == nullptr)
            throw std::invalid_argument("protocol 'proposed' requested but no weights were supplied");
}

} // namespace

PowerVsDistance power_vs_distance(const EvalConfig& config, const LearnedPredictor& learned)
{
    config.validate();
    require_learned(config.selectors, learned);
    const CodebookPair codebooks = build_codebook_pair(config.n_antennas, config.branching);
    const std::size_t n_sel = config.selectors.size();

    PowerVsDistance result;
    result.bin_edges = config.bin_edges();
    result.selectors = config.selectors;
    result.outcomes.resize(config.trials * n_sel);
    parallel_for(config.trials, config.threads, [&](std::size_t t) {
        const ChannelRealization channel = draw_trial_channel(config, t);
        for (std::size_t s = 0; s < n_sel; ++s)
            result.outcomes[t * n_sel + s] = run_selector(config.selectors[s], config, codebooks, channel, t, learned);
    });

    // Reduce in trial order so the output is independent of the thread count.
    result.counts.assign(config.distance_bins, 0);
    result.mean_power.assign(config.distance_bins, std::vector<double>(n_sel, 0.0));
    for (std::size_t t = 0; t < config.trials; ++t) {
        const std::size_t bin = config.bin_of(result.outcomes[t * n_sel].distance_m);
        ++result.counts[bin];
        for (std::size_t s = 0; s < n_sel; ++s)
            result.mean_power[bin][s] += result.outcomes[t * n_sel + s].power;
    }
    for (std::size_t b = 0; b < config.distance_bins; ++b)
        for (auto& v : result.mean_power[b])
            v = result.counts[b] ? v / static_cast<double>(result.counts[b]) : 0.0;
    return result;
}

std::string PowerVsDistance::table_csv() const
{
    std::string out = "bin_lo,bin_hi,bin_center,count";
    for (auto s : selectors)
        out += "," + std::string(to_string(s));
    out += "\n";
    for (std::size_t b = 0; b < counts.size(); ++b) {
        out += format_double(bin_edges[b]) + "," + format_double(bin_edges[b + 1]) + "," +
               format_double(0.5 * (bin_edges[b] + bin_edges[b + 1])) + "," + std::to_string(counts[b]);
        for (double p : mean_power[b])
            out += "," + format_double(p);
        out += "\n";
    }
    return out;
}

std::string PowerVsDistance::trials_csv() const
{
    std::string out = "trial,distance_m,protocol,tx_index,rx_index,power,measurements\n";
    for (const auto& o : outcomes)
        out += std::to_string(o.trial) + "," + format_double(o.distance_m) + "," + std::string(to_string(o.selector)) +
               "," + std::to_string(o.tx_index) + "," + std::to_string(o.rx_index) + "," + format_double(o.power) +
               "," + std::to_string(o.measurements) + "\n";
    return out;
}

// ---------- complexity ---------------------------------------------------------------

std::vector<ComplexityRow> complexity_table(std::span<const std::size_t> n_list, std::size_t m, std::size_t n_rf,
                                            std::uint64_t seed)
{
    std::vector<ComplexityRow> rows;
    const ThzParams params;
    for (std::size_t n : n_list) {
        const CodebookPair codebooks = build_codebook_pair(n, m);
        Rng rng(derive_seed(seed, SeedStream::search_trial, n));
        const GeometryDraw draw;
        const ChannelRealization channel = make_channel(params, n, n, draw.draw(rng), complex_gaussian(rng));

        const auto measured = [&](auto&& run, const CodebookPair& books) {
            ChannelOracle oracle(channel, params, books);
            run(oracle, books);
            return oracle.count();
        };

        rows.push_back({"exhaustive", n, m, static_cast<double>(complexity::exhaustive(n)),
                        measured([](auto& o, auto& b) { exhaustive_search(o, b.tx.narrow(), b.rx.narrow()); },
                                 codebooks)});
        rows.push_back({"one-side", n, m, static_cast<double>(complexity::one_side(n)),
                        measured([](auto& o, auto& b) { one_side_sweep(o, b); }, codebooks)});

        bool power_of_two = true;
        try {
            exact_log(n, 2);
        } catch (const CodebookError&) {
            power_of_two = false;
        }
        if (power_of_two && n >= 2) {
            const CodebookPair binary = m == 2 ? codebooks : build_codebook_pair(n, 2);
            rows.push_back({"adaptive", n, 2, static_cast<double>(complexity::adaptive(n)),
                            measured([](auto& o, auto& b) { adaptive_search(o, b); }, binary)});
        }
        rows.push_back({"parallel", n, m, complexity::parallel(n, n_rf), std::nullopt});
        rows.push_back({"one-side-tree", n, m, static_cast<double>(complexity::one_side_tree(n, m)),
                        measured([m](auto& o, auto& b) { one_side_tree_search(o, b, m); }, codebooks)});
        rows.push_back({"both-side-tree", n, m, static_cast<double>(complexity::both_side_tree(n, m)),
                        measured([m](auto& o, auto& b) { both_side_tree_search(o, b, m); }, codebooks)});
        rows.push_back({"proposed", n, m, static_cast<double>(complexity::proposed(m)),
                        measured([](auto& o, auto& b) { first_layer_sweep(o, b); }, codebooks)});
    }
    return rows;
}

std::string complexity_csv(std::span<const ComplexityRow> rows)
{
    std::string out = "protocol,n,m,formula,measured\n";
    for (const auto& r : rows)
        out += r.protocol + "," + std::to_string(r.n) + "," + std::to_string(r.m) + "," + format_double(r.formula) +
               "," + (r.measured ? std::to_string(*r.measured) : std::string()) + "\n";
    return out;
}

// ---------- gain-loss CDF ------------------------------------------------------------

GainLossCdf run_gain_loss_cdf(const EvalConfig& config, Selector selector, const LearnedPredictor& learned)
{
    config.validate();
    const std::array<Selector, 1> requested{selector};
    require_learned(requested, learned);
    const CodebookPair codebooks = build_codebook_pair(config.n_antennas, config.branching);

    GainLossCdf result;
    result.selector = selector;
    result.records.resize(config.trials);
    parallel_for(config.trials, config.threads, [&](std::size_t t) {
        const ChannelRealization channel = draw_trial_channel(config, t);
        const TrialOutcome exh = run_selector(Selector::exhaustive, config, codebooks, channel, t, learned);
        const TrialOutcome prop = selector == Selector::exhaustive
                                      ? exh
                                      : run_selector(selector, config, codebooks, channel, t, learned);
        result.records[t] = {exh.power, prop.power, normalized_gain_loss(exh.power, prop.power)};
    });

    std::vector<double> deltas;
    deltas.reserve(result.records.size());
    for (const auto& r : result.records)
        deltas.push_back(r.delta_norm);
    result.cdf = empirical_cdf(deltas);
    result.stats = summarize(deltas);
    return result;
}

std::string GainLossCdf::cdf_csv() const
{
    std::string out = "delta_norm,cdf\n";
    for (const auto& p : cdf)
        out += format_double(p.x) + "," + format_double(p.f) + "\n";
    return out;
}

std::string GainLossCdf::summary_csv() const
{
    return "predictor,trials,mean,median,p80,p95\n" + std::string(to_string(selector)) + "," +
           std::to_string(stats.count) + "," + format_double(stats.mean) + "," + format_double(stats.median) + "," +
           format_double(stats.p80) + "," + format_double(stats.p95) + "\n";
}

} // namespace beamforge
