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

#include "beamforge/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "beamforge/detail/binary_io.hpp"
#include "beamforge/parallel.hpp"

namespace beamforge {

using detail::FormatError;
using json = nlohmann::json;

void GeometryDraw::validate() const
{
    if (!(min_distance_m > 0.0))
        throw std::invalid_argument("min_distance_m must be positive");
    if (!(radius_m > min_distance_m))
        throw std::invalid_argument("radius_m must exceed min_distance_m");
}

LinkGeometry GeometryDraw::draw(Rng& rng) const
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    LinkGeometry g;
    // R - U (R - d_min) with U in [0, 1) lands in (d_min, R].
    g.distance_m = radius_m - unit(rng) * (radius_m - min_distance_m);
    g.aod_u = -1.0 + 2.0 * unit(rng);
    g.aoa_u = -1.0 + 2.0 * unit(rng);
    return g;
}

std::string_view to_string(LabelSource s)
{
    return s == LabelSource::exhaustive ? "exhaustive" : "hierarchical";
}

LabelSource parse_label_source(std::string_view name)
{
    if (name == "hierarchical")
        return LabelSource::hierarchical;
    if (name == "exhaustive")
        return LabelSource::exhaustive;
    throw std::invalid_argument("unknown label source '" + std::string(name) + "'");
}

Sample generate_sample(const ThzParams& params, const CodebookPair& codebooks, const GeometryDraw& geometry_draw,
                       std::uint64_t seed, LabelSource labels)
{
    Rng rng(seed);
    const LinkGeometry geometry = geometry_draw.draw(rng);
    if (!(geometry.distance_m > 0.0))
        throw std::domain_error("generate_sample: degenerate link distance");
    const cdouble psi = complex_gaussian(rng);
    const ChannelRealization channel = make_channel(params, codebooks.tx.n_antennas(), codebooks.rx.n_antennas(),
                                                    geometry, psi);

    ChannelOracle oracle(channel, params, codebooks, rng());
    const SearchResult tree = one_side_tree_search(oracle, codebooks, codebooks.tx.branching());

    Sample s;
    s.distance_m = geometry.distance_m;
    s.aod_u = geometry.aod_u;
    s.aoa_u = geometry.aoa_u;
    s.psi_re = psi.real();
    s.psi_im = psi.imag();
    s.p_rx = tree.p_rx_trace;
    s.p_tx = tree.p_tx_trace;

    const std::size_t m = codebooks.tx.branching();
    s.first_layer_powers.assign(s.p_tx.begin(), s.p_tx.begin() + static_cast<std::ptrdiff_t>(m));
    s.first_layer_powers.insert(s.first_layer_powers.end(), s.p_rx.begin(),
                                s.p_rx.begin() + static_cast<std::ptrdiff_t>(m));

    if (labels == LabelSource::exhaustive) {
        ChannelOracle exhaustive_oracle(channel, params, codebooks, rng());
        const SearchResult best = exhaustive_search(exhaustive_oracle, codebooks.tx.narrow(), codebooks.rx.narrow());
        s.label_tx_index = static_cast<std::uint32_t>(best.tx_index);
        s.label_rx_index = static_cast<std::uint32_t>(best.rx_index);
        s.label_power = best.power;
    } else {
        s.label_tx_index = static_cast<std::uint32_t>(tree.tx_index);
        s.label_rx_index = static_cast<std::uint32_t>(tree.rx_index);
        s.label_power = tree.power;
    }
    return s;
}

ChannelRealization reconstruct_channel(const ThzParams& params, const CodebookPair& codebooks, const Sample& sample)
{
    return make_channel(params, codebooks.tx.n_antennas(), codebooks.rx.n_antennas(), sample.geometry(),
                        sample.psi());
}

double normalize_power(double p, double p_floor, double p_ceil)
{
    if (!(p_floor > 0.0) || !(p_ceil > p_floor) || !std::isfinite(p_ceil))
        throw std::invalid_argument("normalize_power: need 0 < p_floor < p_ceil");
    if (!(p >= 0.0))
        throw std::invalid_argument("normalize_power: negative power");
    const double lo = std::log10(p_floor);
    const double x = (std::log10(std::max(p, p_floor)) - lo) / (std::log10(p_ceil) - lo);
    return std::clamp(x, 0.0, 1.0);
}

double percentile(std::vector<double> values, double q)
{
    if (values.empty())
        throw std::invalid_argument("percentile of an empty set");
    if (!(q >= 0.0 && q <= 100.0))
        throw std::invalid_argument("percentile rank outside [0, 100]");
    std::sort(values.begin(), values.end());
    const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

PowerBounds bounds_of(std::vector<double> powers)
{
    double smallest_positive = std::numeric_limits<double>::max();
    for (double p : powers)
        if (p > 0.0)
            smallest_positive = std::min(smallest_positive, p);
    if (smallest_positive == std::numeric_limits<double>::max())
        throw std::invalid_argument("normalization: no positive powers in the train split");

    PowerBounds b;
    b.floor = percentile(powers, 0.1);
    b.ceil = percentile(std::move(powers), 99.9);
    if (!(b.floor > 0.0))
        b.floor = smallest_positive;
    if (!(b.ceil > b.floor))
        b.ceil = b.floor * 10.0;
    return b;
}

} // namespace

NormalizationConstants compute_normalization(std::span<const Sample> train)
{
    if (train.empty())
        throw std::invalid_argument("normalization needs a non-empty train split");
    std::vector<double> tx;
    std::vector<double> rx;
    for (const auto& s : train) {
        tx.insert(tx.end(), s.p_tx.begin(), s.p_tx.end());
        rx.insert(rx.end(), s.p_rx.begin(), s.p_rx.end());
    }
    return {bounds_of(std::move(tx)), bounds_of(std::move(rx))};
}

// ---------- manifest -------------------------------------------------------------

void DatasetManifest::validate() const
{
    if (format_version != dataset_format_version)
        throw FormatError("unsupported dataset format version " + std::to_string(format_version));
    exact_log(n_antennas, branching);
    if (n_antennas < branching)
        throw FormatError("dataset needs N >= M");
    if (train_count == 0 || test_count == 0)
        throw FormatError("dataset sample counts must be positive");
    if (split != "train" && split != "test")
        throw FormatError("dataset split must be 'train' or 'test'");
    if (!(norm.tx.floor > 0.0 && norm.tx.floor < norm.tx.ceil) ||
        !(norm.rx.floor > 0.0 && norm.rx.floor < norm.rx.ceil))
        throw FormatError("dataset normalization bounds must satisfy 0 < p_floor < p_ceil");
    params.validate();
}

std::size_t DatasetManifest::trace_length() const { return branching * exact_log(n_antennas, branching); }

std::size_t DatasetManifest::record_size() const
{
    const std::size_t doubles = 5 + 2 * trace_length() + 2 * branching + 1;
    return doubles * sizeof(double) + 2 * sizeof(std::uint32_t);
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j)
{
    if (j.is_null())
        return std::nullopt;
    return j.get<double>();
}

} // namespace

std::string DatasetManifest::to_json() const
{
    json j;
    j["format_version"] = format_version;
    j["n_antennas"] = n_antennas;
    j["branching"] = branching;
    j["params"] = {
        {"carrier_hz", params.carrier_hz},
        {"kappa_per_m", params.kappa_per_m},
        {"tx_snr_db", params.tx_snr_db},
        {"gain_tx_db", optional_number(params.gain_tx_db)},
        {"gain_rx_db", optional_number(params.gain_rx_db)},
        {"noise_enabled", params.noise_enabled},
        {"noise_power", params.noise_power},
    };
    j["radius_m"] = radius_m;
    j["min_distance_m"] = min_distance_m;
    j["train_count"] = train_count;
    j["test_count"] = test_count;
    j["seed"] = seed;
    j["split"] = split;
    j["label_source"] = std::string(to_string(label_source));
    j["norm"] = {
        {"tx", {{"p_floor", norm.tx.floor}, {"p_ceil", norm.tx.ceil}}},
        {"rx", {{"p_floor", norm.rx.floor}, {"p_ceil", norm.rx.ceil}}},
    };
    return j.dump();
}

DatasetManifest DatasetManifest::from_json(std::string_view text)
{
    DatasetManifest m;
    try {
        const json j = json::parse(text);
        m.format_version = j.at("format_version").get<std::uint32_t>();
        m.n_antennas = j.at("n_antennas").get<std::size_t>();
        m.branching = j.at("branching").get<std::size_t>();
        const json& p = j.at("params");
        m.params.carrier_hz = p.at("carrier_hz").get<double>();
        m.params.kappa_per_m = p.at("kappa_per_m").get<double>();
        m.params.tx_snr_db = p.at("tx_snr_db").get<double>();
        m.params.gain_tx_db = read_optional(p.at("gain_tx_db"));
        m.params.gain_rx_db = read_optional(p.at("gain_rx_db"));
        m.params.noise_enabled = p.at("noise_enabled").get<bool>();
        m.params.noise_power = p.at("noise_power").get<double>();
        m.radius_m = j.at("radius_m").get<double>();
        m.min_distance_m = j.at("min_distance_m").get<double>();
        m.train_count = j.at("train_count").get<std::size_t>();
        m.test_count = j.at("test_count").get<std::size_t>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.split = j.at("split").get<std::string>();
        m.label_source = parse_label_source(j.at("label_source").get<std::string>());
        const json& n = j.at("norm");
        m.norm.tx = {n.at("tx").at("p_floor").get<double>(), n.at("tx").at("p_ceil").get<double>()};
        m.norm.rx = {n.at("rx").at("p_floor").get<double>(), n.at("rx").at("p_ceil").get<double>()};
    } catch (const json::exception& e) {
        throw FormatError(std::string("invalid dataset manifest: ") + e.what());
    }
    m.validate();
    return m;
}

// ---------- container ------------------------------------------------------------

std::string serialize_dataset(const Dataset& dataset)
{
    const auto& m = dataset.manifest;
    m.validate();
    const std::size_t trace = m.trace_length();
    const std::size_t first = 2 * m.branching;

    detail::ByteWriter w;
    w.put_bytes(dataset_magic);
    w.put<std::uint32_t>(m.format_version);
    const std::string manifest = m.to_json();
    w.put<std::uint64_t>(manifest.size());
    w.put_bytes(manifest);
    w.put<std::uint64_t>(dataset.samples.size());

    for (const auto& s : dataset.samples) {
        if (s.p_rx.size() != trace || s.p_tx.size() != trace || s.first_layer_powers.size() != first)
            throw FormatError("sample vector lengths do not match the manifest");
        w.put(s.distance_m);
        w.put(s.aod_u);
        w.put(s.aoa_u);
        w.put(s.psi_re);
        w.put(s.psi_im);
        for (double p : s.p_rx)
            w.put(p);
        for (double p : s.p_tx)
            w.put(p);
        for (double p : s.first_layer_powers)
            w.put(p);
        w.put(s.label_tx_index);
        w.put(s.label_rx_index);
        w.put(s.label_power);
    }
    return w.release();
}

Dataset parse_dataset(std::string_view bytes)
{
    detail::ByteReader r(bytes);
    if (r.get_bytes(dataset_magic.size()) != dataset_magic)
        throw FormatError("not a dataset file (bad magic)");
    const auto version = r.get<std::uint32_t>();
    if (version != dataset_format_version)
        throw FormatError("unsupported dataset format version " + std::to_string(version));
    const auto manifest_len = r.get<std::uint64_t>();
    if (manifest_len > r.remaining())
        throw FormatError("manifest length exceeds file size");

    Dataset d;
    d.manifest = DatasetManifest::from_json(r.get_bytes(manifest_len));
    const auto count = r.get<std::uint64_t>();
    if (count != d.manifest.expected_count())
        throw FormatError("record count " + std::to_string(count) + " does not match the manifest (" +
                          std::to_string(d.manifest.expected_count()) + ")");
    if (r.remaining() != count * d.manifest.record_size())
        throw FormatError("record payload size does not match the declared count");

    const std::size_t trace = d.manifest.trace_length();
    const std::size_t first = 2 * d.manifest.branching;
    const std::size_t n = d.manifest.n_antennas;
    d.samples.resize(count);
    for (auto& s : d.samples) {
        s.distance_m = r.get<double>();
        s.aod_u = r.get<double>();
        s.aoa_u = r.get<double>();
        s.psi_re = r.get<double>();
        s.psi_im = r.get<double>();
        s.p_rx.resize(trace);
        for (auto& p : s.p_rx)
            p = r.get<double>();
        s.p_tx.resize(trace);
        for (auto& p : s.p_tx)
            p = r.get<double>();
        s.first_layer_powers.resize(first);
        for (auto& p : s.first_layer_powers)
            p = r.get<double>();
        s.label_tx_index = r.get<std::uint32_t>();
        s.label_rx_index = r.get<std::uint32_t>();
        s.label_power = r.get<double>();
        if (s.label_tx_index < 1 || s.label_tx_index > n || s.label_rx_index < 1 || s.label_rx_index > n)
            throw FormatError("sample label index out of range");
    }
    return d;
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset)
{
    detail::write_file(path, serialize_dataset(dataset));
}

Dataset read_dataset(const std::filesystem::path& path)
{
    const std::string bytes = detail::read_file(path);
    try {
        return parse_dataset(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

// ---------- generation -------------------------------------------------------------

void DatagenConfig::validate() const
{
    params.validate();
    geometry.validate();
    exact_log(n_antennas, branching);
    if (n_antennas < branching)
        throw std::invalid_argument("datagen needs N >= M (at least one tree stage)");
    if (train_count == 0 || test_count == 0)
        throw std::invalid_argument("datagen sample counts must be positive");
}

namespace {

std::vector<Sample> generate_split(const DatagenConfig& config, const CodebookPair& codebooks, std::uint64_t seed,
                                   SeedStream stream, std::size_t count)
{
    std::vector<Sample> out(count);
    parallel_for(count, config.threads, [&](std::size_t i) {
        out[i] = generate_sample(config.params, codebooks, config.geometry, derive_seed(seed, stream, i),
                                 config.labels);
    });
    return out;
}

} // namespace

DatasetSplits generate_dataset(const DatagenConfig& config, std::uint64_t seed)
{
    config.validate();
    const CodebookPair codebooks = build_codebook_pair(config.n_antennas, config.branching);

    DatasetSplits splits;
    splits.train.samples = generate_split(config, codebooks, seed, SeedStream::train_sample, config.train_count);
    splits.test.samples = generate_split(config, codebooks, seed, SeedStream::test_sample, config.test_count);

    DatasetManifest m;
    m.n_antennas = config.n_antennas;
    m.branching = config.branching;
    m.params = config.params;
    m.radius_m = config.geometry.radius_m;
    m.min_distance_m = config.geometry.min_distance_m;
    m.train_count = config.train_count;
    m.test_count = config.test_count;
    m.seed = seed;
    m.label_source = config.labels;
    m.norm = compute_normalization(splits.train.samples);

    splits.train.manifest = m;
    splits.train.manifest.split = "train";
    splits.test.manifest = m;
    splits.test.manifest.split = "test";
    return splits;
}

std::pair<std::filesystem::path, std::filesystem::path> write_dataset_files(const std::filesystem::path& out_dir,
                                                                            const DatasetSplits& splits)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory '" + out_dir.string() + "': " + ec.message());
    auto train = out_dir / "train.thzbt";
    auto test = out_dir / "test.thzbt";
    write_dataset(train, splits.train);
    write_dataset(test, splits.test);
    return {train, test};
}

} // namespace beamforge
