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

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beamforge/beamsearch.hpp"
#include "beamforge/channel.hpp"
#include "beamforge/codebook.hpp"
#include "beamforge/datagen.hpp"
#include "beamforge/eval.hpp"
#include "beamforge/nn/builder.hpp"
#include "beamforge/nn/graph.hpp"
#include "beamforge/nn/predict.hpp"
#include "beamforge/random.hpp"

namespace fs = std::filesystem;
using namespace beamforge;

namespace {

struct GlobalOptions {
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::size_t threads = 1;
};

struct ChannelOptions {
    double carrier_thz = 0.14;
    double kappa = 6e-5;
    double snr_db = 0.0;
    std::optional<double> gain_tx_db;
    std::optional<double> gain_rx_db;
    bool noise = false;
    double noise_power = 1.0;
    double radius = 50.0;
    double min_distance = 1.0;

    void attach(CLI::App* app)
    {
        app->add_option("--fc", carrier_thz, "Carrier frequency in THz")->capture_default_str();
        app->add_option("--kappa", kappa, "Molecular absorption coefficient (1/m)")->capture_default_str();
        app->add_option("--snr-db", snr_db, "Transmit SNR gamma in dB")->capture_default_str();
        app->add_option("--gain-tx-db", gain_tx_db, "Tx antenna gain override in dB");
        app->add_option("--gain-rx-db", gain_rx_db, "Rx antenna gain override in dB");
        app->add_flag("--noise", noise, "Add complex Gaussian measurement noise");
        app->add_option("--noise-power", noise_power, "Noise power (linear)")->capture_default_str();
        app->add_option("--radius", radius, "Cell radius in metres")->capture_default_str();
        app->add_option("--min-distance", min_distance, "Minimum Tx-Rx distance in metres")->capture_default_str();
    }

    ThzParams params() const
    {
        ThzParams p;
        p.carrier_hz = carrier_thz * 1e12;
        p.kappa_per_m = kappa;
        p.tx_snr_db = snr_db;
        p.gain_tx_db = gain_tx_db;
        p.gain_rx_db = gain_rx_db;
        p.noise_enabled = noise;
        p.noise_power = noise_power;
        p.validate();
        return p;
    }

    GeometryDraw geometry() const
    {
        GeometryDraw g;
        g.radius_m = radius;
        g.min_distance_m = min_distance;
        g.validate();
        return g;
    }
};

// key=value config lines. Keys naming a global option apply to the app,
// everything else to the subcommand being run.
class KeyValueConfig : public CLI::ConfigBase {
public:
    KeyValueConfig(std::vector<std::string> globals, std::string subcommand)
        : globals_(std::move(globals)), subcommand_(std::move(subcommand))
    {
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override
    {
        auto items = CLI::ConfigBase::from_config(input);
        for (auto& item : items) {
            if (!item.parents.empty() || item.name == "++" || item.name == "--" || subcommand_.empty())
                continue;
            if (std::find(globals_.begin(), globals_.end(), item.name) == globals_.end())
                item.parents = {subcommand_};
        }
        return items;
    }

private:
    std::vector<std::string> globals_;
    std::string subcommand_;
};

fs::path output_path(const GlobalOptions& g, const std::string& explicit_path, const std::string& default_name)
{
    if (!explicit_path.empty())
        return explicit_path;
    return fs::path(g.out_dir) / default_name;
}

void emit(const fs::path& path, const std::string& text)
{
    if (path == "-") {
        std::cout << text;
        return;
    }
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out)
        throw std::runtime_error("write to '" + path.string() + "' failed");
    std::cerr << "wrote " << path.string() << "\n";
}

std::optional<NormalizationConstants> norms_from(const std::string& dataset_path)
{
    if (dataset_path.empty())
        return std::nullopt;
    return read_dataset(dataset_path).manifest.norm;
}

// ---------- subcommands --------------------------------------------------------

struct CodebookCmd {
    std::size_t n = 16;
    std::size_t m = 2;
    std::optional<std::size_t> layer;
    std::string out;

    void run(const GlobalOptions& g) const
    {
        const HierarchicalCodebook book(n, m);
        std::size_t first = 0, last = book.depth();
        if (layer) {
            if (*layer > book.depth())
                throw std::invalid_argument("layer " + std::to_string(*layer) + " exceeds depth " +
                                            std::to_string(book.depth()));
            first = last = *layer;
        }
        std::string csv = "layer,index,element,re,im\n";
        for (std::size_t k = first; k <= last; ++k)
            for (const auto& cw : book.layer(k))
                for (std::size_t i = 0; i < cw.coeffs.size(); ++i)
                    csv += std::to_string(k) + "," + std::to_string(cw.index) + "," + std::to_string(i) + "," +
                           format_double(cw.coeffs[i].real()) + "," + format_double(cw.coeffs[i].imag()) + "\n";
        emit(output_path(g, out, "codebook.csv"), csv);
    }
};

struct SearchCmd {
    std::string protocol = "one-side-tree";
    std::size_t n = 16;
    std::size_t m = 2;
    std::size_t trials = 10;
    ChannelOptions channel;
    std::string out;

    void run(const GlobalOptions& g) const
    {
        const Protocol p = parse_protocol(protocol);
        const ThzParams params = channel.params();
        const GeometryDraw draw = channel.geometry();
        const CodebookPair books = build_codebook_pair(n, m);
        std::string csv = "trial,protocol,tx_index,rx_index,power,measurements\n";
        for (std::size_t t = 0; t < trials; ++t) {
            Rng rng(derive_seed(g.seed, SeedStream::search_trial, t));
            const LinkGeometry geom = draw.draw(rng);
            const cdouble psi = complex_gaussian(rng);
            const ChannelRealization h = make_channel(params, n, n, geom, psi);
            ChannelOracle oracle(h, params, books, rng());
            const SearchResult r = run_protocol(p, oracle, books);
            csv += std::to_string(t) + "," + std::string(to_string(p)) + "," + std::to_string(r.tx_index) + "," +
                   std::to_string(r.rx_index) + "," + format_double(r.power) + "," + std::to_string(r.measurements) +
                   "\n";
        }
        emit(output_path(g, out, "search.csv"), csv);
    }
};

struct DatagenCmd {
    std::size_t n = 16;
    std::size_t m = 2;
    std::size_t train_count = 10000;
    std::size_t test_count = 2000;
    bool oracle_labels = false;
    ChannelOptions channel;

    void run(const GlobalOptions& g) const
    {
        DatagenConfig cfg;
        cfg.n_antennas = n;
        cfg.branching = m;
        cfg.params = channel.params();
        cfg.geometry = channel.geometry();
        cfg.train_count = train_count;
        cfg.test_count = test_count;
        cfg.labels = oracle_labels ? LabelSource::exhaustive : LabelSource::hierarchical;
        cfg.threads = g.threads;
        const DatasetSplits splits = generate_dataset(cfg, g.seed);
        const auto [train, test] = write_dataset_files(g.out_dir, splits);
        std::cout << "split,path,samples\n"
                  << "train," << train.string() << "," << splits.train.samples.size() << "\n"
                  << "test," << test.string() << "," << splits.test.samples.size() << "\n";
    }
};

struct InferCmd {
    std::string weights;
    std::string dataset;
    std::string out;

    void run(const GlobalOptions& g) const
    {
        const nn::ComputationGraph graph = nn::load_weights(weights);
        const Dataset data = read_dataset(dataset);
        const auto& gm = graph.manifest();
        if (gm.n_antennas != data.manifest.n_antennas || gm.branching != data.manifest.branching)
            throw std::invalid_argument("weights are for N=" + std::to_string(gm.n_antennas) + ", M=" +
                                        std::to_string(gm.branching) + " but the dataset has N=" +
                                        std::to_string(data.manifest.n_antennas) + ", M=" +
                                        std::to_string(data.manifest.branching));
        const CodebookPair books = build_codebook_pair(gm.n_antennas, gm.branching);
        const nn::Tensor conv_in = nn::make_codebook_input(books);
        const NormalizationConstants& norm = data.manifest.norm;

        std::string csv = "sample,tx_pred,rx_pred,tx_true,rx_true,p_pred_norm,p_true_norm\n";
        for (std::size_t i = 0; i < data.samples.size(); ++i) {
            const Sample& s = data.samples[i];
            const nn::Prediction p = nn::predict(graph, s.first_layer_powers, norm, books, conv_in);
            const double p_true = normalize_power(s.label_power, norm.tx.floor, norm.tx.ceil);
            csv += std::to_string(i) + "," + std::to_string(p.tx_index) + "," + std::to_string(p.rx_index) + "," +
                   std::to_string(s.label_tx_index) + "," + std::to_string(s.label_rx_index) + "," +
                   format_double(p.predicted_power_norm) + "," + format_double(p_true) + "\n";
        }
        emit(output_path(g, out, "predictions.csv"), csv);
    }
};

struct EvalOptions {
    std::size_t n = 64;
    std::size_t m = 2;
    std::size_t trials = 10000;
    std::size_t bins = 10;
    std::string weights;
    std::string dataset;
    ChannelOptions channel;

    void attach(CLI::App* app)
    {
        app->add_option("--n", n, "Antennas per side")->capture_default_str();
        app->add_option("--m", m, "Codebook branching factor")->capture_default_str();
        app->add_option("--trials", trials, "Channel realizations")->capture_default_str();
        app->add_option("--bins", bins, "Distance bins")->capture_default_str();
        app->add_option("--weights", weights, "Weight file for the proposed predictor");
        app->add_option("--dataset", dataset, "Dataset whose manifest holds the normalization constants");
        channel.attach(app);
    }

    EvalConfig config(const GlobalOptions& g) const
    {
        EvalConfig c;
        c.n_antennas = n;
        c.branching = m;
        c.params = channel.params();
        c.geometry = channel.geometry();
        c.distance_bins = bins;
        c.trials = trials;
        c.seed = g.seed;
        c.threads = g.threads;
        return c;
    }
};

struct LoadedPredictor {
    std::optional<nn::ComputationGraph> graph;
    LearnedPredictor view;

    explicit LoadedPredictor(const EvalOptions& opt)
    {
        if (!opt.weights.empty()) {
            graph.emplace(nn::load_weights(opt.weights));
            view.graph = &*graph;
            view.norms = norms_from(opt.dataset);
            if (!view.norms)
                throw std::invalid_argument("--weights needs --dataset for the normalization constants");
        }
    }
};

struct EvalPowerCmd {
    EvalOptions opt;
    std::vector<std::string> protocols{"exhaustive", "one-side-tree"};
    std::string out;
    std::string trials_out;

    void run(const GlobalOptions& g) const
    {
        EvalConfig cfg = opt.config(g);
        cfg.selectors.clear();
        for (const auto& p : protocols)
            cfg.selectors.push_back(parse_selector(p));
        const LoadedPredictor learned(opt);
        const PowerVsDistance r = power_vs_distance(cfg, learned.view);
        emit(output_path(g, out, "power_vs_distance.csv"), r.table_csv());
        emit(output_path(g, trials_out, "power_trials.csv"), r.trials_csv());
    }
};

struct EvalCdfCmd {
    EvalOptions opt;
    std::string predictor = "proposed";
    std::string out;
    std::string summary_out;

    void run(const GlobalOptions& g) const
    {
        const EvalConfig cfg = opt.config(g);
        const LoadedPredictor learned(opt);
        const GainLossCdf r = run_gain_loss_cdf(cfg, parse_selector(predictor), learned.view);
        emit(output_path(g, out, "gain_loss_cdf.csv"), r.cdf_csv());
        emit(output_path(g, summary_out, "gain_loss_summary.csv"), r.summary_csv());
    }
};

struct ComplexityCmd {
    std::vector<std::size_t> n_list{4, 16, 64, 256};
    std::size_t m = 2;
    std::size_t n_rf = 4;
    std::string out;

    void run(const GlobalOptions& g) const
    {
        const auto rows = complexity_table(n_list, m, n_rf, g.seed);
        emit(output_path(g, out, "complexity.csv"), complexity_csv(rows));
    }
};

struct InitWeightsCmd {
    std::size_t n = 16;
    std::size_t m = 2;
    std::string out;

    void run(const GlobalOptions& g) const
    {
        const nn::WeightFile file =
            nn::build_incept_resnet(n, m, derive_seed(g.seed, SeedStream::weight_init, 0));
        const fs::path path = output_path(g, out, "weights.thznn");
        if (path.has_parent_path())
            fs::create_directories(path.parent_path());
        file.write(path);
        std::cerr << "wrote " << path.string() << "\n";
    }
};

std::string find_subcommand(int argc, char** argv, const std::vector<std::string>& names)
{
    for (int i = 1; i < argc; ++i)
        if (std::find(names.begin(), names.end(), argv[i]) != names.end())
            return argv[i];
    return {};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Beam-training workbench for THz ultra-massive MIMO links", "beamforge"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.set_config("--config", "", "key=value file mirroring the command-line flags");
    app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();

    CodebookCmd codebook;
    auto* c_cb = app.add_subcommand("codebook", "Dump hierarchical codebook layers as CSV");
    c_cb->add_option("--n", codebook.n, "Antennas")->capture_default_str();
    c_cb->add_option("--m", codebook.m, "Branching factor")->capture_default_str();
    c_cb->add_option("--layer", codebook.layer, "Single layer to dump (default: all)");
    c_cb->add_option("--out", codebook.out, "Output path, '-' for stdout");

    SearchCmd search;
    auto* c_search = app.add_subcommand("search", "Run a classical beam search on random channels");
    c_search->add_option("--protocol", search.protocol, "exhaustive|one-side|one-side-tree|both-side-tree|adaptive")
        ->capture_default_str();
    c_search->add_option("--n", search.n, "Antennas per side")->capture_default_str();
    c_search->add_option("--m", search.m, "Branching factor")->capture_default_str();
    c_search->add_option("--trials", search.trials, "Channel realizations")->capture_default_str();
    c_search->add_option("--out", search.out, "Output path, '-' for stdout");
    search.channel.attach(c_search);

    DatagenCmd datagen;
    auto* c_dg = app.add_subcommand("datagen", "Generate train/test dataset files");
    c_dg->add_option("--n", datagen.n, "Antennas per side")->capture_default_str();
    c_dg->add_option("--m", datagen.m, "Branching factor")->capture_default_str();
    c_dg->add_option("--train-count", datagen.train_count, "Training samples")->capture_default_str();
    c_dg->add_option("--test-count", datagen.test_count, "Test samples")->capture_default_str();
    c_dg->add_flag("--oracle-labels", datagen.oracle_labels, "Label with exhaustive search instead");
    datagen.channel.attach(c_dg);

    InferCmd infer;
    auto* c_inf = app.add_subcommand("infer", "Predict beam pairs for a dataset");
    c_inf->add_option("--weights", infer.weights, "Weight file")->required();
    c_inf->add_option("--dataset", infer.dataset, "Dataset file")->required();
    c_inf->add_option("--out", infer.out, "Output path, '-' for stdout");

    EvalPowerCmd eval_power;
    auto* c_ep = app.add_subcommand("eval-power", "Average received power versus distance");
    eval_power.opt.attach(c_ep);
    c_ep->add_option("--protocols", eval_power.protocols, "Comma-separated selectors")
        ->delimiter(',')
        ->capture_default_str();
    c_ep->add_option("--out", eval_power.out, "Binned table path");
    c_ep->add_option("--trials-out", eval_power.trials_out, "Per-trial CSV path");

    EvalCdfCmd eval_cdf;
    auto* c_ec = app.add_subcommand("eval-cdf", "CDF of normalized beamforming-gain loss");
    eval_cdf.opt.n = 16;
    eval_cdf.opt.trials = 1000;
    eval_cdf.opt.attach(c_ec);
    c_ec->add_option("--predictor", eval_cdf.predictor, "proposed|random|first-layer|<protocol>")
        ->capture_default_str();
    c_ec->add_option("--out", eval_cdf.out, "CDF path");
    c_ec->add_option("--summary-out", eval_cdf.summary_out, "Summary path");

    ComplexityCmd complexity;
    auto* c_cx = app.add_subcommand("complexity", "Measurement-count table: formulas and oracle counts");
    c_cx->add_option("--n", complexity.n_list, "Comma-separated antenna counts")->delimiter(',')->capture_default_str();
    c_cx->add_option("--m", complexity.m, "Branching factor")->capture_default_str();
    c_cx->add_option("--n-rf", complexity.n_rf, "RF chains for the parallel-search formula")->capture_default_str();
    c_cx->add_option("--out", complexity.out, "Output path, '-' for stdout");

    InitWeightsCmd init;
    auto* c_iw = app.add_subcommand("init-weights", "Write a seeded, untrained network weight file");
    c_iw->add_option("--n", init.n, "Antennas per side")->capture_default_str();
    c_iw->add_option("--m", init.m, "Branching factor")->capture_default_str();
    c_iw->add_option("--out", init.out, "Output path");

    std::vector<std::string> names;
    for (const auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        names.push_back(sub->get_name());
    app.config_formatter(
        std::make_shared<KeyValueConfig>(std::vector<std::string>{"seed", "out-dir", "threads"},
                                         find_subcommand(argc, argv, names)));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c_cb)
            codebook.run(g);
        else if (*c_search)
            search.run(g);
        else if (*c_dg)
            datagen.run(g);
        else if (*c_inf)
            infer.run(g);
        else if (*c_ep)
            eval_power.run(g);
        else if (*c_ec)
            eval_cdf.run(g);
        else if (*c_cx)
            complexity.run(g);
        else if (*c_iw)
            init.run(g);
    } catch (const std::exception& e) {
        std::cerr << "beamforge: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
