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

#include <bit>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "beamforge/beamsearch.hpp"
#include "beamforge/nn/builder.hpp"
#include "beamforge/nn/predict.hpp"
#include "oracles.hpp"

using namespace beamforge;
using namespace beamforge::nn;

namespace {

std::vector<float> as_raw(const CVector& w)
{
    const std::size_t n = w.size();
    std::vector<float> raw(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        raw[i] = static_cast<float>(w[i].real());
        raw[n + i] = static_cast<float>(w[i].imag());
    }
    return raw;
}

std::size_t snap_oracle(std::span<const float> raw, std::size_t n)
{
    std::size_t best = 0;
    double best_corr = -1.0;
    for (std::size_t idx = 1; idx <= n; ++idx) {
        const auto w = oracle::codeword(n, 2, static_cast<std::size_t>(std::log2(n)), idx);
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            acc += std::conj(w[i]) * std::complex<double>(raw[i], raw[n + i]);
        if (std::norm(acc) > best_corr) {
            best_corr = std::norm(acc);
            best = idx;
        }
    }
    return best;
}

const NormalizationConstants test_norms{{1e-12, 1e-4}, {1e-12, 1e-4}};

} // namespace

TEST_CASE("snap_to_codebook recovers exact codewords", "[nn][predict]")
{
    const HierarchicalCodebook book(16, 2);
    for (const auto& w : book.narrow())
        CHECK(snap_to_codebook(as_raw(w.coeffs), book.narrow()) == w.index);
}

TEST_CASE("snap_to_codebook is invariant to global phase and positive scale", "[nn][predict][property]")
{
    const HierarchicalCodebook book(16, 2);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi), scale(0.01, 100.0);
    std::normal_distribution<double> noise(0.0, 0.3);
    for (int rep = 0; rep < 300; ++rep) {
        CVector w(16);
        for (auto& v : w)
            v = {noise(rng), noise(rng)};
        const std::size_t base = snap_to_codebook(as_raw(w), book.narrow());
        const cdouble rot = std::polar(scale(rng), phase(rng));
        CVector rotated = w;
        for (auto& v : rotated)
            v *= rot;
        REQUIRE(snap_to_codebook(as_raw(rotated), book.narrow()) == base);
    }
    const CVector w5 = book.codeword(4, 5).coeffs;
    for (double phi : {0.3, 1.7, 3.1, 5.9}) {
        CVector r = w5;
        for (auto& v : r)
            v *= std::polar(1.0, phi);
        CHECK(snap_to_codebook(as_raw(r), book.narrow()) == 5);
    }
}

TEST_CASE("snap_to_codebook matches a brute-force correlation oracle", "[nn][predict][property]")
{
    const HierarchicalCodebook book(8, 2);
    std::mt19937_64 rng(2);
    std::normal_distribution<float> d(0.0f, 1.0f);
    for (int rep = 0; rep < 500; ++rep) {
        std::vector<float> raw(16);
        for (auto& v : raw)
            v = d(rng);
        REQUIRE(snap_to_codebook(raw, book.narrow()) == snap_oracle(raw, 8));
    }
}

TEST_CASE("snap_to_codebook: ties, zeros and lengths", "[nn][predict]")
{
    const HierarchicalCodebook book(4, 2);
    // e_1 correlates equally with every narrow codeword.
    std::vector<float> e1(8, 0.0f);
    e1[0] = 1.0f;
    CHECK(snap_to_codebook(e1, book.narrow()) == 1);
    std::vector<Codeword> reversed(book.narrow().rbegin(), book.narrow().rend());
    CHECK(snap_to_codebook(e1, reversed) == 1);
    CHECK_THROWS_AS(snap_to_codebook(std::vector<float>(8, 0.0f), book.narrow()), std::domain_error);
    CHECK_THROWS_AS(snap_to_codebook(std::vector<float>(6, 1.0f), book.narrow()), std::invalid_argument);
}

TEST_CASE("codebook input tensor layout", "[nn][predict]")
{
    const CodebookPair books = build_codebook_pair(8, 2);
    const Tensor x = make_codebook_input(books);
    CHECK(x.dims() == Dims{4, 8, 8});
    for (std::size_t row = 0; row < 8; ++row)
        for (std::size_t col = 0; col < 8; ++col) {
            const cdouble t = books.tx.narrow()[row].coeffs[col];
            CHECK(x.at(0, row, col) == static_cast<float>(t.real()));
            CHECK(x.at(1, row, col) == static_cast<float>(t.imag()));
            CHECK(x.at(3, row, col) == static_cast<float>(books.rx.narrow()[row].coeffs[col].imag()));
        }
}

TEST_CASE("power input uses per-side bounds", "[nn][predict]")
{
    const NormalizationConstants norms{{1e-10, 1e-2}, {1e-8, 1e-4}};
    const Tensor v = make_power_input(std::vector<double>{1e-6, 1e-10, 1e-6, 1e-4}, norms);
    CHECK(v.dims() == Dims{4});
    CHECK(v[0] == static_cast<float>(0.5));
    CHECK(v[1] == 0.0f);
    CHECK(v[2] == static_cast<float>(0.5));
    CHECK(v[3] == 1.0f);
    CHECK_THROWS_AS(make_power_input(std::vector<double>{1.0, -1.0}, norms), std::invalid_argument);
    CHECK_THROWS_AS(make_power_input(std::vector<double>{1.0, 1.0, 1.0}, norms), std::invalid_argument);
}

TEST_CASE("predict: totality, ranges and contract errors", "[nn][predict]")
{
    const ComputationGraph g(build_incept_resnet(16, 2, 4));
    const CodebookPair books = build_codebook_pair(16, 2);
    for (double p : {0.0, 1e-9, 1.0}) {
        const Prediction pr = predict(g, std::vector<double>(4, p), test_norms, books);
        CHECK(pr.tx_index >= 1);
        CHECK(pr.tx_index <= 16);
        CHECK(pr.rx_index >= 1);
        CHECK(pr.rx_index <= 16);
        CHECK(pr.predicted_power_norm >= 0.0);
        CHECK(pr.predicted_power_norm <= 1.0);
        CHECK(pr.raw_tx_vec.size() == 32);
    }
    CHECK_THROWS_AS(predict(g, std::vector<double>(4, 1e-6), std::nullopt, books), std::invalid_argument);
    CHECK_THROWS_AS(predict(g, std::vector<double>(6, 1e-6), test_norms, books), ShapeMismatchError);
    CHECK_THROWS_AS(predict(g, std::vector<double>(4, 1e-6), test_norms, build_codebook_pair(8, 2)),
                    ShapeMismatchError);
}

TEST_CASE("the predictor path costs exactly 2M measurements", "[nn][predict]")
{
    const ComputationGraph g(build_incept_resnet(16, 2, 4));
    const CodebookPair books = build_codebook_pair(16, 2);
    const ChannelRealization h = draw_channel({}, 16, 16, {10.0, 0.2, -0.4}, 3);
    ChannelOracle o(h, {}, books);
    const FirstLayerMeasurement m = first_layer_sweep(o, books);
    predict(g, m.stacked(), test_norms, books);
    CHECK(o.count() == 4);
}

TEST_CASE("golden fixture predictions are bit-exact", "[nn][predict][golden]")
{
    const std::string dir = BEAMFORGE_FIXTURE_DIR;
    std::ifstream in(dir + "/incept_n16_m2_golden.json");
    REQUIRE(in.good());
    const auto golden = nlohmann::json::parse(in);
    const ComputationGraph g = load_weights(dir + "/" + golden.at("weights").get<std::string>());
    CHECK(g.node_count() == golden.at("node_count").get<std::size_t>());

    const auto& n = golden.at("norm");
    const NormalizationConstants norms{{n["tx"][0].get<double>(), n["tx"][1].get<double>()},
                                       {n["rx"][0].get<double>(), n["rx"][1].get<double>()}};
    const CodebookPair books = build_codebook_pair(16, 2);
    for (const auto& c : golden.at("cases")) {
        const Prediction p = predict(g, c.at("powers").get<std::vector<double>>(), norms, books);
        CHECK(p.tx_index == c.at("tx_index").get<std::size_t>());
        CHECK(p.rx_index == c.at("rx_index").get<std::size_t>());
        CHECK(p.predicted_power_norm == c.at("power_norm").get<double>());
        const auto tx_bits = c.at("raw_tx_bits").get<std::vector<std::uint32_t>>();
        const auto rx_bits = c.at("raw_rx_bits").get<std::vector<std::uint32_t>>();
        REQUIRE(tx_bits.size() == p.raw_tx_vec.size());
        REQUIRE(rx_bits.size() == p.raw_rx_vec.size());
        for (std::size_t i = 0; i < tx_bits.size(); ++i) {
            REQUIRE(std::bit_cast<std::uint32_t>(p.raw_tx_vec[i]) == tx_bits[i]);
            REQUIRE(std::bit_cast<std::uint32_t>(p.raw_rx_vec[i]) == rx_bits[i]);
        }
    }
}
