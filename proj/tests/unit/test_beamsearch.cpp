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

#include <algorithm>
#include <cmath>
#include <random>

#include "beamforge/beamsearch.hpp"
#include "beamforge/random.hpp"
#include "oracles.hpp"

using namespace beamforge;
using Catch::Matchers::WithinRel;

namespace {

ChannelRealization random_channel(std::size_t n, Rng& rng, const ThzParams& p = {})
{
    std::uniform_real_distribution<double> u(-1.0, 1.0), d(1.0, 50.0);
    return draw_channel(p, n, n, {d(rng), u(rng), u(rng)}, rng());
}

std::size_t ilog(std::size_t n, std::size_t m)
{
    std::size_t k = 0;
    while (oracle::ipow(m, k) < n)
        ++k;
    return k;
}

} // namespace

TEST_CASE("oracle counter counts every measurement", "[beamsearch]")
{
    const CodebookPair books = build_codebook_pair(4, 2);
    FunctionOracle o([](const Codeword&, const Codeword&) { return 1.0; });
    CHECK(o.count() == 0);
    o.measure(books.tx.omni(), books.rx.omni());
    o.measure(books.tx.omni(), books.rx.omni());
    CHECK(o.count() == 2);
    o.reset_count();
    CHECK(o.count() == 0);
}

TEST_CASE("measurement counts equal the closed forms", "[beamsearch][property]")
{
    Rng rng(3);
    for (auto [n, m] : {std::pair{2u, 2u}, {4u, 2u}, {8u, 2u}, {16u, 2u}, {32u, 2u}, {64u, 2u}, {128u, 2u},
                        {256u, 2u}, {16u, 4u}, {64u, 4u}, {27u, 3u}, {64u, 8u}}) {
        const CodebookPair books = build_codebook_pair(n, m);
        const ChannelRealization h = random_channel(n, rng);
        const std::size_t k = ilog(n, m);
        INFO("N=" << n << " M=" << m);

        ChannelOracle o(h, {}, books);
        CHECK(exhaustive_search(o, books.tx.narrow(), books.rx.narrow()).measurements == n * n);
        CHECK(o.count() == n * n);
        CHECK(complexity::exhaustive(n) == n * n);

        ChannelOracle o1(h, {}, books);
        CHECK(one_side_sweep(o1, books).measurements == 2 * n);
        CHECK(o1.count() == complexity::one_side(n));

        ChannelOracle o2(h, {}, books);
        const SearchResult tree = one_side_tree_search(o2, books, m);
        CHECK(o2.count() == 2 * m * k);
        CHECK(o2.count() == complexity::one_side_tree(n, m));
        CHECK(tree.p_rx_trace.size() == m * k);
        CHECK(tree.p_tx_trace.size() == m * k);

        ChannelOracle o3(h, {}, books);
        both_side_tree_search(o3, books, m);
        CHECK(o3.count() == m * m * k);
        CHECK(o3.count() == complexity::both_side_tree(n, m));

        ChannelOracle o4(h, {}, books);
        first_layer_sweep(o4, books);
        CHECK(o4.count() == 2 * m);
        CHECK(o4.count() == complexity::proposed(m));

        if (m == 2) {
            ChannelOracle o5(h, {}, books);
            adaptive_search(o5, books);
            CHECK(o5.count() == 4 * ilog(n, 2));
            CHECK(o5.count() == complexity::adaptive(n));
        }
    }
    CHECK(complexity::parallel(256, 4) == 16384.0);
    CHECK(complexity::proposed(2) == 4);
}

TEST_CASE("table counts at N=64", "[beamsearch]")
{
    CHECK(complexity::exhaustive(64) == 4096);
    CHECK(complexity::one_side(64) == 128);
    CHECK(complexity::one_side_tree(64, 2) == 24);
    CHECK(complexity::both_side_tree(64, 2) == 24);
    CHECK(complexity::adaptive(64) == 24);
    CHECK(complexity::adaptive(2) == 4);
    CHECK(complexity::formula(Protocol::one_side_tree, 64, 2) == 24);
}

TEST_CASE("single-antenna edge cases", "[beamsearch]")
{
    const CodebookPair books = build_codebook_pair(1, 2);
    FunctionOracle o([](const Codeword&, const Codeword&) { return 3.0; });
    const SearchResult ex = exhaustive_search(o, books.tx.narrow(), books.rx.narrow());
    CHECK(ex.measurements == 1);
    CHECK(ex.tx_index == 1);
    CHECK(ex.rx_index == 1);
    FunctionOracle o2([](const Codeword&, const Codeword&) { return 3.0; });
    const SearchResult sweep = one_side_sweep(o2, books);
    CHECK(sweep.measurements == 2);
    CHECK(sweep.power == 3.0);
}

TEST_CASE("single-stage trees reduce to first-layer argmax", "[beamsearch]")
{
    Rng rng(17);
    for (std::size_t m : {2u, 4u, 8u}) {
        const CodebookPair books = build_codebook_pair(m, m);
        const ChannelRealization h = random_channel(m, rng);
        ChannelOracle o(h, {}, books);
        const SearchResult r = one_side_tree_search(o, books, m);
        CHECK(r.measurements == 2 * m);
        const auto rx_best = std::max_element(r.p_rx_trace.begin(), r.p_rx_trace.end()) - r.p_rx_trace.begin();
        const auto tx_best = std::max_element(r.p_tx_trace.begin(), r.p_tx_trace.end()) - r.p_tx_trace.begin();
        CHECK(r.rx_index == static_cast<std::size_t>(rx_best) + 1);
        CHECK(r.tx_index == static_cast<std::size_t>(tx_best) + 1);

        ChannelOracle ob(h, {}, books);
        CHECK(both_side_tree_search(ob, books, m).measurements == m * m);
    }
}

TEST_CASE("exhaustive search is the brute-force maximum", "[beamsearch][property]")
{
    Rng rng(21);
    ThzParams p;
    for (int draw = 0; draw < 100; ++draw) {
        const CodebookPair books = build_codebook_pair(8, 2);
        std::uniform_real_distribution<double> u(-1.0, 1.0), d(1.0, 50.0);
        const LinkGeometry g{d(rng), u(rng), u(rng)};
        const ChannelRealization h = draw_channel(p, 8, 8, g, rng());
        ChannelOracle o(h, p, books);
        const SearchResult r = exhaustive_search(o, books.tx.narrow(), books.rx.narrow());
        const auto ref = oracle::brute_force_best(oracle::channel_matrix(p, 8, 8, g, h.psi), 8, 2, 0.0);
        const double ref_at_pick =
            oracle::received_power(oracle::channel_matrix(p, 8, 8, g, h.psi), 8, 8,
                                   oracle::codeword(8, 2, 3, r.tx_index), oracle::codeword(8, 2, 3, r.rx_index), 0.0);
        REQUIRE_THAT(ref_at_pick, WithinRel(ref.power, 1e-9));
        REQUIRE_THAT(r.power, WithinRel(ref.power, 1e-9));
    }
}

TEST_CASE("exhaustive matches the analytic rank-1 argmax", "[beamsearch][property]")
{
    Rng rng(31);
    const CodebookPair books = build_codebook_pair(16, 2);
    for (int draw = 0; draw < 100; ++draw) {
        const ChannelRealization h = random_channel(16, rng);
        ChannelOracle o(h, {}, books);
        const SearchResult r = exhaustive_search(o, books.tx.narrow(), books.rx.narrow());
        double best = -1.0;
        for (const auto& wt : books.tx.narrow())
            for (const auto& wr : books.rx.narrow()) {
                const double v = std::norm(h.amplitude()) * beam_gain(wr, h.geometry.aoa_u) *
                                 beam_gain(wt, h.geometry.aod_u);
                best = std::max(best, v);
            }
        REQUIRE_THAT(r.power, WithinRel(best, 1e-9));
    }
}

TEST_CASE("exhaustive ties go to the smallest index pair regardless of order", "[beamsearch]")
{
    const CodebookPair books = build_codebook_pair(8, 2);
    std::vector<Codeword> tx(books.tx.narrow().begin(), books.tx.narrow().end());
    std::vector<Codeword> rx(books.rx.narrow().begin(), books.rx.narrow().end());
    // Pairs (3,5), (3,6), (6,2) tie for the maximum.
    const auto power = [](const Codeword& t, const Codeword& r) {
        if ((t.index == 3 && (r.index == 5 || r.index == 6)) || (t.index == 6 && r.index == 2))
            return 2.0;
        return 1.0;
    };
    std::mt19937 shuffle_rng(4);
    for (int rep = 0; rep < 20; ++rep) {
        std::shuffle(tx.begin(), tx.end(), shuffle_rng);
        std::shuffle(rx.begin(), rx.end(), shuffle_rng);
        FunctionOracle o(power);
        const SearchResult r = exhaustive_search(o, tx, rx);
        CHECK(r.tx_index == 3);
        CHECK(r.rx_index == 5);
        CHECK(r.measurements == 64);
    }
    FunctionOracle flat([](const Codeword&, const Codeword&) { return 0.0; });
    const SearchResult r = exhaustive_search(flat, books.tx.narrow(), books.rx.narrow());
    CHECK(r.tx_index == 1);
    CHECK(r.rx_index == 1);
}

TEST_CASE("exhaustive search rejects empty codebooks", "[beamsearch]")
{
    const CodebookPair books = build_codebook_pair(4, 2);
    FunctionOracle o([](const Codeword&, const Codeword&) { return 0.0; });
    CHECK_THROWS_AS(exhaustive_search(o, {}, books.rx.narrow()), SearchError);
    CHECK_THROWS_AS(exhaustive_search(o, books.tx.narrow(), {}), SearchError);
}

TEST_CASE("one-side sweep agrees with exhaustive on >= 90% of noiseless draws", "[beamsearch][property]")
{
    Rng rng(40);
    const CodebookPair books = build_codebook_pair(16, 2);
    int agree = 0;
    for (int draw = 0; draw < 200; ++draw) {
        const ChannelRealization h = random_channel(16, rng);
        ChannelOracle a(h, {}, books), b(h, {}, books);
        const SearchResult ex = exhaustive_search(a, books.tx.narrow(), books.rx.narrow());
        const SearchResult sw = one_side_sweep(b, books);
        agree += ex.tx_index == sw.tx_index && ex.rx_index == sw.rx_index;
    }
    INFO("agreement " << agree << "/200");
    CHECK(agree >= 180);
}

TEST_CASE("protocol results re-evaluate to the reported power", "[beamsearch][property]")
{
    Rng rng(50);
    ThzParams p;
    p.tx_snr_db = 10.0;
    const CodebookPair books = build_codebook_pair(32, 2);
    for (int draw = 0; draw < 40; ++draw) {
        const ChannelRealization h = random_channel(32, rng, p);
        for (Protocol proto : all_protocols()) {
            ChannelOracle o(h, p, books);
            const SearchResult r = run_protocol(proto, o, books);
            const double again = received_power(books.tx.codeword(r.tx_layer, r.tx_index).coeffs,
                                                books.rx.codeword(r.rx_layer, r.rx_index).coeffs, h, p);
            REQUIRE(r.tx_layer == books.tx.depth());
            REQUIRE(r.rx_layer == books.rx.depth());
            REQUIRE_THAT(r.power, WithinRel(again, 1e-12));
        }
    }
}

TEST_CASE("one-side tree: Rx stage first under omni Tx, traces stage-major", "[beamsearch]")
{
    const CodebookPair books = build_codebook_pair(8, 2);
    using Coord = std::pair<std::size_t, std::size_t>;
    std::vector<Coord> tx_calls, rx_calls;
    // Power peaks at Rx narrow 6 (u = 0.375) and Tx narrow 3 (u = -0.375).
    FunctionOracle o([&](const Codeword& t, const Codeword& r) {
        tx_calls.push_back({t.layer, t.index});
        rx_calls.push_back({r.layer, r.index});
        const double ur = books.rx.coverage(r.layer, r.index).center();
        const double ut = books.tx.coverage(t.layer, t.index).center();
        return 10.0 - std::abs(ur - 0.375) - std::abs(ut + 0.375);
    });
    const SearchResult r = one_side_tree_search(o, books, 2);
    CHECK(r.rx_index == 6);
    CHECK(r.tx_index == 3);
    const std::vector<Coord> want_tx{{0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1},
                                     {1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 3}, {3, 4}};
    const std::vector<Coord> want_rx{{1, 1}, {1, 2}, {2, 3}, {2, 4}, {3, 5}, {3, 6},
                                     {3, 6}, {3, 6}, {3, 6}, {3, 6}, {3, 6}, {3, 6}};
    CHECK(tx_calls == want_tx);
    CHECK(rx_calls == want_rx);
    REQUIRE(r.p_rx_trace.size() == 6);
    CHECK(r.p_rx_trace[5] == 10.0 - 0.0 - std::abs(0.0 + 0.375));
    CHECK(r.power == 10.0);
}

TEST_CASE("both-side tree descends jointly over M x M child pairs", "[beamsearch]")
{
    const CodebookPair books = build_codebook_pair(8, 2);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    FunctionOracle o([&](const Codeword& t, const Codeword& r) {
        pairs.push_back({t.index, r.index});
        const double ur = books.rx.coverage(r.layer, r.index).center();
        const double ut = books.tx.coverage(t.layer, t.index).center();
        return 10.0 - std::abs(ur - 0.375) - std::abs(ut + 0.375);
    });
    const SearchResult r = both_side_tree_search(o, books, 2);
    CHECK(r.tx_index == 3);
    CHECK(r.rx_index == 6);
    CHECK(r.measurements == 12);
    CHECK(r.joint_trace.size() == 12);
    const std::vector<std::pair<std::size_t, std::size_t>> first_stage{{1, 1}, {1, 2}, {2, 1}, {2, 2}};
    CHECK(std::vector(pairs.begin(), pairs.begin() + 4) == first_stage);
}

TEST_CASE("adaptive search is the binary both-side tree", "[beamsearch]")
{
    Rng rng(60);
    const CodebookPair books = build_codebook_pair(64, 2);
    for (int draw = 0; draw < 30; ++draw) {
        const ChannelRealization h = random_channel(64, rng);
        ChannelOracle a(h, {}, books), b(h, {}, books);
        const SearchResult x = adaptive_search(a, books);
        const SearchResult y = both_side_tree_search(b, books, 2);
        CHECK(x.tx_index == y.tx_index);
        CHECK(x.rx_index == y.rx_index);
        CHECK(x.power == y.power);
        CHECK(x.joint_trace == y.joint_trace);
    }
    // Adaptive search is defined on binary codebooks only.
    FunctionOracle o([](const Codeword&, const Codeword&) { return 1.0; });
    CHECK_THROWS_AS(adaptive_search(o, build_codebook_pair(64, 4)), SearchError);
    CHECK(o.count() == 0);
}

TEST_CASE("tree searches reject a branching mismatch", "[beamsearch]")
{
    const CodebookPair books = build_codebook_pair(16, 2);
    FunctionOracle o([](const Codeword&, const Codeword&) { return 1.0; });
    CHECK_THROWS_AS(one_side_tree_search(o, books, 4), SearchError);
    CHECK_THROWS_AS(both_side_tree_search(o, books, 4), SearchError);
    CHECK(o.count() == 0);
    const CodebookPair single = build_codebook_pair(1, 2);
    CHECK_THROWS_AS(one_side_tree_search(o, single, 2), SearchError);
}

TEST_CASE("first-layer sweep order and stacking", "[beamsearch]")
{
    const CodebookPair books = build_codebook_pair(16, 4);
    std::vector<std::pair<std::size_t, std::size_t>> calls;
    FunctionOracle o([&](const Codeword& t, const Codeword& r) {
        calls.push_back({t.layer * 10 + t.index, r.layer * 10 + r.index});
        return r.layer == 1 && r.index == 3 ? 5.0 + double(t.index) : 1.0 + double(r.index);
    });
    const FirstLayerMeasurement m = first_layer_sweep(o, books);
    CHECK(m.rx_wide_index == 3);
    CHECK(m.rx_powers == std::vector<double>{2.0, 3.0, 6.0, 5.0});
    CHECK(m.tx_powers == std::vector<double>{6.0, 7.0, 8.0, 9.0});
    CHECK(m.stacked() == std::vector<double>{6.0, 7.0, 8.0, 9.0, 2.0, 3.0, 6.0, 5.0});
    REQUIRE(calls.size() == 8);
    CHECK(calls[0] == std::pair<std::size_t, std::size_t>{1, 11});
    CHECK(calls[4] == std::pair<std::size_t, std::size_t>{11, 13});
}

TEST_CASE("protocol names round-trip", "[beamsearch]")
{
    for (Protocol p : all_protocols())
        CHECK(parse_protocol(to_string(p)) == p);
    CHECK(to_string(Protocol::one_side_tree) == "one-side-tree");
    CHECK_THROWS_AS(parse_protocol("sideways"), std::invalid_argument);
}

TEST_CASE("channel oracle measurements are deterministic and cached values exact", "[beamsearch]")
{
    Rng rng(70);
    const CodebookPair books = build_codebook_pair(16, 2);
    const ChannelRealization h = random_channel(16, rng);
    ChannelOracle a(h, {}, books);
    const double first = a.measure(books.tx.codeword(2, 3), books.rx.codeword(4, 9));
    const double again = a.measure(books.tx.codeword(2, 3), books.rx.codeword(4, 9));
    CHECK(first == again);
    const Codeword copy = books.tx.codeword(2, 3);
    CHECK_THAT(a.measure(copy, books.rx.codeword(4, 9)), WithinRel(first, 1e-12));
    CHECK_THAT(a.true_power(books.tx.codeword(2, 3), books.rx.codeword(4, 9)),
               WithinRel(received_power(books.tx.codeword(2, 3).coeffs, books.rx.codeword(4, 9).coeffs, h, {}),
                         1e-12));
    CHECK(a.count() == 3);
}

TEST_CASE("noisy oracle is reproducible from its seed", "[beamsearch]")
{
    Rng rng(80);
    ThzParams p;
    p.noise_enabled = true;
    p.noise_power = 1e-12;
    const CodebookPair books = build_codebook_pair(16, 2);
    const ChannelRealization h = random_channel(16, rng, p);
    ChannelOracle a(h, p, books, 5), b(h, p, books, 5), c(h, p, books, 6);
    const SearchResult ra = one_side_tree_search(a, books, 2);
    const SearchResult rb = one_side_tree_search(b, books, 2);
    const SearchResult rc = one_side_tree_search(c, books, 2);
    CHECK(ra.p_rx_trace == rb.p_rx_trace);
    CHECK(ra.p_rx_trace != rc.p_rx_trace);
}
