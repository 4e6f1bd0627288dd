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

#include <cmath>

#include "beamforge/codebook.hpp"
#include "oracles.hpp"

using namespace beamforge;
using Catch::Matchers::WithinAbs;

TEST_CASE("root codeword is the first unit vector", "[codebook]")
{
    for (std::size_t n : {1u, 2u, 8u, 64u}) {
        const HierarchicalCodebook book(n, 2);
        const Codeword& w = book.omni();
        CHECK(w.layer == 0);
        CHECK(w.index == 1);
        CHECK(w.coeffs[0] == cdouble(1.0, 0.0));
        for (std::size_t i = 1; i < n; ++i)
            CHECK(w.coeffs[i] == cdouble(0.0, 0.0));
    }
}

TEST_CASE("hand-evaluated codeword N=4, k=1, n=1", "[codebook]")
{
    const HierarchicalCodebook book(4, 2);
    const CVector& w = book.codeword(1, 1).coeffs;
    const double s = 1.0 / std::sqrt(2.0);
    CHECK_THAT(w[0].real(), WithinAbs(s, 1e-15));
    CHECK_THAT(w[0].imag(), WithinAbs(0.0, 1e-15));
    CHECK_THAT(w[1].real(), WithinAbs(0.0, 1e-15));
    CHECK_THAT(w[1].imag(), WithinAbs(-s, 1e-15));
    CHECK(w[2] == cdouble(0.0, 0.0));
    CHECK(w[3] == cdouble(0.0, 0.0));
}

TEST_CASE("narrow layer of N=4 points at the four DFT boresights", "[codebook]")
{
    const HierarchicalCodebook book(4, 2);
    const double u[] = {-0.75, -0.25, 0.25, 0.75};
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto ref = oracle::steering(4, u[n - 1]);
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(std::abs(book.codeword(2, n).coeffs[i] - ref[i]) < 1e-15);
    }
}

TEST_CASE("codewords match the deactivation formula elementwise", "[codebook][property]")
{
    for (auto [n, m] : {std::pair{8u, 2u}, {16u, 4u}, {27u, 3u}, {64u, 2u}, {64u, 8u}}) {
        const HierarchicalCodebook book(n, m);
        for (std::size_t k = 0; k <= book.depth(); ++k)
            for (const auto& w : book.layer(k)) {
                const auto ref = oracle::codeword(n, m, k, w.index);
                for (std::size_t i = 0; i < n; ++i)
                    REQUIRE(std::abs(w.coeffs[i] - ref[i]) < 1e-14);
            }
    }
}

TEST_CASE("unit norm and deactivation sparsity in every layer", "[codebook][property]")
{
    for (std::size_t n : {4u, 8u, 16u, 64u}) {
        const HierarchicalCodebook book(n, 2);
        REQUIRE(book.depth() == static_cast<std::size_t>(std::log2(n)));
        for (std::size_t k = 0; k <= book.depth(); ++k) {
            const auto layer = book.layer(k);
            const std::size_t active = oracle::ipow(2, k);
            REQUIRE(layer.size() == active);
            for (std::size_t idx = 0; idx < layer.size(); ++idx) {
                const Codeword& w = layer[idx];
                CHECK(w.layer == k);
                CHECK(w.index == idx + 1);
                CHECK_THAT(euclidean_norm(w.coeffs), WithinAbs(1.0, 1e-12));
                for (std::size_t i = 0; i < n; ++i) {
                    if (i < active)
                        REQUIRE_THAT(std::abs(w.coeffs[i]), WithinAbs(1.0 / std::sqrt(double(active)), 1e-12));
                    else
                        REQUIRE(w.coeffs[i] == cdouble(0.0, 0.0));
                }
            }
        }
    }
}

TEST_CASE("narrow layer equals the DFT codebook", "[codebook][property]")
{
    for (std::size_t n : {4u, 8u, 16u, 64u}) {
        const HierarchicalCodebook book(n, 2);
        const DftCodebook dft = build_dft(n);
        REQUIRE(dft.codewords.size() == n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t e = 0; e < n; ++e)
                REQUIRE(std::abs(book.narrow()[i].coeffs[e] - dft.codewords[i][e]) < 1e-12);
    }
}

TEST_CASE("DFT codebook", "[codebook]")
{
    const DftCodebook one = build_dft(1);
    REQUIRE(one.codewords.size() == 1);
    CHECK(one.codewords[0][0] == cdouble(1.0, 0.0));

    const DftCodebook two = build_dft(2);
    CHECK(two.boresights == std::vector<double>{-0.5, 0.5});
    CHECK(std::abs(inner_product(two.codewords[0], two.codewords[1])) < 1e-15);

    const DftCodebook big = build_dft(32);
    for (std::size_t a = 0; a < 32; ++a)
        for (std::size_t b = 0; b < 32; ++b) {
            const double ip = std::abs(inner_product(big.codewords[a], big.codewords[b]));
            REQUIRE_THAT(ip, WithinAbs(a == b ? 1.0 : 0.0, 1e-12));
        }
    CHECK_THROWS_AS(build_dft(0), std::invalid_argument);
}

TEST_CASE("children index arithmetic", "[codebook]")
{
    const HierarchicalCodebook book(16, 2);
    CHECK(book.children(0, 1) == std::vector<std::size_t>{1, 2});
    CHECK(book.children(1, 2) == std::vector<std::size_t>{3, 4});
    CHECK(children(book, 2, 3) == std::vector<std::size_t>{5, 6});
    CHECK_THROWS_AS(book.children(4, 1), CodebookError);

    const HierarchicalCodebook quad(64, 4);
    CHECK(quad.children(1, 3) == std::vector<std::size_t>{9, 10, 11, 12});
    CHECK_THROWS_AS(quad.children(1, 5), CodebookError);
}

TEST_CASE("child coverage intervals partition the parent", "[codebook][property]")
{
    for (auto [n, m] : {std::pair{4u, 2u}, {8u, 2u}, {16u, 2u}, {64u, 2u}, {64u, 4u}}) {
        const HierarchicalCodebook book(n, m);
        for (std::size_t k = 0; k < book.depth(); ++k)
            for (const auto& parent : book.layer(k)) {
                const CoverageInterval pi = book.coverage(k, parent.index);
                const auto kids = book.children(k, parent.index);
                REQUIRE(kids.size() == m);
                double edge = pi.lo;
                for (std::size_t c : kids) {
                    const CoverageInterval ci = book.coverage(k + 1, c);
                    REQUIRE_THAT(ci.lo, WithinAbs(edge, 1e-15));
                    REQUIRE(ci.hi > ci.lo);
                    edge = ci.hi;
                }
                REQUIRE_THAT(edge, WithinAbs(pi.hi, 1e-15));
            }
        CHECK(book.coverage(0, 1).lo == -1.0);
        CHECK(book.coverage(0, 1).hi == 1.0);
    }
}

TEST_CASE("each codeword's boresight lies inside its coverage interval", "[codebook]")
{
    const HierarchicalCodebook book(64, 2);
    for (std::size_t k = 0; k <= book.depth(); ++k)
        for (const auto& w : book.layer(k)) {
            const CoverageInterval c = book.coverage(k, w.index);
            CHECK_THAT(c.center(), WithinAbs(-1.0 + (2.0 * double(w.index) - 1.0) / double(1u << k), 1e-15));
            CHECK(c.contains(c.center()));
            CHECK_FALSE(c.contains(c.hi));
        }
}

TEST_CASE("children out-cover the rest of their layer on >= 95% of the parent's interval", "[codebook][property]")
{
    for (std::size_t n : {4u, 8u, 16u, 64u}) {
        const HierarchicalCodebook book(n, 2);
        for (std::size_t k = 0; k < book.depth(); ++k)
            for (const auto& parent : book.layer(k)) {
                const double rate = oracle::child_coverage_rate(book, k, parent.index);
                INFO("N=" << n << " k=" << k << " n=" << parent.index);
                CHECK(rate >= 0.95);
            }
    }
}

TEST_CASE("beam_gain", "[codebook]")
{
    const HierarchicalCodebook book(16, 2);
    for (double u : {-1.0, -0.3, 0.0, 0.77, 1.0})
        CHECK_THAT(beam_gain(book.omni(), u), WithinAbs(1.0 / 16.0, 1e-15));

    for (const auto& w : book.narrow()) {
        const double boresight = -1.0 + (2.0 * double(w.index) - 1.0) / 16.0;
        CHECK_THAT(beam_gain(w, boresight), WithinAbs(1.0, 1e-12));
    }

    const Codeword& w1 = book.codeword(1, 2);
    for (int i = 0; i < 512; ++i) {
        const double u = -1.0 + 2.0 * i / 511.0;
        REQUIRE_THAT(beam_gain(w1, u), WithinAbs(oracle::beam_gain(w1.coeffs, u), 1e-13));
    }
    CHECK_THROWS_AS(beam_gain(w1, 1.2), std::domain_error);
}

TEST_CASE("construction errors", "[codebook]")
{
    CHECK_THROWS_AS(HierarchicalCodebook(12, 2), CodebookError);
    CHECK_THROWS_AS(HierarchicalCodebook(0, 2), CodebookError);
    CHECK_THROWS_AS(HierarchicalCodebook(16, 1), CodebookError);
    CHECK_THROWS_AS(HierarchicalCodebook(16, 3), CodebookError);
    CHECK_NOTHROW(HierarchicalCodebook(1, 2));
    CHECK(exact_log(81, 3) == 4);
    CHECK_THROWS_AS(exact_log(80, 3), CodebookError);

    const HierarchicalCodebook book(8, 2);
    CHECK_THROWS_AS(book.layer(4), CodebookError);
    CHECK_THROWS_AS(book.codeword(1, 0), CodebookError);
    CHECK_THROWS_AS(book.codeword(1, 3), CodebookError);
}

TEST_CASE("construction is deterministic", "[codebook]")
{
    const HierarchicalCodebook a(64, 4), b(64, 4);
    for (std::size_t k = 0; k <= a.depth(); ++k)
        for (std::size_t i = 0; i < a.layer(k).size(); ++i)
            REQUIRE(a.layer(k)[i].coeffs == b.layer(k)[i].coeffs);
}
