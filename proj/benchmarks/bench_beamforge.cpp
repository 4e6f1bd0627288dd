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

#include <benchmark/benchmark.h>

#include "beamforge/beamsearch.hpp"
#include "beamforge/codebook.hpp"
#include "beamforge/datagen.hpp"
#include "beamforge/nn/builder.hpp"
#include "beamforge/nn/predict.hpp"

using namespace beamforge;

namespace {

ChannelRealization bench_channel(std::size_t n) { return draw_channel({}, n, n, {12.0, 0.23, -0.61}, 5); }

void BM_BuildCodebook(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(build_codebook_pair(n, 2));
}
BENCHMARK(BM_BuildCodebook)->RangeMultiplier(4)->Range(16, 1024);

template <Protocol P>
void BM_Search(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const CodebookPair books = build_codebook_pair(n, 2);
    const ChannelRealization h = bench_channel(n);
    for (auto _ : state) {
        ChannelOracle o(h, {}, books);
        benchmark::DoNotOptimize(run_protocol(P, o, books));
    }
}
BENCHMARK(BM_Search<Protocol::exhaustive>)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_Search<Protocol::one_side>)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_Search<Protocol::one_side_tree>)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_Search<Protocol::both_side_tree>)->Arg(16)->Arg(64)->Arg(256);

void BM_Forward(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const nn::ComputationGraph g(nn::build_incept_resnet(n, 2, 1));
    const CodebookPair books = build_codebook_pair(n, 2);
    const NormalizationConstants norms{{1e-12, 1e-4}, {1e-12, 1e-4}};
    const std::vector<double> powers{1e-6, 2e-7, 5e-6, 4e-8};
    for (auto _ : state)
        benchmark::DoNotOptimize(nn::predict(g, powers, norms, books));
}
BENCHMARK(BM_Forward)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_GenerateSample(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const CodebookPair books = build_codebook_pair(n, 2);
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(generate_sample({}, books, {}, ++seed));
}
BENCHMARK(BM_GenerateSample)->Arg(16)->Arg(64)->Arg(256);

} // namespace

BENCHMARK_MAIN();
