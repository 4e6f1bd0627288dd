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

#include <complex>
#include <cstdint>
#include <random>

namespace beamforge {

using Rng = std::mt19937_64;

// Stream identifiers keep seeds derived for different purposes disjoint.
enum class SeedStream : std::uint64_t {
    train_sample = 1,
    test_sample = 2,
    eval_trial = 3,
    search_trial = 4,
    weight_init = 5,
    noise = 6,
};

/// SplitMix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for item `index` of `stream` under `master`. Distinct (stream, index)
/// pairs give distinct seeds for a fixed master.
std::uint64_t derive_seed(std::uint64_t master, SeedStream stream, std::uint64_t index) noexcept;

/// Circularly-symmetric complex Gaussian with unit variance, CN(0, 1).
std::complex<double> complex_gaussian(Rng& rng);

} // namespace beamforge
