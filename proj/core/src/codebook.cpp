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

#include "beamforge/codebook.hpp"

#include <cmath>
#include <string>

namespace beamforge {

std::size_t exact_log(std::size_t n, std::size_t base)
{
    if (base < 2)
        throw CodebookError("branching factor must be >= 2, got " + std::to_string(base));
    if (n == 0)
        throw CodebookError("antenna count must be >= 1");
    std::size_t k = 0;
    std::size_t p = 1;
    while (p < n) {
        p *= base;
        ++k;
    }
    if (p != n)
        throw CodebookError(std::to_string(n) + " antennas is not a power of the branching factor " +
                            std::to_string(base));
    return k;
}

HierarchicalCodebook::HierarchicalCodebook(std::size_t n_antennas, std::size_t branching)
    : n_antennas_(n_antennas), branching_(branching), depth_(exact_log(n_antennas, branching))
{
    layers_.resize(depth_ + 1);
    std::size_t active = 1; // M^k
    for (std::size_t k = 0; k <= depth_; ++k) {
        auto& layer = layers_[k];
        layer.reserve(active);
        for (std::size_t n = 1; n <= active; ++n) {
            const double u = -1.0 + static_cast<double>(2 * n - 1) / static_cast<double>(active);
            CVector coeffs = steering_vector(active, u);
            coeffs.resize(n_antennas_, cdouble{0.0, 0.0});
            layer.push_back(Codeword{k, n, std::move(coeffs)});
        }
        active *= branching_;
    }
}

std::span<const Codeword> HierarchicalCodebook::layer(std::size_t k) const
{
    if (k > depth_)
        throw CodebookError("layer " + std::to_string(k) + " exceeds codebook depth " + std::to_string(depth_));
    return layers_[k];
}

const Codeword& HierarchicalCodebook::codeword(std::size_t k, std::size_t n) const
{
    const auto l = layer(k);
    if (n < 1 || n > l.size())
        throw CodebookError("codeword index " + std::to_string(n) + " out of range at layer " + std::to_string(k));
    return l[n - 1];
}

std::vector<std::size_t> HierarchicalCodebook::children(std::size_t k, std::size_t n) const
{
    if (k >= depth_)
        throw CodebookError("codeword (" + std::to_string(k) + ", " + std::to_string(n) +
                            ") is on the narrow layer and has no children");
    static_cast<void>(codeword(k, n));
    std::vector<std::size_t> out(branching_);
    for (std::size_t i = 0; i < branching_; ++i)
        out[i] = branching_ * (n - 1) + 1 + i;
    return out;
}

CoverageInterval HierarchicalCodebook::coverage(std::size_t k, std::size_t n) const
{
    const double width = 2.0 / static_cast<double>(layer(k).size());
    static_cast<void>(codeword(k, n));
    return {-1.0 + static_cast<double>(n - 1) * width, -1.0 + static_cast<double>(n) * width};
}

HierarchicalCodebook build_hierarchical(std::size_t n_antennas, std::size_t branching)
{
    return HierarchicalCodebook(n_antennas, branching);
}

std::vector<std::size_t> children(const HierarchicalCodebook& codebook, std::size_t layer, std::size_t index)
{
    return codebook.children(layer, index);
}

double beam_gain(std::span<const cdouble> w, double u)
{
    const CVector a = steering_vector(w.size(), u);
    return std::norm(inner_product(a, w));
}

DftCodebook build_dft(std::size_t n_antennas)
{
    if (n_antennas == 0)
        throw CodebookError("DFT codebook needs at least one antenna");
    DftCodebook cb;
    cb.n_antennas = n_antennas;
    for (std::size_t n = 1; n <= n_antennas; ++n) {
        const double u = -1.0 + static_cast<double>(2 * n - 1) / static_cast<double>(n_antennas);
        cb.boresights.push_back(u);
        cb.codewords.push_back(steering_vector(n_antennas, u));
    }
    return cb;
}

CodebookPair build_codebook_pair(std::size_t n_antennas, std::size_t branching)
{
    return {HierarchicalCodebook(n_antennas, branching), HierarchicalCodebook(n_antennas, branching)};
}

} // namespace beamforge
