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

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "beamforge/channel.hpp"

namespace beamforge {

/// One beamforming vector of a hierarchical codebook. Layers are 0-based
/// (layer 0 is the single-element omni codeword w(0,1)); indices within a
/// layer are 1-based.
struct Codeword {
    std::size_t layer = 0;
    std::size_t index = 1;
    CVector coeffs;
};

/// Nominal angular coverage [lo, hi) of a codeword in u-space.
struct CoverageInterval {
    double lo = -1.0;
    double hi = 1.0;

    double center() const { return 0.5 * (lo + hi); }
    bool contains(double u) const { return u >= lo && u < hi; }
};

class CodebookError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// M-ary antenna-deactivation codebook. Layer k activates the first M^k
/// elements and steers them to the M^k boresights -1 + (2n-1)/M^k; the
/// remaining elements are switched off. Immutable once built.
class HierarchicalCodebook {
public:
    HierarchicalCodebook(std::size_t n_antennas, std::size_t branching);

    std::size_t n_antennas() const { return n_antennas_; }
    std::size_t branching() const { return branching_; }
    /// K = log_M N; the narrow layer.
    std::size_t depth() const { return depth_; }

    std::span<const Codeword> layer(std::size_t k) const;
    const Codeword& codeword(std::size_t k, std::size_t n) const;
    const Codeword& omni() const { return codeword(0, 1); }
    std::span<const Codeword> narrow() const { return layer(depth_); }

    /// Indices M(n-1)+1 .. Mn at layer k+1. Throws CodebookError at the
    /// narrow layer.
    std::vector<std::size_t> children(std::size_t k, std::size_t n) const;

    CoverageInterval coverage(std::size_t k, std::size_t n) const;

private:
    std::size_t n_antennas_;
    std::size_t branching_;
    std::size_t depth_ = 0;
    std::vector<std::vector<Codeword>> layers_;
};

HierarchicalCodebook build_hierarchical(std::size_t n_antennas, std::size_t branching);

/// Returns K with M^K == N, or throws CodebookError.
std::size_t exact_log(std::size_t n, std::size_t base);

/// Free-function form of HierarchicalCodebook::children().
std::vector<std::size_t> children(const HierarchicalCodebook& codebook, std::size_t layer, std::size_t index);

/// |a(N, u)^H w|^2 with N = w.size().
double beam_gain(std::span<const cdouble> w, double u);
inline double beam_gain(const Codeword& w, double u) { return beam_gain(w.coeffs, u); }

/// Flat codebook of N full-array steering vectors at u_n = -1 + (2n-1)/N.
struct DftCodebook {
    std::size_t n_antennas = 0;
    std::vector<double> boresights;
    std::vector<CVector> codewords;
};

DftCodebook build_dft(std::size_t n_antennas);

/// Tx and Rx codebooks handed to the search protocols together.
struct CodebookPair {
    HierarchicalCodebook tx;
    HierarchicalCodebook rx;
};

CodebookPair build_codebook_pair(std::size_t n_antennas, std::size_t branching);

} // namespace beamforge
