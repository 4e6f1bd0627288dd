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

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace beamforge::detail {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename UInt>
constexpr UInt byteswap_uint(UInt v) noexcept
{
    UInt out = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) {
        out = static_cast<UInt>((out << 8) | (v & 0xFF));
        v = static_cast<UInt>(v >> 8);
    }
    return out;
}

template <typename T>
auto to_bits(T v) noexcept
{
    if constexpr (std::is_same_v<T, double>)
        return std::bit_cast<std::uint64_t>(v);
    else if constexpr (std::is_same_v<T, float>)
        return std::bit_cast<std::uint32_t>(v);
    else
        return v;
}

/// Appends little-endian scalars to a byte string.
class ByteWriter {
public:
    template <typename T>
    void put(T value)
    {
        auto bits = to_bits(value);
        if constexpr (std::endian::native == std::endian::big)
            bits = byteswap_uint(bits);
        char raw[sizeof(bits)];
        std::memcpy(raw, &bits, sizeof(bits));
        buffer_.append(raw, sizeof(bits));
    }

    void put_bytes(std::string_view bytes) { buffer_.append(bytes); }

    const std::string& bytes() const { return buffer_; }
    std::string release() { return std::move(buffer_); }

private:
    std::string buffer_;
};

/// Reads little-endian scalars from a byte view; throws FormatError on
/// truncation.
class ByteReader {
public:
    explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

    template <typename T>
    T get()
    {
        using Bits = decltype(to_bits(T{}));
        Bits bits{};
        require(sizeof(Bits));
        std::memcpy(&bits, bytes_.data() + pos_, sizeof(Bits));
        pos_ += sizeof(Bits);
        if constexpr (std::endian::native == std::endian::big)
            bits = byteswap_uint(bits);
        if constexpr (std::is_same_v<T, double> || std::is_same_v<T, float>)
            return std::bit_cast<T>(bits);
        else
            return bits;
    }

    std::string_view get_bytes(std::size_t n)
    {
        require(n);
        auto out = bytes_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void require(std::size_t n) const
    {
        if (bytes_.size() - pos_ < n)
            throw FormatError("unexpected end of data at byte " + std::to_string(pos_));
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// FNV-1a 64-bit, rendered as 16 lowercase hex digits.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;
std::string hex64(std::uint64_t v);

} // namespace beamforge::detail
