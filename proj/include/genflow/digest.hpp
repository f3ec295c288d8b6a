// Copyright 2026 The Genflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace genflow {

/// 64-bit content digest, rendered as 16 lowercase hex characters.
/// Zero is reserved as the null digest.
struct Digest {
    std::uint64_t value = 0;

    [[nodiscard]] std::string hex() const;
    [[nodiscard]] static Digest from_hex(std::string_view text);
    [[nodiscard]] bool is_null() const noexcept { return value == 0; }

    auto operator<=>(const Digest&) const = default;
};

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// FNV-1a over raw bytes.
[[nodiscard]] std::uint64_t fnv1a(std::string_view bytes,
                                  std::uint64_t basis = 0xCBF29CE484222325ULL) noexcept;

[[nodiscard]] Digest digest_bytes(std::string_view bytes) noexcept;

/// Folds a value into an existing digest; never yields the null digest.
[[nodiscard]] Digest combine(Digest base, std::uint64_t value) noexcept;

}  // namespace genflow
