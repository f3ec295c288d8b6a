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

#include "genflow/digest.hpp"

#include <charconv>

#include <fmt/format.h>

#include "genflow/errors.hpp"

namespace genflow {

std::string Digest::hex() const { return fmt::format("{:016x}", value); }

Digest Digest::from_hex(std::string_view text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v, 16);
    if (text.empty() || text.size() > 16 || ec != std::errc{} || ptr != end) {
        throw Error(ErrorCode::InvalidRequest, fmt::format("invalid digest '{}'", text));
    }
    return Digest{v};
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis) noexcept {
    std::uint64_t h = basis;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

Digest digest_bytes(std::string_view bytes) noexcept {
    auto h = fnv1a(bytes);
    return Digest{h == 0 ? 1 : h};
}

Digest combine(Digest base, std::uint64_t value) noexcept {
    auto h = mix64(base.value ^ mix64(value));
    return Digest{h == 0 ? 1 : h};
}

}  // namespace genflow
