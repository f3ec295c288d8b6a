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

#include "genflow/random.hpp"

#include "genflow/digest.hpp"

namespace genflow {

Stream::Stream(std::uint64_t seed) noexcept : key_(mix64(seed)) {}

Stream Stream::child(std::string_view label) const noexcept {
    return Stream(mix64(key_ ^ fnv1a(label)), 0);
}

Stream Stream::child(std::string_view label, std::uint64_t index) const noexcept {
    return Stream(mix64(mix64(key_ ^ fnv1a(label)) + index), 0);
}

std::uint64_t Stream::next_u64() noexcept {
    return mix64(key_ ^ mix64(counter_++));
}

double Stream::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Stream::below(std::uint64_t n) noexcept {
    // Lemire's multiply-shift; bias is below 2^-64 * n and irrelevant here.
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

}  // namespace genflow
