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
#include <gtest/gtest.h>

#include <set>

#include "genflow/digest.hpp"
#include "genflow/random.hpp"

namespace genflow {
namespace {

TEST(Digest, HexRoundTrip) {
    Digest d{0x00ab'cdef'0123'4567ULL};
    EXPECT_EQ(d.hex(), "00abcdef01234567");
    EXPECT_EQ(Digest::from_hex(d.hex()), d);
    EXPECT_TRUE(Digest{}.is_null());
}

TEST(Digest, FnvMatchesReferenceVectors) {
    // Published FNV-1a 64-bit test vectors.
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(Digest, BytesAreNeverNull) {
    EXPECT_FALSE(digest_bytes("").is_null());
    EXPECT_NE(digest_bytes("a"), digest_bytes("b"));
}

TEST(Stream, SameSeedSameSequence) {
    Stream a(7);
    Stream b(7);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Stream, ChildrenAreIndependentOfSiblingUse) {
    Stream root(11);
    auto x1 = root.child("x");
    auto first = x1.next_u64();

    Stream again(11);
    auto y = again.child("y");
    for (int i = 0; i < 10; ++i) y.next_u64();
    EXPECT_EQ(again.child("x").next_u64(), first);
}

TEST(Stream, IndexedChildrenDiffer) {
    Stream root(3);
    std::set<std::uint64_t> keys;
    for (std::uint64_t i = 0; i < 1000; ++i) keys.insert(root.child("run", i).key());
    EXPECT_EQ(keys.size(), 1000u);
    EXPECT_NE(root.child("run", 0).key(), root.child("scene", 0).key());
}

TEST(Stream, UniformMomentsAndRange) {
    Stream s(99);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double u = s.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    // Mean of U(0,1) has sd 1/sqrt(12 n) ~ 0.00065.
    EXPECT_NEAR(sum / n, 0.5, 0.004);
}

TEST(Stream, BelowCoversRange) {
    Stream s(5);
    std::array<int, 7> hits{};
    for (int i = 0; i < 7000; ++i) ++hits[s.below(7)];
    for (int h : hits) EXPECT_GT(h, 800);
}

}  // namespace
}  // namespace genflow
