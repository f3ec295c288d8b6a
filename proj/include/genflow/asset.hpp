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

#include <string>

#include "genflow/common.hpp"
#include "genflow/digest.hpp"
#include "genflow/random.hpp"

namespace genflow {

struct BrandDNA;
class EnhancerBackend;
class RunContext;

/// Abstract product image: three quality scores plus a content digest.
struct AssetDescriptor {
    std::string asset_id;
    double illumination = 0.0;
    double resolution = 0.0;
    double background_isolation = 0.0;
    Digest content_digest;

    bool operator==(const AssetDescriptor&) const = default;
};

inline constexpr double kDefaultQualityFloor = 0.8;

/// Throws InvalidAsset on an empty id or a score outside [0, 1].
void check_asset(const AssetDescriptor& asset);

/// Digest of the id and scores; used when a descriptor file carries none.
Digest descriptor_digest(const AssetDescriptor& asset);

Json to_json(const AssetDescriptor& asset);
/// Accepts a missing content_digest (computed from the fields); runs check_asset.
AssetDescriptor asset_from_json(const Json& j);

/// Enhancement pass. Assets already at or above the floor on every score are
/// returned untouched. Otherwise the enhancer output is kept monotone
/// (never below the input) and must clear the floor, else EnhancementFailed.
AssetDescriptor normalize_asset(const AssetDescriptor& asset, const BrandDNA& dna, EnhancerBackend& enhancer,
                                Stream stream, double quality_floor = kDefaultQualityFloor,
                                RunContext* ctx = nullptr);

}  // namespace genflow
