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
#include "genflow/asset.hpp"

#include <algorithm>
#include <array>

#include <fmt/format.h>

#include "genflow/backends.hpp"
#include "genflow/errors.hpp"
#include "genflow/run_context.hpp"

namespace genflow {
namespace {

std::array<double, 3> scores(const AssetDescriptor& a) { return {a.illumination, a.resolution, a.background_isolation}; }

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

Json scores_json(const AssetDescriptor& a) {
    return Json{{"illumination", a.illumination},
                {"resolution", a.resolution},
                {"background_isolation", a.background_isolation}};
}

}  // namespace

void check_asset(const AssetDescriptor& asset) {
    if (asset.asset_id.empty()) throw Error(ErrorCode::InvalidAsset, "asset_id is empty");
    constexpr std::array<const char*, 3> kNames = {"illumination", "resolution", "background_isolation"};
    auto s = scores(asset);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!in_unit(s[i])) {
            throw Error(ErrorCode::InvalidAsset, fmt::format("{} = {} is outside [0, 1]", kNames[i], s[i]));
        }
    }
}

Digest descriptor_digest(const AssetDescriptor& asset) {
    return digest_bytes(fmt::format("{}|{:.17g}|{:.17g}|{:.17g}", asset.asset_id, asset.illumination,
                                    asset.resolution, asset.background_isolation));
}

Json to_json(const AssetDescriptor& asset) {
    return Json{{"asset_id", asset.asset_id},
                {"illumination", asset.illumination},
                {"resolution", asset.resolution},
                {"background_isolation", asset.background_isolation},
                {"content_digest", asset.content_digest.hex()}};
}

AssetDescriptor asset_from_json(const Json& j) {
    AssetDescriptor a;
    try {
        a.asset_id = j.at("asset_id").get<std::string>();
        a.illumination = j.at("illumination").get<double>();
        a.resolution = j.at("resolution").get<double>();
        a.background_isolation = j.at("background_isolation").get<double>();
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidAsset, fmt::format("asset descriptor: {}", e.what()));
    }
    a.content_digest = j.contains("content_digest") ? Digest::from_hex(j["content_digest"].get<std::string>())
                                                    : descriptor_digest(a);
    check_asset(a);
    return a;
}

AssetDescriptor normalize_asset(const AssetDescriptor& asset, const BrandDNA& dna, EnhancerBackend& enhancer,
                                Stream stream, double quality_floor, RunContext* ctx) {
    check_asset(asset);
    auto before = scores(asset);
    if (std::all_of(before.begin(), before.end(), [&](double s) { return s >= quality_floor; })) return asset;

    AssetDescriptor enhanced;
    try {
        enhanced = enhancer.enhance(asset, dna, quality_floor, stream);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::EnhancementFailed) throw;
        throw Error(ErrorCode::EnhancementFailed, fmt::format("enhancer failed: {}", e.what()));
    } catch (const std::exception& e) {
        throw Error(ErrorCode::EnhancementFailed, fmt::format("enhancer failed: {}", e.what()));
    }

    AssetDescriptor out = asset;
    auto raw = scores(enhanced);
    for (double v : raw) {
        if (!in_unit(v)) throw Error(ErrorCode::EnhancementFailed, fmt::format("enhancer returned score {}", v));
    }
    out.illumination = std::max(asset.illumination, enhanced.illumination);
    out.resolution = std::max(asset.resolution, enhanced.resolution);
    out.background_isolation = std::max(asset.background_isolation, enhanced.background_isolation);
    auto after = scores(out);
    for (double v : after) {
        if (v < quality_floor) {
            throw Error(ErrorCode::EnhancementFailed,
                        fmt::format("enhanced asset score {} is below the quality floor {}", v, quality_floor));
        }
    }
    if (after != before) out.content_digest = combine(asset.content_digest, descriptor_digest(out).value);
    if (ctx) {
        ctx->emit_call(CallKind::enhancer, AgentRole::enhancer, EventKind::generation,
                       Json{{"asset_id", asset.asset_id},
                            {"before", scores_json(asset)},
                            {"after", scores_json(out)},
                            {"content_digest", out.content_digest.hex()}});
    }
    return out;
}

}  // namespace genflow
