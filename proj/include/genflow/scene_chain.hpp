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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genflow/asset.hpp"
#include "genflow/brand_dna.hpp"
#include "genflow/cost.hpp"
#include "genflow/qc_loop.hpp"
#include "genflow/script.hpp"
#include "genflow/telemetry.hpp"

namespace genflow {

FrameRef extract_final_frame(const VideoArtifact& video);

/// Init frame for scene 0, derived from the normalized asset.
FrameRef initial_frame(const AssetDescriptor& asset);

/// Sequential state-passing loop. Scene k draws from root.child("scene", k)
/// and is seeded by the final frame of scene k-1, committed or not.
std::vector<SceneOutcome> run_scenes(const ScriptMatrix& matrix, const AssetDescriptor& asset, const BrandDNA& dna,
                                     const QcPolicy& policy, const BackendSet& backends, Stream root,
                                     RunContext& ctx);

struct RunTranscript {
    std::string run_id;
    std::string status = "completed";  // completed | failed
    std::optional<std::string> failure;
    std::optional<BrandDNA> dna;
    std::optional<AssetDescriptor> asset;
    std::optional<ScriptMatrix> matrix;
    std::vector<SceneOutcome> scenes;
    std::vector<Event> events;
    CostTotals totals;

    bool operator==(const RunTranscript&) const = default;
};

Json to_json(const RunTranscript& transcript);
RunTranscript transcript_from_json(const Json& j);

/// Self-contained chain run on a private event bus with a logical clock.
RunTranscript run_chain(const ScriptMatrix& matrix, const AssetDescriptor& asset, const BrandDNA& dna,
                        const QcPolicy& policy, const BackendSet& backends, std::uint64_t seed,
                        const CostModel& cost_model = CostModel::defaults(), const std::string& run_id = "run");

}  // namespace genflow
