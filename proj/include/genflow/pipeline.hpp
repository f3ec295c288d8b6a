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

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "genflow/asset.hpp"
#include "genflow/brand_dna.hpp"
#include "genflow/scene_chain.hpp"
#include "genflow/telemetry.hpp"

namespace genflow {

enum class CampaignState { pending, extracting, normalizing, scripting, generating, completed, failed };

std::string_view to_string(CampaignState state);
CampaignState campaign_state_from_string(std::string_view text);
bool is_terminal(CampaignState state) noexcept;
/// Forward moves along the listed order, or any active state to failed.
bool legal_transition(CampaignState from, CampaignState to) noexcept;

inline constexpr int kDefaultSceneCount = 4;

struct CampaignRequest {
    std::string url;                      // ignored when dna is set
    std::optional<BrandDNA> dna;          // skips extraction
    std::optional<AssetDescriptor> asset; // defaults to default_asset(url)
    std::string objective;
    int n_scenes = kDefaultSceneCount;
    QcPolicy policy;
};

/// Deterministic placeholder product shot used when no asset is supplied.
AssetDescriptor default_asset(std::string_view label);

struct PipelineOptions {
    FetchPolicy fetch;
    int repair_budget = 1;
    double quality_floor = kDefaultQualityFloor;
    CostModel cost_model = CostModel::defaults();
    std::uint64_t seed = 42;
};

struct PipelineHooks {
    std::function<void(CampaignState)> on_state;
    std::shared_ptr<const std::atomic<bool>> cancel;
};

/// Runs one campaign end to end on `bus`, which must already have `run_id`
/// open. Phase failures end the run with status "failed" and a fault event;
/// they are never thrown. The run is closed on return.
RunTranscript run_pipeline(const CampaignRequest& request, const BackendSet& backends, const PipelineOptions& options,
                           const std::string& run_id, EventBus& bus, std::shared_ptr<Clock> clock,
                           const PipelineHooks& hooks = {});

/// Convenience wrapper with a private bus and logical clock.
RunTranscript run_pipeline(const CampaignRequest& request, const BackendSet& backends, const PipelineOptions& options,
                           const std::string& run_id = "run");

}  // namespace genflow
