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

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "genflow/pipeline.hpp"
#include "genflow/remote_backend.hpp"
#include "genflow/sim_backend.hpp"

namespace genflow {

enum class Provider { sim, remote };

std::string_view to_string(Provider provider);
Provider provider_from_string(std::string_view text);

/// Backend roles as named in config keys and GENFLOW_ENDPOINT_<ROLE>.
inline constexpr std::array<std::string_view, 6> kBackendRoles = {
    "generator", "enhancer", "extractor", "director", "director_agent", "brand_safety_agent"};

struct EngineConfig {
    Provider default_provider = Provider::sim;
    std::map<std::string, Provider> providers;  // per-role overrides
    sim::SimParams sim = sim::default_sim_params();
    std::map<std::string, remote::EndpointConfig> endpoints;
    FetchPolicy fetch;
    int repair_budget = 1;
    double quality_floor = kDefaultQualityFloor;
    QcPolicy qc;

    [[nodiscard]] Provider provider_for(std::string_view role) const;
};

/// Relative paths resolve against `base_dir`. Unknown keys and bad values
/// throw Config.
EngineConfig engine_config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
Json to_json(const EngineConfig& config);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

/// GENFLOW_SEED and GENFLOW_ENDPOINT_<ROLE>.
void apply_env_overrides(EngineConfig& config, const EnvLookup& env);

BackendSet make_backends(const EngineConfig& config);
PipelineOptions pipeline_options(const EngineConfig& config);

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir;  // empty disables persistence
    int max_concurrent = 2;
    std::optional<std::filesystem::path> ui_dir;
    std::filesystem::path base_dir;
    Json engine = Json::object();
    std::map<std::string, Json> profiles;  // merge patches over `engine`
    std::string default_profile = "sim";
};

ServiceConfig service_config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
ServiceConfig load_service_config(const std::filesystem::path& path);

/// Unknown profile names throw InvalidRequest.
EngineConfig resolve_profile(const ServiceConfig& config, const std::string& profile, const EnvLookup& env);

}  // namespace genflow
