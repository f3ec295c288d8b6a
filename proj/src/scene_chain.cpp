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
#include "genflow/scene_chain.hpp"

#include <fmt/format.h>

#include "genflow/errors.hpp"

namespace genflow {

FrameRef extract_final_frame(const VideoArtifact& video) {
    check_artifact(video);
    return video.frames.back();
}

FrameRef initial_frame(const AssetDescriptor& asset) {
    check_asset(asset);
    return FrameRef{asset.content_digest, -1, 0};
}

std::vector<SceneOutcome> run_scenes(const ScriptMatrix& matrix, const AssetDescriptor& asset, const BrandDNA& dna,
                                     const QcPolicy& policy, const BackendSet& backends, Stream root,
                                     RunContext& ctx) {
    if (matrix.scenes.empty()) throw Error(ErrorCode::InvalidRequest, "script matrix has no scenes");
    std::vector<SceneOutcome> outcomes;
    outcomes.reserve(matrix.scenes.size());
    FrameRef init = initial_frame(asset);
    const int n = static_cast<int>(matrix.scenes.size());
    for (int k = 0; k < n; ++k) {
        ctx.check_cancelled();
        const auto& spec = matrix.scenes[static_cast<std::size_t>(k)];
        ctx.emit(AgentRole::system, EventKind::phase_start,
                 Json{{"phase", "scene"}, {"scene_count", n}, {"init_frame", init.digest.hex()}}, Where{k, {}});
        auto outcome =
            qc_generate_scene(spec, k, init, dna, policy, backends, root.child("scene", static_cast<std::uint64_t>(k)), ctx);
        ctx.emit(AgentRole::system, EventKind::phase_end,
                 Json{{"phase", "scene"},
                      {"status", outcome.committed ? "committed" : "failed"},
                      {"retries", outcome.retries},
                      {"final_frame", outcome.artifact.frames.back().digest.hex()}},
                 Where{k, {}});
        init = extract_final_frame(outcome.artifact);
        outcomes.push_back(std::move(outcome));
    }
    return outcomes;
}

Json to_json(const RunTranscript& t) {
    Json scenes = Json::array();
    for (const auto& s : t.scenes) scenes.push_back(to_json(s));
    Json events = Json::array();
    for (const auto& e : t.events) events.push_back(to_json(e));
    return Json{{"run_id", t.run_id},
                {"status", t.status},
                {"failure", t.failure ? Json(*t.failure) : Json(nullptr)},
                {"brand_dna", t.dna ? to_json(*t.dna) : Json(nullptr)},
                {"asset", t.asset ? to_json(*t.asset) : Json(nullptr)},
                {"matrix", t.matrix ? to_json(*t.matrix) : Json(nullptr)},
                {"scenes", std::move(scenes)},
                {"events", std::move(events)},
                {"totals", to_json(t.totals)}};
}

RunTranscript transcript_from_json(const Json& j) {
    try {
        RunTranscript t;
        t.run_id = j.at("run_id").get<std::string>();
        t.status = j.at("status").get<std::string>();
        if (!j.at("failure").is_null()) t.failure = j["failure"].get<std::string>();
        if (!j.at("brand_dna").is_null()) {
            auto result = validate_schema(j["brand_dna"]);
            if (!std::holds_alternative<BrandDNA>(result)) throw Error(ErrorCode::InvalidRequest, "transcript brand_dna is invalid");
            t.dna = std::get<BrandDNA>(result);
        }
        if (!j.at("asset").is_null()) t.asset = asset_from_json(j["asset"]);
        if (!j.at("matrix").is_null()) t.matrix = matrix_from_json(j["matrix"]);
        for (const auto& s : j.at("scenes")) t.scenes.push_back(scene_outcome_from_json(s));
        for (const auto& e : j.at("events")) t.events.push_back(event_from_json(e));
        t.totals = cost_totals_from_json(j.at("totals"));
        return t;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidRequest, fmt::format("malformed transcript: {}", e.what()));
    }
}

RunTranscript run_chain(const ScriptMatrix& matrix, const AssetDescriptor& asset, const BrandDNA& dna,
                        const QcPolicy& policy, const BackendSet& backends, std::uint64_t seed,
                        const CostModel& cost_model, const std::string& run_id) {
    EventBus bus;
    auto clock = std::make_shared<LogicalClock>();
    bus.open_run(run_id, clock);
    RunContext ctx(run_id, cost_model, &bus, clock);
    RunTranscript t;
    t.run_id = run_id;
    t.dna = dna;
    t.asset = asset;
    t.matrix = matrix;
    t.scenes = run_scenes(matrix, asset, dna, policy, backends, Stream(seed), ctx);
    bus.close_run(run_id);
    t.events = bus.events(run_id);
    t.totals = ctx.totals();
    return t;
}

}  // namespace genflow
