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
#include "genflow/pipeline.hpp"

#include <array>

#include <fmt/format.h>

#include "genflow/errors.hpp"
#include "genflow/run_context.hpp"

namespace genflow {

namespace {

constexpr std::array<std::string_view, 7> kStateNames = {"pending",    "extracting", "normalizing", "scripting",
                                                         "generating", "completed",  "failed"};

Json fault_payload(const std::exception& e, CampaignState phase) {
    Json p{{"phase", to_string(phase)}, {"message", e.what()}};
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        p["error_code"] = to_string(err->code());
    } else {
        p["error_code"] = "Internal";
    }
    if (const auto* pe = dynamic_cast<const ParseExhaustedError*>(&e)) {
        p["attempts"] = pe->attempts();
        p["violations"] = pe->violations();
    }
    return p;
}

AgentRole fault_role(CampaignState phase, const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    if (err && err->code() == ErrorCode::Aborted) return AgentRole::system;
    switch (phase) {
    case CampaignState::extracting:
    case CampaignState::scripting: return AgentRole::director_llm;
    case CampaignState::normalizing: return AgentRole::enhancer;
    default: return AgentRole::system;
    }
}

}  // namespace

std::string_view to_string(CampaignState state) { return kStateNames[static_cast<std::size_t>(state)]; }

CampaignState campaign_state_from_string(std::string_view text) {
    for (std::size_t i = 0; i < kStateNames.size(); ++i) {
        if (kStateNames[i] == text) return static_cast<CampaignState>(i);
    }
    throw Error(ErrorCode::InvalidRequest, fmt::format("unknown campaign state '{}'", text));
}

bool is_terminal(CampaignState state) noexcept {
    return state == CampaignState::completed || state == CampaignState::failed;
}

bool legal_transition(CampaignState from, CampaignState to) noexcept {
    if (is_terminal(from)) return false;
    if (to == CampaignState::failed) return true;
    return static_cast<int>(to) == static_cast<int>(from) + 1;
}

AssetDescriptor default_asset(std::string_view label) {
    AssetDescriptor a;
    a.asset_id = fmt::format("placeholder:{}", label.empty() ? "asset" : label);
    a.illumination = 0.62;
    a.resolution = 0.71;
    a.background_isolation = 0.55;
    a.content_digest = digest_bytes(a.asset_id);
    return a;
}

RunTranscript run_pipeline(const CampaignRequest& request, const BackendSet& backends, const PipelineOptions& options,
                           const std::string& run_id, EventBus& bus, std::shared_ptr<Clock> clock,
                           const PipelineHooks& hooks) {
    RunContext ctx(run_id, options.cost_model, &bus, std::move(clock));
    if (hooks.cancel) ctx.set_cancel_flag(hooks.cancel);
    const Stream root(options.seed);

    RunTranscript t;
    t.run_id = run_id;
    CampaignState state = CampaignState::pending;
    auto enter = [&](CampaignState next) {
        state = next;
        if (hooks.on_state) hooks.on_state(next);
    };
    auto phase = [&](CampaignState s, auto&& body) {
        ctx.check_cancelled();
        enter(s);
        ctx.emit(AgentRole::system, EventKind::phase_start, Json{{"phase", to_string(s)}});
        Json summary = body();
        summary["phase"] = to_string(s);
        summary["status"] = "ok";
        ctx.emit(AgentRole::system, EventKind::phase_end, std::move(summary));
    };

    try {
        if (request.objective.empty()) throw Error(ErrorCode::InvalidRequest, "objective must be non-empty");
        if (request.n_scenes < 1) throw Error(ErrorCode::InvalidRequest, "n_scenes must be >= 1");

        phase(CampaignState::extracting, [&] {
            if (request.dna) {
                t.dna = *request.dna;
                return Json{{"source", "provided"}, {"dna_digest", digest_of(*t.dna).hex()}};
            }
            auto site = fetch_site(request.url, options.fetch);
            t.dna = build_brand_dna(site, *backends.extractor, options.repair_budget, root.child("extractor"), &ctx);
            return Json{{"source", site.url}, {"dna_digest", digest_of(*t.dna).hex()}, {"brand_dna", to_json(*t.dna)}};
        });

        phase(CampaignState::normalizing, [&] {
            auto input = request.asset ? *request.asset : default_asset(request.url);
            t.asset = normalize_asset(input, *t.dna, *backends.enhancer, root.child("enhancer"), options.quality_floor,
                                      &ctx);
            return Json{{"asset", to_json(*t.asset)}};
        });

        phase(CampaignState::scripting, [&] {
            t.matrix = author_script(*t.dna, request.objective, request.n_scenes, *backends.director,
                                     options.repair_budget, root.child("director"), &ctx);
            return Json{{"scene_count", t.matrix->scenes.size()}};
        });

        phase(CampaignState::generating, [&] {
            t.scenes = run_scenes(*t.matrix, *t.asset, *t.dna, request.policy, backends, root, ctx);
            int committed = 0;
            for (const auto& s : t.scenes) committed += s.committed ? 1 : 0;
            return Json{{"committed", committed}, {"failed", static_cast<int>(t.scenes.size()) - committed}};
        });
        t.status = "completed";
    } catch (const std::exception& e) {
        const auto at = state;
        ctx.emit(fault_role(at, e), EventKind::fault, fault_payload(e, at));
        t.status = "failed";
        const auto* err = dynamic_cast<const Error*>(&e);
        t.failure = fmt::format("{}: {}", err ? to_string(err->code()) : std::string_view("Internal"), e.what());
    }

    bus.close_run(run_id);
    t.events = bus.events(run_id);
    t.totals = ctx.totals();
    enter(t.status == "completed" ? CampaignState::completed : CampaignState::failed);
    return t;
}

RunTranscript run_pipeline(const CampaignRequest& request, const BackendSet& backends, const PipelineOptions& options,
                           const std::string& run_id) {
    EventBus bus;
    auto clock = std::make_shared<LogicalClock>();
    bus.open_run(run_id, clock);
    return run_pipeline(request, backends, options, run_id, bus, clock);
}

}  // namespace genflow
