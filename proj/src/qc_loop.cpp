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
#include "genflow/qc_loop.hpp"

#include <algorithm>
#include <future>

#include <fmt/format.h>

#include "genflow/errors.hpp"

namespace genflow {

namespace {

Verdict fault_verdict(EvaluatorRole role, const std::string& message) {
    const auto mode = role == EvaluatorRole::director_agent ? FailureMode::temporal_morphing
                                                            : FailureMode::typographic_hallucination;
    Verdict v;
    v.agent = role;
    v.pass = false;
    v.violations.push_back({mode, 0, fmt::format("evaluator fault: {}", message), true});
    v.critique = fmt::format("evaluator fault: {}", message);
    v.fault = message;
    return v;
}

Verdict guarded_evaluate(EvaluatorBackend& backend, EvaluatorRole expected, const VideoArtifact& video,
                         const SceneSpec& spec, const BrandDNA& dna, Stream stream) {
    try {
        auto v = backend.evaluate(video, spec, dna, stream);
        v.agent = expected;
        v.pass = v.violations.empty();
        return v;
    } catch (const std::exception& e) {
        return fault_verdict(expected, e.what());
    }
}

Json modes_json(const std::vector<ViolationReport>& violations) {
    Json out = Json::array();
    for (auto m : kAllFailureModes) {
        bool present = std::any_of(violations.begin(), violations.end(), [&](const auto& v) { return v.mode == m; });
        if (present) out.push_back(to_string(m));
    }
    return out;
}

VideoArtifact placeholder_artifact(int scene_index, int attempt, const FrameRef& init) {
    VideoArtifact v;
    v.scene_index = scene_index;
    v.attempt = attempt;
    v.init_frame = init;
    v.frames.push_back({init.digest, scene_index, 0});
    return v;
}

}  // namespace

std::pair<Verdict, Verdict> evaluate(const VideoArtifact& video, const SceneSpec& spec, const BrandDNA& dna,
                                     EvaluatorBackend& director_agent, EvaluatorBackend& brand_safety_agent,
                                     Stream stream) {
    check_artifact(video);
    auto safety = std::async(std::launch::async, [&] {
        return guarded_evaluate(brand_safety_agent, EvaluatorRole::brand_safety_agent, video, spec, dna,
                                stream.child("brand_safety_agent"));
    });
    auto director = guarded_evaluate(director_agent, EvaluatorRole::director_agent, video, spec, dna,
                                     stream.child("director_agent"));
    return {std::move(director), safety.get()};
}

ConsensusDecision consensus(const Verdict& director, const Verdict& safety, const QcPolicy& policy) {
    switch (policy.consensus) {
    case ConsensusRule::strict_and:
        break;
    }
    if (director.pass && safety.pass) return Commit{};
    std::vector<ViolationReport> merged;
    for (const auto* v : {&director, &safety}) {
        for (const auto& r : v->violations) {
            bool dup = std::any_of(merged.begin(), merged.end(), [&](const auto& m) {
                return m.mode == r.mode && m.frame_index == r.frame_index;
            });
            if (!dup) merged.push_back(r);
        }
    }
    std::stable_sort(merged.begin(), merged.end(), [](const auto& a, const auto& b) {
        if (a.mode != b.mode) return index_of(a.mode) < index_of(b.mode);
        return a.frame_index < b.frame_index;
    });
    return Refine{std::move(merged)};
}

std::string_view negative_template(FailureMode mode) {
    switch (mode) {
    case FailureMode::temporal_morphing: return "morphing, warping or melting product geometry between frames";
    case FailureMode::typographic_hallucination: return "garbled, misspelled or invented text on any surface";
    case FailureMode::brand_color_violation: return "colors outside the approved brand palette";
    case FailureMode::composition_error: return "framing or camera motion that departs from the scripted shot";
    }
    return "";
}

CorrectivePrompt synthesize_corrective(const std::vector<ViolationReport>& violations, const SceneSpec& spec,
                                       const std::vector<CorrectivePrompt>& history) {
    if (violations.empty()) throw Error(ErrorCode::InvalidRequest, "corrective needs at least one violation");
    CorrectivePrompt c;
    c.base_prompt = spec.prompt;
    c.iteration = static_cast<int>(history.size()) + 1;
    auto add_term = [&](std::string term) {
        if (std::find(c.negative_terms.begin(), c.negative_terms.end(), term) == c.negative_terms.end()) {
            c.negative_terms.push_back(std::move(term));
        }
    };
    if (!history.empty()) {
        for (const auto& t : history.back().negative_terms) add_term(t);
    }
    for (auto m : kAllFailureModes) {
        bool present = std::any_of(violations.begin(), violations.end(), [&](const auto& v) { return v.mode == m; });
        if (!present) continue;
        c.targeted_modes.insert(m);
        add_term(std::string(negative_template(m)));
    }
    return c;
}

Json to_json(const SceneOutcome& o) {
    Json history = Json::array();
    for (const auto& h : o.violation_history) history.push_back(h);
    Json out{{"scene_index", o.scene_index},
             {"status", o.committed ? "committed" : "failed"},
             {"attempts", o.attempts},
             {"retries", o.retries},
             {"artifact", o.artifact},
             {"violation_history", std::move(history)},
             {"correctives", o.correctives}};
    if (o.fault) out["fault"] = *o.fault;
    return out;
}

SceneOutcome scene_outcome_from_json(const Json& j) {
    SceneOutcome o;
    o.scene_index = j.at("scene_index").get<int>();
    o.committed = j.at("status").get<std::string>() == "committed";
    o.attempts = j.at("attempts").get<int>();
    o.retries = j.at("retries").get<int>();
    o.artifact = j.at("artifact").get<VideoArtifact>();
    o.violation_history = j.at("violation_history").get<std::vector<std::vector<ViolationReport>>>();
    o.correctives = j.at("correctives").get<std::vector<CorrectivePrompt>>();
    if (j.contains("fault")) o.fault = j["fault"].get<std::string>();
    return o;
}

SceneOutcome qc_generate_scene(const SceneSpec& spec, int scene_index, const FrameRef& init, const BrandDNA& dna,
                               const QcPolicy& policy, const BackendSet& backends, Stream stream, RunContext& ctx) {
    if (policy.retry_budget < 0) throw Error(ErrorCode::InvalidRequest, "retry_budget must be >= 0");
    SceneOutcome out;
    out.scene_index = scene_index;

    for (int attempt = 0;; ++attempt) {
        ctx.check_cancelled();
        const Where where{scene_index, attempt};
        auto attempt_stream = stream.child("attempt", static_cast<std::uint64_t>(attempt));
        const CorrectivePrompt* corrective = out.correctives.empty() ? nullptr : &out.correctives.back();
        const std::string prompt = corrective ? corrective->render() : spec.prompt;
        out.attempts = attempt + 1;
        out.retries = attempt;

        VideoArtifact video;
        try {
            video = backends.generator->generate(GenerationRequest{spec, init, dna, corrective, scene_index, attempt},
                                                 attempt_stream.child("generator"));
            check_artifact(video);
            if (video.init_frame != init) throw Error(ErrorCode::BackendFault, "generator ignored the init frame");
        } catch (const std::exception& e) {
            ctx.emit_call(CallKind::generator, AgentRole::generator, EventKind::fault,
                          Json{{"error", e.what()}, {"prompt", prompt}}, where);
            out.committed = false;
            out.artifact = placeholder_artifact(scene_index, attempt, init);
            out.violation_history.push_back(
                {ViolationReport{FailureMode::temporal_morphing, 0, fmt::format("generator fault: {}", e.what()), true}});
            out.fault = e.what();
            return out;
        }
        ctx.emit_call(CallKind::generator, AgentRole::generator, EventKind::generation,
                      Json{{"prompt", prompt},
                           {"corrective_iteration", corrective ? Json(corrective->iteration) : Json(nullptr)},
                           {"init_frame", init.digest.hex()},
                           {"final_frame", video.frames.back().digest.hex()},
                           {"frame_count", video.frames.size()}},
                      where);

        auto [director, safety] = evaluate(video, spec, dna, *backends.director_agent, *backends.brand_safety_agent,
                                           attempt_stream.child("evaluators"));
        const double latency = std::max(ctx.cost_model().cost(CallKind::director_agent).latency_s,
                                        ctx.cost_model().cost(CallKind::brand_safety_agent).latency_s);
        auto director_cost = ctx.charge(CallKind::director_agent, false);
        auto safety_cost = ctx.charge(CallKind::brand_safety_agent, false);
        ctx.advance(latency);
        for (auto* v : {&director, &safety}) {
            Json payload = *v;
            payload["cost"] = v == &director ? director_cost : safety_cost;
            auto role = v->agent == EvaluatorRole::director_agent ? AgentRole::director_agent
                                                                  : AgentRole::brand_safety_agent;
            ctx.emit(role, EventKind::verdict, std::move(payload), where);
        }

        auto decision = consensus(director, safety, policy);
        out.artifact = std::move(video);
        if (std::holds_alternative<Commit>(decision)) {
            ctx.emit(AgentRole::system, EventKind::consensus,
                     Json{{"decision", "commit"}, {"violations", Json::array()}}, where);
            out.committed = true;
            return out;
        }
        auto& violations = std::get<Refine>(decision).violations;
        ctx.emit(AgentRole::system, EventKind::consensus, Json{{"decision", "refine"}, {"violations", violations}},
                 where);
        ctx.emit(AgentRole::system, EventKind::violation_state,
                 Json{{"active", true}, {"modes", modes_json(violations)}, {"violations", violations}}, where);
        out.violation_history.push_back(violations);

        if (attempt >= policy.retry_budget) {
            out.committed = false;
            return out;
        }
        auto next = synthesize_corrective(violations, spec, out.correctives);
        Json payload = next;
        payload["rendered_prompt"] = next.render();
        ctx.emit_call(CallKind::orchestrator, AgentRole::orchestrator, EventKind::corrective, std::move(payload),
                      where);
        out.correctives.push_back(std::move(next));
    }
}

}  // namespace genflow
