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
#include "genflow/types.hpp"

#include <fmt/format.h>

#include "genflow/errors.hpp"

namespace genflow {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::SizeExceeded: return "SizeExceeded";
    case ErrorCode::NotHtml: return "NotHtml";
    case ErrorCode::EmptyPalette: return "EmptyPalette";
    case ErrorCode::ParseExhausted: return "ParseExhausted";
    case ErrorCode::InvalidAsset: return "InvalidAsset";
    case ErrorCode::EnhancementFailed: return "EnhancementFailed";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::Transport: return "Transport";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::RemoteRejected: return "RemoteRejected";
    case ErrorCode::UnknownRun: return "UnknownRun";
    case ErrorCode::InvalidEvent: return "InvalidEvent";
    case ErrorCode::BackendFault: return "BackendFault";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Aborted: return "Aborted";
    }
    return "Unknown";
}

std::string_view to_string(FailureMode mode) {
    switch (mode) {
    case FailureMode::temporal_morphing: return "temporal_morphing";
    case FailureMode::typographic_hallucination: return "typographic_hallucination";
    case FailureMode::brand_color_violation: return "brand_color_violation";
    case FailureMode::composition_error: return "composition_error";
    }
    return "unknown";
}

FailureMode failure_mode_from_string(std::string_view text) {
    for (auto m : kAllFailureModes) {
        if (to_string(m) == text) return m;
    }
    throw Error(ErrorCode::InvalidRequest, fmt::format("unknown failure mode '{}'", text));
}

void check_artifact(const VideoArtifact& video) {
    if (video.frames.empty()) {
        throw Error(ErrorCode::InvalidRequest, "video artifact has no frames");
    }
    if (video.frames.front().digest != video.init_frame.digest) {
        throw Error(ErrorCode::InvalidRequest, "first frame does not match the init frame");
    }
    for (std::size_t i = 0; i < video.frames.size(); ++i) {
        if (video.frames[i].frame_index != static_cast<int>(i)) {
            throw Error(ErrorCode::InvalidRequest, "frame indices are not contiguous from 0");
        }
        if (video.frames[i].digest.is_null()) {
            throw Error(ErrorCode::InvalidRequest, "null frame digest");
        }
    }
    for (const auto& v : video.injected_violations) {
        if (v.frame_index < 0 || v.frame_index >= static_cast<int>(video.frames.size())) {
            throw Error(ErrorCode::InvalidRequest,
                        fmt::format("violation frame {} outside artifact", v.frame_index));
        }
    }
}

std::string_view to_string(EvaluatorRole role) {
    return role == EvaluatorRole::director_agent ? "director_agent" : "brand_safety_agent";
}

bool responsible_for(EvaluatorRole role, FailureMode mode) noexcept {
    switch (mode) {
    case FailureMode::temporal_morphing:
    case FailureMode::composition_error:
        return role == EvaluatorRole::director_agent;
    case FailureMode::typographic_hallucination:
    case FailureMode::brand_color_violation:
        return role == EvaluatorRole::brand_safety_agent;
    }
    return false;
}

std::string CorrectivePrompt::render() const {
    std::string out = base_prompt;
    if (!negative_terms.empty()) {
        out += " | avoid: ";
        for (std::size_t i = 0; i < negative_terms.size(); ++i) {
            if (i) out += "; ";
            out += negative_terms[i];
        }
    }
    return out;
}

void to_json(Json& j, const SchemaViolation& v) {
    j = Json{{"field_path", v.field_path}, {"rule", v.rule}, {"found", v.found}};
}

void from_json(const Json& j, SchemaViolation& v) {
    v.field_path = j.at("field_path").get<std::string>();
    v.rule = j.at("rule").get<std::string>();
    v.found = j.value("found", std::string{});
}

void to_json(Json& j, const ViolationReport& v) {
    j = Json{{"mode", to_string(v.mode)}, {"frame_index", v.frame_index}, {"detail", v.detail}};
    if (v.synthetic) j["synthetic"] = true;
}

void from_json(const Json& j, ViolationReport& v) {
    v.mode = failure_mode_from_string(j.at("mode").get<std::string>());
    v.frame_index = j.at("frame_index").get<int>();
    v.detail = j.value("detail", std::string{});
    v.synthetic = j.value("synthetic", false);
}

void to_json(Json& j, const FrameRef& f) {
    j = Json{{"digest", f.digest.hex()}, {"scene_index", f.scene_index}, {"frame_index", f.frame_index}};
}

void from_json(const Json& j, FrameRef& f) {
    f.digest = Digest::from_hex(j.at("digest").get<std::string>());
    f.scene_index = j.at("scene_index").get<int>();
    f.frame_index = j.at("frame_index").get<int>();
}

void to_json(Json& j, const VideoArtifact& v) {
    j = Json{{"scene_index", v.scene_index},
             {"attempt", v.attempt},
             {"init_frame", v.init_frame},
             {"frame_count", v.frames.size()},
             {"frames", v.frames},
             {"injected_violations", v.injected_violations}};
}

void from_json(const Json& j, VideoArtifact& v) {
    v.scene_index = j.at("scene_index").get<int>();
    v.attempt = j.at("attempt").get<int>();
    v.init_frame = j.at("init_frame").get<FrameRef>();
    v.frames = j.at("frames").get<std::vector<FrameRef>>();
    v.injected_violations = j.value("injected_violations", std::vector<ViolationReport>{});
}

void to_json(Json& j, const Verdict& v) {
    j = Json{{"agent", to_string(v.agent)},
             {"pass", v.pass},
             {"violations", v.violations},
             {"critique", v.critique}};
    if (v.fault) j["fault"] = *v.fault;
}

void to_json(Json& j, const CorrectivePrompt& c) {
    Json modes = Json::array();
    for (auto m : c.targeted_modes) modes.push_back(to_string(m));
    j = Json{{"base_prompt", c.base_prompt},
             {"negative_terms", c.negative_terms},
             {"targeted_modes", std::move(modes)},
             {"iteration", c.iteration}};
}

void from_json(const Json& j, CorrectivePrompt& c) {
    c.base_prompt = j.at("base_prompt").get<std::string>();
    c.negative_terms = j.at("negative_terms").get<std::vector<std::string>>();
    c.targeted_modes.clear();
    for (const auto& m : j.at("targeted_modes")) c.targeted_modes.insert(failure_mode_from_string(m.get<std::string>()));
    c.iteration = j.at("iteration").get<int>();
}

void to_json(Json& j, const QcPolicy& p) {
    j = Json{{"retry_budget", p.retry_budget}, {"consensus", "strict_and"}};
}

QcPolicy qc_policy_from_json(const Json& j) {
    QcPolicy p;
    if (!j.is_object()) throw Error(ErrorCode::InvalidRequest, "policy must be an object");
    if (j.contains("retry_budget")) {
        if (!j["retry_budget"].is_number_integer()) {
            throw Error(ErrorCode::InvalidRequest, "policy.retry_budget must be an integer");
        }
        p.retry_budget = j["retry_budget"].get<int>();
        if (p.retry_budget < 0) throw Error(ErrorCode::InvalidRequest, "policy.retry_budget must be >= 0");
    }
    if (j.contains("consensus") && j["consensus"] != "strict_and") {
        throw Error(ErrorCode::InvalidRequest, "policy.consensus must be strict_and");
    }
    return p;
}

}  // namespace genflow
