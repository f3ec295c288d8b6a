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
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "genflow/common.hpp"
#include "genflow/digest.hpp"

namespace genflow {

/// Closed set of failure categories. Enumeration order is the report order
/// and the merge order for violations.
enum class FailureMode {
    temporal_morphing,
    typographic_hallucination,
    brand_color_violation,
    composition_error,
};

inline constexpr std::array<FailureMode, 4> kAllFailureModes = {
    FailureMode::temporal_morphing,
    FailureMode::typographic_hallucination,
    FailureMode::brand_color_violation,
    FailureMode::composition_error,
};

inline constexpr std::size_t index_of(FailureMode m) noexcept { return static_cast<std::size_t>(m); }

std::string_view to_string(FailureMode mode);
FailureMode failure_mode_from_string(std::string_view text);

/// Structured-output rule breach reported by the schema validators.
struct SchemaViolation {
    std::string field_path;
    std::string rule;
    std::string found;

    bool operator==(const SchemaViolation&) const = default;
};

struct ViolationReport {
    FailureMode mode = FailureMode::temporal_morphing;
    int frame_index = 0;
    std::string detail;
    // Set when the report stands in for a backend fault rather than a
    // detected content defect.
    bool synthetic = false;

    bool operator==(const ViolationReport&) const = default;
};

struct FrameRef {
    Digest digest;
    int scene_index = 0;
    int frame_index = 0;

    bool operator==(const FrameRef&) const = default;
};

struct VideoArtifact {
    int scene_index = 0;
    int attempt = 0;
    std::vector<FrameRef> frames;
    std::vector<ViolationReport> injected_violations;
    FrameRef init_frame;

    bool operator==(const VideoArtifact&) const = default;
};

/// Throws InvalidRequest naming the first broken invariant.
void check_artifact(const VideoArtifact& video);

enum class EvaluatorRole { director_agent, brand_safety_agent };

std::string_view to_string(EvaluatorRole role);

/// Modes each evaluator is responsible for.
bool responsible_for(EvaluatorRole role, FailureMode mode) noexcept;

struct Verdict {
    EvaluatorRole agent = EvaluatorRole::director_agent;
    bool pass = true;
    std::vector<ViolationReport> violations;
    std::string critique;
    std::optional<std::string> fault;

    bool operator==(const Verdict&) const = default;
};

struct CorrectivePrompt {
    std::string base_prompt;
    std::vector<std::string> negative_terms;
    std::set<FailureMode> targeted_modes;
    int iteration = 1;

    /// Prompt text handed to the generator.
    [[nodiscard]] std::string render() const;

    bool operator==(const CorrectivePrompt&) const = default;
};

enum class ConsensusRule { strict_and };

struct QcPolicy {
    int retry_budget = 3;
    ConsensusRule consensus = ConsensusRule::strict_and;
};

void to_json(Json& j, const SchemaViolation& v);
void from_json(const Json& j, SchemaViolation& v);
void to_json(Json& j, const ViolationReport& v);
void from_json(const Json& j, ViolationReport& v);
void to_json(Json& j, const FrameRef& f);
void from_json(const Json& j, FrameRef& f);
void to_json(Json& j, const VideoArtifact& v);
void from_json(const Json& j, VideoArtifact& v);
void to_json(Json& j, const Verdict& v);
void to_json(Json& j, const CorrectivePrompt& c);
void from_json(const Json& j, CorrectivePrompt& c);
void to_json(Json& j, const QcPolicy& p);
/// Throws InvalidRequest on a negative budget or unknown rule.
QcPolicy qc_policy_from_json(const Json& j);

}  // namespace genflow
