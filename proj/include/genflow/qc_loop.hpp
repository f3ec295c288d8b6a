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

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "genflow/backends.hpp"
#include "genflow/run_context.hpp"
#include "genflow/types.hpp"

namespace genflow {

/// Runs both evaluators concurrently and returns (director, safety) in that
/// order whatever the completion order. A throwing evaluator yields a failing
/// verdict carrying one synthetic violation and the fault message.
std::pair<Verdict, Verdict> evaluate(const VideoArtifact& video, const SceneSpec& spec, const BrandDNA& dna,
                                     EvaluatorBackend& director_agent, EvaluatorBackend& brand_safety_agent,
                                     Stream stream);

struct Commit {
    bool operator==(const Commit&) const = default;
};

struct Refine {
    std::vector<ViolationReport> violations;  // deduplicated, mode order then frame
    bool operator==(const Refine&) const = default;
};

using ConsensusDecision = std::variant<Commit, Refine>;

ConsensusDecision consensus(const Verdict& director, const Verdict& safety, const QcPolicy& policy);

/// Fixed negative phrase for each failure mode.
std::string_view negative_template(FailureMode mode);

/// Throws InvalidRequest for an empty violation list.
CorrectivePrompt synthesize_corrective(const std::vector<ViolationReport>& violations, const SceneSpec& spec,
                                       const std::vector<CorrectivePrompt>& history);

struct SceneOutcome {
    int scene_index = 0;
    bool committed = false;
    VideoArtifact artifact;  // the committed artifact, or the last attempt
    int attempts = 0;
    int retries = 0;
    std::vector<std::vector<ViolationReport>> violation_history;
    std::vector<CorrectivePrompt> correctives;
    std::optional<std::string> fault;

    bool operator==(const SceneOutcome&) const = default;
};

Json to_json(const SceneOutcome& outcome);
SceneOutcome scene_outcome_from_json(const Json& j);

/// Generate-evaluate-correct cycle for one scene. Attempt a draws from
/// stream.child("attempt", a); every regeneration reuses `init`.
SceneOutcome qc_generate_scene(const SceneSpec& spec, int scene_index, const FrameRef& init, const BrandDNA& dna,
                               const QcPolicy& policy, const BackendSet& backends, Stream stream, RunContext& ctx);

}  // namespace genflow
