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

#include <memory>
#include <string>
#include <vector>

#include "genflow/asset.hpp"
#include "genflow/brand_dna.hpp"
#include "genflow/random.hpp"
#include "genflow/script.hpp"
#include "genflow/types.hpp"

namespace genflow {

/// Model-service boundary. Every call receives the random substream it may
/// draw from; the sim providers are pure functions of their arguments.

struct GenerationRequest {
    const SceneSpec& spec;
    const FrameRef& init;
    const BrandDNA& dna;
    const CorrectivePrompt* corrective;  // null on the first attempt
    int scene_index;
    int attempt;
};

class GeneratorBackend {
public:
    virtual ~GeneratorBackend() = default;
    /// The returned artifact must start at `request.init`.
    virtual VideoArtifact generate(const GenerationRequest& request, Stream stream) = 0;
};

class EnhancerBackend {
public:
    virtual ~EnhancerBackend() = default;
    virtual AssetDescriptor enhance(const AssetDescriptor& asset, const BrandDNA& dna, double quality_floor,
                                    Stream stream) = 0;
};

class ExtractorBackend {
public:
    virtual ~ExtractorBackend() = default;
    /// Raw model text; expected to hold a JSON object with tonal_voice and
    /// forbidden_tropes. `feedback` lists the previous attempt's violations.
    virtual std::string extract(const RawSite& site, const std::vector<SchemaViolation>& feedback, int attempt,
                                Stream stream) = 0;
};

struct DirectorRequest {
    const BrandDNA& dna;
    const std::string& objective;
    int n_scenes;
    const std::vector<SchemaViolation>& feedback;
    int attempt;
};

class DirectorBackend {
public:
    virtual ~DirectorBackend() = default;
    /// Raw model text; expected to hold a ScriptMatrix JSON document.
    virtual std::string author(const DirectorRequest& request, Stream stream) = 0;
};

class EvaluatorBackend {
public:
    virtual ~EvaluatorBackend() = default;
    [[nodiscard]] virtual EvaluatorRole role() const = 0;
    virtual Verdict evaluate(const VideoArtifact& video, const SceneSpec& spec, const BrandDNA& dna,
                             Stream stream) = 0;
};

struct BackendSet {
    std::shared_ptr<GeneratorBackend> generator;
    std::shared_ptr<EnhancerBackend> enhancer;
    std::shared_ptr<ExtractorBackend> extractor;
    std::shared_ptr<DirectorBackend> director;
    std::shared_ptr<EvaluatorBackend> director_agent;
    std::shared_ptr<EvaluatorBackend> brand_safety_agent;
};

}  // namespace genflow
