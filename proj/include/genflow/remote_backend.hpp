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

#include <chrono>
#include <string>

#include "genflow/backends.hpp"
#include "genflow/common.hpp"
#include "genflow/cost.hpp"

namespace genflow::remote {

struct EndpointConfig {
    std::string url;  // http(s)://host[:port]/path
    std::chrono::milliseconds timeout{30000};
    int max_retries = 2;  // extra attempts after a transport failure
};

Json to_json(const EndpointConfig& endpoint);
EndpointConfig endpoint_from_json(const Json& j);

/// POSTs `request` verbatim to the endpoint with the call kind in the
/// X-Genflow-Call-Kind header and returns the decoded JSON response.
/// Only transport failures and timeouts are retried.
Json remote_call(CallKind kind, const Json& request, const EndpointConfig& endpoint);

class RemoteGenerator final : public GeneratorBackend {
public:
    explicit RemoteGenerator(EndpointConfig endpoint) : endpoint_(std::move(endpoint)) {}
    VideoArtifact generate(const GenerationRequest& request, Stream stream) override;

private:
    EndpointConfig endpoint_;
};

class RemoteEnhancer final : public EnhancerBackend {
public:
    explicit RemoteEnhancer(EndpointConfig endpoint) : endpoint_(std::move(endpoint)) {}
    AssetDescriptor enhance(const AssetDescriptor& asset, const BrandDNA& dna, double quality_floor,
                            Stream stream) override;

private:
    EndpointConfig endpoint_;
};

class RemoteExtractor final : public ExtractorBackend {
public:
    explicit RemoteExtractor(EndpointConfig endpoint) : endpoint_(std::move(endpoint)) {}
    std::string extract(const RawSite& site, const std::vector<SchemaViolation>& feedback, int attempt,
                        Stream stream) override;

private:
    EndpointConfig endpoint_;
};

class RemoteDirector final : public DirectorBackend {
public:
    explicit RemoteDirector(EndpointConfig endpoint) : endpoint_(std::move(endpoint)) {}
    std::string author(const DirectorRequest& request, Stream stream) override;

private:
    EndpointConfig endpoint_;
};

class RemoteEvaluator final : public EvaluatorBackend {
public:
    RemoteEvaluator(EvaluatorRole role, EndpointConfig endpoint) : role_(role), endpoint_(std::move(endpoint)) {}
    [[nodiscard]] EvaluatorRole role() const override { return role_; }
    Verdict evaluate(const VideoArtifact& video, const SceneSpec& spec, const BrandDNA& dna, Stream stream) override;

private:
    EvaluatorRole role_;
    EndpointConfig endpoint_;
};

}  // namespace genflow::remote
