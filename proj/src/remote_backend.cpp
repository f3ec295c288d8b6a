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
#include "genflow/remote_backend.hpp"

#include <httplib.h>

#include <fmt/format.h>

#include "genflow/errors.hpp"

namespace genflow::remote {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorCode::Config, fmt::format("endpoint url '{}' has no scheme", url));
    auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw Error(ErrorCode::Config, fmt::format("endpoint url '{}' must be http or https", url));
    }
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string field_text(const Json& response, const char* key) {
    if (!response.is_object() || !response.contains(key) || !response[key].is_string()) {
        throw Error(ErrorCode::RemoteRejected, fmt::format("response lacks string field '{}'", key));
    }
    return response[key].get<std::string>();
}

double score(const Json& response, const char* key) {
    if (!response.contains(key) || !response[key].is_number()) {
        throw Error(ErrorCode::RemoteRejected, fmt::format("response lacks numeric field '{}'", key));
    }
    return response[key].get<double>();
}

}  // namespace

Json to_json(const EndpointConfig& e) {
    return Json{{"url", e.url}, {"timeout_ms", e.timeout.count()}, {"max_retries", e.max_retries}};
}

EndpointConfig endpoint_from_json(const Json& j) {
    EndpointConfig e;
    if (j.is_string()) {
        e.url = j.get<std::string>();
        return e;
    }
    if (!j.is_object() || !j.contains("url") || !j["url"].is_string()) {
        throw Error(ErrorCode::Config, "endpoint needs a url");
    }
    e.url = j["url"].get<std::string>();
    if (j.contains("timeout_ms")) e.timeout = std::chrono::milliseconds(j["timeout_ms"].get<std::int64_t>());
    if (j.contains("max_retries")) e.max_retries = j["max_retries"].get<int>();
    if (e.timeout.count() <= 0 || e.max_retries < 0) throw Error(ErrorCode::Config, "endpoint timeout/retries out of range");
    return e;
}

Json remote_call(CallKind kind, const Json& request, const EndpointConfig& endpoint) {
    if (endpoint.url.empty()) throw Error(ErrorCode::Config, fmt::format("no endpoint for {}", to_string(kind)));
    auto [origin, path] = split_url(endpoint.url);
    const auto body = request.dump();
    const httplib::Headers headers{{"X-Genflow-Call-Kind", std::string(to_string(kind))}};

    ErrorCode last_code = ErrorCode::Transport;
    std::string last_message;
    for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
        httplib::Client client(origin);
        client.set_connection_timeout(endpoint.timeout);
        client.set_read_timeout(endpoint.timeout);
        client.set_write_timeout(endpoint.timeout);
        const auto started = std::chrono::steady_clock::now();
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) {
            const auto elapsed = std::chrono::steady_clock::now() - started;
            const bool timed_out = res.error() == httplib::Error::ConnectionTimeout || elapsed >= endpoint.timeout;
            last_code = timed_out ? ErrorCode::Timeout : ErrorCode::Transport;
            last_message = fmt::format("{} call to {} failed: {}", to_string(kind), endpoint.url,
                                       httplib::to_string(res.error()));
            continue;
        }
        if (res->status >= 400) {
            throw Error(ErrorCode::RemoteRejected,
                        fmt::format("{} call to {} returned HTTP {}", to_string(kind), endpoint.url, res->status));
        }
        auto doc = Json::parse(res->body, nullptr, false);
        if (doc.is_discarded()) {
            throw Error(ErrorCode::RemoteRejected,
                        fmt::format("{} call to {} returned a non-JSON body", to_string(kind), endpoint.url));
        }
        return doc;
    }
    throw Error(last_code, last_message);
}

VideoArtifact RemoteGenerator::generate(const GenerationRequest& req, Stream stream) {
    Json request{{"scene", to_json(req.spec)},
                 {"prompt", req.corrective ? req.corrective->render() : req.spec.prompt},
                 {"init_frame", req.init},
                 {"brand_dna", genflow::to_json(req.dna)},
                 {"scene_index", req.scene_index},
                 {"attempt", req.attempt},
                 {"seed", stream.key()}};
    if (req.corrective) request["corrective"] = *req.corrective;
    auto response = remote_call(CallKind::generator, request, endpoint_);
    if (!response.contains("frames") || !response["frames"].is_array() || response["frames"].empty()) {
        throw Error(ErrorCode::RemoteRejected, "generator response lacks a non-empty frames array");
    }
    VideoArtifact video;
    video.scene_index = req.scene_index;
    video.attempt = req.attempt;
    video.init_frame = req.init;
    int index = 0;
    for (const auto& frame : response["frames"]) {
        if (!frame.is_string()) throw Error(ErrorCode::RemoteRejected, "generator frames must be strings");
        Digest d = index == 0 ? req.init.digest : digest_bytes(frame.get<std::string>());
        if (d.is_null()) d = combine(req.init.digest, static_cast<std::uint64_t>(index));
        video.frames.push_back({d, req.scene_index, index});
        ++index;
    }
    return video;
}

AssetDescriptor RemoteEnhancer::enhance(const AssetDescriptor& asset, const BrandDNA& dna, double quality_floor,
                                        Stream) {
    auto response = remote_call(
        CallKind::enhancer,
        Json{{"asset", to_json(asset)}, {"brand_dna", genflow::to_json(dna)}, {"quality_floor", quality_floor}},
        endpoint_);
    AssetDescriptor out = asset;
    out.illumination = score(response, "illumination");
    out.resolution = score(response, "resolution");
    out.background_isolation = score(response, "background_isolation");
    return out;
}

std::string RemoteExtractor::extract(const RawSite& site, const std::vector<SchemaViolation>& feedback, int attempt,
                                     Stream) {
    auto response = remote_call(CallKind::extractor,
                                Json{{"url", site.url},
                                     {"html", site.html},
                                     {"stylesheets", site.stylesheets},
                                     {"feedback", feedback},
                                     {"attempt", attempt}},
                                endpoint_);
    return field_text(response, "text");
}

std::string RemoteDirector::author(const DirectorRequest& req, Stream) {
    auto response = remote_call(CallKind::director,
                                Json{{"brand_dna", genflow::to_json(req.dna)},
                                     {"objective", req.objective},
                                     {"n_scenes", req.n_scenes},
                                     {"feedback", req.feedback},
                                     {"attempt", req.attempt}},
                                endpoint_);
    return field_text(response, "text");
}

Verdict RemoteEvaluator::evaluate(const VideoArtifact& video, const SceneSpec& spec, const BrandDNA& dna, Stream) {
    const auto kind = role_ == EvaluatorRole::director_agent ? CallKind::director_agent : CallKind::brand_safety_agent;
    Json payload_video = video;
    payload_video.erase("injected_violations");
    auto response = remote_call(kind,
                                Json{{"role", to_string(role_)},
                                     {"video", std::move(payload_video)},
                                     {"scene", to_json(spec)},
                                     {"brand_dna", genflow::to_json(dna)}},
                                endpoint_);
    Verdict v;
    v.agent = role_;
    try {
        v.violations = response.at("violations").get<std::vector<ViolationReport>>();
        if (response.contains("critique") && response["critique"].is_string()) v.critique = response["critique"].get<std::string>();
    } catch (const std::exception& e) {
        throw Error(ErrorCode::RemoteRejected, fmt::format("malformed verdict: {}", e.what()));
    }
    for (const auto& r : v.violations) {
        if (!responsible_for(role_, r.mode)) {
            throw Error(ErrorCode::RemoteRejected,
                        fmt::format("{} reported {} outside its responsibility", to_string(role_), to_string(r.mode)));
        }
        if (r.frame_index < 0 || r.frame_index >= static_cast<int>(video.frames.size())) {
            throw Error(ErrorCode::RemoteRejected, "verdict frame_index outside the artifact");
        }
    }
    v.pass = v.violations.empty();
    return v;
}

}  // namespace genflow::remote
