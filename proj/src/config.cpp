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
#include "genflow/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "genflow/errors.hpp"

namespace genflow {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& allowed, std::string_view where) {
    if (!j.is_object()) throw Error(ErrorCode::Config, fmt::format("{} must be an object", where));
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw Error(ErrorCode::Config, fmt::format("{}: unknown key '{}'", where, key));
    }
}

void check_role(const std::string& role) {
    for (auto r : kBackendRoles) {
        if (r == role) return;
    }
    throw Error(ErrorCode::Config, fmt::format("unknown backend role '{}'", role));
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_absolute() || base.empty()) return path;
    return base / path;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Config, fmt::format("cannot read config {}", path.string()));
    auto doc = Json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::Config, fmt::format("{} is not valid JSON", path.string()));
    return doc;
}

std::string env_name(std::string_view role) {
    std::string out = "GENFLOW_ENDPOINT_";
    for (char c : role) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    return out;
}

}  // namespace

std::string_view to_string(Provider p) { return p == Provider::sim ? "sim" : "remote"; }

Provider provider_from_string(std::string_view text) {
    if (text == "sim") return Provider::sim;
    if (text == "remote") return Provider::remote;
    throw Error(ErrorCode::Config, fmt::format("unknown provider '{}'", text));
}

Provider EngineConfig::provider_for(std::string_view role) const {
    auto it = providers.find(std::string(role));
    return it == providers.end() ? default_provider : it->second;
}

EngineConfig engine_config_from_json(const Json& j, const std::filesystem::path& base_dir) {
    reject_unknown(j,
                   {"backend", "providers", "seed", "sim", "endpoints", "fetch", "fixture_dir", "repair_budget",
                    "quality_floor", "qc"},
                   "engine config");
    EngineConfig c;
    try {
        if (j.contains("backend")) c.default_provider = provider_from_string(j["backend"].get<std::string>());
        if (j.contains("providers")) {
            for (const auto& [role, value] : j["providers"].items()) {
                check_role(role);
                c.providers[role] = provider_from_string(value.get<std::string>());
            }
        }
        if (j.contains("sim")) c.sim = sim::sim_params_from_json(j["sim"]);
        if (j.contains("seed")) c.sim.master_seed = j["seed"].get<std::uint64_t>();
        if (j.contains("endpoints")) {
            for (const auto& [role, value] : j["endpoints"].items()) {
                check_role(role);
                c.endpoints[role] = remote::endpoint_from_json(value);
            }
        }
        if (j.contains("fetch")) {
            const auto& f = j["fetch"];
            reject_unknown(f, {"timeout_ms", "max_bytes", "max_linked_sheets"}, "fetch");
            if (f.contains("timeout_ms")) c.fetch.timeout = std::chrono::milliseconds(f["timeout_ms"].get<std::int64_t>());
            if (f.contains("max_bytes")) c.fetch.max_bytes = f["max_bytes"].get<std::size_t>();
            if (f.contains("max_linked_sheets")) c.fetch.max_linked_sheets = f["max_linked_sheets"].get<std::size_t>();
        }
        if (j.contains("fixture_dir")) c.fetch.fixture_dir = resolve(base_dir, j["fixture_dir"].get<std::string>());
        if (j.contains("repair_budget")) c.repair_budget = j["repair_budget"].get<int>();
        if (j.contains("quality_floor")) c.quality_floor = j["quality_floor"].get<double>();
        if (j.contains("qc")) c.qc = qc_policy_from_json(j["qc"]);
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::Config, fmt::format("engine config: {}", e.what()));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) throw;
        throw Error(ErrorCode::Config, fmt::format("engine config: {}", e.what()));
    }
    if (c.repair_budget < 0) throw Error(ErrorCode::Config, "repair_budget must be >= 0");
    if (c.quality_floor < 0.0 || c.quality_floor > 1.0) throw Error(ErrorCode::Config, "quality_floor must be in [0,1]");
    return c;
}

Json to_json(const EngineConfig& c) {
    Json providers = Json::object();
    for (const auto& [role, p] : c.providers) providers[role] = to_string(p);
    Json endpoints = Json::object();
    for (const auto& [role, e] : c.endpoints) endpoints[role] = remote::to_json(e);
    return Json{{"backend", to_string(c.default_provider)},
                {"providers", std::move(providers)},
                {"seed", c.sim.master_seed},
                {"sim", sim::to_json(c.sim)},
                {"endpoints", std::move(endpoints)},
                {"fetch",
                 Json{{"timeout_ms", c.fetch.timeout.count()},
                      {"max_bytes", c.fetch.max_bytes},
                      {"max_linked_sheets", c.fetch.max_linked_sheets}}},
                {"fixture_dir", c.fetch.fixture_dir.string()},
                {"repair_budget", c.repair_budget},
                {"quality_floor", c.quality_floor},
                {"qc", c.qc}};
}

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        const char* v = std::getenv(name.c_str());
        if (v == nullptr) return std::nullopt;
        return std::string(v);
    };
}

void apply_env_overrides(EngineConfig& c, const EnvLookup& env) {
    if (auto seed = env("GENFLOW_SEED")) {
        try {
            std::size_t used = 0;
            auto v = std::stoull(*seed, &used);
            if (used != seed->size()) throw std::invalid_argument("trailing characters");
            c.sim.master_seed = v;
        } catch (const std::exception&) {
            throw Error(ErrorCode::Config, fmt::format("GENFLOW_SEED '{}' is not an unsigned integer", *seed));
        }
    }
    for (auto role : kBackendRoles) {
        if (auto url = env(env_name(role))) c.endpoints[std::string(role)].url = *url;
    }
}

BackendSet make_backends(const EngineConfig& c) {
    auto sims = sim::make_sim_backends(c.sim, c.fetch.fixture_dir);
    auto endpoint = [&](std::string_view role) {
        auto it = c.endpoints.find(std::string(role));
        if (it == c.endpoints.end() || it->second.url.empty()) {
            throw Error(ErrorCode::Config, fmt::format("role {} uses the remote provider but has no endpoint", role));
        }
        return it->second;
    };
    BackendSet set = sims;
    if (c.provider_for("generator") == Provider::remote) {
        set.generator = std::make_shared<remote::RemoteGenerator>(endpoint("generator"));
    }
    if (c.provider_for("enhancer") == Provider::remote) {
        set.enhancer = std::make_shared<remote::RemoteEnhancer>(endpoint("enhancer"));
    }
    if (c.provider_for("extractor") == Provider::remote) {
        set.extractor = std::make_shared<remote::RemoteExtractor>(endpoint("extractor"));
    }
    if (c.provider_for("director") == Provider::remote) {
        set.director = std::make_shared<remote::RemoteDirector>(endpoint("director"));
    }
    if (c.provider_for("director_agent") == Provider::remote) {
        set.director_agent =
            std::make_shared<remote::RemoteEvaluator>(EvaluatorRole::director_agent, endpoint("director_agent"));
    }
    if (c.provider_for("brand_safety_agent") == Provider::remote) {
        set.brand_safety_agent = std::make_shared<remote::RemoteEvaluator>(EvaluatorRole::brand_safety_agent,
                                                                           endpoint("brand_safety_agent"));
    }
    return set;
}

PipelineOptions pipeline_options(const EngineConfig& c) {
    PipelineOptions o;
    o.fetch = c.fetch;
    o.repair_budget = c.repair_budget;
    o.quality_floor = c.quality_floor;
    o.cost_model = c.sim.cost_model;
    o.seed = c.sim.master_seed;
    return o;
}

ServiceConfig service_config_from_json(const Json& j, const std::filesystem::path& base_dir) {
    reject_unknown(j,
                   {"listen", "data_dir", "max_concurrent", "ui_dir", "engine", "profiles", "profiles_file",
                    "default_profile"},
                   "service config");
    ServiceConfig c;
    c.base_dir = base_dir;
    try {
        if (j.contains("listen")) {
            auto listen = j["listen"].get<std::string>();
            auto colon = listen.rfind(':');
            if (colon == std::string::npos) throw Error(ErrorCode::Config, "listen must be host:port");
            c.host = listen.substr(0, colon);
            c.port = std::stoi(listen.substr(colon + 1));
            if (c.port < 0 || c.port > 65535) throw Error(ErrorCode::Config, "listen port out of range");
        }
        if (j.contains("data_dir")) c.data_dir = resolve(base_dir, j["data_dir"].get<std::string>());
        if (j.contains("max_concurrent")) c.max_concurrent = j["max_concurrent"].get<int>();
        if (j.contains("ui_dir")) c.ui_dir = resolve(base_dir, j["ui_dir"].get<std::string>());
        if (j.contains("engine")) c.engine = j["engine"];
        Json profiles = Json::object();
        if (j.contains("profiles_file")) profiles = read_json_file(resolve(base_dir, j["profiles_file"].get<std::string>()));
        if (j.contains("profiles")) profiles.merge_patch(j["profiles"]);
        if (!profiles.is_object()) throw Error(ErrorCode::Config, "profiles must be an object");
        for (const auto& [name, patch] : profiles.items()) c.profiles[name] = patch;
        if (!c.profiles.count("sim")) c.profiles["sim"] = Json::object();
        if (j.contains("default_profile")) c.default_profile = j["default_profile"].get<std::string>();
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::Config, fmt::format("service config: {}", e.what()));
    } catch (const std::invalid_argument&) {
        throw Error(ErrorCode::Config, "listen port is not a number");
    } catch (const std::out_of_range&) {
        throw Error(ErrorCode::Config, "listen port is not a number");
    }
    if (c.max_concurrent < 1) throw Error(ErrorCode::Config, "max_concurrent must be >= 1");
    if (!c.profiles.count(c.default_profile)) {
        throw Error(ErrorCode::Config, fmt::format("default_profile '{}' is not defined", c.default_profile));
    }
    // Surface engine errors at load time rather than on first submission.
    for (const auto& [name, _] : c.profiles) resolve_profile(c, name, [](const std::string&) { return std::nullopt; });
    return c;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
    return service_config_from_json(read_json_file(path), path.parent_path());
}

EngineConfig resolve_profile(const ServiceConfig& c, const std::string& profile, const EnvLookup& env) {
    auto it = c.profiles.find(profile);
    if (it == c.profiles.end()) throw Error(ErrorCode::InvalidRequest, fmt::format("unknown backend_profile '{}'", profile));
    Json merged = c.engine;
    merged.merge_patch(it->second);
    auto engine = engine_config_from_json(merged, c.base_dir);
    apply_env_overrides(engine, env);
    return engine;
}

}  // namespace genflow
