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
#include <gtest/gtest.h>

#include <map>

#include "genflow/config.hpp"
#include "genflow/errors.hpp"
#include "test_support.hpp"

namespace genflow {
namespace {

EnvLookup env_of(std::map<std::string, std::string> vars) {
    return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
        auto it = vars.find(name);
        if (it == vars.end()) return std::nullopt;
        return it->second;
    };
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no Error thrown";
    return ErrorCode::Io;
}

TEST(EngineConfig, DefaultsAreSim) {
    auto c = engine_config_from_json(Json::object());
    EXPECT_EQ(c.default_provider, Provider::sim);
    EXPECT_EQ(c.repair_budget, 1);
    EXPECT_EQ(c.qc.retry_budget, 3);
    EXPECT_EQ(c.sim.mode_probs, sim::default_sim_params().mode_probs);
}

TEST(EngineConfig, ParsesAllKeys) {
    Json j{{"backend", "sim"},
           {"providers", {{"generator", "remote"}}},
           {"seed", 99},
           {"sim", {{"malformed_rate", 0.2}, {"tier", "complex"}}},
           {"endpoints", {{"generator", "http://127.0.0.1:9/gen"}}},
           {"fetch", {{"timeout_ms", 1500}, {"max_bytes", 1024}}},
           {"fixture_dir", "fx"},
           {"repair_budget", 2},
           {"quality_floor", 0.7},
           {"qc", {{"retry_budget", 5}, {"consensus", "strict_and"}}}};
    auto c = engine_config_from_json(j, "/base");
    EXPECT_EQ(c.provider_for("generator"), Provider::remote);
    EXPECT_EQ(c.provider_for("enhancer"), Provider::sim);
    EXPECT_EQ(c.sim.master_seed, 99u);
    EXPECT_DOUBLE_EQ(c.sim.malformed_rate, 0.2);
    EXPECT_EQ(c.sim.tier, sim::Tier::complex);
    EXPECT_EQ(c.endpoints.at("generator").url, "http://127.0.0.1:9/gen");
    EXPECT_EQ(c.fetch.timeout, std::chrono::milliseconds(1500));
    EXPECT_EQ(c.fetch.max_bytes, 1024u);
    EXPECT_EQ(c.fetch.fixture_dir, std::filesystem::path("/base/fx"));
    EXPECT_EQ(c.repair_budget, 2);
    EXPECT_DOUBLE_EQ(c.quality_floor, 0.7);
    EXPECT_EQ(c.qc.retry_budget, 5);

    auto back = engine_config_from_json(to_json(c));
    EXPECT_EQ(to_json(back), to_json(c));
}

TEST(EngineConfig, RejectsBadInput) {
    EXPECT_EQ(code_of([] { engine_config_from_json(Json{{"bogus", 1}}); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { engine_config_from_json(Json{{"backend", "cloud"}}); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { engine_config_from_json(Json{{"providers", {{"painter", "sim"}}}}); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { engine_config_from_json(Json{{"repair_budget", -1}}); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { engine_config_from_json(Json{{"quality_floor", 1.5}}); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { engine_config_from_json(Json{{"seed", "x"}}); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { engine_config_from_json(Json{{"qc", {{"retry_budget", -2}}}}); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { engine_config_from_json(Json{{"sim", {{"malformed_rate", 3.0}}}}); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { engine_config_from_json(Json{{"fetch", {{"retries", 3}}}}); }), ErrorCode::Config);
}

TEST(EnvOverrides, SeedAndEndpoints) {
    auto c = engine_config_from_json(Json::object());
    apply_env_overrides(c, env_of({{"GENFLOW_SEED", "123"}, {"GENFLOW_ENDPOINT_BRAND_SAFETY_AGENT", "http://h/s"}}));
    EXPECT_EQ(c.sim.master_seed, 123u);
    EXPECT_EQ(c.endpoints.at("brand_safety_agent").url, "http://h/s");
    EXPECT_EQ(code_of([&] { apply_env_overrides(c, env_of({{"GENFLOW_SEED", "12x"}})); }), ErrorCode::Config);
}

TEST(MakeBackends, RemoteRoleWithoutEndpointIsConfigError) {
    auto c = engine_config_from_json(Json{{"backend", "remote"}});
    EXPECT_EQ(code_of([&] { make_backends(c); }), ErrorCode::Config);
    auto s = make_backends(engine_config_from_json(Json::object()));
    EXPECT_TRUE(s.generator && s.enhancer && s.extractor && s.director && s.director_agent && s.brand_safety_agent);
}

TEST(MakeBackends, MixedProviders) {
    auto c = engine_config_from_json(
        Json{{"providers", {{"director_agent", "remote"}}}, {"endpoints", {{"director_agent", "http://h/d"}}}});
    auto s = make_backends(c);
    EXPECT_NE(dynamic_cast<remote::RemoteEvaluator*>(s.director_agent.get()), nullptr);
    EXPECT_NE(dynamic_cast<sim::SimEvaluator*>(s.brand_safety_agent.get()), nullptr);
}

TEST(PipelineOptions, CopiesEngineSettings) {
    auto c = engine_config_from_json(Json{{"seed", 5}, {"repair_budget", 3}, {"quality_floor", 0.6}});
    auto o = pipeline_options(c);
    EXPECT_EQ(o.seed, 5u);
    EXPECT_EQ(o.repair_budget, 3);
    EXPECT_DOUBLE_EQ(o.quality_floor, 0.6);
}

TEST(ServiceConfig, ParsesAndResolvesProfiles) {
    Json j{{"listen", "0.0.0.0:9090"},
           {"data_dir", "data"},
           {"max_concurrent", 3},
           {"engine", {{"seed", 7}}},
           {"profiles", {{"flaky", {{"sim", {{"fault_rate", 0.5}}}}}}},
           {"default_profile", "flaky"}};
    auto c = service_config_from_json(j, "/srv");
    EXPECT_EQ(c.host, "0.0.0.0");
    EXPECT_EQ(c.port, 9090);
    EXPECT_EQ(c.data_dir, std::filesystem::path("/srv/data"));
    EXPECT_EQ(c.max_concurrent, 3);
    EXPECT_EQ(c.profiles.size(), 2u);
    auto flaky = resolve_profile(c, "flaky", env_of({}));
    EXPECT_DOUBLE_EQ(flaky.sim.fault_rate, 0.5);
    EXPECT_EQ(flaky.sim.master_seed, 7u);
    auto plain = resolve_profile(c, "sim", env_of({{"GENFLOW_SEED", "8"}}));
    EXPECT_DOUBLE_EQ(plain.sim.fault_rate, 0.0);
    EXPECT_EQ(plain.sim.master_seed, 8u);
    EXPECT_EQ(code_of([&] { resolve_profile(c, "nope", env_of({})); }), ErrorCode::InvalidRequest);
}

TEST(ServiceConfig, RejectsBadInput) {
    EXPECT_EQ(code_of([] { service_config_from_json(Json{{"listen", "nohost"}}); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { service_config_from_json(Json{{"listen", "h:abc"}}); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { service_config_from_json(Json{{"max_concurrent", 0}}); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { service_config_from_json(Json{{"default_profile", "x"}}); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { service_config_from_json(Json{{"profiles", {{"bad", {{"backend", "cloud"}}}}}}); }),
              ErrorCode::Config);
    EXPECT_EQ(code_of([] { service_config_from_json(Json{{"port", 1}}); }), ErrorCode::Config);
}

TEST(ServiceConfig, LoadsFileWithProfilesFile) {
    testing::TempDir dir;
    {
        std::ofstream(dir / "profiles.json") << R"({"strict": {"qc": {"retry_budget": 0}}})";
        std::ofstream(dir / "service.json") << R"({"profiles_file": "profiles.json", "data_dir": "d"})";
    }
    auto c = load_service_config(dir / "service.json");
    EXPECT_EQ(c.data_dir, dir.path() / "d");
    EXPECT_EQ(resolve_profile(c, "strict", env_of({})).qc.retry_budget, 0);
    EXPECT_EQ(code_of([&] { load_service_config(dir / "missing.json"); }), ErrorCode::Config);
}

}  // namespace
}  // namespace genflow
