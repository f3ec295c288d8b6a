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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "genflow/brand_dna.hpp"
#include "genflow/common.hpp"
#include "genflow/script.hpp"
#include "genflow/sim_backend.hpp"

namespace genflow::testing {

inline std::filesystem::path fixture_dir() { return GENFLOW_FIXTURE_DIR; }

inline Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    return Json::parse(in);
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Json manifest(const std::string& site) { return read_json(fixture_dir() / site / "manifest.json"); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("genflow-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::permissions(path_, std::filesystem::perms::owner_all, std::filesystem::perm_options::add, ec);
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline BrandDNA sample_dna() {
    return BrandDNA{{"#0F3460", "#E94560"}, {"Helvetica Neue"}, {"rugged"}, {"neon gradients"}, "fixture:acme"};
}

inline SceneSpec sample_scene(double duration_s = 2.0) {
    SceneSpec s;
    s.index = 0;
    s.prompt = "Product rotates on a plinth";
    s.duration_s = duration_s;
    return s;
}

inline sim::SimParams clean_params() {
    auto p = sim::default_sim_params();
    p.mode_probs = {0, 0, 0, 0};
    p.malformed_rate = 0.0;
    return p;
}

/// Single forced mode on the first attempt with a fixed recovery probability.
inline sim::SimParams forced_params(FailureMode mode, double recovery) {
    auto p = clean_params();
    p.mode_probs[index_of(mode)] = 1.0;
    p.recovery_probs = {recovery, recovery, recovery, recovery};
    return p;
}

}  // namespace genflow::testing
