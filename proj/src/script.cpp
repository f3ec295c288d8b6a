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
#include "genflow/script.hpp"

#include <fmt/format.h>

#include "genflow/backends.hpp"
#include "genflow/brand_dna.hpp"
#include "genflow/run_context.hpp"

namespace genflow {

namespace {

constexpr std::array<std::string_view, 5> kCameraNames = {"front", "three_quarter", "top_down", "low", "tracking"};
constexpr std::array<std::string_view, 5> kLightingNames = {"studio", "golden_hour", "high_key", "low_key", "dynamic"};

template <typename Enum, std::size_t N>
std::optional<Enum> parse_enum(const std::array<std::string_view, N>& names, std::string_view text) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == text) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

std::string excerpt(const Json& value) {
    auto text = value.dump();
    if (text.size() > 80) text = text.substr(0, 77) + "...";
    return text;
}

class SceneChecker {
public:
    SceneChecker(const Json& scene, std::string path, std::vector<SchemaViolation>& out)
        : scene_(scene), path_(std::move(path)), out_(out) {}

    const Json* field(const char* name) {
        if (!scene_.contains(name)) {
            out_.push_back({fmt::format("{}.{}", path_, name), "required", ""});
            return nullptr;
        }
        return &scene_[name];
    }

    void fail(const char* name, const char* rule, const Json& found) {
        out_.push_back({fmt::format("{}.{}", path_, name), rule, excerpt(found)});
    }

private:
    const Json& scene_;
    std::string path_;
    std::vector<SchemaViolation>& out_;
};

std::optional<SceneSpec> check_scene(const Json& scene, std::size_t i, std::vector<SchemaViolation>& out) {
    auto path = fmt::format("scenes[{}]", i);
    if (!scene.is_object()) {
        out.push_back({path, "type", excerpt(scene)});
        return std::nullopt;
    }
    auto before = out.size();
    SceneChecker c(scene, path, out);
    SceneSpec s;

    if (const auto* v = c.field("index")) {
        if (!v->is_number_integer()) {
            c.fail("index", "type", *v);
        } else if (v->get<long long>() < 0) {
            c.fail("index", "range", *v);
        } else {
            s.index = v->get<int>();
        }
    }
    if (const auto* v = c.field("prompt")) {
        if (!v->is_string()) {
            c.fail("prompt", "type", *v);
        } else if (v->get<std::string>().empty()) {
            c.fail("prompt", "non-empty", *v);
        } else {
            s.prompt = v->get<std::string>();
        }
    }
    if (const auto* v = c.field("camera_angle")) {
        auto parsed = v->is_string() ? parse_enum<CameraAngle>(kCameraNames, v->get<std::string>()) : std::nullopt;
        if (!parsed) {
            c.fail("camera_angle", "enum", *v);
        } else {
            s.camera_angle = *parsed;
        }
    }
    if (const auto* v = c.field("focal_length_mm")) {
        if (!v->is_number()) {
            c.fail("focal_length_mm", "type", *v);
        } else if (double f = v->get<double>(); f < kMinFocalLengthMm || f > kMaxFocalLengthMm) {
            c.fail("focal_length_mm", "range", *v);
        } else {
            s.focal_length_mm = f;
        }
    }
    if (const auto* v = c.field("lighting")) {
        auto parsed = v->is_string() ? parse_enum<Lighting>(kLightingNames, v->get<std::string>()) : std::nullopt;
        if (!parsed) {
            c.fail("lighting", "enum", *v);
        } else {
            s.lighting = *parsed;
        }
    }
    if (const auto* v = c.field("motion_vector")) {
        if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
            c.fail("motion_vector", "type", *v);
        } else {
            double x = (*v)[0].get<double>();
            double y = (*v)[1].get<double>();
            if (x < -1.0 || x > 1.0 || y < -1.0 || y > 1.0) {
                c.fail("motion_vector", "range", *v);
            } else {
                s.motion_vector = {x, y};
            }
        }
    }
    if (const auto* v = c.field("duration_s")) {
        if (!v->is_number()) {
            c.fail("duration_s", "type", *v);
        } else if (double d = v->get<double>(); !(d > 0.0) || d > kMaxSceneDurationS) {
            c.fail("duration_s", "range", *v);
        } else {
            s.duration_s = d;
        }
    }
    if (out.size() != before) return std::nullopt;
    return s;
}

}  // namespace

std::string_view to_string(CameraAngle angle) { return kCameraNames[static_cast<std::size_t>(angle)]; }
std::string_view to_string(Lighting lighting) { return kLightingNames[static_cast<std::size_t>(lighting)]; }

Json to_json(const SceneSpec& s) {
    return Json{{"index", s.index},
                {"prompt", s.prompt},
                {"camera_angle", to_string(s.camera_angle)},
                {"focal_length_mm", s.focal_length_mm},
                {"lighting", to_string(s.lighting)},
                {"motion_vector", s.motion_vector},
                {"duration_s", s.duration_s}};
}

Json to_json(const ScriptMatrix& m) {
    Json scenes = Json::array();
    for (const auto& s : m.scenes) scenes.push_back(to_json(s));
    return Json{{"objective", m.objective}, {"dna_ref", m.dna_ref.hex()}, {"scenes", std::move(scenes)}};
}

MatrixResult validate_matrix(const Json& candidate) {
    std::vector<SchemaViolation> out;
    if (!candidate.is_object()) {
        out.push_back({"$", "type", excerpt(candidate)});
        return out;
    }
    ScriptMatrix m;
    if (!candidate.contains("objective")) {
        out.push_back({"objective", "required", ""});
    } else if (!candidate["objective"].is_string()) {
        out.push_back({"objective", "type", excerpt(candidate["objective"])});
    } else if (candidate["objective"].get<std::string>().empty()) {
        out.push_back({"objective", "non-empty", "\"\""});
    } else {
        m.objective = candidate["objective"].get<std::string>();
    }

    if (!candidate.contains("dna_ref")) {
        out.push_back({"dna_ref", "required", ""});
    } else if (!candidate["dna_ref"].is_string()) {
        out.push_back({"dna_ref", "type", excerpt(candidate["dna_ref"])});
    } else {
        auto text = candidate["dna_ref"].get<std::string>();
        bool ok = text.size() == 16 && text.find_first_not_of("0123456789abcdef") == std::string::npos;
        if (ok) {
            m.dna_ref = Digest::from_hex(text);
        } else {
            out.push_back({"dna_ref", "digest-format", text});
        }
    }

    if (!candidate.contains("scenes")) {
        out.push_back({"scenes", "required", ""});
    } else if (!candidate["scenes"].is_array()) {
        out.push_back({"scenes", "type", excerpt(candidate["scenes"])});
    } else if (candidate["scenes"].empty()) {
        out.push_back({"scenes", "non-empty", "[]"});
    } else {
        const auto& scenes = candidate["scenes"];
        bool all_ok = true;
        for (std::size_t i = 0; i < scenes.size(); ++i) {
            if (auto s = check_scene(scenes[i], i, out)) {
                m.scenes.push_back(std::move(*s));
            } else {
                all_ok = false;
            }
        }
        if (all_ok) {
            for (std::size_t i = 0; i < m.scenes.size(); ++i) {
                if (m.scenes[i].index != static_cast<int>(i)) {
                    out.push_back({"scenes", "contiguous-indices",
                                   fmt::format("scenes[{}].index = {}", i, m.scenes[i].index)});
                    break;
                }
            }
        }
    }
    if (!out.empty()) return out;
    return m;
}

ScriptMatrix matrix_from_json(const Json& j) {
    auto result = validate_matrix(j);
    if (auto* m = std::get_if<ScriptMatrix>(&result)) return *m;
    std::string msg = "invalid script matrix:";
    for (const auto& v : std::get<std::vector<SchemaViolation>>(result)) msg += fmt::format(" {}({})", v.field_path, v.rule);
    throw Error(ErrorCode::InvalidRequest, msg);
}

ScriptMatrix author_script(const BrandDNA& dna, const std::string& objective, int n_scenes, DirectorBackend& backend,
                           int repair_budget, Stream stream, RunContext* ctx) {
    if (n_scenes < 1) throw Error(ErrorCode::InvalidRequest, "n_scenes must be >= 1");
    if (objective.empty()) throw Error(ErrorCode::InvalidRequest, "objective must be non-empty");
    if (repair_budget < 0) throw Error(ErrorCode::InvalidRequest, "repair_budget must be >= 0");
    const auto dna_ref = digest_of(dna).hex();

    std::vector<SchemaViolation> feedback;
    for (int attempt = 0; attempt <= repair_budget; ++attempt) {
        auto text = backend.author(DirectorRequest{dna, objective, n_scenes, feedback, attempt},
                                   stream.child("attempt", attempt));
        std::vector<SchemaViolation> violations;
        std::optional<ScriptMatrix> matrix;

        auto candidate = Json::parse(text, nullptr, false);
        if (candidate.is_discarded()) {
            violations.push_back({"$", "json-syntax", text.substr(0, 80)});
        } else {
            if (candidate.is_object()) {
                candidate["objective"] = objective;
                candidate["dna_ref"] = dna_ref;
            }
            auto result = validate_matrix(candidate);
            if (auto* m = std::get_if<ScriptMatrix>(&result)) {
                if (static_cast<int>(m->scenes.size()) == n_scenes) {
                    matrix = std::move(*m);
                } else {
                    violations.push_back({"scenes", "scene-count", std::to_string(m->scenes.size())});
                }
            } else {
                violations = std::move(std::get<std::vector<SchemaViolation>>(result));
            }
        }
        if (ctx) {
            ctx->emit_call(CallKind::director, AgentRole::director_llm, EventKind::generation,
                           Json{{"call", "director"}, {"attempt", attempt}, {"valid", matrix.has_value()}});
        }
        if (matrix) return *matrix;
        if (ctx) {
            ctx->emit(AgentRole::director_llm, EventKind::repair,
                      Json{{"target", "script_matrix"}, {"attempt", attempt}, {"violations", violations},
                           {"will_retry", attempt < repair_budget}});
        }
        feedback = std::move(violations);
    }
    throw ParseExhaustedError(
        fmt::format("director produced no valid script matrix after {} attempts", repair_budget + 1),
        repair_budget + 1, feedback);
}

}  // namespace genflow
