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
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "genflow/common.hpp"
#include "genflow/digest.hpp"
#include "genflow/random.hpp"
#include "genflow/types.hpp"

namespace genflow {

struct BrandDNA;
class DirectorBackend;
class RunContext;

enum class CameraAngle { front, three_quarter, top_down, low, tracking };
enum class Lighting { studio, golden_hour, high_key, low_key, dynamic };

inline constexpr std::array<CameraAngle, 5> kAllCameraAngles = {
    CameraAngle::front, CameraAngle::three_quarter, CameraAngle::top_down, CameraAngle::low, CameraAngle::tracking};
inline constexpr std::array<Lighting, 5> kAllLighting = {
    Lighting::studio, Lighting::golden_hour, Lighting::high_key, Lighting::low_key, Lighting::dynamic};

std::string_view to_string(CameraAngle angle);
std::string_view to_string(Lighting lighting);

inline constexpr double kMinFocalLengthMm = 14.0;
inline constexpr double kMaxFocalLengthMm = 200.0;
inline constexpr double kMaxSceneDurationS = 10.0;

struct SceneSpec {
    int index = 0;
    std::string prompt;
    CameraAngle camera_angle = CameraAngle::front;
    double focal_length_mm = 50.0;
    Lighting lighting = Lighting::studio;
    std::array<double, 2> motion_vector{0.0, 0.0};
    double duration_s = 2.0;

    bool operator==(const SceneSpec&) const = default;
};

struct ScriptMatrix {
    std::vector<SceneSpec> scenes;
    std::string objective;
    Digest dna_ref;

    bool operator==(const ScriptMatrix&) const = default;
};

Json to_json(const SceneSpec& scene);
Json to_json(const ScriptMatrix& matrix);

using MatrixResult = std::variant<ScriptMatrix, std::vector<SchemaViolation>>;

MatrixResult validate_matrix(const Json& candidate);

/// Director step with the same parse-repair loop as brand DNA extraction.
/// Throws InvalidRequest (n_scenes < 1, empty objective) or
/// ParseExhaustedError.
ScriptMatrix author_script(const BrandDNA& dna, const std::string& objective, int n_scenes,
                           DirectorBackend& backend, int repair_budget, Stream stream,
                           RunContext* ctx = nullptr);

/// Reads a `.script.json` document; throws InvalidRequest when invalid.
ScriptMatrix matrix_from_json(const Json& j);

}  // namespace genflow
