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
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string_view>

#include "genflow/backends.hpp"
#include "genflow/common.hpp"
#include "genflow/cost.hpp"

/// Seeded failure-injecting simulator for every backend role.
namespace genflow::sim {

enum class Tier { aggregate, simple, complex };

std::string_view to_string(Tier tier);
Tier tier_from_string(std::string_view text);

using ModeTable = std::array<double, kAllFailureModes.size()>;

/// Observed failure counts per 100 zero-shot runs, in mode order.
inline constexpr ModeTable kObservedFailureRates = {0.26, 0.18, 0.12, 0.02};
/// Observed cumulative recovery yield per mode within the retry budget.
inline constexpr ModeTable kObservedRecoveryYield = {0.731, 0.833, 0.917, 1.0};
/// Budget at which the observed recovery yields are calibrated.
inline constexpr int kCalibrationBudget = 3;

struct TierPassRates {
    double zero_shot;
    double pipeline;
};
inline constexpr TierPassRates kSimpleTierPassRates{0.72, 0.984};
inline constexpr TierPassRates kComplexTierPassRates{0.12, 0.80};

struct SimParams {
    Tier tier = Tier::aggregate;
    ModeTable mode_probs{};      // per initial attempt, mutually exclusive
    ModeTable recovery_probs{};  // per corrective regeneration
    double malformed_rate = 0.084;
    double fault_rate = 0.0;
    double enhancer_gain_min = 0.55;
    double enhancer_gain_max = 0.9;
    int frame_rate = 24;
    CostModel cost_model = CostModel::defaults();
    std::uint64_t master_seed = 42;
    // Real sleep injected into each sim evaluator call, drawn uniformly from
    // [0, evaluator_jitter]. Nondeterministic; never affects results.
    std::chrono::microseconds evaluator_jitter{0};
};

/// Throws InvalidRequest when a probability is outside [0, 1] or the mode
/// probabilities sum above 1.
void check_params(const SimParams& params);

/// Per-attempt recovery probability q with 1 - (1 - q)^budget = target.
/// Throws InvalidTarget for a target outside [0, 1] or budget < 1.
double calibrate_recovery(double target, int retry_budget);

/// Cumulative recovery targets per mode for a tier. Tiers keep the
/// aggregate mode shares and scale each mode's non-recovery by one factor
/// fitted to the tier's zero-shot and pipeline pass rates.
ModeTable recovery_targets(Tier tier);

SimParams default_sim_params(Tier tier = Tier::aggregate);

/// Closed-form pipeline yield: clean + sum_m p_m (1 - (1 - q_m)^budget).
double expected_pipeline_yield(const SimParams& params, int retry_budget);

int frames_for(double duration_s, int frame_rate);

/// Digest of frame `frame_index` (>= 1) of the attempt whose generator
/// stream has key `attempt_key`.
Digest frame_digest(std::uint64_t attempt_key, int frame_index);

/// Detail text of an injected violation.
std::string violation_detail(FailureMode mode, int frame_index, const SceneSpec& spec, const BrandDNA& dna);

VideoArtifact sim_generate(const GenerationRequest& request, const SimParams& params, Stream stream);

Json to_json(const SimParams& params);
/// Starts from default_sim_params(tier) and overlays the given keys.
SimParams sim_params_from_json(const Json& j);

class SimGenerator final : public GeneratorBackend {
public:
    explicit SimGenerator(SimParams params) : params_(std::move(params)) {}
    VideoArtifact generate(const GenerationRequest& request, Stream stream) override;

private:
    SimParams params_;
};

class SimEnhancer final : public EnhancerBackend {
public:
    explicit SimEnhancer(SimParams params) : params_(std::move(params)) {}
    AssetDescriptor enhance(const AssetDescriptor& asset, const BrandDNA& dna, double quality_floor,
                            Stream stream) override;

private:
    SimParams params_;
};

/// Tone and tropes come from the fixture manifest when the site is a
/// fixture, else from a fixed default vocabulary.
class SimExtractor final : public ExtractorBackend {
public:
    SimExtractor(SimParams params, std::filesystem::path fixture_dir)
        : params_(std::move(params)), fixture_dir_(std::move(fixture_dir)) {}
    std::string extract(const RawSite& site, const std::vector<SchemaViolation>& feedback, int attempt,
                        Stream stream) override;

private:
    SimParams params_;
    std::filesystem::path fixture_dir_;
};

class SimDirector final : public DirectorBackend {
public:
    explicit SimDirector(SimParams params) : params_(std::move(params)) {}
    std::string author(const DirectorRequest& request, Stream stream) override;

private:
    SimParams params_;
};

/// Perfect detector for the modes its role is responsible for.
class SimEvaluator final : public EvaluatorBackend {
public:
    SimEvaluator(EvaluatorRole role, SimParams params) : role_(role), params_(std::move(params)) {}
    [[nodiscard]] EvaluatorRole role() const override { return role_; }
    Verdict evaluate(const VideoArtifact& video, const SceneSpec& spec, const BrandDNA& dna, Stream stream) override;

private:
    EvaluatorRole role_;
    SimParams params_;
};

BackendSet make_sim_backends(const SimParams& params, const std::filesystem::path& fixture_dir);

}  // namespace genflow::sim
