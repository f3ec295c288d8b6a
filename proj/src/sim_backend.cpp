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
#include "genflow/sim_backend.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "genflow/errors.hpp"

namespace genflow::sim {

namespace {

void maybe_fault(const SimParams& params, Stream stream, std::string_view role) {
    if (params.fault_rate > 0.0 && stream.child("fault").bernoulli(params.fault_rate)) {
        throw Error(ErrorCode::BackendFault, fmt::format("simulated {} fault", role));
    }
}

double round_to(double v, double step) { return std::round(v / step) * step; }

std::string first_or(const std::vector<std::string>& list, std::string_view fallback) {
    return list.empty() ? std::string(fallback) : list.front();
}

const ModeTable& zero_table() {
    static const ModeTable z{};
    return z;
}

ModeTable mode_table_from_json(const Json& j, ModeTable base) {
    for (auto m : kAllFailureModes) {
        auto name = std::string(genflow::to_string(m));
        if (j.contains(name)) base[index_of(m)] = j[name].get<double>();
    }
    return base;
}

Json mode_table_to_json(const ModeTable& t) {
    Json out = Json::object();
    for (auto m : kAllFailureModes) out[std::string(genflow::to_string(m))] = t[index_of(m)];
    return out;
}

}  // namespace

std::string_view to_string(Tier tier) {
    switch (tier) {
    case Tier::aggregate: return "aggregate";
    case Tier::simple: return "simple";
    case Tier::complex: return "complex";
    }
    return "aggregate";
}

Tier tier_from_string(std::string_view text) {
    if (text == "aggregate") return Tier::aggregate;
    if (text == "simple") return Tier::simple;
    if (text == "complex") return Tier::complex;
    throw Error(ErrorCode::InvalidRequest, fmt::format("unknown tier '{}'", text));
}

void check_params(const SimParams& p) {
    auto prob = [](double v, std::string_view what) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error(ErrorCode::InvalidRequest, fmt::format("{} = {} is not a probability", what, v));
        }
    };
    double total = 0.0;
    for (auto m : kAllFailureModes) {
        prob(p.mode_probs[index_of(m)], fmt::format("mode_probs.{}", genflow::to_string(m)));
        prob(p.recovery_probs[index_of(m)], fmt::format("recovery_probs.{}", genflow::to_string(m)));
        total += p.mode_probs[index_of(m)];
    }
    if (total > 1.0 + 1e-12) throw Error(ErrorCode::InvalidRequest, fmt::format("mode_probs sum to {} > 1", total));
    prob(p.malformed_rate, "malformed_rate");
    prob(p.fault_rate, "fault_rate");
    prob(p.enhancer_gain_min, "enhancer_gain_min");
    prob(p.enhancer_gain_max, "enhancer_gain_max");
    if (p.enhancer_gain_min > p.enhancer_gain_max) throw Error(ErrorCode::InvalidRequest, "enhancer gain range is empty");
    if (p.frame_rate < 1) throw Error(ErrorCode::InvalidRequest, "frame_rate must be >= 1");
}

double calibrate_recovery(double target, int retry_budget) {
    if (!(target >= 0.0 && target <= 1.0)) {
        throw Error(ErrorCode::InvalidTarget, fmt::format("recovery target {} outside [0, 1]", target));
    }
    if (retry_budget < 1) throw Error(ErrorCode::InvalidTarget, "calibration needs a retry budget >= 1");
    if (target == 1.0) return 1.0;
    return 1.0 - std::pow(1.0 - target, 1.0 / retry_budget);
}

ModeTable recovery_targets(Tier tier) {
    if (tier == Tier::aggregate) return kObservedRecoveryYield;
    const auto rates = tier == Tier::simple ? kSimpleTierPassRates : kComplexTierPassRates;

    double mass = 0.0;
    double recovered = 0.0;
    for (auto m : kAllFailureModes) {
        mass += kObservedFailureRates[index_of(m)];
        recovered += kObservedFailureRates[index_of(m)] * kObservedRecoveryYield[index_of(m)];
    }
    const double aggregate_recovery = recovered / mass;
    const double tier_recovery = (rates.pipeline - rates.zero_shot) / (1.0 - rates.zero_shot);
    const double scale = (1.0 - tier_recovery) / (1.0 - aggregate_recovery);

    ModeTable out{};
    for (auto m : kAllFailureModes) {
        out[index_of(m)] = std::clamp(1.0 - scale * (1.0 - kObservedRecoveryYield[index_of(m)]), 0.0, 1.0);
    }
    return out;
}

SimParams default_sim_params(Tier tier) {
    SimParams p;
    p.tier = tier;
    double mass = 0.0;
    for (double r : kObservedFailureRates) mass += r;
    double tier_mass = mass;
    if (tier == Tier::simple) tier_mass = 1.0 - kSimpleTierPassRates.zero_shot;
    if (tier == Tier::complex) tier_mass = 1.0 - kComplexTierPassRates.zero_shot;
    const auto targets = recovery_targets(tier);
    for (auto m : kAllFailureModes) {
        p.mode_probs[index_of(m)] = kObservedFailureRates[index_of(m)] * tier_mass / mass;
        p.recovery_probs[index_of(m)] = calibrate_recovery(targets[index_of(m)], kCalibrationBudget);
    }
    return p;
}

double expected_pipeline_yield(const SimParams& params, int retry_budget) {
    double clean = 1.0;
    double recovered = 0.0;
    for (auto m : kAllFailureModes) {
        const double p = params.mode_probs[index_of(m)];
        const double q = params.recovery_probs[index_of(m)];
        clean -= p;
        recovered += p * (1.0 - std::pow(1.0 - q, retry_budget));
    }
    return clean + recovered;
}

int frames_for(double duration_s, int frame_rate) {
    return std::max(1, static_cast<int>(std::lround(duration_s * frame_rate)));
}

Digest frame_digest(std::uint64_t attempt_key, int frame_index) {
    auto h = mix64(attempt_key + mix64(static_cast<std::uint64_t>(frame_index)));
    return Digest{h == 0 ? 1 : h};
}

std::string violation_detail(FailureMode mode, int frame_index, const SceneSpec& spec, const BrandDNA& dna) {
    switch (mode) {
    case FailureMode::temporal_morphing:
        return fmt::format("The product silhouette warps and loses rigidity around frame {}", frame_index);
    case FailureMode::typographic_hallucination:
        return fmt::format("The typography on the central object is garbled in frame {}", frame_index);
    case FailureMode::brand_color_violation:
        return fmt::format("The dominant brand surface drifts off the approved palette (expected {}) in frame {}",
                           first_or(dna.palette, "palette"), frame_index);
    case FailureMode::composition_error:
        return fmt::format("Framing does not match the scripted {} camera at {}mm in frame {}",
                           genflow::to_string(spec.camera_angle), spec.focal_length_mm, frame_index);
    }
    return {};
}

VideoArtifact sim_generate(const GenerationRequest& request, const SimParams& params, Stream stream) {
    maybe_fault(params, stream, "generator");
    const int n = frames_for(request.spec.duration_s, params.frame_rate);

    VideoArtifact video;
    video.scene_index = request.scene_index;
    video.attempt = request.attempt;
    video.init_frame = request.init;
    video.frames.reserve(static_cast<std::size_t>(n));
    video.frames.push_back({request.init.digest, request.scene_index, 0});
    for (int i = 1; i < n; ++i) video.frames.push_back({frame_digest(stream.key(), i), request.scene_index, i});

    std::optional<FailureMode> injected;
    if (request.corrective == nullptr) {
        const double u = stream.child("mode").uniform();
        double cumulative = 0.0;
        for (auto m : kAllFailureModes) {
            cumulative += params.mode_probs[index_of(m)];
            if (u < cumulative) {
                injected = m;
                break;
            }
        }
    } else {
        for (auto m : request.corrective->targeted_modes) {
            const bool recovered = stream.child("recover", index_of(m)).bernoulli(params.recovery_probs[index_of(m)]);
            if (!recovered) {
                injected = m;
                break;
            }
        }
    }
    if (injected) {
        const int frame = static_cast<int>(stream.child("frame").below(static_cast<std::uint64_t>(n)));
        video.injected_violations.push_back(
            {*injected, frame, violation_detail(*injected, frame, request.spec, request.dna), false});
    }
    return video;
}

VideoArtifact SimGenerator::generate(const GenerationRequest& request, Stream stream) {
    return sim_generate(request, params_, stream);
}

AssetDescriptor SimEnhancer::enhance(const AssetDescriptor& asset, const BrandDNA& dna, double quality_floor,
                                     Stream stream) {
    maybe_fault(params_, stream, "enhancer");
    auto s = stream.child("dna", digest_of(dna).value);
    auto lift = [&](double v) {
        const double gain = s.uniform(params_.enhancer_gain_min, params_.enhancer_gain_max);
        return std::min(1.0, std::max(v + (1.0 - v) * gain, quality_floor));
    };
    AssetDescriptor out = asset;
    out.illumination = lift(asset.illumination);
    out.resolution = lift(asset.resolution);
    out.background_isolation = lift(asset.background_isolation);
    return out;
}

std::string SimExtractor::extract(const RawSite& site, const std::vector<SchemaViolation>& /*feedback*/,
                                  int /*attempt*/, Stream stream) {
    maybe_fault(params_, stream, "extractor");
    std::vector<std::string> tone = {"confident", "precise", "warm"};
    std::vector<std::string> tropes = {"competitor logos", "distorted product geometry",
                                       "off-palette color grading"};
    constexpr std::string_view kScheme = "fixture:";
    if (site.url.starts_with(kScheme)) {
        auto rest = site.url.substr(kScheme.size());
        auto name = rest.substr(0, rest.find('/'));
        std::ifstream in(fixture_dir_ / name / "manifest.json");
        auto manifest = in ? Json::parse(in, nullptr, false) : Json();
        if (manifest.is_object()) {
            tone = manifest.value("tonal_voice", tone);
            tropes = manifest.value("forbidden_tropes", tropes);
        }
    }
    if (stream.child("malformed").bernoulli(params_.malformed_rate)) {
        switch (stream.child("variant").below(3)) {
        case 0: return R"({"tonal_voice": [")" + first_or(tone, "bold") + R"(", )";
        case 1: return Json{{"tonal_voice", first_or(tone, "bold")}, {"forbidden_tropes", tropes}}.dump();
        default: return Json{{"tonal_voice", tone}}.dump();
        }
    }
    return Json{{"tonal_voice", tone}, {"forbidden_tropes", tropes}}.dump();
}

std::string SimDirector::author(const DirectorRequest& request, Stream stream) {
    maybe_fault(params_, stream, "director");
    const auto& dna = request.dna;
    Json scenes = Json::array();
    for (int i = 0; i < request.n_scenes; ++i) {
        auto s = stream.child("scene", static_cast<std::uint64_t>(i));
        SceneSpec spec;
        spec.index = i;
        spec.camera_angle = kAllCameraAngles[s.below(kAllCameraAngles.size())];
        spec.lighting = kAllLighting[s.below(kAllLighting.size())];
        spec.focal_length_mm = std::round(s.uniform(18.0, 135.0));
        spec.motion_vector = {round_to(s.uniform(-1.0, 1.0), 0.01), round_to(s.uniform(-1.0, 1.0), 0.01)};
        spec.duration_s = 1.5 + 0.5 * static_cast<double>(s.below(8));
        spec.prompt = fmt::format("Scene {}/{}: {}. {} shot, {} lighting, {} tone, anchored on {} with {} type",
                                  i + 1, request.n_scenes, request.objective, to_string(spec.camera_angle),
                                  to_string(spec.lighting), first_or(dna.tonal_voice, "neutral"),
                                  first_or(dna.palette, "#000000"), first_or(dna.typography, "brand"));
        scenes.push_back(to_json(spec));
    }
    if (stream.child("malformed").bernoulli(params_.malformed_rate)) {
        switch (stream.child("variant").below(3)) {
        case 0: {
            auto text = Json{{"scenes", scenes}}.dump();
            return text.substr(0, text.size() / 2);
        }
        case 1:
            scenes[0]["focal_length_mm"] = 500.0;
            break;
        default:
            scenes[0]["index"] = request.n_scenes;
            break;
        }
    }
    return Json{{"objective", request.objective}, {"scenes", std::move(scenes)}}.dump();
}

Verdict SimEvaluator::evaluate(const VideoArtifact& video, const SceneSpec& spec, const BrandDNA& /*dna*/,
                               Stream stream) {
    if (params_.evaluator_jitter.count() > 0) {
        thread_local std::mt19937_64 jitter_rng{std::random_device{}()};
        std::uniform_int_distribution<long> dist(0, params_.evaluator_jitter.count());
        std::this_thread::sleep_for(std::chrono::microseconds(dist(jitter_rng)));
    }
    maybe_fault(params_, stream, genflow::to_string(role_));
    Verdict v;
    v.agent = role_;
    for (const auto& violation : video.injected_violations) {
        if (responsible_for(role_, violation.mode)) v.violations.push_back(violation);
    }
    v.pass = v.violations.empty();
    if (v.pass) {
        v.critique = role_ == EvaluatorRole::director_agent
                         ? fmt::format("Motion is fluid and the {} shot holds its framing.", to_string(spec.camera_angle))
                         : std::string("No policy violations: text is legible and colors stay on palette.");
    } else {
        for (const auto& violation : v.violations) {
            if (!v.critique.empty()) v.critique += ' ';
            v.critique += violation.detail + '.';
        }
    }
    return v;
}

BackendSet make_sim_backends(const SimParams& params, const std::filesystem::path& fixture_dir) {
    check_params(params);
    BackendSet set;
    set.generator = std::make_shared<SimGenerator>(params);
    set.enhancer = std::make_shared<SimEnhancer>(params);
    set.extractor = std::make_shared<SimExtractor>(params, fixture_dir);
    set.director = std::make_shared<SimDirector>(params);
    set.director_agent = std::make_shared<SimEvaluator>(EvaluatorRole::director_agent, params);
    set.brand_safety_agent = std::make_shared<SimEvaluator>(EvaluatorRole::brand_safety_agent, params);
    return set;
}

Json to_json(const SimParams& p) {
    return Json{{"tier", to_string(p.tier)},
                {"mode_probs", mode_table_to_json(p.mode_probs)},
                {"recovery_probs", mode_table_to_json(p.recovery_probs)},
                {"malformed_rate", p.malformed_rate},
                {"fault_rate", p.fault_rate},
                {"enhancer_gain", {p.enhancer_gain_min, p.enhancer_gain_max}},
                {"frame_rate", p.frame_rate},
                {"cost_model", to_json(p.cost_model)},
                {"master_seed", p.master_seed},
                {"evaluator_jitter_us", p.evaluator_jitter.count()}};
}

SimParams sim_params_from_json(const Json& j) {
    try {
        auto p = default_sim_params(tier_from_string(j.value("tier", std::string("aggregate"))));
        if (j.contains("mode_probs")) p.mode_probs = mode_table_from_json(j["mode_probs"], p.mode_probs);
        if (j.contains("recovery_targets")) {
            const int budget = j.value("calibration_budget", kCalibrationBudget);
            auto targets = mode_table_from_json(j["recovery_targets"], zero_table());
            for (auto m : kAllFailureModes) {
                if (j["recovery_targets"].contains(std::string(genflow::to_string(m)))) {
                    p.recovery_probs[index_of(m)] = calibrate_recovery(targets[index_of(m)], budget);
                }
            }
        }
        if (j.contains("recovery_probs")) p.recovery_probs = mode_table_from_json(j["recovery_probs"], p.recovery_probs);
        p.malformed_rate = j.value("malformed_rate", p.malformed_rate);
        p.fault_rate = j.value("fault_rate", p.fault_rate);
        if (j.contains("enhancer_gain")) {
            p.enhancer_gain_min = j["enhancer_gain"].at(0).get<double>();
            p.enhancer_gain_max = j["enhancer_gain"].at(1).get<double>();
        }
        p.frame_rate = j.value("frame_rate", p.frame_rate);
        if (j.contains("cost_model")) p.cost_model = cost_model_from_json(j["cost_model"]);
        p.master_seed = j.value("master_seed", p.master_seed);
        p.evaluator_jitter = std::chrono::microseconds(j.value("evaluator_jitter_us", std::int64_t{0}));
        check_params(p);
        return p;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::Config, fmt::format("sim params: {}", e.what()));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) throw;
        throw Error(ErrorCode::Config, fmt::format("sim params: {}", e.what()));
    }
}

}  // namespace genflow::sim
