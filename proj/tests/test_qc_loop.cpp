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

#include <atomic>
#include <chrono>
#include <thread>

#include "genflow/errors.hpp"
#include "genflow/qc_loop.hpp"
#include "genflow/sim_backend.hpp"
#include "genflow/telemetry.hpp"
#include "test_support.hpp"

namespace genflow {
namespace {

Verdict pass_verdict(EvaluatorRole role) { return Verdict{role, true, {}, "ok", std::nullopt}; }

Verdict fail_verdict(EvaluatorRole role, std::vector<ViolationReport> v) {
    return Verdict{role, false, std::move(v), "bad", std::nullopt};
}

ViolationReport report(FailureMode m, int frame) { return {m, frame, "detail", false}; }

VideoArtifact artifact_with(std::vector<ViolationReport> injected, int n_frames = 48) {
    VideoArtifact v;
    v.init_frame = {digest_bytes("init"), -1, 0};
    for (int i = 0; i < n_frames; ++i) {
        v.frames.push_back({i == 0 ? v.init_frame.digest : digest_bytes(std::to_string(i)), 0, i});
    }
    v.injected_violations = std::move(injected);
    return v;
}

class ThrowingEvaluator final : public EvaluatorBackend {
public:
    explicit ThrowingEvaluator(EvaluatorRole role) : role_(role) {}
    EvaluatorRole role() const override { return role_; }
    Verdict evaluate(const VideoArtifact&, const SceneSpec&, const BrandDNA&, Stream) override {
        throw Error(ErrorCode::Transport, "judge unreachable");
    }

private:
    EvaluatorRole role_;
};

class ThrowingGenerator final : public GeneratorBackend {
public:
    VideoArtifact generate(const GenerationRequest&, Stream) override {
        throw Error(ErrorCode::BackendFault, "render farm down");
    }
};

struct Harness {
    explicit Harness(const sim::SimParams& p) : backends(sim::make_sim_backends(p, testing::fixture_dir())) {
        bus.open_run("r", clock);
    }
    SceneOutcome run(const SceneSpec& spec, QcPolicy policy, std::uint64_t seed) {
        return qc_generate_scene(spec, 0, init, testing::sample_dna(), policy, backends, Stream(seed), ctx);
    }
    BackendSet backends;
    EventBus bus;
    std::shared_ptr<LogicalClock> clock = std::make_shared<LogicalClock>();
    RunContext ctx{"r", CostModel::defaults(), &bus, clock};
    FrameRef init{digest_bytes("init"), -1, 0};
};

// Consensus: strict AND over every verdict combination.

TEST(Consensus, BothPassCommits) {
    auto d = consensus(pass_verdict(EvaluatorRole::director_agent), pass_verdict(EvaluatorRole::brand_safety_agent), {});
    EXPECT_TRUE(std::holds_alternative<Commit>(d));
}

TEST(Consensus, SafetyFailRefinesWithItsViolations) {
    auto color = report(FailureMode::brand_color_violation, 5);
    auto d = consensus(pass_verdict(EvaluatorRole::director_agent),
                       fail_verdict(EvaluatorRole::brand_safety_agent, {color}), {});
    ASSERT_TRUE(std::holds_alternative<Refine>(d));
    EXPECT_EQ(std::get<Refine>(d).violations, std::vector<ViolationReport>{color});
}

TEST(Consensus, DirectorFailRefines) {
    auto morph = report(FailureMode::temporal_morphing, 2);
    auto d = consensus(fail_verdict(EvaluatorRole::director_agent, {morph}),
                       pass_verdict(EvaluatorRole::brand_safety_agent), {});
    ASSERT_TRUE(std::holds_alternative<Refine>(d));
    EXPECT_EQ(std::get<Refine>(d).violations, std::vector<ViolationReport>{morph});
}

TEST(Consensus, BothFailMergesInModeOrder) {
    auto morph = report(FailureMode::temporal_morphing, 30);
    auto typo = report(FailureMode::typographic_hallucination, 24);
    auto comp = report(FailureMode::composition_error, 1);
    auto d = consensus(fail_verdict(EvaluatorRole::director_agent, {comp, morph}),
                       fail_verdict(EvaluatorRole::brand_safety_agent, {typo}), {});
    ASSERT_TRUE(std::holds_alternative<Refine>(d));
    EXPECT_EQ(std::get<Refine>(d).violations, (std::vector<ViolationReport>{morph, typo, comp}));
}

TEST(Consensus, DeduplicatesByModeAndFrame) {
    auto a = report(FailureMode::typographic_hallucination, 24);
    auto b = a;
    b.detail = "other wording";
    auto c = report(FailureMode::typographic_hallucination, 3);
    auto d = consensus(fail_verdict(EvaluatorRole::director_agent, {a}),
                       fail_verdict(EvaluatorRole::brand_safety_agent, {b, c}), {});
    EXPECT_EQ(std::get<Refine>(d).violations, (std::vector<ViolationReport>{c, a}));
}

// Evaluation.

TEST(Evaluate, CleanArtifactPassesBoth) {
    auto p = testing::clean_params();
    sim::SimEvaluator d(EvaluatorRole::director_agent, p);
    sim::SimEvaluator s(EvaluatorRole::brand_safety_agent, p);
    auto [dv, sv] = evaluate(artifact_with({}), testing::sample_scene(), testing::sample_dna(), d, s, Stream(1));
    EXPECT_TRUE(dv.pass);
    EXPECT_TRUE(sv.pass);
    EXPECT_EQ(dv.agent, EvaluatorRole::director_agent);
    EXPECT_EQ(sv.agent, EvaluatorRole::brand_safety_agent);
}

TEST(Evaluate, TypographyAtFrame24FailsSafetyOnly) {
    auto spec = testing::sample_scene();
    auto dna = testing::sample_dna();
    auto detail = sim::violation_detail(FailureMode::typographic_hallucination, 24, spec, dna);
    auto video = artifact_with({{FailureMode::typographic_hallucination, 24, detail, false}});
    auto p = testing::clean_params();
    sim::SimEvaluator d(EvaluatorRole::director_agent, p);
    sim::SimEvaluator s(EvaluatorRole::brand_safety_agent, p);
    auto [dv, sv] = evaluate(video, spec, dna, d, s, Stream(1));
    EXPECT_TRUE(dv.pass);
    ASSERT_FALSE(sv.pass);
    ASSERT_EQ(sv.violations.size(), 1u);
    EXPECT_EQ(sv.violations[0].frame_index, 24);
    EXPECT_NE(sv.violations[0].detail.find("garbled in frame 24"), std::string::npos);
    EXPECT_NE(sv.critique.find("frame 24"), std::string::npos);
}

TEST(Evaluate, TwoModesFailBoth) {
    auto video = artifact_with(
        {report(FailureMode::temporal_morphing, 4), report(FailureMode::brand_color_violation, 9)});
    auto p = testing::clean_params();
    sim::SimEvaluator d(EvaluatorRole::director_agent, p);
    sim::SimEvaluator s(EvaluatorRole::brand_safety_agent, p);
    auto [dv, sv] = evaluate(video, testing::sample_scene(), testing::sample_dna(), d, s, Stream(1));
    EXPECT_FALSE(dv.pass);
    EXPECT_FALSE(sv.pass);
    EXPECT_EQ(dv.violations[0].mode, FailureMode::temporal_morphing);
    EXPECT_EQ(sv.violations[0].mode, FailureMode::brand_color_violation);
}

TEST(Evaluate, FaultBecomesSyntheticViolation) {
    ThrowingEvaluator d(EvaluatorRole::director_agent);
    sim::SimEvaluator s(EvaluatorRole::brand_safety_agent, testing::clean_params());
    auto [dv, sv] = evaluate(artifact_with({}), testing::sample_scene(), testing::sample_dna(), d, s, Stream(1));
    EXPECT_FALSE(dv.pass);
    ASSERT_EQ(dv.violations.size(), 1u);
    EXPECT_TRUE(dv.violations[0].synthetic);
    EXPECT_EQ(dv.fault, std::optional<std::string>("judge unreachable"));
    EXPECT_TRUE(sv.pass);
}

TEST(Evaluate, RejectsInvalidArtifact) {
    auto video = artifact_with({});
    video.frames.clear();
    sim::SimEvaluator d(EvaluatorRole::director_agent, testing::clean_params());
    sim::SimEvaluator s(EvaluatorRole::brand_safety_agent, testing::clean_params());
    EXPECT_THROW(evaluate(video, testing::sample_scene(), testing::sample_dna(), d, s, Stream(1)), Error);
}

TEST(Evaluate, DetectionIsExactPartitionOfInjections) {
    auto p = testing::clean_params();
    sim::SimEvaluator d(EvaluatorRole::director_agent, p);
    sim::SimEvaluator s(EvaluatorRole::brand_safety_agent, p);
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        Stream rng(seed);
        std::vector<ViolationReport> injected;
        for (auto m : kAllFailureModes) {
            if (rng.child("m", index_of(m)).bernoulli(0.4)) {
                injected.push_back(report(m, static_cast<int>(rng.child("f", index_of(m)).below(48))));
            }
        }
        auto [dv, sv] = evaluate(artifact_with(injected), testing::sample_scene(), testing::sample_dna(), d, s,
                                 Stream(seed));
        std::vector<ViolationReport> want_d;
        std::vector<ViolationReport> want_s;
        for (const auto& v : injected) {
            (responsible_for(EvaluatorRole::director_agent, v.mode) ? want_d : want_s).push_back(v);
        }
        EXPECT_EQ(dv.violations, want_d);
        EXPECT_EQ(sv.violations, want_s);
        EXPECT_EQ(dv.pass, want_d.empty());
        EXPECT_EQ(sv.pass, want_s.empty());
    }
}

// Corrective synthesis.

TEST(Corrective, TemplateLookupFirstIteration) {
    auto spec = testing::sample_scene();
    auto c = synthesize_corrective({report(FailureMode::typographic_hallucination, 24)}, spec, {});
    EXPECT_EQ(c.iteration, 1);
    EXPECT_EQ(c.base_prompt, spec.prompt);
    EXPECT_EQ(c.negative_terms, std::vector<std::string>{std::string(negative_template(FailureMode::typographic_hallucination))});
    EXPECT_EQ(c.targeted_modes, std::set<FailureMode>{FailureMode::typographic_hallucination});
    EXPECT_NE(c.render().find("garbled"), std::string::npos);
}

TEST(Corrective, RepeatedViolationDeduplicatedAndIterationAdvances) {
    auto spec = testing::sample_scene();
    std::vector<ViolationReport> v{report(FailureMode::typographic_hallucination, 24)};
    auto first = synthesize_corrective(v, spec, {});
    auto second = synthesize_corrective(v, spec, {first});
    EXPECT_EQ(second.iteration, 2);
    EXPECT_EQ(second.negative_terms, first.negative_terms);
}

TEST(Corrective, AccumulatesAcrossModes) {
    auto spec = testing::sample_scene();
    auto first = synthesize_corrective({report(FailureMode::composition_error, 1)}, spec, {});
    auto second = synthesize_corrective(
        {report(FailureMode::temporal_morphing, 3), report(FailureMode::brand_color_violation, 7)}, spec, {first});
    EXPECT_EQ(second.targeted_modes,
              (std::set<FailureMode>{FailureMode::temporal_morphing, FailureMode::brand_color_violation}));
    ASSERT_EQ(second.negative_terms.size(), 3u);
    EXPECT_EQ(second.negative_terms[0], negative_template(FailureMode::composition_error));
}

TEST(Corrective, EmptyViolationsRejected) {
    EXPECT_THROW(synthesize_corrective({}, testing::sample_scene(), {}), Error);
}

// Scene loop.

TEST(QcGenerateScene, CleanCommitsWithoutRetry) {
    Harness h(testing::clean_params());
    auto out = h.run(testing::sample_scene(), {}, 1);
    EXPECT_TRUE(out.committed);
    EXPECT_EQ(out.retries, 0);
    EXPECT_EQ(out.attempts, 1);
    EXPECT_TRUE(out.correctives.empty());
    auto events = h.bus.events("r");
    ASSERT_EQ(events.size(), 4u);
    EXPECT_EQ(events[0].kind, EventKind::generation);
    EXPECT_EQ(events[1].agent_role, AgentRole::director_agent);
    EXPECT_EQ(events[2].agent_role, AgentRole::brand_safety_agent);
    EXPECT_EQ(events[3].kind, EventKind::consensus);
    EXPECT_EQ(events[3].payload["decision"], "commit");
}

TEST(QcGenerateScene, CertainRecoveryCommitsAfterExactlyOneRetry) {
    auto p = sim::default_sim_params();
    p.recovery_probs = {1.0, 1.0, 1.0, 1.0};
    int failed_first = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Harness h(p);
        auto out = h.run(testing::sample_scene(), {}, seed);
        EXPECT_TRUE(out.committed);
        EXPECT_LE(out.retries, 1);
        if (!out.violation_history.empty()) {
            ++failed_first;
            EXPECT_EQ(out.retries, 1);
        }
    }
    EXPECT_GT(failed_first, 100);
}

TEST(QcGenerateScene, NoRecoveryExhaustsBudget) {
    Harness h(testing::forced_params(FailureMode::temporal_morphing, 0.0));
    auto out = h.run(testing::sample_scene(), QcPolicy{3}, 1);
    EXPECT_FALSE(out.committed);
    EXPECT_EQ(out.correctives.size(), 3u);
    EXPECT_EQ(out.violation_history.size(), 4u);
    EXPECT_EQ(out.retries, 3);
    for (std::size_t i = 0; i < out.correctives.size(); ++i) {
        EXPECT_EQ(out.correctives[i].iteration, static_cast<int>(i) + 1);
    }
    int correctives = 0;
    int violation_states = 0;
    for (const auto& e : h.bus.events("r")) {
        correctives += e.kind == EventKind::corrective;
        violation_states += e.kind == EventKind::violation_state;
    }
    EXPECT_EQ(correctives, 3);
    EXPECT_EQ(violation_states, 4);
}

TEST(QcGenerateScene, ZeroBudgetIsZeroShot) {
    Harness h(testing::forced_params(FailureMode::composition_error, 1.0));
    auto out = h.run(testing::sample_scene(), QcPolicy{0}, 1);
    EXPECT_FALSE(out.committed);
    EXPECT_EQ(out.attempts, 1);
    EXPECT_TRUE(out.correctives.empty());
}

TEST(QcGenerateScene, RegenerationsReuseInitFrame) {
    Harness h(testing::forced_params(FailureMode::brand_color_violation, 0.0));
    auto out = h.run(testing::sample_scene(), {}, 4);
    for (const auto& e : h.bus.events("r")) {
        if (e.kind == EventKind::generation) {
            EXPECT_EQ(e.payload["init_frame"], h.init.digest.hex());
        }
    }
    EXPECT_EQ(out.artifact.frames[0].digest, h.init.digest);
}

TEST(QcGenerateScene, GeneratorFaultYieldsFailedScene) {
    Harness h(testing::clean_params());
    h.backends.generator = std::make_shared<ThrowingGenerator>();
    auto out = h.run(testing::sample_scene(), {}, 1);
    EXPECT_FALSE(out.committed);
    ASSERT_TRUE(out.fault.has_value());
    ASSERT_EQ(out.violation_history.size(), 1u);
    EXPECT_TRUE(out.violation_history[0][0].synthetic);
    auto events = h.bus.events("r");
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].kind, EventKind::fault);
}

TEST(QcGenerateScene, EvaluatorFaultConsumesBudgetAndEmitsVerdict) {
    Harness h(testing::clean_params());
    h.backends.brand_safety_agent = std::make_shared<ThrowingEvaluator>(EvaluatorRole::brand_safety_agent);
    auto out = h.run(testing::sample_scene(), QcPolicy{2}, 1);
    EXPECT_FALSE(out.committed);
    EXPECT_EQ(out.attempts, 3);
    int faulted = 0;
    for (const auto& e : h.bus.events("r")) {
        if (e.kind == EventKind::verdict && e.payload.contains("fault")) ++faulted;
    }
    EXPECT_EQ(faulted, 3);
}

TEST(QcGenerateScene, NegativeBudgetRejected) {
    Harness h(testing::clean_params());
    EXPECT_THROW(h.run(testing::sample_scene(), QcPolicy{-1}, 1), Error);
}

TEST(QcGenerateScene, CancelFlagAborts) {
    Harness h(testing::clean_params());
    auto flag = std::make_shared<std::atomic<bool>>(true);
    h.ctx.set_cancel_flag(flag);
    try {
        h.run(testing::sample_scene(), {}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Aborted);
    }
}

TEST(QcGenerateScene, FuzzedRetriesNeverExceedBudget) {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        Stream rng(seed);
        auto p = sim::default_sim_params();
        for (auto m : kAllFailureModes) p.recovery_probs[index_of(m)] = rng.child("q", index_of(m)).uniform();
        p.fault_rate = rng.child("fault").bernoulli(0.1) ? 0.05 : 0.0;
        const int budget = static_cast<int>(rng.child("budget").below(6));
        Harness h(p);
        auto out = h.run(testing::sample_scene(), QcPolicy{budget}, seed);
        ASSERT_LE(out.retries, budget) << seed;
        ASSERT_EQ(out.attempts, out.retries + 1);
        ASSERT_LE(out.correctives.size(), static_cast<std::size_t>(budget));
        for (std::size_t i = 0; i < out.correctives.size(); ++i) {
            ASSERT_EQ(out.correctives[i].iteration, static_cast<int>(i) + 1);
        }
    }
}

TEST(QcGenerateScene, JoinOrderDoesNotAffectOutcome) {
    auto p = sim::default_sim_params();
    auto jittered = p;
    jittered.evaluator_jitter = std::chrono::microseconds(2000);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Harness a(p);
        Harness b(jittered);
        auto oa = a.run(testing::sample_scene(), {}, seed);
        auto ob = b.run(testing::sample_scene(), {}, seed);
        EXPECT_EQ(oa, ob);
        auto ea = a.bus.events("r");
        auto eb = b.bus.events("r");
        ASSERT_EQ(ea.size(), eb.size());
        for (std::size_t i = 0; i < ea.size(); ++i) EXPECT_EQ(ea[i], eb[i]);
    }
}

TEST(SceneOutcomeJson, RoundTrip) {
    Harness h(testing::forced_params(FailureMode::typographic_hallucination, 0.0));
    auto out = h.run(testing::sample_scene(), {}, 2);
    auto j = to_json(out);
    EXPECT_EQ(j["status"], "failed");
    EXPECT_EQ(scene_outcome_from_json(j), out);
}

}  // namespace
}  // namespace genflow
