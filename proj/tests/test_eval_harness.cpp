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

#include <cmath>

#include "genflow/errors.hpp"
#include "genflow/eval_harness.hpp"
#include "test_support.hpp"

namespace genflow {
namespace {

TEST(RunExperiment, IndependentOfWorkerCount) {
    auto p = sim::default_sim_params();
    auto one = eval::run_experiment(p, 2000, 5, {3, 1, 1});
    auto four = eval::run_experiment(p, 2000, 5, {3, 1, 4});
    EXPECT_EQ(one, four);
    EXPECT_EQ(eval::to_json(one).dump(), eval::to_json(four).dump());
}

TEST(RunExperiment, CleanParamsAlwaysPass) {
    auto r = eval::run_experiment(testing::clean_params(), 300, 1);
    EXPECT_EQ(r.zero_shot_passes, 300);
    EXPECT_EQ(r.pipeline_passes, 300);
    EXPECT_DOUBLE_EQ(r.parsing_success, 1.0);
    for (const auto& m : r.per_mode) EXPECT_EQ(m.initial_failures, 0);
    EXPECT_DOUBLE_EQ(eval::non_convergence_rate(r), 0.0);
}

TEST(RunExperiment, ForcedModeWithoutRecoveryNeverPasses) {
    auto r = eval::run_experiment(testing::forced_params(FailureMode::brand_color_violation, 0.0), 200, 1);
    EXPECT_EQ(r.zero_shot_passes, 0);
    EXPECT_EQ(r.pipeline_passes, 0);
    EXPECT_EQ(r.per_mode[index_of(FailureMode::brand_color_violation)].initial_failures, 200);
    EXPECT_EQ(r.per_mode[index_of(FailureMode::brand_color_violation)].recovery_yield(), 0.0);
    EXPECT_DOUBLE_EQ(eval::non_convergence_rate(r), 1.0);
}

TEST(RunExperiment, ForcedModeWithCertainRecoveryAlwaysRecovers) {
    auto r = eval::run_experiment(testing::forced_params(FailureMode::temporal_morphing, 1.0), 200, 1);
    EXPECT_EQ(r.zero_shot_passes, 0);
    EXPECT_EQ(r.pipeline_passes, 200);
    EXPECT_EQ(r.per_mode[0].recovery_yield(), 1.0);
    EXPECT_FALSE(r.per_mode[1].recovery_yield().has_value());
}

TEST(RunExperiment, ZeroBudgetPipelineEqualsZeroShot) {
    auto r = eval::run_experiment(sim::default_sim_params(), 1000, 2, {0, 1, 1});
    EXPECT_EQ(r.zero_shot_passes, r.pipeline_passes);
}

TEST(RunExperiment, PipelineNeverBelowZeroShotPerRun) {
    auto r = eval::run_experiment(sim::default_sim_params(), 1000, 3);
    EXPECT_GE(r.pipeline_passes, r.zero_shot_passes);
    std::int64_t failures = 0;
    std::int64_t recovered = 0;
    for (const auto& m : r.per_mode) {
        failures += m.initial_failures;
        recovered += m.recovered;
    }
    EXPECT_EQ(failures, r.n_runs - r.zero_shot_passes);
    EXPECT_EQ(recovered, r.pipeline_passes - r.zero_shot_passes);
}

TEST(RunExperiment, AnalyticFieldsAndCosts) {
    auto p = sim::default_sim_params();
    auto r = eval::run_experiment(p, 500, 4, {2, 2, 1});
    EXPECT_DOUBLE_EQ(r.expected_pipeline_yield, sim::expected_pipeline_yield(p, 2));
    EXPECT_NEAR(r.expected_parsing_success, 1.0 - std::pow(p.malformed_rate, 3), 1e-12);
    EXPECT_GT(r.pipeline_cost.usd, r.zero_shot_cost.usd);
    EXPECT_GT(r.zero_shot_cost.latency_s, 0.0);
}

TEST(RunExperiment, RejectsBadArguments) {
    EXPECT_THROW(eval::run_experiment(sim::default_sim_params(), 0, 1), Error);
    EXPECT_THROW(eval::run_experiment(sim::default_sim_params(), 10, 1, {-1, 1, 1}), Error);
    auto p = sim::default_sim_params();
    p.mode_probs = {0.9, 0.9, 0, 0};
    EXPECT_THROW(eval::run_experiment(p, 10, 1), Error);
}

TEST(RunExperiment, FaultsCountAsFailuresNotCrashes) {
    auto p = sim::default_sim_params();
    p.fault_rate = 0.2;
    auto r = eval::run_experiment(p, 500, 6);
    EXPECT_LT(r.parsing_success, 1.0);
    EXPECT_LE(r.pipeline_passes, r.n_runs);
}

TEST(TierSplit, PoolsBothTiers) {
    auto r = eval::run_tier_split(400, 1);
    EXPECT_EQ(r.tier, "split");
    EXPECT_EQ(r.n_runs, 800);
    ASSERT_EQ(r.per_tier.size(), 2u);
    EXPECT_EQ(r.per_tier.at("simple").n_runs, 400);
    EXPECT_GT(r.per_tier.at("simple").zero_shot, r.per_tier.at("complex").zero_shot);
    EXPECT_NEAR(r.zero_shot_yield, (r.per_tier.at("simple").zero_shot + r.per_tier.at("complex").zero_shot) / 2, 1e-12);
}

TEST(FormatRate, Values) {
    EXPECT_EQ(eval::format_rate(std::nullopt), "n/a");
    EXPECT_EQ(eval::format_rate(0.731), "73.1%");
    EXPECT_EQ(eval::format_rate(1.0), "100.0%");
    EXPECT_EQ(eval::format_rate(0.0), "0.0%");
}

TEST(Report, TableRowsAndJsonSchema) {
    auto r = eval::run_experiment(sim::default_sim_params(), 200, 1);
    auto table = eval::failure_mode_table(r);
    for (const char* label : {"Temporal Morphing & Artifacts", "Typographic Hallucinations",
                              "Brand Color & Asset Violations", "Cinematic Composition Errors"}) {
        EXPECT_NE(table.find(label), std::string::npos) << label;
    }
    auto text = eval::render_report_text(r);
    EXPECT_NE(text.find("zero-shot yield"), std::string::npos);

    auto j = eval::to_json(r);
    for (const char* key : {"n_runs", "seed", "tier", "retry_budget", "zero_shot", "pipeline", "non_convergence_rate",
                            "per_mode", "per_tier", "parsing", "analytic", "cost_summary"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j["per_mode"].size(), 4u);
    EXPECT_NEAR(j["non_convergence_rate"].get<double>(), 1.0 - r.pipeline_yield, 1e-12);
}

}  // namespace
}  // namespace genflow
