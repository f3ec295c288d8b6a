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
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "genflow/cost.hpp"
#include "genflow/sim_backend.hpp"

namespace genflow::eval {

struct ModeStats {
    std::int64_t initial_failures = 0;
    std::int64_t recovered = 0;

    /// Empty when there were no initial failures.
    [[nodiscard]] std::optional<double> recovery_yield() const;
    bool operator==(const ModeStats&) const = default;
};

struct ArmYields {
    std::int64_t n_runs = 0;
    double zero_shot = 0.0;
    double pipeline = 0.0;
    bool operator==(const ArmYields&) const = default;
};

struct YieldReport {
    std::int64_t n_runs = 0;
    std::uint64_t seed = 0;
    std::string tier = "aggregate";
    int retry_budget = 3;

    std::int64_t zero_shot_passes = 0;
    std::int64_t pipeline_passes = 0;
    double zero_shot_yield = 0.0;
    double pipeline_yield = 0.0;
    std::array<ModeStats, kAllFailureModes.size()> per_mode{};
    std::map<std::string, ArmYields> per_tier;

    int parse_repair_budget = 1;
    std::int64_t parse_trials = 0;
    std::int64_t parse_successes = 0;
    double parsing_success = 0.0;

    CostTotals zero_shot_cost;  // mean per run
    CostTotals pipeline_cost;   // mean per run

    double expected_pipeline_yield = 0.0;
    double expected_parsing_success = 0.0;

    bool operator==(const YieldReport&) const = default;
};

struct ExperimentOptions {
    int retry_budget = 3;
    int parse_repair_budget = 1;
    unsigned workers = 1;
};

/// Paired arms over n_runs single-scene runs. Run r draws from
/// Stream(seed).child("run", r); the zero-shot draw is the genflow arm's
/// attempt 0. Result is independent of the worker count.
YieldReport run_experiment(const sim::SimParams& params, std::int64_t n_runs, std::uint64_t seed,
                           const ExperimentOptions& options = {});

/// Runs the simple and complex tiers with n_runs each and pools them; the
/// per-tier yields land in per_tier.
YieldReport run_tier_split(std::int64_t n_runs, std::uint64_t seed, const ExperimentOptions& options = {});

double non_convergence_rate(const YieldReport& report);

/// "73.1%" style, or "n/a" for an empty denominator.
std::string format_rate(std::optional<double> rate);

std::string failure_mode_table(const YieldReport& report);
std::string render_report_text(const YieldReport& report);
Json to_json(const YieldReport& report);

}  // namespace genflow::eval
