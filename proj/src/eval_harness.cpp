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
#include "genflow/eval_harness.hpp"

#include <atomic>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "genflow/errors.hpp"
#include "genflow/qc_loop.hpp"
#include "genflow/run_context.hpp"
#include "genflow/script.hpp"

namespace genflow::eval {

namespace {

constexpr std::array<std::string_view, 4> kRowLabels = {
    "Temporal Morphing & Artifacts",
    "Typographic Hallucinations",
    "Brand Color & Asset Violations",
    "Cinematic Composition Errors",
};

struct RunResult {
    bool zero_shot_pass = false;
    bool pipeline_pass = false;
    std::optional<FailureMode> initial_mode;
    bool parse_ok = false;
    CostTotals zero_shot_cost;
    CostTotals pipeline_cost;
};

const BrandDNA& experiment_dna() {
    static const BrandDNA dna{{"#0A2540", "#F6F9FC", "#635BFF"},
                              {"Inter"},
                              {"confident", "precise"},
                              {"stock-photo handshakes"},
                              "fixture:experiment"};
    return dna;
}

const SceneSpec& experiment_scene() {
    static const SceneSpec spec{0, "Hero shot of the product on a seamless backdrop", CameraAngle::three_quarter,
                                50.0, Lighting::studio, {0.2, 0.0}, 2.0};
    return spec;
}

CostTotals single_call(const CostModel& m, CallKind kind) {
    const auto& c = m.cost(kind);
    return CostTotals{c.tokens_in, c.tokens_out, c.latency_s, m.usd(c)};
}

RunResult one_run(const sim::SimParams& params, const BackendSet& backends, const QcPolicy& policy,
                  int parse_budget, Stream run) {
    RunResult r;
    const auto& dna = experiment_dna();
    const auto& spec = experiment_scene();
    const FrameRef init{digest_bytes("experiment-asset"), -1, 0};
    const auto scene_stream = run.child("scene", 0);

    try {
        auto first = sim::sim_generate(GenerationRequest{spec, init, dna, nullptr, 0, 0}, params,
                                       scene_stream.child("attempt", 0).child("generator"));
        r.zero_shot_pass = first.injected_violations.empty();
    } catch (const Error&) {
        r.zero_shot_pass = false;  // a generator fault is a failed render
    }
    r.zero_shot_cost = single_call(params.cost_model, CallKind::generator);

    RunContext ctx("experiment", params.cost_model);
    auto outcome = qc_generate_scene(spec, 0, init, dna, policy, backends, scene_stream, ctx);
    r.pipeline_pass = outcome.committed;
    r.pipeline_cost = ctx.totals();
    if (!outcome.violation_history.empty()) {
        const auto& first_round = outcome.violation_history.front();
        if (!first_round.empty() && !first_round.front().synthetic) r.initial_mode = first_round.front().mode;
    }

    try {
        author_script(dna, "experiment", 1, *backends.director, parse_budget, run.child("director"), nullptr);
        r.parse_ok = true;
    } catch (const std::exception&) {
        r.parse_ok = false;
    }
    return r;
}

CostTotals mean(const CostTotals& sum, std::int64_t n) {
    const double d = static_cast<double>(n);
    return CostTotals{static_cast<std::int64_t>(static_cast<double>(sum.tokens_in) / d + 0.5),
                      static_cast<std::int64_t>(static_cast<double>(sum.tokens_out) / d + 0.5), sum.latency_s / d,
                      sum.usd / d};
}

double rate(std::int64_t num, std::int64_t den) { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }

}  // namespace

std::optional<double> ModeStats::recovery_yield() const {
    if (initial_failures == 0) return std::nullopt;
    return rate(recovered, initial_failures);
}

YieldReport run_experiment(const sim::SimParams& params, std::int64_t n_runs, std::uint64_t seed,
                           const ExperimentOptions& options) {
    if (n_runs < 1) throw Error(ErrorCode::InvalidRequest, "n_runs must be >= 1");
    if (options.retry_budget < 0 || options.parse_repair_budget < 0) {
        throw Error(ErrorCode::InvalidRequest, "budgets must be >= 0");
    }
    sim::check_params(params);
    const auto backends = sim::make_sim_backends(params, "");
    const QcPolicy policy{options.retry_budget, ConsensusRule::strict_and};
    const Stream root(seed);

    std::vector<RunResult> results(static_cast<std::size_t>(n_runs));
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (std::int64_t i = next++; i < n_runs; i = next++) {
            results[static_cast<std::size_t>(i)] = one_run(params, backends, policy, options.parse_repair_budget,
                                                           root.child("run", static_cast<std::uint64_t>(i)));
        }
    };
    const unsigned workers = std::max(1u, options.workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    YieldReport rep;
    rep.n_runs = n_runs;
    rep.seed = seed;
    rep.tier = std::string(sim::to_string(params.tier));
    rep.retry_budget = options.retry_budget;
    rep.parse_repair_budget = options.parse_repair_budget;
    CostTotals zs_sum;
    CostTotals pipe_sum;
    for (const auto& r : results) {
        rep.zero_shot_passes += r.zero_shot_pass ? 1 : 0;
        rep.pipeline_passes += r.pipeline_pass ? 1 : 0;
        if (r.initial_mode) {
            auto& m = rep.per_mode[index_of(*r.initial_mode)];
            ++m.initial_failures;
            if (r.pipeline_pass) ++m.recovered;
        }
        rep.parse_successes += r.parse_ok ? 1 : 0;
        zs_sum += r.zero_shot_cost;
        pipe_sum += r.pipeline_cost;
    }
    rep.parse_trials = n_runs;
    rep.zero_shot_yield = rate(rep.zero_shot_passes, n_runs);
    rep.pipeline_yield = rate(rep.pipeline_passes, n_runs);
    rep.parsing_success = rate(rep.parse_successes, rep.parse_trials);
    rep.zero_shot_cost = mean(zs_sum, n_runs);
    rep.pipeline_cost = mean(pipe_sum, n_runs);
    rep.expected_pipeline_yield = sim::expected_pipeline_yield(params, options.retry_budget);
    double all_bad = 1.0;
    for (int i = 0; i <= options.parse_repair_budget; ++i) all_bad *= params.malformed_rate;
    rep.expected_parsing_success = 1.0 - all_bad;
    return rep;
}

YieldReport run_tier_split(std::int64_t n_runs, std::uint64_t seed, const ExperimentOptions& options) {
    auto simple = run_experiment(sim::default_sim_params(sim::Tier::simple), n_runs, seed, options);
    auto complex = run_experiment(sim::default_sim_params(sim::Tier::complex), n_runs, seed, options);

    YieldReport rep;
    rep.n_runs = simple.n_runs + complex.n_runs;
    rep.seed = seed;
    rep.tier = "split";
    rep.retry_budget = options.retry_budget;
    rep.parse_repair_budget = options.parse_repair_budget;
    rep.zero_shot_passes = simple.zero_shot_passes + complex.zero_shot_passes;
    rep.pipeline_passes = simple.pipeline_passes + complex.pipeline_passes;
    rep.zero_shot_yield = rate(rep.zero_shot_passes, rep.n_runs);
    rep.pipeline_yield = rate(rep.pipeline_passes, rep.n_runs);
    for (std::size_t i = 0; i < rep.per_mode.size(); ++i) {
        rep.per_mode[i].initial_failures = simple.per_mode[i].initial_failures + complex.per_mode[i].initial_failures;
        rep.per_mode[i].recovered = simple.per_mode[i].recovered + complex.per_mode[i].recovered;
    }
    rep.parse_trials = simple.parse_trials + complex.parse_trials;
    rep.parse_successes = simple.parse_successes + complex.parse_successes;
    rep.parsing_success = rate(rep.parse_successes, rep.parse_trials);
    auto half = [](const CostTotals& a, const CostTotals& b) {
        CostTotals s = a;
        s += b;
        return mean(s, 2);
    };
    rep.zero_shot_cost = half(simple.zero_shot_cost, complex.zero_shot_cost);
    rep.pipeline_cost = half(simple.pipeline_cost, complex.pipeline_cost);
    rep.expected_pipeline_yield = (simple.expected_pipeline_yield + complex.expected_pipeline_yield) / 2.0;
    rep.expected_parsing_success = simple.expected_parsing_success;
    rep.per_tier["simple"] = {simple.n_runs, simple.zero_shot_yield, simple.pipeline_yield};
    rep.per_tier["complex"] = {complex.n_runs, complex.zero_shot_yield, complex.pipeline_yield};
    return rep;
}

double non_convergence_rate(const YieldReport& report) { return 1.0 - report.pipeline_yield; }

std::string format_rate(std::optional<double> r) {
    if (!r) return "n/a";
    return fmt::format("{:.1f}%", *r * 100.0);
}

std::string failure_mode_table(const YieldReport& rep) {
    std::string out = fmt::format("{:<32} {:>18} {:>18} {:>15}\n", "Failure Mode Category", "Zero-Shot Failures",
                                  "Genflow Recovered", "Recovery Yield");
    for (auto m : kAllFailureModes) {
        const auto& s = rep.per_mode[index_of(m)];
        out += fmt::format("{:<32} {:>18} {:>18} {:>15}\n", kRowLabels[index_of(m)],
                           fmt::format("{} / {}", s.initial_failures, rep.n_runs),
                           fmt::format("{} / {}", s.recovered, s.initial_failures), format_rate(s.recovery_yield()));
    }
    return out;
}

std::string render_report_text(const YieldReport& rep) {
    std::string out;
    out += fmt::format("runs: {}  seed: {}  tier: {}  retry budget: {}\n", rep.n_runs, rep.seed, rep.tier,
                       rep.retry_budget);
    out += fmt::format("zero-shot yield: {} ({}/{})\n", format_rate(rep.zero_shot_yield), rep.zero_shot_passes,
                       rep.n_runs);
    out += fmt::format("pipeline yield:  {} ({}/{})  analytic {}\n", format_rate(rep.pipeline_yield),
                       rep.pipeline_passes, rep.n_runs, format_rate(rep.expected_pipeline_yield));
    out += fmt::format("non-convergence: {}\n", format_rate(non_convergence_rate(rep)));
    out += fmt::format("parsing success: {} ({}/{}, repair budget {})\n", format_rate(rep.parsing_success),
                       rep.parse_successes, rep.parse_trials, rep.parse_repair_budget);
    out += "\n" + failure_mode_table(rep);
    if (!rep.per_tier.empty()) {
        out += fmt::format("\n{:<10} {:>8} {:>12} {:>12}\n", "Tier", "Runs", "Zero-Shot", "Genflow");
        for (const auto& name : {"simple", "complex"}) {
            auto it = rep.per_tier.find(name);
            if (it == rep.per_tier.end()) continue;
            out += fmt::format("{:<10} {:>8} {:>12} {:>12}\n", name, it->second.n_runs,
                               format_rate(it->second.zero_shot), format_rate(it->second.pipeline));
        }
    }
    out += fmt::format("\nmean cost per run (zero-shot / pipeline): {:.4f} / {:.4f} USD, {:.1f} / {:.1f} s\n",
                       rep.zero_shot_cost.usd, rep.pipeline_cost.usd, rep.zero_shot_cost.latency_s,
                       rep.pipeline_cost.latency_s);
    return out;
}

Json to_json(const YieldReport& rep) {
    Json per_mode = Json::object();
    for (auto m : kAllFailureModes) {
        const auto& s = rep.per_mode[index_of(m)];
        auto y = s.recovery_yield();
        per_mode[std::string(to_string(m))] = Json{{"initial_failures", s.initial_failures},
                                                   {"initial_failure_rate", rate(s.initial_failures, rep.n_runs)},
                                                   {"recovered", s.recovered},
                                                   {"recovery_yield", y ? Json(*y) : Json(nullptr)}};
    }
    Json per_tier = nullptr;
    if (!rep.per_tier.empty()) {
        per_tier = Json::object();
        for (const auto& [name, t] : rep.per_tier) {
            per_tier[name] = Json{{"n_runs", t.n_runs}, {"zero_shot", t.zero_shot}, {"pipeline", t.pipeline}};
        }
    }
    return Json{{"n_runs", rep.n_runs},
                {"seed", rep.seed},
                {"tier", rep.tier},
                {"retry_budget", rep.retry_budget},
                {"zero_shot", Json{{"passes", rep.zero_shot_passes}, {"yield", rep.zero_shot_yield}}},
                {"pipeline", Json{{"passes", rep.pipeline_passes}, {"yield", rep.pipeline_yield}}},
                {"non_convergence_rate", non_convergence_rate(rep)},
                {"per_mode", std::move(per_mode)},
                {"per_tier", std::move(per_tier)},
                {"parsing",
                 Json{{"repair_budget", rep.parse_repair_budget},
                      {"trials", rep.parse_trials},
                      {"successes", rep.parse_successes},
                      {"success_rate", rep.parsing_success},
                      {"expected", rep.expected_parsing_success}}},
                {"analytic", Json{{"expected_pipeline_yield", rep.expected_pipeline_yield}}},
                {"cost_summary",
                 Json{{"zero_shot", genflow::to_json(rep.zero_shot_cost)},
                      {"pipeline", genflow::to_json(rep.pipeline_cost)}}}};
}

}  // namespace genflow::eval
