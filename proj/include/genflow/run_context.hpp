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

#include <atomic>
#include <memory>
#include <optional>
#include <string>

#include "genflow/common.hpp"
#include "genflow/cost.hpp"
#include "genflow/telemetry.hpp"

namespace genflow {

struct Where {
    std::optional<int> scene;
    std::optional<int> attempt;
};

/// Per-run accounting and emission. Owned by the run's single executor.
/// Without a bus, events are dropped but costs are still accumulated.
class RunContext {
public:
    RunContext(std::string run_id, CostModel cost_model, EventBus* bus = nullptr,
               std::shared_ptr<Clock> clock = nullptr);

    [[nodiscard]] const std::string& run_id() const noexcept { return run_id_; }
    [[nodiscard]] const CostTotals& totals() const noexcept { return totals_; }
    [[nodiscard]] const CostModel& cost_model() const noexcept { return cost_model_; }
    [[nodiscard]] std::shared_ptr<const Clock> clock() const noexcept { return clock_; }
    [[nodiscard]] EventBus* bus() const noexcept { return bus_; }

    /// Adds one call's cost to the totals and returns it as a payload
    /// fragment. The logical clock (if any) advances by the call latency
    /// unless `advance_clock` is false.
    Json charge(CallKind kind, bool advance_clock = true);
    void advance(double seconds);

    void set_cancel_flag(std::shared_ptr<const std::atomic<bool>> flag) { cancel_ = std::move(flag); }
    [[nodiscard]] bool cancelled() const noexcept { return cancel_ && cancel_->load(); }
    /// Throws Aborted once the cancel flag is raised.
    void check_cancelled() const;

    void emit(AgentRole role, EventKind kind, Json payload, Where where = {});
    /// charge() + emit() with payload["cost"] set.
    void emit_call(CallKind kind, AgentRole role, EventKind kind_of_event, Json payload, Where where = {});

private:
    std::string run_id_;
    CostModel cost_model_;
    EventBus* bus_;
    std::shared_ptr<Clock> clock_;
    LogicalClock* logical_ = nullptr;
    CostTotals totals_;
    std::shared_ptr<const std::atomic<bool>> cancel_;
};

}  // namespace genflow
