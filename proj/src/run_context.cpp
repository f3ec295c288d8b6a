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
#include "genflow/run_context.hpp"

#include "genflow/errors.hpp"

namespace genflow {

RunContext::RunContext(std::string run_id, CostModel cost_model, EventBus* bus, std::shared_ptr<Clock> clock)
    : run_id_(std::move(run_id)), cost_model_(cost_model), bus_(bus), clock_(std::move(clock)) {
    if (!clock_) clock_ = std::make_shared<LogicalClock>();
    logical_ = dynamic_cast<LogicalClock*>(clock_.get());
}

Json RunContext::charge(CallKind kind, bool advance_clock) {
    const auto& c = cost_model_.cost(kind);
    CostTotals t{c.tokens_in, c.tokens_out, c.latency_s, cost_model_.usd(c)};
    totals_ += t;
    if (advance_clock) advance(c.latency_s);
    return to_json(t);
}

void RunContext::advance(double seconds) {
    if (logical_) logical_->advance(seconds);
}

void RunContext::check_cancelled() const {
    if (cancelled()) throw Error(ErrorCode::Aborted, "run aborted");
}

void RunContext::emit(AgentRole role, EventKind kind, Json payload, Where where) {
    if (!bus_) return;
    bus_->emit(run_id_, EventDraft{where.scene, where.attempt, role, kind, std::move(payload)});
}

void RunContext::emit_call(CallKind call, AgentRole role, EventKind kind, Json payload, Where where) {
    payload["cost"] = charge(call);
    emit(role, kind, std::move(payload), where);
}

}  // namespace genflow
