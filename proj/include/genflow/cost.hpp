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
#include <string_view>

#include "genflow/common.hpp"

namespace genflow {

enum class CallKind { extractor, director, enhancer, generator, director_agent, brand_safety_agent, orchestrator };

inline constexpr std::array<CallKind, 7> kAllCallKinds = {
    CallKind::extractor,      CallKind::director,           CallKind::enhancer,    CallKind::generator,
    CallKind::director_agent, CallKind::brand_safety_agent, CallKind::orchestrator};

std::string_view to_string(CallKind kind);

struct CallCost {
    std::int64_t tokens_in = 0;
    std::int64_t tokens_out = 0;
    double latency_s = 0.0;
};

/// Per-call accounting. Values are free parameters, not measurements.
struct CostModel {
    std::array<CallCost, kAllCallKinds.size()> per_call{};
    double usd_per_1k_tokens = 0.0;

    [[nodiscard]] const CallCost& cost(CallKind kind) const { return per_call[static_cast<std::size_t>(kind)]; }
    [[nodiscard]] double usd(const CallCost& c) const {
        return static_cast<double>(c.tokens_in + c.tokens_out) / 1000.0 * usd_per_1k_tokens;
    }

    static CostModel defaults();
};

struct CostTotals {
    std::int64_t tokens_in = 0;
    std::int64_t tokens_out = 0;
    double latency_s = 0.0;
    double usd = 0.0;

    CostTotals& operator+=(const CostTotals& o) {
        tokens_in += o.tokens_in;
        tokens_out += o.tokens_out;
        latency_s += o.latency_s;
        usd += o.usd;
        return *this;
    }
    bool operator==(const CostTotals&) const = default;
};

Json to_json(const CostTotals& t);
CostTotals cost_totals_from_json(const Json& j);
Json to_json(const CostModel& m);
/// Missing keys keep their defaults; negative values throw Config.
CostModel cost_model_from_json(const Json& j);

}  // namespace genflow
