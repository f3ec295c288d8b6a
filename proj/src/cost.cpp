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
#include "genflow/cost.hpp"

#include <fmt/format.h>

#include "genflow/errors.hpp"

namespace genflow {

std::string_view to_string(CallKind kind) {
    switch (kind) {
    case CallKind::extractor: return "extractor";
    case CallKind::director: return "director";
    case CallKind::enhancer: return "enhancer";
    case CallKind::generator: return "generator";
    case CallKind::director_agent: return "director_agent";
    case CallKind::brand_safety_agent: return "brand_safety_agent";
    case CallKind::orchestrator: return "orchestrator";
    }
    return "unknown";
}

CostModel CostModel::defaults() {
    CostModel m;
    auto set = [&](CallKind k, std::int64_t in, std::int64_t out, double latency) {
        m.per_call[static_cast<std::size_t>(k)] = {in, out, latency};
    };
    set(CallKind::extractor, 900, 250, 2.1);
    set(CallKind::director, 800, 380, 2.6);
    set(CallKind::enhancer, 250, 0, 3.4);
    set(CallKind::generator, 300, 20, 5.6);
    set(CallKind::director_agent, 1600, 420, 3.1);
    set(CallKind::brand_safety_agent, 1700, 450, 3.3);
    set(CallKind::orchestrator, 900, 300, 1.8);
    m.usd_per_1k_tokens = 0.0025;
    return m;
}

Json to_json(const CostTotals& t) {
    return Json{{"tokens_in", t.tokens_in}, {"tokens_out", t.tokens_out}, {"latency_s", t.latency_s}, {"usd", t.usd}};
}

CostTotals cost_totals_from_json(const Json& j) {
    CostTotals t;
    t.tokens_in = j.at("tokens_in").get<std::int64_t>();
    t.tokens_out = j.at("tokens_out").get<std::int64_t>();
    t.latency_s = j.at("latency_s").get<double>();
    t.usd = j.at("usd").get<double>();
    return t;
}

Json to_json(const CostModel& m) {
    Json calls = Json::object();
    for (auto k : kAllCallKinds) {
        const auto& c = m.cost(k);
        calls[std::string(to_string(k))] =
            Json{{"tokens_in", c.tokens_in}, {"tokens_out", c.tokens_out}, {"latency_s", c.latency_s}};
    }
    return Json{{"per_call", std::move(calls)}, {"usd_per_1k_tokens", m.usd_per_1k_tokens}};
}

CostModel cost_model_from_json(const Json& j) {
    auto m = CostModel::defaults();
    if (j.contains("usd_per_1k_tokens")) m.usd_per_1k_tokens = j["usd_per_1k_tokens"].get<double>();
    if (m.usd_per_1k_tokens < 0) throw Error(ErrorCode::Config, "cost_model.usd_per_1k_tokens must be >= 0");
    if (j.contains("per_call")) {
        for (auto k : kAllCallKinds) {
            auto name = std::string(to_string(k));
            if (!j["per_call"].contains(name)) continue;
            const auto& c = j["per_call"][name];
            auto& dst = m.per_call[static_cast<std::size_t>(k)];
            dst.tokens_in = c.value("tokens_in", dst.tokens_in);
            dst.tokens_out = c.value("tokens_out", dst.tokens_out);
            dst.latency_s = c.value("latency_s", dst.latency_s);
            if (dst.tokens_in < 0 || dst.tokens_out < 0 || dst.latency_s < 0) {
                throw Error(ErrorCode::Config, fmt::format("cost_model.per_call.{} has a negative value", name));
            }
        }
    }
    return m;
}

}  // namespace genflow
