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
#include "genflow/telemetry.hpp"

#include <algorithm>
#include <array>

#include <fmt/format.h>

#include "genflow/errors.hpp"

namespace genflow {

namespace {

constexpr std::array<std::string_view, 7> kRoleNames = {
    "system", "director_llm", "enhancer", "generator", "director_agent", "brand_safety_agent", "orchestrator"};
constexpr std::array<std::string_view, 9> kKindNames = {
    "phase_start", "phase_end", "generation", "verdict", "consensus", "corrective", "violation_state", "repair", "fault"};

}  // namespace

std::string_view to_string(AgentRole role) { return kRoleNames[static_cast<std::size_t>(role)]; }
std::string_view to_string(EventKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

AgentRole agent_role_from_string(std::string_view text) {
    for (std::size_t i = 0; i < kRoleNames.size(); ++i) {
        if (kRoleNames[i] == text) return static_cast<AgentRole>(i);
    }
    throw Error(ErrorCode::InvalidEvent, fmt::format("unknown agent_role '{}'", text));
}

EventKind event_kind_from_string(std::string_view text) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == text) return static_cast<EventKind>(i);
    }
    throw Error(ErrorCode::InvalidEvent, fmt::format("unknown event kind '{}'", text));
}

bool role_may_emit(AgentRole role, EventKind kind) noexcept {
    if (kind == EventKind::fault) return true;
    switch (role) {
    case AgentRole::system:
        return kind == EventKind::phase_start || kind == EventKind::phase_end || kind == EventKind::consensus ||
               kind == EventKind::violation_state;
    case AgentRole::director_llm:
        return kind == EventKind::generation || kind == EventKind::repair;
    case AgentRole::enhancer:
    case AgentRole::generator:
        return kind == EventKind::generation;
    case AgentRole::director_agent:
    case AgentRole::brand_safety_agent:
        return kind == EventKind::verdict;
    case AgentRole::orchestrator:
        return kind == EventKind::corrective;
    }
    return false;
}

Json to_json(const Event& e) {
    return Json{{"seq", e.seq},
                {"ts", e.ts},
                {"run_id", e.run_id},
                {"scene_index", e.scene_index ? Json(*e.scene_index) : Json(nullptr)},
                {"attempt", e.attempt ? Json(*e.attempt) : Json(nullptr)},
                {"agent_role", to_string(e.agent_role)},
                {"kind", to_string(e.kind)},
                {"payload", e.payload}};
}

Event event_from_json(const Json& j) {
    Event e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.ts = j.at("ts").get<double>();
    e.run_id = j.at("run_id").get<std::string>();
    if (!j.at("scene_index").is_null()) e.scene_index = j["scene_index"].get<int>();
    if (!j.at("attempt").is_null()) e.attempt = j["attempt"].get<int>();
    e.agent_role = agent_role_from_string(j.at("agent_role").get<std::string>());
    e.kind = event_kind_from_string(j.at("kind").get<std::string>());
    e.payload = j.at("payload");
    return e;
}

double LogicalClock::now() const {
    std::lock_guard lock(mu_);
    return now_;
}

void LogicalClock::advance(double seconds) {
    std::lock_guard lock(mu_);
    now_ += seconds;
}

double WallClock::now() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

namespace detail {

struct Cursor {
    std::uint64_t next_seq = 0;
    std::uint64_t live_from = 0;  // log size at subscription time
    bool disconnected = false;
};

struct RunLog {
    std::string run_id;
    std::shared_ptr<const Clock> clock;
    std::size_t capacity = 0;
    mutable std::mutex mu;
    std::condition_variable cv;
    std::vector<Event> events;
    bool closed = false;
    std::vector<std::weak_ptr<Cursor>> cursors;
};

}  // namespace detail

Subscription::Subscription(std::shared_ptr<detail::RunLog> log, std::shared_ptr<detail::Cursor> cursor)
    : log_(std::move(log)), cursor_(std::move(cursor)) {}

Subscription::~Subscription() = default;

Subscription::Next Subscription::next(std::chrono::milliseconds timeout) {
    std::unique_lock lock(log_->mu);
    auto ready = [&] {
        return cursor_->disconnected || cursor_->next_seq < log_->events.size() || log_->closed;
    };
    if (!log_->cv.wait_for(lock, timeout, ready)) return {Status::timeout, std::nullopt};
    if (cursor_->disconnected) return {Status::disconnected, std::nullopt};
    if (cursor_->next_seq < log_->events.size()) {
        return {Status::event, log_->events[cursor_->next_seq++]};
    }
    return {Status::end_of_stream, std::nullopt};
}

EventBus::EventBus(std::size_t subscriber_capacity) : capacity_(std::max<std::size_t>(1, subscriber_capacity)) {}

EventBus::~EventBus() = default;

std::shared_ptr<detail::RunLog> EventBus::find(const std::string& run_id) const {
    std::lock_guard lock(mu_);
    auto it = runs_.find(run_id);
    if (it == runs_.end()) throw Error(ErrorCode::UnknownRun, fmt::format("unknown run '{}'", run_id));
    return it->second;
}

void EventBus::open_run(const std::string& run_id, std::shared_ptr<const Clock> clock) {
    auto log = std::make_shared<detail::RunLog>();
    log->run_id = run_id;
    log->clock = clock ? std::move(clock) : std::make_shared<WallClock>();
    log->capacity = capacity_;
    std::lock_guard lock(mu_);
    if (!runs_.emplace(run_id, std::move(log)).second) {
        throw Error(ErrorCode::InvalidEvent, fmt::format("run '{}' already exists", run_id));
    }
}

Event EventBus::emit(const std::string& run_id, EventDraft draft) {
    if (!role_may_emit(draft.agent_role, draft.kind)) {
        throw Error(ErrorCode::InvalidEvent, fmt::format("role {} may not emit {}", to_string(draft.agent_role),
                                                         to_string(draft.kind)));
    }
    auto log = find(run_id);
    Event e;
    {
        std::lock_guard lock(log->mu);
        if (log->closed) throw Error(ErrorCode::InvalidEvent, fmt::format("run '{}' is closed", run_id));
        e.seq = log->events.size();
        e.ts = log->clock->now();
        e.run_id = run_id;
        e.scene_index = draft.scene_index;
        e.attempt = draft.attempt;
        e.agent_role = draft.agent_role;
        e.kind = draft.kind;
        e.payload = std::move(draft.payload);
        log->events.push_back(e);

        // Back-pressure: cut off readers lagging too far behind live output.
        auto size = log->events.size();
        std::erase_if(log->cursors, [&](const std::weak_ptr<detail::Cursor>& weak) {
            auto c = weak.lock();
            if (!c) return true;
            auto consumed = std::max(c->next_seq, c->live_from);
            if (!c->disconnected && size - consumed > log->capacity) c->disconnected = true;
            return false;
        });
    }
    log->cv.notify_all();
    return e;
}

void EventBus::close_run(const std::string& run_id) {
    auto log = find(run_id);
    {
        std::lock_guard lock(log->mu);
        log->closed = true;
    }
    log->cv.notify_all();
}

std::unique_ptr<Subscription> EventBus::subscribe(const std::string& run_id, std::uint64_t from_seq) {
    auto log = find(run_id);
    auto cursor = std::make_shared<detail::Cursor>();
    {
        std::lock_guard lock(log->mu);
        cursor->next_seq = from_seq;
        cursor->live_from = log->events.size();
        log->cursors.push_back(cursor);
    }
    return std::unique_ptr<Subscription>(new Subscription(std::move(log), std::move(cursor)));
}

std::vector<Event> EventBus::events(const std::string& run_id) const {
    auto log = find(run_id);
    std::lock_guard lock(log->mu);
    return log->events;
}

bool EventBus::has_run(const std::string& run_id) const {
    std::lock_guard lock(mu_);
    return runs_.contains(run_id);
}

bool EventBus::is_closed(const std::string& run_id) const {
    auto log = find(run_id);
    std::lock_guard lock(log->mu);
    return log->closed;
}

void EventBus::restore_run(const std::string& run_id, std::vector<Event> events) {
    auto log = std::make_shared<detail::RunLog>();
    log->run_id = run_id;
    log->clock = std::make_shared<WallClock>();
    log->capacity = capacity_;
    log->events = std::move(events);
    log->closed = true;
    std::lock_guard lock(mu_);
    runs_[run_id] = std::move(log);
}

std::string to_ndjson(const std::vector<Event>& events) {
    std::string out;
    for (const auto& e : events) {
        out += to_json(e).dump();
        out += '\n';
    }
    return out;
}

}  // namespace genflow
