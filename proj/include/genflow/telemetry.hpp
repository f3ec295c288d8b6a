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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genflow/common.hpp"

namespace genflow {

enum class AgentRole { system, director_llm, enhancer, generator, director_agent, brand_safety_agent, orchestrator };
enum class EventKind { phase_start, phase_end, generation, verdict, consensus, corrective, violation_state, repair, fault };

std::string_view to_string(AgentRole role);
std::string_view to_string(EventKind kind);
AgentRole agent_role_from_string(std::string_view text);
EventKind event_kind_from_string(std::string_view text);

/// Permitted (role, kind) pairs:
///
///   system              phase_start phase_end consensus violation_state fault
///   director_llm        generation repair fault
///   enhancer            generation fault
///   generator           generation fault
///   director_agent      verdict fault
///   brand_safety_agent  verdict fault
///   orchestrator        corrective fault
bool role_may_emit(AgentRole role, EventKind kind) noexcept;

struct Event {
    std::uint64_t seq = 0;
    double ts = 0.0;
    std::string run_id;
    std::optional<int> scene_index;
    std::optional<int> attempt;
    AgentRole agent_role = AgentRole::system;
    EventKind kind = EventKind::phase_start;
    Json payload = Json::object();

    bool operator==(const Event&) const = default;
};

Json to_json(const Event& e);
Event event_from_json(const Json& j);

struct EventDraft {
    std::optional<int> scene_index;
    std::optional<int> attempt;
    AgentRole agent_role = AgentRole::system;
    EventKind kind = EventKind::phase_start;
    Json payload = Json::object();
};

class Clock {
public:
    virtual ~Clock() = default;
    /// Seconds since the run started.
    [[nodiscard]] virtual double now() const = 0;
};

/// Simulated time, advanced explicitly from the cost model.
class LogicalClock final : public Clock {
public:
    [[nodiscard]] double now() const override;
    void advance(double seconds);

private:
    mutable std::mutex mu_;
    double now_ = 0.0;
};

class WallClock final : public Clock {
public:
    WallClock() : start_(std::chrono::steady_clock::now()) {}
    [[nodiscard]] double now() const override;

private:
    std::chrono::steady_clock::time_point start_;
};

namespace detail {
struct RunLog;
struct Cursor;
}  // namespace detail

/// Reader over one run's log: replays from `from_seq`, then follows live
/// emission. A reader that falls more than the bus capacity behind live
/// emission is cut off with a `disconnected` result.
class Subscription {
public:
    enum class Status { event, end_of_stream, disconnected, timeout };

    struct Next {
        Status status;
        std::optional<Event> event;
    };

    ~Subscription();
    Subscription(const Subscription&) = delete;
    Subscription& operator=(const Subscription&) = delete;

    Next next(std::chrono::milliseconds timeout);
    /// Next event without waiting.
    Next poll() { return next(std::chrono::milliseconds(0)); }

private:
    friend class EventBus;
    Subscription(std::shared_ptr<detail::RunLog> log, std::shared_ptr<detail::Cursor> cursor);

    std::shared_ptr<detail::RunLog> log_;
    std::shared_ptr<detail::Cursor> cursor_;
};

class EventBus {
public:
    explicit EventBus(std::size_t subscriber_capacity = 65536);
    ~EventBus();

    /// Registers a run; a null clock means wall time. Reopening an existing
    /// run id throws InvalidEvent.
    void open_run(const std::string& run_id, std::shared_ptr<const Clock> clock = nullptr);

    /// Assigns seq and ts, appends, wakes subscribers. Throws UnknownRun, or
    /// InvalidEvent for a closed run or a forbidden (role, kind) pair.
    Event emit(const std::string& run_id, EventDraft draft);

    /// Marks end-of-stream; later subscribers still replay the full log.
    void close_run(const std::string& run_id);

    std::unique_ptr<Subscription> subscribe(const std::string& run_id, std::uint64_t from_seq);

    [[nodiscard]] std::vector<Event> events(const std::string& run_id) const;
    [[nodiscard]] bool has_run(const std::string& run_id) const;
    [[nodiscard]] bool is_closed(const std::string& run_id) const;

    /// Installs an already-finished log (e.g. loaded from a transcript).
    void restore_run(const std::string& run_id, std::vector<Event> events);

private:
    std::shared_ptr<detail::RunLog> find(const std::string& run_id) const;

    std::size_t capacity_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<detail::RunLog>> runs_;
};

/// Newline-delimited JSON, one event per line.
std::string to_ndjson(const std::vector<Event>& events);

}  // namespace genflow
