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
#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "genflow/config.hpp"
#include "genflow/pipeline.hpp"
#include "genflow/telemetry.hpp"

namespace httplib {
class Server;
}

namespace genflow {

struct HttpReply {
    int status = 200;
    Json body = Json::object();
};

struct AssetUpload {
    std::string filename;
    std::string content_type;
    std::string bytes;
};

/// Campaign registry, executors and HTTP front end. All handlers go through
/// the public methods, so the HTTP layer stays a thin adapter.
class CampaignService {
public:
    explicit CampaignService(ServiceConfig config, EnvLookup env = process_env());
    ~CampaignService();

    CampaignService(const CampaignService&) = delete;
    CampaignService& operator=(const CampaignService&) = delete;

    HttpReply submit(const Json& body, const std::optional<AssetUpload>& upload = std::nullopt);
    HttpReply status(const std::string& id) const;
    HttpReply result(const std::string& id) const;
    HttpReply abort(const std::string& id);

    /// Throws UnknownRun for ids the service does not know.
    std::unique_ptr<Subscription> subscribe(const std::string& id, std::uint64_t from_seq);

    /// Binds and serves on a background thread; returns the bound port.
    int start();
    /// Stops accepting campaigns, waits up to `grace` for active runs, aborts
    /// the rest and stops the HTTP server.
    void drain(std::chrono::milliseconds grace = std::chrono::seconds(30));
    /// Blocks until every active campaign has reached a terminal state.
    void wait_idle();

    [[nodiscard]] int port() const noexcept { return port_; }
    [[nodiscard]] const ServiceConfig& config() const noexcept { return config_; }
    [[nodiscard]] EventBus& bus() noexcept { return bus_; }

private:
    struct Campaign;

    void install_routes(httplib::Server& server);
    void launch(const std::shared_ptr<Campaign>& campaign);
    void finish(const std::shared_ptr<Campaign>& campaign, RunTranscript transcript);
    void recover();
    void persist_index() const;
    Json summary(const Campaign& c) const;
    Json progress(const Campaign& c) const;
    int active_count() const;

    ServiceConfig config_;
    EnvLookup env_;
    EventBus bus_;
    mutable std::mutex mu_;
    mutable std::condition_variable idle_cv_;
    std::map<std::string, std::shared_ptr<Campaign>> campaigns_;
    std::vector<std::thread> workers_;
    std::uint64_t next_id_ = 1;
    bool accepting_ = true;
    bool drained_ = false;
    std::atomic<bool> stopping_{false};

    std::unique_ptr<httplib::Server> server_;
    std::thread server_thread_;
    int port_ = 0;
};

}  // namespace genflow
