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
#include "genflow/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "genflow/errors.hpp"

namespace genflow {

struct CampaignService::Campaign {
    std::string id;
    Json request = Json::object();
    Json upload = nullptr;
    CampaignRequest pipeline_request;
    EngineConfig engine;
    CampaignState state = CampaignState::pending;
    std::vector<std::string> history{"pending"};
    std::optional<std::string> failure;
    bool aborted = false;
    bool restarted = false;
    std::shared_ptr<std::atomic<bool>> cancel = std::make_shared<std::atomic<bool>>(false);
    std::string result_body;
};

namespace {

constexpr const char* kIndexFile = "index.json";

HttpReply error_reply(int status, std::string_view error, std::string_view message) {
    return {status, Json{{"error", error}, {"message", message}}};
}

std::string transcript_file(const std::string& id) { return id + ".transcript.json"; }

void write_atomically(const std::filesystem::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write {}", tmp.string()));
        out << text;
        if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write {}", tmp.string()));
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read {}", path.string()));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool all_sim(const EngineConfig& e) {
    return std::all_of(kBackendRoles.begin(), kBackendRoles.end(),
                       [&](auto role) { return e.provider_for(role) == Provider::sim; });
}

bool valid_url(const std::string& url) {
    return url.rfind("fixture:", 0) == 0 || url.rfind("http://", 0) == 0 || url.rfind("https://", 0) == 0;
}

Json result_document(const std::string& id, CampaignState state, const RunTranscript& t) {
    Json commits = Json::array();
    for (const auto& s : t.scenes) {
        if (!s.committed) continue;
        commits.push_back(Json{{"scene_index", s.scene_index},
                               {"attempt", s.artifact.attempt},
                               {"final_frame", s.artifact.frames.back().digest.hex()}});
    }
    return Json{{"campaign_id", id},
                {"state", to_string(state)},
                {"brand_dna", t.dna ? to_json(*t.dna) : Json(nullptr)},
                {"final_commits", std::move(commits)},
                {"transcript", to_json(t)}};
}

void send(httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
}

}  // namespace

CampaignService::CampaignService(ServiceConfig config, EnvLookup env)
    : config_(std::move(config)), env_(std::move(env)) {
    if (!config_.data_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(config_.data_dir, ec);
        if (ec) throw Error(ErrorCode::Config, fmt::format("cannot create data_dir {}: {}", config_.data_dir.string(), ec.message()));
        recover();
    }
}

CampaignService::~CampaignService() {
    if (!drained_) drain(std::chrono::milliseconds(0));
}

int CampaignService::active_count() const {
    return static_cast<int>(std::count_if(campaigns_.begin(), campaigns_.end(),
                                          [](const auto& kv) { return !is_terminal(kv.second->state); }));
}

HttpReply CampaignService::submit(const Json& body, const std::optional<AssetUpload>& upload) {
    Json fields = Json::array();
    auto bad = [&](std::string_view field, std::string_view message) {
        fields.push_back(Json{{"field", field}, {"message", message}});
    };
    if (!body.is_object()) {
        bad("$", "request body must be a JSON object");
        return {422, Json{{"error", "validation_failed"}, {"fields", std::move(fields)}}};
    }

    auto c = std::make_shared<Campaign>();
    auto& req = c->pipeline_request;
    auto text_field = [&](const char* key, std::string& out) {
        if (!body.contains(key) || body[key].is_null()) {
            bad(key, "required");
        } else if (!body[key].is_string() || body[key].get<std::string>().empty()) {
            bad(key, "must be a non-empty string");
        } else {
            out = body[key].get<std::string>();
        }
    };
    text_field("url", req.url);
    if (!req.url.empty() && !valid_url(req.url)) bad("url", "must be an http(s) or fixture: URL");
    text_field("objective", req.objective);
    if (body.contains("n_scenes")) {
        if (!body["n_scenes"].is_number_integer() || body["n_scenes"].get<std::int64_t>() < 1 ||
            body["n_scenes"].get<std::int64_t>() > 64) {
            bad("n_scenes", "must be an integer in [1, 64]");
        } else {
            req.n_scenes = body["n_scenes"].get<int>();
        }
    }
    if (body.contains("policy")) {
        const auto& p = body["policy"];
        if (!p.is_object()) {
            bad("policy", "must be an object");
        } else {
            if (p.contains("retry_budget")) {
                if (!p["retry_budget"].is_number_integer() || p["retry_budget"].get<std::int64_t>() < 0 ||
                    p["retry_budget"].get<std::int64_t>() > 32) {
                    bad("policy.retry_budget", "must be an integer in [0, 32]");
                } else {
                    req.policy.retry_budget = p["retry_budget"].get<int>();
                }
            }
            if (p.contains("consensus") && p["consensus"] != "strict_and") bad("policy.consensus", "must be strict_and");
        }
    }
    std::string profile = config_.default_profile;
    if (body.contains("backend_profile")) {
        if (!body["backend_profile"].is_string() || !config_.profiles.count(body["backend_profile"].get<std::string>())) {
            bad("backend_profile", "unknown profile");
        } else {
            profile = body["backend_profile"].get<std::string>();
        }
    }
    if (body.contains("asset")) {
        try {
            req.asset = asset_from_json(body["asset"]);
        } catch (const std::exception& e) {
            bad("asset", e.what());
        }
    }
    std::optional<std::uint64_t> seed;
    if (body.contains("seed")) {
        const auto& v = body["seed"];
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            bad("seed", "must be an unsigned integer");
        } else {
            seed = body["seed"].get<std::uint64_t>();
        }
    }
    if (upload) {
        const bool is_json = upload->content_type.find("json") != std::string::npos ||
                             (upload->filename.size() > 5 &&
                              upload->filename.compare(upload->filename.size() - 5, 5, ".json") == 0);
        if (is_json) {
            try {
                req.asset = asset_from_json(Json::parse(upload->bytes));
            } catch (const std::exception& e) {
                bad("asset", e.what());
            }
        } else if (upload->bytes.empty()) {
            bad("asset", "uploaded file is empty");
        } else {
            auto a = default_asset(upload->filename);
            a.asset_id = fmt::format("upload:{}", upload->filename.empty() ? "asset" : upload->filename);
            a.content_digest = digest_bytes(upload->bytes);
            req.asset = a;
            c->upload = Json{{"filename", upload->filename},
                             {"content_type", upload->content_type},
                             {"bytes", upload->bytes.size()},
                             {"digest", a.content_digest.hex()}};
        }
    }
    if (!fields.empty()) return {422, Json{{"error", "validation_failed"}, {"fields", std::move(fields)}}};

    try {
        c->engine = resolve_profile(config_, profile, env_);
    } catch (const Error& e) {
        return error_reply(500, "profile_error", e.what());
    }
    if (seed) c->engine.sim.master_seed = *seed;
    c->request = Json{{"url", req.url},
                      {"objective", req.objective},
                      {"n_scenes", req.n_scenes},
                      {"policy", req.policy},
                      {"backend_profile", profile},
                      {"seed", c->engine.sim.master_seed},
                      {"asset", req.asset ? to_json(*req.asset) : Json(nullptr)}};

    {
        std::lock_guard lock(mu_);
        if (!accepting_) return error_reply(503, "draining", "service is shutting down");
        if (active_count() >= config_.max_concurrent) {
            return error_reply(503, "at_capacity",
                               fmt::format("{} campaigns already running", config_.max_concurrent));
        }
        c->id = fmt::format("cmp-{:06d}", next_id_++);
        if (c->upload.is_object() && !config_.data_dir.empty()) {
            auto dir = config_.data_dir / "uploads";
            std::filesystem::create_directories(dir);
            auto path = dir / fmt::format("{}.bin", c->id);
            write_atomically(path, upload->bytes);
            c->upload["stored_as"] = path.filename().string();
        }
        std::shared_ptr<Clock> clock;
        if (all_sim(c->engine)) {
            clock = std::make_shared<LogicalClock>();
        } else {
            clock = std::make_shared<WallClock>();
        }
        bus_.open_run(c->id, clock);
        campaigns_[c->id] = c;
        persist_index();
        workers_.emplace_back([this, c, clock] {
            PipelineHooks hooks;
            hooks.cancel = c->cancel;
            hooks.on_state = [this, c](CampaignState next) {
                // Terminal states are published by finish() once the result is cached.
                if (is_terminal(next)) return;
                std::lock_guard lock(mu_);
                if (next == c->state || !legal_transition(c->state, next)) return;
                c->state = next;
                c->history.emplace_back(to_string(next));
            };
            RunTranscript t;
            try {
                auto backends = make_backends(c->engine);
                t = run_pipeline(c->pipeline_request, backends, pipeline_options(c->engine), c->id, bus_, clock, hooks);
            } catch (const std::exception& e) {
                RunContext ctx(c->id, c->engine.sim.cost_model, &bus_, clock);
                try {
                    ctx.emit(AgentRole::system, EventKind::fault,
                             Json{{"phase", "pending"}, {"error_code", "Config"}, {"message", e.what()}});
                    bus_.close_run(c->id);
                } catch (const std::exception&) {
                }
                t.run_id = c->id;
                t.status = "failed";
                t.failure = fmt::format("Config: {}", e.what());
                t.events = bus_.events(c->id);
            }
            finish(c, std::move(t));
        });
    }
    return {202, Json{{"campaign_id", c->id}, {"state", "pending"}}};
}

void CampaignService::finish(const std::shared_ptr<Campaign>& c, RunTranscript t) {
    std::lock_guard lock(mu_);
    const auto final_state = t.status == "completed" ? CampaignState::completed : CampaignState::failed;
    if (c->state != final_state) {
        c->state = final_state;
        c->history.emplace_back(to_string(final_state));
    }
    c->failure = t.failure;
    c->aborted = c->cancel->load() && final_state == CampaignState::failed;
    c->result_body = result_document(c->id, c->state, t).dump();
    if (!config_.data_dir.empty()) {
        try {
            write_atomically(config_.data_dir / transcript_file(c->id), to_json(t).dump(2));
            persist_index();
        } catch (const std::exception& e) {
            fmt::print(stderr, "genflow: cannot persist {}: {}\n", c->id, e.what());
        }
    }
    idle_cv_.notify_all();
}

Json CampaignService::progress(const Campaign& c) const {
    std::optional<int> scene;
    int attempt = -1;  // -1 until the current scene reports one
    int done = 0;
    std::vector<Event> events;
    if (bus_.has_run(c.id)) events = bus_.events(c.id);
    for (const auto& e : events) {
        const bool scene_phase = e.payload.is_object() && e.payload.value("phase", std::string()) == "scene";
        if (e.kind == EventKind::phase_start && scene_phase) {
            scene = e.scene_index;
            attempt = -1;
        } else if (e.kind == EventKind::phase_end && scene_phase) {
            ++done;
        }
        if (scene && e.scene_index == scene && e.attempt) attempt = std::max(attempt, *e.attempt);
    }
    return Json{{"scene_index", scene ? Json(*scene) : Json(nullptr)},
                {"attempt", attempt >= 0 ? Json(attempt) : Json(nullptr)},
                {"scenes_done", done},
                {"n_scenes", c.pipeline_request.n_scenes},
                {"event_count", events.size()}};
}

Json CampaignService::summary(const Campaign& c) const {
    Json out{{"campaign_id", c.id}};
    for (const auto& [k, v] : c.request.items()) out[k] = v;
    out["state"] = to_string(c.state);
    out["state_history"] = c.history;
    out["failure"] = c.failure ? Json(*c.failure) : Json(nullptr);
    out["aborted"] = c.aborted;
    out["restarted"] = c.restarted;
    out["upload"] = c.upload;
    return out;
}

HttpReply CampaignService::status(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = campaigns_.find(id);
    if (it == campaigns_.end()) return error_reply(404, "not_found", fmt::format("no campaign '{}'", id));
    auto out = summary(*it->second);
    out["progress"] = progress(*it->second);
    return {200, std::move(out)};
}

HttpReply CampaignService::result(const std::string& id) const {
    std::unique_lock lock(mu_);
    auto it = campaigns_.find(id);
    if (it == campaigns_.end()) return error_reply(404, "not_found", fmt::format("no campaign '{}'", id));
    // The event stream closes just before the result is recorded.
    if (!is_terminal(it->second->state) && bus_.is_closed(id)) {
        idle_cv_.wait_for(lock, std::chrono::seconds(5), [&] { return is_terminal(it->second->state); });
    }
    if (!is_terminal(it->second->state) || it->second->result_body.empty()) {
        return error_reply(409, "running", fmt::format("campaign '{}' is {}", id, to_string(it->second->state)));
    }
    return {200, Json::parse(it->second->result_body)};
}

HttpReply CampaignService::abort(const std::string& id) {
    std::lock_guard lock(mu_);
    auto it = campaigns_.find(id);
    if (it == campaigns_.end()) return error_reply(404, "not_found", fmt::format("no campaign '{}'", id));
    if (is_terminal(it->second->state)) {
        return error_reply(409, "finished", fmt::format("campaign '{}' is already {}", id, to_string(it->second->state)));
    }
    it->second->cancel->store(true);
    return {202, Json{{"campaign_id", id}, {"abort_requested", true}}};
}

std::unique_ptr<Subscription> CampaignService::subscribe(const std::string& id, std::uint64_t from_seq) {
    {
        std::lock_guard lock(mu_);
        if (!campaigns_.count(id)) throw Error(ErrorCode::UnknownRun, fmt::format("no campaign '{}'", id));
    }
    return bus_.subscribe(id, from_seq);
}

void CampaignService::persist_index() const {
    if (config_.data_dir.empty()) return;
    Json entries = Json::object();
    for (const auto& [id, c] : campaigns_) {
        auto s = summary(*c);
        s["file"] = is_terminal(c->state) ? Json(transcript_file(id)) : Json(nullptr);
        entries[id] = std::move(s);
    }
    write_atomically(config_.data_dir / kIndexFile,
                     Json{{"next_id", next_id_}, {"campaigns", std::move(entries)}}.dump(2));
}

void CampaignService::recover() {
    const auto index_path = config_.data_dir / kIndexFile;
    if (!std::filesystem::exists(index_path)) return;
    auto index = Json::parse(read_file(index_path), nullptr, false);
    if (index.is_discarded() || !index.contains("campaigns")) {
        throw Error(ErrorCode::Config, fmt::format("{} is corrupt", index_path.string()));
    }
    next_id_ = index.value("next_id", std::uint64_t{1});
    bool dirty = false;
    for (const auto& [id, entry] : index["campaigns"].items()) {
        auto c = std::make_shared<Campaign>();
        c->id = id;
        for (const auto& key : {"url", "objective", "n_scenes", "policy", "backend_profile", "seed", "asset"}) {
            if (entry.contains(key)) c->request[key] = entry[key];
        }
        c->pipeline_request.n_scenes = entry.value("n_scenes", kDefaultSceneCount);
        c->upload = entry.value("upload", Json(nullptr));
        c->history = entry.value("state_history", std::vector<std::string>{"pending"});
        c->aborted = entry.value("aborted", false);
        c->restarted = entry.value("restarted", false);
        if (entry.contains("failure") && entry["failure"].is_string()) c->failure = entry["failure"].get<std::string>();
        c->state = campaign_state_from_string(entry.value("state", std::string("failed")));

        const auto file = config_.data_dir / transcript_file(id);
        RunTranscript t;
        if (is_terminal(c->state) && std::filesystem::exists(file)) {
            t = transcript_from_json(Json::parse(read_file(file)));
        } else {
            Event marker;
            marker.run_id = id;
            marker.agent_role = AgentRole::system;
            marker.kind = EventKind::fault;
            marker.payload = Json{{"phase", to_string(c->state)},
                                  {"error_code", "Interrupted"},
                                  {"message", "service restarted before the campaign finished"},
                                  {"marker", "restart"}};
            t.run_id = id;
            t.status = "failed";
            t.failure = "Interrupted: service restarted before the campaign finished";
            t.events = {marker};
            c->state = CampaignState::failed;
            c->history.emplace_back("failed");
            c->failure = t.failure;
            c->restarted = true;
            write_atomically(file, to_json(t).dump(2));
            dirty = true;
        }
        bus_.restore_run(id, t.events);
        c->result_body = result_document(id, c->state, t).dump();
        campaigns_[id] = c;
    }
    if (dirty) persist_index();
}

void CampaignService::install_routes(httplib::Server& server) {
    server.Get("/v1/healthz", [](const httplib::Request&, httplib::Response& res) {
        send(res, {200, Json{{"status", "ok"}}});
    });

    server.Post("/v1/campaigns", [this](const httplib::Request& req, httplib::Response& res) {
        if (req.is_multipart_form_data()) {
            Json body = Json::object();
            if (req.has_file("request")) {
                body = Json::parse(req.get_file_value("request").content, nullptr, false);
            } else {
                for (const auto& key : {"url", "objective", "backend_profile"}) {
                    if (req.has_file(key)) body[key] = req.get_file_value(key).content;
                }
                for (const auto& key : {"n_scenes", "policy", "seed"}) {
                    if (!req.has_file(key)) continue;
                    auto v = Json::parse(req.get_file_value(key).content, nullptr, false);
                    body[key] = v.is_discarded() ? Json(req.get_file_value(key).content) : v;
                }
            }
            std::optional<AssetUpload> upload;
            if (req.has_file("asset")) {
                const auto& f = req.get_file_value("asset");
                upload = AssetUpload{f.filename, f.content_type, f.content};
            }
            send(res, submit(body.is_discarded() ? Json(nullptr) : body, upload));
            return;
        }
        auto body = Json::parse(req.body, nullptr, false);
        send(res, submit(body.is_discarded() ? Json(nullptr) : body));
    });

    server.Get("/v1/campaigns", [this](const httplib::Request&, httplib::Response& res) {
        Json list = Json::array();
        {
            std::lock_guard lock(mu_);
            for (const auto& [id, c] : campaigns_) list.push_back(summary(*c));
        }
        send(res, {200, Json{{"campaigns", std::move(list)}}});
    });

    server.Get("/v1/campaigns/:id", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, status(req.path_params.at("id")));
    });

    server.Get("/v1/campaigns/:id/result", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, result(req.path_params.at("id")));
    });

    server.Post("/v1/campaigns/:id/abort", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, abort(req.path_params.at("id")));
    });

    server.Get("/v1/campaigns/:id/events", [this](const httplib::Request& req, httplib::Response& res) {
        std::uint64_t from = 0;
        try {
            if (req.has_header("Last-Event-ID")) {
                from = std::stoull(req.get_header_value("Last-Event-ID")) + 1;
            } else if (req.has_param("from_seq")) {
                from = std::stoull(req.get_param_value("from_seq"));
            }
        } catch (const std::exception&) {
            send(res, error_reply(400, "bad_cursor", "Last-Event-ID / from_seq must be an unsigned integer"));
            return;
        }
        std::shared_ptr<Subscription> sub;
        try {
            sub = subscribe(req.path_params.at("id"), from);
        } catch (const Error& e) {
            send(res, error_reply(404, "not_found", e.what()));
            return;
        }
        res.set_header("Cache-Control", "no-cache");
        res.set_header("X-Accel-Buffering", "no");
        res.set_chunked_content_provider("text/event-stream", [this, sub](std::size_t, httplib::DataSink& sink) {
            auto write = [&](const std::string& s) { return sink.write(s.data(), s.size()); };
            if (stopping_) {
                write("event: shutdown\ndata: {}\n\n");
                sink.done();
                return true;
            }
            auto n = sub->next(std::chrono::milliseconds(500));
            switch (n.status) {
            case Subscription::Status::event:
                return write(fmt::format("id: {}\ndata: {}\n\n", n.event->seq, to_json(*n.event).dump()));
            case Subscription::Status::timeout:
                return write(": keep-alive\n\n");
            case Subscription::Status::end_of_stream:
                write("event: end\ndata: {}\n\n");
                sink.done();
                return true;
            case Subscription::Status::disconnected:
                write("event: disconnected\ndata: {\"reason\":\"subscriber fell behind\"}\n\n");
                sink.done();
                return true;
            }
            return false;
        });
    });

    if (config_.ui_dir) {
        server.set_mount_point("/ui", config_.ui_dir->string());
        server.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/ui/"); });
    }
}

int CampaignService::start() {
    if (server_) throw Error(ErrorCode::Config, "service already started");
    server_ = std::make_unique<httplib::Server>();
    server_->new_task_queue = [] { return new httplib::ThreadPool(32); };
    install_routes(*server_);
    if (config_.port == 0) {
        port_ = server_->bind_to_any_port(config_.host);
    } else {
        port_ = server_->bind_to_port(config_.host, config_.port) ? config_.port : -1;
    }
    if (port_ <= 0) {
        server_.reset();
        throw Error(ErrorCode::Config, fmt::format("cannot listen on {}:{}", config_.host, config_.port));
    }
    server_thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
}

void CampaignService::wait_idle() {
    std::unique_lock lock(mu_);
    idle_cv_.wait(lock, [&] { return active_count() == 0; });
}

void CampaignService::drain(std::chrono::milliseconds grace) {
    std::vector<std::thread> workers;
    {
        std::unique_lock lock(mu_);
        accepting_ = false;
        if (!idle_cv_.wait_for(lock, grace, [&] { return active_count() == 0; })) {
            for (auto& [id, c] : campaigns_) {
                if (!is_terminal(c->state)) c->cancel->store(true);
            }
        }
        workers.swap(workers_);
    }
    for (auto& w : workers) w.join();
    stopping_ = true;
    if (server_) {
        server_->stop();
        if (server_thread_.joinable()) server_thread_.join();
    }
    drained_ = true;
}

}  // namespace genflow
