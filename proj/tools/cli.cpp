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
#include "cli.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "genflow/config.hpp"
#include "genflow/errors.hpp"
#include "genflow/eval_harness.hpp"
#include "genflow/pipeline.hpp"
#include "genflow/service.hpp"

#ifndef GENFLOW_DEFAULT_FIXTURE_DIR
#define GENFLOW_DEFAULT_FIXTURE_DIR "fixtures"
#endif

namespace genflow::cli {

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string fixtures_dir;
    bool json = false;
};

int exit_code_for(const Error& e) {
    switch (e.code()) {
    case ErrorCode::ParseExhausted: return kExitParseExhausted;
    case ErrorCode::NetworkError:
    case ErrorCode::SizeExceeded:
    case ErrorCode::NotHtml:
    case ErrorCode::Transport:
    case ErrorCode::Timeout:
    case ErrorCode::RemoteRejected: return kExitNetwork;
    case ErrorCode::Io: return kExitOutput;
    case ErrorCode::Config: return kExitConfig;
    case ErrorCode::InvalidRequest: return kExitUsage;
    default: return kExitFailure;
    }
}

Json read_json(const std::string& path, ErrorCode code) {
    std::ifstream in(path);
    if (!in) throw Error(code, fmt::format("cannot read {}", path));
    auto doc = Json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw Error(code, fmt::format("{} is not valid JSON", path));
    return doc;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write output file {}", path));
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write output file {}", path));
}

EngineConfig load_engine(const Common& c) {
    EngineConfig engine;
    if (!c.config.empty()) {
        engine = engine_config_from_json(read_json(c.config, ErrorCode::Config),
                                         std::filesystem::path(c.config).parent_path());
    } else {
        engine.fetch.fixture_dir = GENFLOW_DEFAULT_FIXTURE_DIR;
    }
    apply_env_overrides(engine, process_env());
    if (!c.fixtures_dir.empty()) engine.fetch.fixture_dir = c.fixtures_dir;
    if (c.seed) engine.sim.master_seed = *c.seed;
    return engine;
}

void add_common(CLI::App* cmd, Common& c, bool with_seed = true) {
    cmd->add_option("--config", c.config, "Engine config file (JSON)");
    if (with_seed) cmd->add_option("--seed", c.seed, "Master seed (overrides GENFLOW_SEED)");
    cmd->add_option("--fixtures-dir", c.fixtures_dir, "Directory that fixture: URLs resolve against");
    cmd->add_flag("--json", c.json, "Machine-readable output on stdout");
}

int cmd_extract(const Common& common, const std::string& url_in, const std::string& fixture, const std::string& out_path,
                std::optional<int> repair_budget, std::ostream& out) {
    auto engine = load_engine(common);
    if (repair_budget) engine.repair_budget = *repair_budget;
    const std::string url = fixture.empty() ? url_in : "fixture:" + fixture;
    auto backends = make_backends(engine);
    auto site = fetch_site(url, engine.fetch);
    auto dna = build_brand_dna(site, *backends.extractor, engine.repair_budget, Stream(engine.sim.master_seed).child("extractor"));
    const auto text = to_json(dna).dump(2) + "\n";
    if (!out_path.empty()) write_text(out_path, text);
    if (common.json) {
        out << Json{{"status", "ok"}, {"out", out_path.empty() ? Json(nullptr) : Json(out_path)}, {"brand_dna", to_json(dna)}}
                   .dump()
            << "\n";
    } else if (out_path.empty()) {
        out << text;
    } else {
        out << fmt::format("wrote {} ({} colors, {} families)\n", out_path, dna.palette.size(), dna.typography.size());
    }
    return kExitOk;
}

struct RunArgs {
    std::string dna;
    std::string url;
    std::string fixture;
    std::string asset;
    std::string objective = "Product launch teaser";
    int scenes = kDefaultSceneCount;
    std::string backend;
    std::string out;
    std::optional<int> retry_budget;
};

int cmd_run(const Common& common, const RunArgs& a, std::ostream& out) {
    auto engine = load_engine(common);
    if (!a.backend.empty()) {
        engine.default_provider = provider_from_string(a.backend);
        engine.providers.clear();
    }
    CampaignRequest req;
    req.objective = a.objective;
    req.n_scenes = a.scenes;
    req.policy = engine.qc;
    if (a.retry_budget) req.policy.retry_budget = *a.retry_budget;
    if (!a.dna.empty()) {
        req.dna = load_brand_dna(a.dna);
    } else {
        req.url = a.fixture.empty() ? a.url : "fixture:" + a.fixture;
    }
    if (!a.asset.empty()) req.asset = asset_from_json(read_json(a.asset, ErrorCode::InvalidRequest));

    auto backends = make_backends(engine);
    auto t = run_pipeline(req, backends, pipeline_options(engine), "run");
    const auto text = to_json(t).dump(2) + "\n";
    if (!a.out.empty()) write_text(a.out, text);

    int committed = 0;
    Json scenes = Json::array();
    for (const auto& s : t.scenes) {
        committed += s.committed ? 1 : 0;
        scenes.push_back(Json{{"scene_index", s.scene_index}, {"status", s.committed ? "committed" : "failed"}, {"retries", s.retries}});
    }
    if (common.json) {
        out << Json{{"status", t.status},
                    {"failure", t.failure ? Json(*t.failure) : Json(nullptr)},
                    {"out", a.out.empty() ? Json(nullptr) : Json(a.out)},
                    {"scenes", std::move(scenes)},
                    {"totals", to_json(t.totals)}}
                   .dump()
            << "\n";
    } else if (a.out.empty()) {
        out << text;
    } else {
        out << fmt::format("wrote {}: {} ({} of {} scenes committed)\n", a.out, t.status, committed, t.scenes.size());
    }
    if (t.status == "completed") return kExitOk;
    if (t.failure && t.failure->rfind("ParseExhausted", 0) == 0) return kExitParseExhausted;
    for (auto code : {"NetworkError", "NotHtml", "SizeExceeded", "Transport", "Timeout", "RemoteRejected"}) {
        if (t.failure && t.failure->rfind(code, 0) == 0) return kExitNetwork;
    }
    return kExitFailure;
}

struct SimulateArgs {
    std::int64_t runs = 10000;
    std::string tier = "aggregate";
    std::string report;
    unsigned workers = 1;
    int retry_budget = 3;
    int parse_budget = 1;
};

int cmd_simulate(const Common& common, const SimulateArgs& a, std::ostream& out) {
    auto engine = load_engine(common);
    const std::uint64_t seed = engine.sim.master_seed;
    eval::ExperimentOptions opts{a.retry_budget, a.parse_budget, a.workers};
    eval::YieldReport rep;
    if (a.tier == "split") {
        rep = eval::run_tier_split(a.runs, seed, opts);
    } else {
        auto params = engine.sim;
        const auto tier = sim::tier_from_string(a.tier);
        if (tier != params.tier) {
            auto tiered = sim::default_sim_params(tier);
            tiered.cost_model = params.cost_model;
            tiered.malformed_rate = params.malformed_rate;
            params = tiered;
        }
        rep = eval::run_experiment(params, a.runs, seed, opts);
    }
    const auto json_text = eval::to_json(rep).dump(2) + "\n";
    const auto text = eval::render_report_text(rep);
    if (!a.report.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(a.report, ec);
        if (ec) throw Error(ErrorCode::Io, fmt::format("cannot create report directory {}", a.report));
        write_text((std::filesystem::path(a.report) / "report.json").string(), json_text);
        write_text((std::filesystem::path(a.report) / "report.txt").string(), text);
    }
    out << (common.json ? json_text : text);
    return kExitOk;
}

int cmd_serve(const std::string& config_path, const std::string& listen, const std::string& data_dir,
              std::ostream& out) {
    ServiceConfig config;
    if (!config_path.empty()) {
        config = load_service_config(config_path);
    } else {
        config = service_config_from_json(Json::object());
        config.engine["fixture_dir"] = GENFLOW_DEFAULT_FIXTURE_DIR;
    }
    if (!listen.empty()) {
        auto patched = service_config_from_json(Json{{"listen", listen}});
        config.host = patched.host;
        config.port = patched.port;
    }
    if (!data_dir.empty()) config.data_dir = data_dir;
    for (const auto& [name, _] : config.profiles) resolve_profile(config, name, process_env());

    // Block termination signals before any thread starts so that sigwait
    // below is their only consumer.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGTERM);
    sigaddset(&signals, SIGINT);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    CampaignService service(config);
    const int port = service.start();
    out << fmt::format("genflow listening on {}:{}\n", config.host, port) << std::flush;
    int sig = 0;
    sigwait(&signals, &sig);
    out << "draining\n" << std::flush;
    service.drain(std::chrono::seconds(30));
    out << "stopped\n" << std::flush;
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Brand-constrained video campaign pipeline", "genflow"};
    app.require_subcommand(1);

    Common common;

    auto* extract = app.add_subcommand("extract", "Fetch a site and write its Brand DNA");
    std::string url;
    std::string fixture;
    std::string out_path;
    std::optional<int> repair_budget;
    auto* url_opt = extract->add_option("--url", url, "Site URL (http, https or fixture:)");
    auto* fixture_opt = extract->add_option("--fixture", fixture, "Fixture site name");
    url_opt->excludes(fixture_opt);
    extract->add_option("--out", out_path, "Output .branddna.json path");
    extract->add_option("--repair-budget", repair_budget, "Schema repair attempts")->check(CLI::NonNegativeNumber);
    add_common(extract, common);

    auto* run_cmd = app.add_subcommand("run", "Run one campaign and write its transcript");
    RunArgs ra;
    auto* dna_opt = run_cmd->add_option("--dna", ra.dna, "Brand DNA file");
    auto* run_url = run_cmd->add_option("--url", ra.url, "Extract the Brand DNA from this URL first");
    auto* run_fixture = run_cmd->add_option("--fixture", ra.fixture, "Extract the Brand DNA from a fixture site");
    dna_opt->excludes(run_url)->excludes(run_fixture);
    run_url->excludes(run_fixture);
    run_cmd->add_option("--asset", ra.asset, "Asset descriptor JSON");
    run_cmd->add_option("--objective", ra.objective, "Campaign objective");
    run_cmd->add_option("--scenes", ra.scenes, "Scene count")->check(CLI::Range(1, 64));
    run_cmd->add_option("--backend", ra.backend, "Provider for every role")->check(CLI::IsMember({"sim", "remote"}));
    run_cmd->add_option("--out", ra.out, "Output .transcript.json path");
    run_cmd->add_option("--retry-budget", ra.retry_budget, "QC regenerations per scene")->check(CLI::NonNegativeNumber);
    add_common(run_cmd, common);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo yield experiment");
    SimulateArgs sa;
    simulate->add_option("--runs", sa.runs, "Runs per arm")->check(CLI::PositiveNumber);
    simulate->add_option("--tier", sa.tier, "aggregate, simple, complex or split")
        ->check(CLI::IsMember({"aggregate", "simple", "complex", "split"}));
    simulate->add_option("--report", sa.report, "Directory for report.json and report.txt");
    simulate->add_option("--workers", sa.workers, "Worker threads")->check(CLI::Range(1u, 256u));
    simulate->add_option("--retry-budget", sa.retry_budget, "QC regenerations per scene")->check(CLI::NonNegativeNumber);
    simulate->add_option("--parse-budget", sa.parse_budget, "Schema repair attempts")->check(CLI::NonNegativeNumber);
    add_common(simulate, common);

    auto* serve = app.add_subcommand("serve", "Run the HTTP service until SIGTERM");
    std::string serve_config;
    std::string listen;
    std::string data_dir;
    serve->add_option("--config", serve_config, "Service config file (JSON)");
    serve->add_option("--listen", listen, "host:port (port 0 picks a free port)");
    serve->add_option("--data-dir", data_dir, "Persistence directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (*extract) {
            if (url.empty() && fixture.empty()) {
                err << "extract: one of --url or --fixture is required\n";
                return kExitUsage;
            }
            return cmd_extract(common, url, fixture, out_path, repair_budget, out);
        }
        if (*run_cmd) {
            if (ra.dna.empty() && ra.url.empty() && ra.fixture.empty()) {
                err << "run: one of --dna, --url or --fixture is required\n";
                return kExitUsage;
            }
            return cmd_run(common, ra, out);
        }
        if (*simulate) return cmd_simulate(common, sa, out);
        if (*serve) return cmd_serve(serve_config, listen, data_dir, out);
    } catch (const Error& e) {
        const int code = exit_code_for(e);
        err << fmt::format("genflow: {}: {}\n", to_string(e.code()), e.what());
        if (common.json) {
            out << Json{{"status", "error"}, {"error_code", to_string(e.code())}, {"message", e.what()}, {"exit_code", code}}
                       .dump()
                << "\n";
        }
        return code;
    } catch (const std::exception& e) {
        err << fmt::format("genflow: {}\n", e.what());
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace genflow::cli
