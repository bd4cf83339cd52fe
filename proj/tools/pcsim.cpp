// pcsim: scenario generation, single runs, sweeps and report regeneration.
//
// Exit codes: 0 success, 1 runtime error, 2 configuration/precondition error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcsim/dpc.hpp"
#include "pcsim/errors.hpp"
#include "pcsim/gateway.hpp"
#include "pcsim/io.hpp"
#include "pcsim/orchestrator.hpp"
#include "pcsim/parallel.hpp"
#include "pcsim/report.hpp"
#include "pcsim/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pcsim;

namespace {

// Precondition failures map to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kSummaryCsv = "summary.csv";
constexpr const char* kSummaryJson = "summary.json";
constexpr const char* kTranscriptFile = "transcript.jsonl";

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string config_hash(const json& config) { return hex64(fnv1a64(config.dump())); }

void write_json(const fs::path& path, const json& doc) { write_file_atomic(path, doc.dump(2) + "\n"); }

struct RemoteFlags {
    std::string base_url;
    std::string model;
    double temperature = 0.2;
    int max_tokens = 512;
    double timeout_s = 60.0;
    int retries = 3;

    void add(CLI::App* cmd) {
        cmd->add_option("--base-url", base_url, "Chat-completions endpoint root (remote backend)");
        cmd->add_option("--model", model, "Model name (remote backend)");
        cmd->add_option("--temperature", temperature)->capture_default_str();
        cmd->add_option("--max-tokens", max_tokens)->capture_default_str();
        cmd->add_option("--timeout", timeout_s, "Per-request timeout in seconds")->capture_default_str();
        cmd->add_option("--retries", retries)->capture_default_str();
    }

    // Checked before anything touches the network.
    GatewayConfig gateway_config() const {
        GatewayConfig c;
        c.api_key = GatewayConfig::api_key_from_env();
        if (c.api_key.empty())
            throw ConfigError(std::string("remote backend requires the ") + kApiKeyEnv +
                              " environment variable");
        if (base_url.empty()) throw ConfigError("remote backend requires --base-url");
        if (model.empty()) throw ConfigError("remote backend requires --model");
        c.base_url = base_url;
        c.model_name = model;
        c.temperature = temperature;
        c.max_tokens = max_tokens;
        c.timeout_s = timeout_s;
        c.max_retries = retries;
        return c;
    }
};

template <class F>
auto config_guard(F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

// ---- scenario gen / analyze ------------------------------------------------

struct GenArgs {
    std::size_t n = 2;
    std::uint64_t seed = 0;
    std::size_t count = 1;
    bool divergent_only = false;
    std::string out = ".";
};

int cmd_scenario_gen(const GenArgs& a) {
    if (a.n == 0) throw ConfigError("--n must be positive");
    const ScenarioBatch batch = a.divergent_only ? generate_divergent_batch(a.n, a.count, a.seed)
                                                 : generate_batch(a.n, a.count, a.seed);
    const fs::path dir(a.out);
    for (std::size_t k = 0; k < batch.scenarios.size(); ++k) {
        const fs::path file = dir / ("scenario_n" + std::to_string(a.n) + "_seed" + std::to_string(a.seed) +
                                     "_" + std::to_string(k) + ".json");
        write_json(file, scenario_document(batch.scenarios[k]));
        std::cout << file.string() << "\n";
    }
    if (a.divergent_only)
        std::cerr << "kept " << batch.scenarios.size() << " of " << batch.draws << " draws\n";
    return 0;
}

int cmd_analyze(const std::string& path) {
    const Scenario s = load_scenario(path);
    json out = to_json(analyze_feasibility(s));
    out["initial_metrics"] = to_json(compute_metrics(s, s.p_init));
    std::cout << out.dump(2) << "\n";
    return 0;
}

// ---- run -------------------------------------------------------------------

struct RunArgs {
    std::string scenario;
    std::string mode = "dpc";
    std::string backend = "scripted";
    int rounds = 10;
    std::uint64_t seed = 0;
    std::string out = "run";
    int reprompts = 0;
    bool early_stop = false;
    RemoteFlags remote;
};

int cmd_run(const RunArgs& a) {
    RunConfig config;
    config.mode = config_guard([&] { return parse_mode(a.mode); });
    config.backend = config_guard([&] { return parse_backend(a.backend); });
    if (a.rounds < 1) throw ConfigError("--rounds must be at least 1");
    config.rounds = a.rounds;
    config.seed = a.seed;
    config.reprompts = a.reprompts;
    config.early_stop_on_target = a.early_stop;
    config.scenario_ref = fs::path(a.scenario).filename().string();

    std::optional<GatewayConfig> gateway_config;
    if (config.backend == BackendKind::remote && config.mode != Mode::dpc)
        gateway_config = a.remote.gateway_config();

    const Scenario scenario = [&] {
        try {
            return load_scenario(a.scenario);
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
    }();

    const fs::path dir(a.out);
    fs::create_directories(dir);
    auto transcript = std::make_shared<TranscriptSink>();
    RunOptions options;
    options.transcript = transcript;

    std::unique_ptr<DecisionBackend> backend;
    if (gateway_config) {
        auto gw = std::make_shared<ChatGateway>(*gateway_config, transcript);
        backend = std::make_unique<RemoteBackend>(gw);
        options.concurrent_decisions = true;
    } else {
        backend = std::make_unique<ScriptedBackend>();
    }
    options.backend = backend.get();

    const RunLog log = run(config, scenario, options);
    write_run(dir, log);

    std::string lines;
    for (const auto& rec : transcript->lines()) lines += rec + "\n";
    write_file_atomic(dir / kTranscriptFile, lines);

    json manifest;
    manifest["schema_version"] = kSchemaVersion;
    manifest["command"] = "run";
    manifest["seed"] = a.seed;
    manifest["scenario_seed"] = scenario.seed;
    manifest["config"] = to_json(config);
    manifest["config_hash"] = config_hash(manifest["config"]);
    if (gateway_config) manifest["gateway"] = gateway_config->to_json();
    manifest["files"] = {kRunSummaryFile, kRoundsFile, kTrajectoryFile, kTranscriptFile};
    write_json(dir / kManifestFile, manifest);

    const auto s = summarize(log);
    std::cout << "rate_gap_kbps=" << s.rate_gap_kbps << " total_power_w=" << s.total_power_w;
    if (s.msgs_per_tx) std::cout << " msgs_per_tx=" << *s.msgs_per_tx;
    std::cout << "\n";
    if (log.diagnostics.backend_errors)
        std::cerr << "warning: " << log.diagnostics.backend_errors << " backend errors (powers held)\n";
    return 0;
}

// ---- sweep / report --------------------------------------------------------

struct SweepArgs {
    std::string users = "2,4,10";
    std::size_t per = 25;
    std::string modes = "all";
    std::string backend = "scripted";
    std::uint64_t seed = 0;
    int rounds = 10;
    int jobs = 0;
    std::string out = "sweep";
    RemoteFlags remote;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

fs::path run_dir(const fs::path& root, const RunLog& log) {
    return root / "runs" / ("n" + std::to_string(log.scenario.n_pairs)) / std::string(to_string(log.config.mode)) /
           ("s" + std::to_string(log.scenario_index));
}

void write_report(const fs::path& dir, const std::vector<RunSummary>& summaries) {
    const auto rows = aggregate(summaries);
    write_file_atomic(dir / kSummaryCsv, summary_csv(rows));
    write_file_atomic(dir / kSummaryJson, summary_json(rows, summaries).dump(2) + "\n");
}

int cmd_sweep(const SweepArgs& a) {
    SweepConfig config;
    config.user_counts.clear();
    for (const auto& u : split_list(a.users)) {
        std::size_t n = 0;
        try {
            n = std::stoul(u);
        } catch (const std::exception&) {
            throw ConfigError("bad --users entry '" + u + "'");
        }
        if (n == 0) throw ConfigError("--users entries must be positive");
        config.user_counts.push_back(n);
    }
    if (config.user_counts.empty()) throw ConfigError("--users is empty");
    if (a.modes != "all") {
        config.modes.clear();
        for (const auto& m : split_list(a.modes)) config.modes.push_back(config_guard([&] { return parse_mode(m); }));
    }
    if (a.per == 0) throw ConfigError("--per must be positive");
    if (a.rounds < 1) throw ConfigError("--rounds must be at least 1");
    config.scenarios_per_count = a.per;
    config.backend = config_guard([&] { return parse_backend(a.backend); });
    config.seed = a.seed;
    config.rounds = a.rounds;
    if (a.jobs < 0) throw ConfigError("--jobs must be non-negative");
    if (a.jobs > 0) set_threads(a.jobs);

    std::optional<GatewayConfig> gateway_config;
    std::unique_ptr<DecisionBackend> remote;
    if (config.backend == BackendKind::remote) {
        gateway_config = a.remote.gateway_config();
        remote = std::make_unique<RemoteBackend>(std::make_shared<ChatGateway>(*gateway_config));
        config.remote = remote.get();
    }

    const SweepResult result = sweep(config);
    const fs::path root(a.out);
    std::vector<RunSummary> summaries;
    for (const auto& log : result.runs) {
        write_run(run_dir(root, log), log);
        summaries.push_back(summarize(log));
    }
    write_report(root, summaries);

    json cfg;
    cfg["users"] = config.user_counts;
    cfg["per"] = config.scenarios_per_count;
    json modes = json::array();
    for (Mode m : config.modes) modes.push_back(to_string(m));
    cfg["modes"] = modes;
    cfg["backend"] = to_string(config.backend);
    cfg["seed"] = config.seed;
    cfg["rounds"] = config.rounds;
    json manifest;
    manifest["schema_version"] = kSchemaVersion;
    manifest["command"] = "sweep";
    manifest["config"] = cfg;
    manifest["config_hash"] = config_hash(cfg);
    json batches = json::array();
    for (const auto& b : result.batches)
        batches.push_back({{"n", b.n_pairs},
                           {"batch_seed", derive_seed(config.seed, "batch", {b.n_pairs})},
                           {"accepted", b.accepted},
                           {"draws", b.draws}});
    manifest["batches"] = batches;
    if (gateway_config) manifest["gateway"] = gateway_config->to_json();
    write_json(root / kManifestFile, manifest);

    std::cout << summary_csv(result.rows);
    return 0;
}

int cmd_report(const std::string& logs, const std::string& out) {
    const fs::path root(logs);
    if (!fs::is_directory(root)) throw ConfigError("--logs is not a directory: " + logs);
    std::vector<RunSummary> summaries;
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file() && entry.path().filename() == kRoundsFile) dirs.push_back(entry.path().parent_path());
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) summaries.push_back(summarize(read_run(d)));
    if (summaries.empty()) std::cerr << "warning: no run logs found under " << logs << "\n";
    write_report(out.empty() ? root : fs::path(out), summaries);
    std::cout << summary_csv(aggregate(summaries));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-agent power control simulator"};
    app.require_subcommand(1);

    auto* scenario_cmd = app.add_subcommand("scenario", "Scenario files");
    scenario_cmd->require_subcommand(1);
    GenArgs gen;
    auto* gen_cmd = scenario_cmd->add_subcommand("gen", "Generate scenario documents");
    gen_cmd->add_option("--n", gen.n, "Transmitter-receiver pairs")->required();
    gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
    gen_cmd->add_option("--count", gen.count)->capture_default_str();
    gen_cmd->add_flag("--divergent-only", gen.divergent_only, "Keep only DPC-infeasible draws");
    gen_cmd->add_option("--out", gen.out)->capture_default_str();

    std::string analyze_path;
    auto* analyze_cmd = app.add_subcommand("analyze", "Feasibility report for a scenario");
    analyze_cmd->add_option("--scenario", analyze_path)->required();

    RunArgs ra;
    auto* run_cmd = app.add_subcommand("run", "Run one experiment");
    run_cmd->add_option("--scenario", ra.scenario)->required();
    run_cmd->add_option("--mode", ra.mode, "dpc | genai_alone | genainet")->capture_default_str();
    run_cmd->add_option("--backend", ra.backend, "scripted | remote")->capture_default_str();
    run_cmd->add_option("--rounds", ra.rounds)->capture_default_str();
    run_cmd->add_option("--seed", ra.seed)->capture_default_str();
    run_cmd->add_option("--out", ra.out)->capture_default_str();
    run_cmd->add_option("--reprompts", ra.reprompts, "Extra calls when a reply does not parse")->capture_default_str();
    run_cmd->add_flag("--early-stop", ra.early_stop, "Stop once every rate is on target");
    ra.remote.add(run_cmd);

    SweepArgs sa;
    auto* sweep_cmd = app.add_subcommand("sweep", "All modes over divergent batches");
    sweep_cmd->add_option("--users", sa.users, "Comma-separated pair counts")->capture_default_str();
    sweep_cmd->add_option("--per", sa.per, "Scenarios per pair count")->capture_default_str();
    sweep_cmd->add_option("--modes", sa.modes, "'all' or a comma-separated list")->capture_default_str();
    sweep_cmd->add_option("--backend", sa.backend)->capture_default_str();
    sweep_cmd->add_option("--seed", sa.seed)->capture_default_str();
    sweep_cmd->add_option("--rounds", sa.rounds)->capture_default_str();
    sweep_cmd->add_option("--jobs", sa.jobs, "Worker threads (0 = OpenMP default)")->capture_default_str();
    sweep_cmd->add_option("--out", sa.out)->capture_default_str();
    sa.remote.add(sweep_cmd);

    std::string logs_dir, report_out;
    auto* report_cmd = app.add_subcommand("report", "Regenerate summaries from run logs");
    report_cmd->add_option("--logs", logs_dir)->required();
    report_cmd->add_option("--out", report_out, "Defaults to --logs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*gen_cmd) return cmd_scenario_gen(gen);
        if (*analyze_cmd) return cmd_analyze(analyze_path);
        if (*run_cmd) return cmd_run(ra);
        if (*sweep_cmd) return cmd_sweep(sa);
        if (*report_cmd) return cmd_report(logs_dir, report_out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidScenario& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
