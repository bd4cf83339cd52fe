#include "pcsim/io.hpp"

#include <fstream>
#include <sstream>

#include "pcsim/errors.hpp"
#include "pcsim/report.hpp"

namespace pcsim {

using nlohmann::json;

namespace {

template <class T>
T field(const json& doc, const char* key) {
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad or missing field '") + key + "': " + e.what());
    }
}

json action_json(const ActionRecord& a) {
    json props = json::array();
    for (const auto& p : a.proposals)
        props.push_back({{"from_user", p.from_user}, {"to_user", p.to_user}, {"body", p.body}, {"round_sent", p.round_sent}});
    return {{"power_w", a.power_w},
            {"proposals", props},
            {"explanation", a.explanation},
            {"raw_response", a.raw_response},
            {"parse_ok", a.parse_ok}};
}

ActionRecord action_from_json(const json& doc) {
    ActionRecord a;
    a.power_w = field<double>(doc, "power_w");
    for (const auto& p : doc.at("proposals")) {
        Proposal prop;
        prop.from_user = field<int>(p, "from_user");
        prop.to_user = field<int>(p, "to_user");
        prop.body = field<std::string>(p, "body");
        prop.round_sent = field<int>(p, "round_sent");
        a.proposals.push_back(std::move(prop));
    }
    a.explanation = field<std::string>(doc, "explanation");
    a.raw_response = field<std::string>(doc, "raw_response");
    a.parse_ok = field<bool>(doc, "parse_ok");
    return a;
}

LinkMetrics metrics_from_json(const json& doc) {
    LinkMetrics m;
    m.sinr = field<std::vector<double>>(doc, "sinr");
    m.rate_kbps = field<std::vector<double>>(doc, "rate_kbps");
    return m;
}

}  // namespace

json to_json(const Scenario& s) {
    json positions = json::array();
    for (const auto& p : s.positions) positions.push_back({p.x_m, p.y_m});
    return {{"schema_version", kSchemaVersion},
            {"n_pairs", s.n_pairs},
            {"gains", s.gains},
            {"positions", positions},
            {"area_side_m", s.area_side_m},
            {"p_init", s.p_init.watts},
            {"p_max", s.p_max_w},
            {"bandwidth_khz", s.bandwidth_khz},
            {"mu", s.mu},
            {"targets_kbps", s.targets_kbps},
            {"seed", s.seed}};
}

Scenario scenario_from_json(const json& doc) {
    const int version = field<int>(doc, "schema_version");
    if (version != kSchemaVersion) throw FormatError("unsupported scenario schema_version " + std::to_string(version));
    Scenario s;
    s.n_pairs = field<std::size_t>(doc, "n_pairs");
    s.gains = field<std::vector<double>>(doc, "gains");
    for (const auto& p : doc.at("positions")) {
        if (!p.is_array() || p.size() != 2) throw FormatError("positions must be [x, y] pairs");
        s.positions.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    s.area_side_m = field<double>(doc, "area_side_m");
    s.p_init.watts = field<std::vector<double>>(doc, "p_init");
    s.p_max_w = field<double>(doc, "p_max");
    s.bandwidth_khz = field<double>(doc, "bandwidth_khz");
    s.mu = field<std::vector<double>>(doc, "mu");
    s.targets_kbps = field<std::vector<double>>(doc, "targets_kbps");
    s.seed = field<std::uint64_t>(doc, "seed");
    validate(s);
    return s;
}

json to_json(const FeasibilityReport& r) {
    return {{"target_sinr", r.target_sinr},
            {"spectral_radius", r.spectral_radius},
            {"fixed_point", r.fixed_point ? json(r.fixed_point->watts) : json()},
            {"feasible", r.feasible},
            {"iterations", r.iterations}};
}

json to_json(const LinkMetrics& m) { return {{"sinr", m.sinr}, {"rate_kbps", m.rate_kbps}}; }

json to_json(const RunConfig& c) {
    return {{"mode", to_string(c.mode)},
            {"rounds", c.rounds},
            {"backend", to_string(c.backend)},
            {"seed", c.seed},
            {"scenario_ref", c.scenario_ref},
            {"early_stop_on_target", c.early_stop_on_target},
            {"early_stop_tolerance", c.early_stop_tolerance},
            {"reprompts", c.reprompts}};
}

RunConfig run_config_from_json(const json& doc) {
    RunConfig c;
    try {
        c.mode = parse_mode(field<std::string>(doc, "mode"));
        c.backend = parse_backend(field<std::string>(doc, "backend"));
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
    c.rounds = field<int>(doc, "rounds");
    c.seed = field<std::uint64_t>(doc, "seed");
    c.scenario_ref = field<std::string>(doc, "scenario_ref");
    c.early_stop_on_target = field<bool>(doc, "early_stop_on_target");
    c.early_stop_tolerance = field<double>(doc, "early_stop_tolerance");
    c.reprompts = field<int>(doc, "reprompts");
    return c;
}

json scenario_document(const Scenario& s) {
    json doc = to_json(s);
    doc["feasibility"] = to_json(analyze_feasibility(s));
    return doc;
}

json to_json(const RoundRecord& r) {
    json actions = json::array();
    for (const auto& a : r.actions) actions.push_back(action_json(a));
    return {{"round", r.round},
            {"powers", r.powers.watts},
            {"sinr", r.metrics.sinr},
            {"rate_kbps", r.metrics.rate_kbps},
            {"emitted", r.emitted},
            {"delivered", r.delivered},
            {"dropped", r.dropped},
            {"actions", actions}};
}

RoundRecord round_from_json(const json& doc) {
    RoundRecord r;
    r.round = field<int>(doc, "round");
    r.powers.watts = field<std::vector<double>>(doc, "powers");
    r.metrics = metrics_from_json(doc);
    r.emitted = field<std::size_t>(doc, "emitted");
    r.delivered = field<std::size_t>(doc, "delivered");
    r.dropped = field<std::size_t>(doc, "dropped");
    for (const auto& a : doc.at("actions")) r.actions.push_back(action_from_json(a));
    return r;
}

json run_summary_document(const RunLog& run) {
    const RunSummary s = summarize(run);
    const auto& d = run.diagnostics;
    return {{"schema_version", kSchemaVersion},
            {"config", to_json(run.config)},
            {"scenario_index", run.scenario_index},
            {"deterministic", run.deterministic},
            {"scenario", to_json(run.scenario)},
            {"initial_metrics", to_json(run.initial_metrics)},
            {"diagnostics",
             {{"emitted", d.emitted},
              {"delivered", d.delivered},
              {"dropped", d.dropped},
              {"backend_errors", d.backend_errors},
              {"parse_failures", d.parse_failures}}},
            {"summary",
             {{"rate_gap_kbps", s.rate_gap_kbps},
              {"total_power_w", s.total_power_w},
              {"msgs_per_tx", s.msgs_per_tx ? json(*s.msgs_per_tx) : json()}}}};
}

void write_run(const std::filesystem::path& dir, const RunLog& run) {
    std::filesystem::create_directories(dir);
    std::string lines;
    for (const auto& r : run.rounds) lines += to_json(r).dump() + "\n";
    write_file_atomic(dir / kRoundsFile, lines);
    write_file_atomic(dir / kTrajectoryFile, trajectory_csv(emit_trajectories(run)));
    write_file_atomic(dir / kRunSummaryFile, run_summary_document(run).dump(2) + "\n");
}

RunLog read_run(const std::filesystem::path& dir) {
    const json doc = json::parse(read_file(dir / kRunSummaryFile), nullptr, false);
    if (doc.is_discarded()) throw FormatError("unparseable " + (dir / kRunSummaryFile).string());
    RunLog run;
    run.config = run_config_from_json(doc.at("config"));
    run.scenario_index = field<std::size_t>(doc, "scenario_index");
    run.deterministic = field<bool>(doc, "deterministic");
    run.scenario = scenario_from_json(doc.at("scenario"));
    run.initial_metrics = metrics_from_json(doc.at("initial_metrics"));
    const json& d = doc.at("diagnostics");
    run.diagnostics.emitted = field<std::size_t>(d, "emitted");
    run.diagnostics.delivered = field<std::size_t>(d, "delivered");
    run.diagnostics.dropped = field<std::size_t>(d, "dropped");
    run.diagnostics.backend_errors = field<std::size_t>(d, "backend_errors");
    run.diagnostics.parse_failures = field<std::size_t>(d, "parse_failures");

    std::istringstream rounds(read_file(dir / kRoundsFile));
    for (std::string line; std::getline(rounds, line);) {
        if (line.empty()) continue;
        const json r = json::parse(line, nullptr, false);
        if (r.is_discarded()) throw FormatError("unparseable line in " + (dir / kRoundsFile).string());
        run.rounds.push_back(round_from_json(r));
    }
    if (run.rounds.empty()) throw FormatError("run log without rounds: " + dir.string());
    return run;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Scenario load_scenario(const std::filesystem::path& path) {
    const json doc = json::parse(read_file(path), nullptr, false);
    if (doc.is_discarded()) throw FormatError("not a JSON document: " + path.string());
    return scenario_from_json(doc);
}

}  // namespace pcsim
