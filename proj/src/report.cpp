#include "pcsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "pcsim/errors.hpp"

namespace pcsim {
namespace {

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

auto order_key(const RunSummary& r) { return std::tuple(r.n_pairs, static_cast<int>(r.mode), r.scenario_index); }

constexpr ReferenceRow kReference[] = {
    {2, Mode::dpc, 1.747, 16.536, std::nullopt},
    {2, Mode::genai_alone, 1.625, 8.842, std::nullopt},
    {2, Mode::genainet, 1.397, 10.700, 3.72},
    {4, Mode::dpc, 2.086, 28.254, std::nullopt},
    {4, Mode::genai_alone, 1.967, 17.156, std::nullopt},
    {4, Mode::genainet, 1.736, 15.974, 5.00},
    {10, Mode::dpc, 2.433, 76.785, std::nullopt},
    {10, Mode::genai_alone, 2.403, 34.696, std::nullopt},
    {10, Mode::genainet, 2.249, 30.622, 3.80},
};

}  // namespace

double rate_gap(std::span<const double> targets, std::span<const double> rates) {
    if (targets.size() != rates.size()) throw DimensionError("targets and rates differ in length");
    if (targets.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) sum += std::abs(targets[i] - rates[i]);
    return sum / static_cast<double>(targets.size());
}

double total_power(std::span<const double> powers) { return std::accumulate(powers.begin(), powers.end(), 0.0); }

double msgs_per_tx(const RunLog& run) {
    if (run.config.mode != Mode::genainet) throw std::invalid_argument("messages are only counted for genainet runs");
    return static_cast<double>(run.diagnostics.emitted) / static_cast<double>(run.scenario.n_pairs);
}

RunSummary summarize(const RunLog& run) {
    if (run.rounds.empty()) throw FormatError("run log has no rounds");
    RunSummary s;
    s.n_pairs = run.scenario.n_pairs;
    s.mode = run.config.mode;
    s.scenario_index = run.scenario_index;
    s.seed = run.config.seed;
    s.scenario_seed = run.scenario.seed;
    const auto& last = run.final_round();
    s.rate_gap_kbps = rate_gap(run.scenario.targets_kbps, last.metrics.rate_kbps);
    s.total_power_w = total_power(last.powers.watts);
    if (run.config.mode == Mode::genainet) s.msgs_per_tx = msgs_per_tx(run);
    return s;
}

std::vector<SummaryRow> aggregate(std::vector<RunSummary> runs) {
    std::sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) { return order_key(a) < order_key(b); });
    std::vector<SummaryRow> rows;
    for (std::size_t k = 0; k < runs.size();) {
        std::size_t end = k;
        SummaryRow row;
        row.n_pairs = runs[k].n_pairs;
        row.mode = runs[k].mode;
        double gap = 0.0, power = 0.0, msgs = 0.0;
        bool has_msgs = false;
        for (; end < runs.size() && runs[end].n_pairs == row.n_pairs && runs[end].mode == row.mode; ++end) {
            gap += runs[end].rate_gap_kbps;
            power += runs[end].total_power_w;
            if (runs[end].msgs_per_tx) {
                msgs += *runs[end].msgs_per_tx;
                has_msgs = true;
            }
        }
        row.runs = end - k;
        const double count = static_cast<double>(row.runs);
        row.rate_gap_kbps = gap / count;
        row.total_power_w = power / count;
        if (has_msgs) row.msgs_per_tx = msgs / count;
        rows.push_back(row);
        k = end;
    }
    return rows;
}

std::vector<TrajectoryRow> emit_trajectories(const RunLog& run) {
    std::vector<TrajectoryRow> rows;
    rows.reserve(run.rounds.size());
    for (const auto& r : run.rounds)
        rows.push_back({r.round, rate_gap(run.scenario.targets_kbps, r.metrics.rate_kbps), total_power(r.powers.watts)});
    return rows;
}

std::string trajectory_csv(std::span<const TrajectoryRow> rows) {
    std::string out = std::string(kTrajectoryHeader) + "\n";
    for (const auto& r : rows)
        out += std::to_string(r.round) + "," + fmt6(r.rate_gap_kbps) + "," + fmt6(r.total_power_w) + "\n";
    return out;
}

std::string summary_csv(std::span<const SummaryRow> rows) {
    std::string out = std::string(kSummaryHeader) + "\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n_pairs) + "," + std::string(to_string(r.mode)) + "," + fmt6(r.rate_gap_kbps) + "," +
               fmt6(r.total_power_w) + "," + (r.msgs_per_tx ? fmt6(*r.msgs_per_tx) : std::string()) + "\n";
    }
    return out;
}

nlohmann::json summary_json(std::span<const SummaryRow> rows, std::vector<RunSummary> runs) {
    std::sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) { return order_key(a) < order_key(b); });
    nlohmann::json doc;
    doc["columns"] = {"n", "mode", "rate_gap_kbps", "total_power_w", "msgs_per_tx"};
    doc["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        doc["rows"].push_back({{"n", r.n_pairs},
                               {"mode", to_string(r.mode)},
                               {"rate_gap_kbps", r.rate_gap_kbps},
                               {"total_power_w", r.total_power_w},
                               {"msgs_per_tx", r.msgs_per_tx ? nlohmann::json(*r.msgs_per_tx) : nlohmann::json()},
                               {"runs", r.runs}});
    }
    doc["runs"] = nlohmann::json::array();
    for (const auto& r : runs) {
        doc["runs"].push_back({{"n", r.n_pairs},
                               {"mode", to_string(r.mode)},
                               {"scenario_index", r.scenario_index},
                               {"seed", r.seed},
                               {"scenario_seed", r.scenario_seed},
                               {"rate_gap_kbps", r.rate_gap_kbps},
                               {"total_power_w", r.total_power_w},
                               {"msgs_per_tx", r.msgs_per_tx ? nlohmann::json(*r.msgs_per_tx) : nlohmann::json()}});
    }
    return doc;
}

std::span<const ReferenceRow> reference_table() { return kReference; }

}  // namespace pcsim
