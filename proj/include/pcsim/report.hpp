#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcsim/runlog.hpp"

namespace pcsim {

/// Mean over pairs of |target - achieved|, in kbps. Throws DimensionError
/// on length mismatch.
double rate_gap(std::span<const double> targets_kbps, std::span<const double> rates_kbps);

double total_power(std::span<const double> powers_w);

/// Proposals emitted over the whole run divided by the number of
/// transmitters. Only meaningful for cooperative runs; throws
/// std::invalid_argument otherwise.
double msgs_per_tx(const RunLog& run);

/// Final-round metrics of one run.
struct RunSummary {
    std::size_t n_pairs = 0;
    Mode mode = Mode::dpc;
    std::size_t scenario_index = 0;
    std::uint64_t seed = 0;
    std::uint64_t scenario_seed = 0;
    double rate_gap_kbps = 0.0;
    double total_power_w = 0.0;
    /// Absent for non-cooperative modes.
    std::optional<double> msgs_per_tx;
};

RunSummary summarize(const RunLog& run);

/// One row of the comparison table: batch means for one (N, mode).
struct SummaryRow {
    std::size_t n_pairs = 0;
    Mode mode = Mode::dpc;
    double rate_gap_kbps = 0.0;
    double total_power_w = 0.0;
    std::optional<double> msgs_per_tx;
    std::size_t runs = 0;
};

/// Groups by (N, mode) and averages. Input order does not matter: runs are
/// folded in (N, mode, scenario index) order.
std::vector<SummaryRow> aggregate(std::vector<RunSummary> runs);

struct TrajectoryRow {
    int round = 0;
    double rate_gap_kbps = 0.0;
    double total_power_w = 0.0;
};

std::vector<TrajectoryRow> emit_trajectories(const RunLog& run);

inline constexpr const char* kTrajectoryHeader = "round,rate_gap_kbps,total_power_w";
inline constexpr const char* kSummaryHeader = "n,mode,rate_gap_kbps,total_power_w,msgs_per_tx";

std::string trajectory_csv(std::span<const TrajectoryRow> rows);
/// msgs_per_tx is left empty for non-cooperative modes.
std::string summary_csv(std::span<const SummaryRow> rows);

/// JSON mirror of the summary table, plus per-run provenance (seeds).
nlohmann::json summary_json(std::span<const SummaryRow> rows, std::vector<RunSummary> runs);

/// Reference values from the published comparison table. Informational only.
struct ReferenceRow {
    std::size_t n_pairs;
    Mode mode;
    double rate_gap_kbps;
    double total_power_w;
    std::optional<double> msgs_per_tx;
};
std::span<const ReferenceRow> reference_table();

}  // namespace pcsim
