#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcsim/agent.hpp"
#include "pcsim/radio_env.hpp"

namespace pcsim {

/// The three compared systems.
enum class Mode { dpc, genai_alone, genainet };

enum class BackendKind { scripted, remote };

std::string_view to_string(Mode mode);
std::string_view to_string(BackendKind kind);
/// Throws std::invalid_argument on unknown names.
Mode parse_mode(std::string_view name);
BackendKind parse_backend(std::string_view name);

inline constexpr Mode kAllModes[] = {Mode::dpc, Mode::genai_alone, Mode::genainet};

struct RunConfig {
    Mode mode = Mode::dpc;
    int rounds = 10;
    /// Ignored in dpc mode.
    BackendKind backend = BackendKind::scripted;
    std::uint64_t seed = 0;
    /// Free-form scenario identifier echoed into logs (file name, batch slot).
    std::string scenario_ref;
    bool early_stop_on_target = false;
    /// Relative rate tolerance for early stop.
    double early_stop_tolerance = 1e-3;
    /// Extra backend calls when a response does not parse.
    int reprompts = 0;

    bool operator==(const RunConfig&) const = default;
};

/// State after the decisions of one round have been applied.
struct RoundRecord {
    int round = 0;
    PowerVector powers;
    LinkMetrics metrics;
    /// One per agent, empty in dpc mode.
    std::vector<ActionRecord> actions;
    std::size_t emitted = 0;
    std::size_t delivered = 0;
    std::size_t dropped = 0;

    bool operator==(const RoundRecord&) const = default;
};

struct RunDiagnostics {
    std::size_t emitted = 0;
    std::size_t delivered = 0;
    std::size_t dropped = 0;
    std::size_t backend_errors = 0;
    std::size_t parse_failures = 0;

    bool operator==(const RunDiagnostics&) const = default;
};

struct RunLog {
    RunConfig config;
    Scenario scenario;
    /// Position of the scenario within its batch; used for report ordering.
    std::size_t scenario_index = 0;
    LinkMetrics initial_metrics;
    std::vector<RoundRecord> rounds;
    RunDiagnostics diagnostics;
    /// False when a remote backend produced the decisions.
    bool deterministic = true;

    const RoundRecord& final_round() const { return rounds.back(); }
    bool operator==(const RunLog&) const = default;
};

}  // namespace pcsim
