#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "pcsim/agent.hpp"
#include "pcsim/parallel.hpp"
#include "pcsim/report.hpp"
#include "pcsim/runlog.hpp"
#include "pcsim/transcript.hpp"

namespace pcsim {

struct RunOptions {
    /// Backend for agent modes; a ScriptedBackend is used when null.
    DecisionBackend* backend = nullptr;
    /// Receives one record per agent-round (prompt hash, raw response, parse).
    std::shared_ptr<TranscriptSink> transcript;
    /// Order in which agents are asked within a round (0-based indices).
    /// Empty means 0..N-1. Results must not depend on it.
    std::vector<std::size_t> agent_order;
    /// Issue the backend calls of one round concurrently.
    bool concurrent_decisions = false;
};

/// Seed of the decision made by `user_id` in `round` of a run seeded with `run_seed`.
std::uint64_t policy_seed(std::uint64_t run_seed, int user_id, int round);

/// Hex FNV-1a digest of a prompt, as written to transcripts.
std::string prompt_hash(const Prompt& prompt);

/// Round loop: observe, decide simultaneously, parse, route, remember, apply.
/// Backend failures hold the agent's power for that round and are counted.
RunLog run(const RunConfig& config, const Scenario& scenario, const RunOptions& options = {});

struct ScenarioBatch {
    std::vector<Scenario> scenarios;
    std::size_t draws = 0;
    double acceptance_rate() const {
        return draws ? static_cast<double>(scenarios.size()) / static_cast<double>(draws) : 0.0;
    }
};

/// Seed of the k-th scenario drawn for `n_pairs` from root `seed`.
std::uint64_t scenario_seed(std::uint64_t seed, std::size_t n_pairs, std::size_t draw);

/// The first `count` draws, unfiltered.
ScenarioBatch generate_batch(std::size_t n_pairs, std::size_t count, std::uint64_t seed,
                             const GenerationConfig& config = {});

/// Draws scenarios in sequence and keeps the DPC-infeasible ones until
/// `count` are collected. Throws FilterExhausted after 1000 * count draws.
ScenarioBatch generate_divergent_batch(std::size_t n_pairs, std::size_t count, std::uint64_t seed,
                                       const GenerationConfig& config = {});

struct SweepConfig {
    std::vector<std::size_t> user_counts{2, 4, 10};
    std::size_t scenarios_per_count = 25;
    std::vector<Mode> modes{Mode::dpc, Mode::genai_alone, Mode::genainet};
    BackendKind backend = BackendKind::scripted;
    std::uint64_t seed = 0;
    int rounds = 10;
    GenerationConfig generation;
    Execution execution = Execution::parallel;
    /// Required when backend is remote.
    DecisionBackend* remote = nullptr;
};

struct BatchStats {
    std::size_t n_pairs = 0;
    std::size_t accepted = 0;
    std::size_t draws = 0;
};

struct SweepResult {
    std::vector<SummaryRow> rows;
    /// Ordered by (N, mode, scenario index).
    std::vector<RunLog> runs;
    std::vector<BatchStats> batches;
};

/// Runs every mode on the same divergent batch for each N.
SweepResult sweep(const SweepConfig& config);

}  // namespace pcsim
