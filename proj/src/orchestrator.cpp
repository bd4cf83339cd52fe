#include "pcsim/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <numeric>
#include <string>
#include <tuple>

#include "pcsim/dpc.hpp"
#include "pcsim/errors.hpp"
#include "pcsim/rng.hpp"

namespace pcsim {
namespace {

nlohmann::json action_to_json(const ActionRecord& a) {
    nlohmann::json props = nlohmann::json::array();
    for (const auto& p : a.proposals) props.push_back({{"to", p.to_user}, {"body", p.body}});
    return {{"power_w", a.power_w}, {"proposals", props}, {"explanation", a.explanation}, {"parse_ok", a.parse_ok}};
}

bool targets_met(const Scenario& s, const LinkMetrics& m, double tol) {
    for (std::size_t i = 0; i < s.n_pairs; ++i)
        if (std::abs(s.targets_kbps[i] - m.rate_kbps[i]) > tol * std::max(s.targets_kbps[i], 1e-12)) return false;
    return true;
}

struct Decision {
    ActionRecord record;
    std::string prompt_hash;
    std::string error;
};

}  // namespace

std::uint64_t policy_seed(std::uint64_t run_seed, int user_id, int round) {
    return derive_seed(run_seed, "policy", {static_cast<std::uint64_t>(user_id), static_cast<std::uint64_t>(round)});
}

std::string prompt_hash(const Prompt& prompt) {
    std::uint64_t h = fnv1a64(prompt.system_text);
    h = mix64(h ^ fnv1a64(prompt.user_text));
    h = mix64(h ^ fnv1a64(prompt.memory_text));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunLog run(const RunConfig& config, const Scenario& scenario, const RunOptions& options) {
    validate(scenario);
    if (config.rounds < 1) throw InvalidScenario("rounds must be at least 1");

    if (config.mode == Mode::dpc) {
        RunLog log = run_dpc(scenario, config.rounds);
        log.config = config;
        return log;
    }

    ScriptedBackend fallback;
    DecisionBackend& backend = options.backend ? *options.backend : fallback;
    const CoopMode coop = config.mode == Mode::genainet ? CoopMode::cooperative : CoopMode::standalone;
    const std::size_t n = scenario.n_pairs;

    std::vector<std::size_t> order = options.agent_order;
    if (order.empty()) {
        order.resize(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
    }
    {
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n; ++i)
            if (sorted.size() != n || sorted[i] != i) throw InvalidScenario("agent_order must be a permutation of 0..N-1");
    }

    RunLog log;
    log.config = config;
    log.scenario = scenario;
    log.deterministic = backend.deterministic();
    log.initial_metrics = compute_metrics(scenario, scenario.p_init);

    std::vector<AgentState> agents(n);
    for (std::size_t i = 0; i < n; ++i) {
        agents[i].user_id = static_cast<int>(i) + 1;
        agents[i].last_power_w = scenario.p_init[i];
    }

    LinkMetrics observed = log.initial_metrics;
    for (int round = 1; round <= config.rounds; ++round) {
        // Every agent decides against the same round-start observation.
        auto decide = [&](std::size_t i) {
            Decision d;
            const AgentState& agent = agents[i];
            DecisionRequest req;
            req.prompt = render_prompt(scenario, agent, coop, observed.rate_kbps[i], round);
            req.input.user_id = agent.user_id;
            req.input.n_users = n;
            req.input.round = round;
            req.input.power_w = agent.last_power_w;
            req.input.rate_kbps = observed.rate_kbps[i];
            req.input.target_kbps = scenario.targets_kbps[i];
            req.input.bandwidth_khz = scenario.bandwidth_khz;
            req.input.p_max_w = scenario.p_max_w;
            req.input.mode = coop;
            req.input.inbox = agent.inbox;
            req.input.seed = policy_seed(config.seed, agent.user_id, round);
            d.prompt_hash = prompt_hash(req.prompt);

            for (int attempt = 0; attempt <= config.reprompts; ++attempt) {
                std::string raw;
                try {
                    raw = backend.decide(req);
                } catch (const std::exception& e) {
                    d.error = e.what();
                    d.record = parse_response("", scenario.p_max_w, agent.last_power_w, agent.user_id);
                    break;
                }
                d.record = parse_response(raw, scenario.p_max_w, agent.last_power_w, agent.user_id);
                if (d.record.parse_ok) break;
            }
            // Standalone agents have no channel to send on.
            if (coop == CoopMode::standalone) d.record.proposals.clear();
            return d;
        };

        std::vector<Decision> decisions(n);
        if (options.concurrent_decisions) {
            std::vector<std::future<Decision>> pending(n);
            for (std::size_t i : order) pending[i] = std::async(std::launch::async, decide, i);
            for (std::size_t i : order) decisions[i] = pending[i].get();
        } else {
            for (std::size_t i : order) decisions[i] = decide(i);
        }

        std::vector<ActionRecord> records(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Decision& d = decisions[i];
            if (!d.error.empty()) ++log.diagnostics.backend_errors;
            else if (!d.record.parse_ok) ++log.diagnostics.parse_failures;
            if (options.transcript) {
                nlohmann::json rec{{"scenario_ref", config.scenario_ref},
                                   {"mode", to_string(config.mode)},
                                   {"round", round},
                                   {"user", static_cast<int>(i) + 1},
                                   {"prompt_hash", d.prompt_hash},
                                   {"raw_response", d.record.raw_response},
                                   {"parsed", action_to_json(d.record)}};
                if (!d.error.empty()) rec["error"] = d.error;
                options.transcript->append(rec);
            }
            records[i] = d.record;
        }

        RoundRecord rr;
        rr.round = round;
        RoutingResult routed;
        if (coop == CoopMode::cooperative) {
            routed = route_proposals(records, round, n);
            rr.emitted = routed.emitted;
            rr.delivered = routed.delivered;
            rr.dropped = routed.dropped;
            // Routing stamps sender and round onto the stored proposals too.
            for (std::size_t i = 0; i < n; ++i)
                for (auto& p : records[i].proposals) {
                    p.from_user = static_cast<int>(i) + 1;
                    p.round_sent = round;
                }
        }

        rr.powers.watts.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            agents[i] = apply_round(std::move(agents[i]), records[i], observed.rate_kbps[i], round, coop);
            if (coop == CoopMode::cooperative) agents[i].inbox = std::move(routed.inboxes[i]);
            rr.powers[i] = records[i].power_w;
        }
        rr.metrics = compute_metrics(scenario, rr.powers);
        rr.actions = std::move(records);

        log.diagnostics.emitted += rr.emitted;
        log.diagnostics.delivered += rr.delivered;
        log.diagnostics.dropped += rr.dropped;
        observed = rr.metrics;
        log.rounds.push_back(std::move(rr));

        if (config.early_stop_on_target && targets_met(scenario, observed, config.early_stop_tolerance)) break;
    }
    return log;
}

std::uint64_t scenario_seed(std::uint64_t seed, std::size_t n_pairs, std::size_t draw) {
    return derive_seed(seed, "scenario", {static_cast<std::uint64_t>(n_pairs), static_cast<std::uint64_t>(draw)});
}

ScenarioBatch generate_batch(std::size_t n_pairs, std::size_t count, std::uint64_t seed,
                             const GenerationConfig& config) {
    ScenarioBatch batch;
    batch.scenarios.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
        batch.scenarios.push_back(generate_scenario(scenario_seed(seed, n_pairs, k), n_pairs, config));
    batch.draws = count;
    return batch;
}

ScenarioBatch generate_divergent_batch(std::size_t n_pairs, std::size_t count, std::uint64_t seed,
                                       const GenerationConfig& config) {
    if (count == 0) throw InvalidScenario("count must be at least 1");
    ScenarioBatch batch;
    const std::size_t limit = 1000 * count;
    while (batch.scenarios.size() < count) {
        if (batch.draws >= limit)
            throw FilterExhausted("only " + std::to_string(batch.scenarios.size()) + " of " + std::to_string(count) +
                                  " divergent scenarios found in " + std::to_string(limit) + " draws (N=" +
                                  std::to_string(n_pairs) + ")");
        Scenario s = generate_scenario(scenario_seed(seed, n_pairs, batch.draws), n_pairs, config);
        ++batch.draws;
        try {
            if (!analyze_feasibility(s).feasible) batch.scenarios.push_back(std::move(s));
        } catch (const DegenerateLink&) {
            // A zero direct gain cannot be fed to DPC at all; skip the draw.
        }
    }
    return batch;
}

SweepResult sweep(const SweepConfig& config) {
    if (config.user_counts.empty() || config.modes.empty() || config.scenarios_per_count == 0)
        throw InvalidScenario("sweep needs at least one user count, mode and scenario");
    if (config.backend == BackendKind::remote && !config.remote)
        throw InvalidScenario("remote sweeps need a remote backend");

    struct Task {
        const Scenario* scenario;
        std::size_t index;
        Mode mode;
    };

    SweepResult result;
    std::vector<std::vector<Scenario>> batches;
    for (std::size_t n : config.user_counts) {
        const auto seed_for_n = derive_seed(config.seed, "batch", {static_cast<std::uint64_t>(n)});
        ScenarioBatch b = generate_divergent_batch(n, config.scenarios_per_count, seed_for_n, config.generation);
        result.batches.push_back({n, b.scenarios.size(), b.draws});
        batches.push_back(std::move(b.scenarios));
    }

    std::vector<Task> tasks;
    for (const auto& batch : batches)
        for (Mode mode : config.modes)
            for (std::size_t k = 0; k < batch.size(); ++k) tasks.push_back({&batch[k], k, mode});
    std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) {
        return std::tuple(a.scenario->n_pairs, static_cast<int>(a.mode), a.index) <
               std::tuple(b.scenario->n_pairs, static_cast<int>(b.mode), b.index);
    });

    result.runs.resize(tasks.size());
    std::vector<std::string> errors(tasks.size());
    auto body = [&](std::size_t t) {
        const Task& task = tasks[t];
        RunConfig rc;
        rc.mode = task.mode;
        rc.rounds = config.rounds;
        rc.backend = config.backend;
        rc.seed = derive_seed(config.seed, "policy-run",
                              {static_cast<std::uint64_t>(task.scenario->n_pairs), static_cast<std::uint64_t>(task.index),
                               static_cast<std::uint64_t>(task.mode)});
        rc.scenario_ref = "n" + std::to_string(task.scenario->n_pairs) + "/s" + std::to_string(task.index);
        RunOptions opts;
        opts.backend = config.backend == BackendKind::remote ? config.remote : nullptr;
        try {
            result.runs[t] = run(rc, *task.scenario, opts);
            result.runs[t].scenario_index = task.index;
        } catch (const std::exception& e) {
            errors[t] = e.what();
        }
    };

    const auto count = static_cast<std::ptrdiff_t>(tasks.size());
    if (config.execution == Execution::serial) {
        for (std::ptrdiff_t t = 0; t < count; ++t) body(static_cast<std::size_t>(t));
    } else {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t t = 0; t < count; ++t) body(static_cast<std::size_t>(t));
    }
    for (const auto& e : errors)
        if (!e.empty()) throw Error("sweep run failed: " + e);

    std::vector<RunSummary> summaries;
    summaries.reserve(result.runs.size());
    for (const auto& r : result.runs) summaries.push_back(summarize(r));
    result.rows = aggregate(std::move(summaries));
    return result;
}

}  // namespace pcsim
