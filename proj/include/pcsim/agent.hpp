#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcsim/radio_env.hpp"

namespace pcsim {

/// Standalone agents only see their own memory; cooperative agents also send
/// and receive proposals.
enum class CoopMode { standalone, cooperative };

/// A unicast cooperation message, rendered as "To User <to>: <body>".
/// User ids are 1-based.
struct Proposal {
    int from_user = 0;
    int to_user = 0;
    std::string body;
    int round_sent = 0;

    std::string text() const;
    bool operator==(const Proposal&) const = default;
};

struct MemoryEntry {
    int user_id = 0;
    int round = 0;
    double observation_rate_kbps = 0.0;
    double action_power_w = 0.0;
    std::optional<std::string> message;
    std::string explanation;

    bool operator==(const MemoryEntry&) const = default;
};

/// "{user:2, round:3, observation:7.250, action:3.500, message:..., explanation:...}".
/// The message key is present only when the entry carries one.
std::string serialize(const MemoryEntry& entry);

/// What an agent did in one round, after parsing and clamping.
struct ActionRecord {
    double power_w = 0.0;
    std::vector<Proposal> proposals;
    std::string explanation;
    std::string raw_response;
    bool parse_ok = false;

    bool operator==(const ActionRecord&) const = default;
};

struct AgentState {
    int user_id = 0;
    std::vector<MemoryEntry> memory;
    /// Proposals sent to this agent in the previous round.
    std::vector<Proposal> inbox;
    double last_power_w = 0.0;

    bool operator==(const AgentState&) const = default;
};

struct Prompt {
    std::string system_text;
    std::string user_text;
    /// Serialized memory stream; empty before the first round completes.
    std::string memory_text;
};

/// Fixed three-decimal rendering used for every number shown to an agent.
std::string fmt3(double value);

Prompt render_prompt(const Scenario& scenario, const AgentState& agent, CoopMode mode,
                     double current_rate_kbps, int round);

/// Tolerant extraction of power, proposals and explanation from free text.
/// Never throws: an unparseable response yields parse_ok = false and holds
/// `previous_power_w`.
ActionRecord parse_response(std::string_view raw, double p_max_w, double previous_power_w,
                            int from_user = 0);

/// Everything the planning step may look at for one agent-round.
struct DecisionInput {
    int user_id = 0;
    std::size_t n_users = 0;
    int round = 0;
    double power_w = 0.0;
    double rate_kbps = 0.0;
    double target_kbps = 0.0;
    double bandwidth_khz = 0.0;
    double p_max_w = 0.0;
    CoopMode mode = CoopMode::standalone;
    std::vector<Proposal> inbox;
    std::uint64_t seed = 0;
};

/// Constants of the deterministic stand-in policy.
struct ScriptedPolicy {
    double alpha = 0.5;
    double propose_deficit = 0.25;
    double accept_deficit = 0.10;
};

struct ScriptedDecision {
    double power_w = 0.0;
    std::optional<int> propose_to;
    std::string proposal_body;
    std::string explanation;
};

inline constexpr std::string_view kScriptedProposalBody = "hold or reduce your power next round";

/// Damped multiplicative step toward the target SINR, plus the
/// propose/accept/reject rules in cooperative mode.
ScriptedDecision scripted_policy(const DecisionInput& input, const ScriptedPolicy& policy = {});

/// Renders a decision in the agent output format. Power is written in
/// shortest round-trip form so parsing recovers it exactly.
std::string render_response(const ScriptedDecision& decision, CoopMode mode);

/// scripted_policy followed by render_response.
std::string scripted_decide(const DecisionInput& input, const ScriptedPolicy& policy = {});

/// Appends this round's memory entry and clears the inbox.
/// Throws ProtocolViolation if `round` does not follow the last entry.
AgentState apply_round(AgentState agent, const ActionRecord& record, double observed_rate_kbps,
                       int round, CoopMode mode = CoopMode::standalone);

struct RoutingResult {
    /// inboxes[i] is the next-round inbox of user i + 1.
    std::vector<std::vector<Proposal>> inboxes;
    std::size_t emitted = 0;
    std::size_t delivered = 0;
    std::size_t dropped = 0;
};

/// Delivers each proposal in `records` (records[i] belongs to user i + 1) to
/// its recipient. Self-addressed and out-of-range proposals are dropped.
RoutingResult route_proposals(const std::vector<ActionRecord>& records, int round,
                              std::size_t n_users);

struct DecisionRequest {
    Prompt prompt;
    DecisionInput input;
};

/// The planning component: turns a prompt into raw response text.
class DecisionBackend {
public:
    virtual ~DecisionBackend() = default;
    virtual std::string decide(const DecisionRequest& request) = 0;
    /// True when decide() is a pure function of the request.
    virtual bool deterministic() const = 0;
    virtual std::string_view name() const = 0;
};

class ScriptedBackend final : public DecisionBackend {
public:
    explicit ScriptedBackend(ScriptedPolicy policy = {}) : policy_(policy) {}

    std::string decide(const DecisionRequest& request) override {
        return scripted_decide(request.input, policy_);
    }
    bool deterministic() const override { return true; }
    std::string_view name() const override { return "scripted"; }

private:
    ScriptedPolicy policy_;
};

}  // namespace pcsim
