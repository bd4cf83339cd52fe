#include "pcsim/agent.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <regex>

#include "pcsim/errors.hpp"
#include "pcsim/rng.hpp"

namespace pcsim {
namespace {

std::string shortest(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::string join_targets(const std::vector<double>& targets) {
    std::string out;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (i) out += ", ";
        out += fmt3(targets[i]);
    }
    return out;
}

constexpr auto kFlags = std::regex::ECMAScript | std::regex::icase;

const std::regex& action_re() {
    static const std::regex re(
        R"re(\baction["']?\s*[:=]\s*["']?\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:e[-+]?\d+)?))re", kFlags);
    return re;
}

const std::regex& proposal_re() {
    static const std::regex re(R"re(\bto\s+user\s+(\d+)\s*:)re", kFlags);
    return re;
}

const std::regex& explanation_re() {
    static const std::regex re(R"re(\bexplanation["']?\s*[:=]\s*)re", kFlags);
    return re;
}

const std::regex& body_stop_re() {
    // Closing quote, brace, line break, sentence end, or the next key.
    static const std::regex re(
        R"re("|[{}]|\n|'\s*(?:,|\}|$)|[.!?](?:\s|$)|,?\s*\bexplanation["']?\s*[:=]|\bto\s+user\s+\d+\s*:)re",
        kFlags);
    return re;
}

}  // namespace

std::string fmt3(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", value);
    return buf;
}

std::string Proposal::text() const {
    return "To User " + std::to_string(to_user) + ": " + body;
}

std::string serialize(const MemoryEntry& e) {
    std::string out = "{user:" + std::to_string(e.user_id) + ", round:" + std::to_string(e.round) +
                      ", observation:" + fmt3(e.observation_rate_kbps) +
                      ", action:" + fmt3(e.action_power_w);
    if (e.message) out += ", message:" + *e.message;
    out += ", explanation:" + e.explanation + "}";
    return out;
}

Prompt render_prompt(const Scenario& scenario, const AgentState& agent, CoopMode mode,
                     double current_rate_kbps, int round) {
    if (round < 1) throw ProtocolViolation("round numbers start at 1");
    if (agent.user_id < 1 || static_cast<std::size_t>(agent.user_id) > scenario.n_pairs)
        throw ProtocolViolation("user id out of range");

    const std::string user_num = std::to_string(scenario.n_pairs);
    const std::string user_id = std::to_string(agent.user_id);
    const std::string bandwidth = fmt3(scenario.bandwidth_khz);
    const std::string pmax = fmt3(scenario.p_max_w);
    const std::string all_targets = join_targets(scenario.targets_kbps);
    const std::string power = fmt3(agent.last_power_w);
    const std::string rate = fmt3(current_rate_kbps);
    const std::string target = fmt3(scenario.targets_kbps[agent.user_id - 1]);

    Prompt p;
    if (mode == CoopMode::standalone) {
        p.system_text = "Consider a wireless network with " + user_num +
                        " transmitter-receiver pair sharing the same spectrum. Each user has allocated "
                        "bandwidth of " + bandwidth + " kHz. Maximum power allowed is " + pmax +
                        " W. The target rate of all Tx-Rx pairs: " + all_targets + " kbps.";
        p.user_text = "You are " + user_id + ". Your current transmission power: " + power +
                      " W. Your current transmission rate: " + rate +
                      " kbps. You should adjust your transmit power to reach the targeted rate: " +
                      target +
                      " kbps while help to minimize the total power of the network. Think step by "
                      "step, consider interference with others and your past history. Once you made "
                      "a final decision, output in the following format: "
                      "{action:power, explanation:thought}.";
    } else {
        p.system_text = "Consider a wireless network with " + user_num +
                        " paired Tx and Rx users sharing the same spectrum. Each user has allocated "
                        "bandwidth of " + bandwidth + " kHz. Maximum power allowed is " + pmax +
                        " W. The target rate of all users: " + all_targets + " kbps.";
        p.user_text =
            "You are " + user_id + ". Your current transmission power: " + power +
            " W. Your current transmission rate: " + rate +
            " kbps. You should adjust your transmit power to reach the targeted rate: " + target +
            " kbps while help to minimize the total power of the network. Think step by step, "
            "consider interference and cooperation proposals with others. Be careful of not "
            "increasing drastically your power since it is damaging to increase the interference "
            "level for all Tx-Rx pairs. If you received proposals, your explanation should include "
            "the corresponding reasoning for accepting or rejecting them. You can propose "
            "cooperation plan to other users. If cooperation is needed, send a concise proposal to "
            "another user using this format: \"To User [id]: [content of proposal]\". Once you made "
            "a final decision, output in the following format: "
            "{action:power, message:proposal explanation:thought}.";
        if (!agent.inbox.empty()) {
            p.user_text += "\nProposals received:";
            for (const auto& prop : agent.inbox)
                p.user_text += "\nFrom User " + std::to_string(prop.from_user) + ": " + prop.text();
        }
    }

    if (!agent.memory.empty()) {
        p.memory_text = "Memory:";
        for (const auto& e : agent.memory) p.memory_text += "\n" + serialize(e);
    }
    return p;
}

ActionRecord parse_response(std::string_view raw, double p_max_w, double previous_power_w,
                            int from_user) {
    ActionRecord rec;
    rec.raw_response = std::string(raw);
    rec.power_w = previous_power_w;
    const std::string& text = rec.raw_response;

    std::smatch m;
    if (std::regex_search(text, m, action_re())) {
        const std::string num = m[1].str();
        char* end = nullptr;
        const double v = std::strtod(num.c_str(), &end);
        if (end != num.c_str() && std::isfinite(v)) {
            rec.power_w = std::clamp(v, 0.0, p_max_w);
            rec.parse_ok = true;
        }
    }

    for (auto it = std::sregex_iterator(text.begin(), text.end(), proposal_re());
         it != std::sregex_iterator(); ++it) {
        const auto& pm = *it;
        const auto body_begin = pm[0].second;
        std::smatch stop;
        auto body_end = text.cend();
        if (std::regex_search(body_begin, text.cend(), stop, body_stop_re()))
            body_end = stop[0].first;
        const auto body = trim(std::string_view(text).substr(
            static_cast<std::size_t>(body_begin - text.cbegin()),
            static_cast<std::size_t>(body_end - body_begin)));
        if (body.empty()) continue;
        Proposal p;
        p.from_user = from_user;
        const std::string id = pm[1].str();
        // Ids too long for int are simply out of range.
        p.to_user = id.size() > 9 ? -1 : std::stoi(id);
        p.body = std::string(body);
        rec.proposals.push_back(std::move(p));
    }

    if (std::regex_search(text, m, explanation_re())) {
        std::string_view rest = std::string_view(text).substr(static_cast<std::size_t>(m[0].second - text.cbegin()));
        std::string_view value;
        if (!rest.empty() && (rest.front() == '"' || rest.front() == '\'')) {
            const char q = rest.front();
            rest.remove_prefix(1);
            value = rest.substr(0, rest.find(q));
        } else {
            value = rest.substr(0, rest.find('}'));
        }
        rec.explanation = std::string(trim(value));
    }
    return rec;
}

ScriptedDecision scripted_policy(const DecisionInput& in, const ScriptedPolicy& policy) {
    ScriptedDecision d;
    const bool coop = in.mode == CoopMode::cooperative;
    const double deficit = in.target_kbps > 0.0 ? (in.target_kbps - in.rate_kbps) / in.target_kbps : 0.0;
    std::string note;

    if (coop && !in.inbox.empty()) {
        const int sender = in.inbox.front().from_user;
        if (deficit < policy.accept_deficit) {
            d.power_w = in.power_w;
            d.explanation = "Accepted the proposal from User " + std::to_string(sender) +
                            " and held power, since my rate deficit is " + fmt3(100.0 * deficit) +
                            "% which is within tolerance.";
            return d;
        }
        note = "Rejected the proposal from User " + std::to_string(sender) + " because my rate deficit of " +
               fmt3(100.0 * deficit) + "% requires adjustment. ";
    }

    if (in.rate_kbps <= 0.0) {
        d.power_w = std::min(in.p_max_w, 2.0 * in.power_w);
        d.explanation = note + "My rate is zero, so I double my power.";
    } else {
        const double sinr_target = std::exp2(in.target_kbps / in.bandwidth_khz) - 1.0;
        const double sinr_now = std::exp2(in.rate_kbps / in.bandwidth_khz) - 1.0;
        const double factor = std::pow(sinr_target / sinr_now, policy.alpha);
        d.power_w = std::clamp(in.power_w * factor, 0.0, in.p_max_w);
        d.explanation = note + "Rate " + fmt3(in.rate_kbps) + " kbps against target " + fmt3(in.target_kbps) +
                        " kbps; scaling power by " + fmt3(factor) + " with damping.";
    }

    if (coop && deficit > policy.propose_deficit && in.n_users > 1) {
        Engine eng(in.seed);
        auto k = static_cast<int>(uniform_index(eng, in.n_users - 1)) + 1;
        if (k >= in.user_id) ++k;
        d.propose_to = k;
        d.proposal_body = std::string(kScriptedProposalBody);
    }
    return d;
}

std::string render_response(const ScriptedDecision& d, CoopMode mode) {
    std::string out = "{action:" + shortest(d.power_w);
    if (mode == CoopMode::cooperative) {
        out += ", message:\"";
        out += d.propose_to ? "To User " + std::to_string(*d.propose_to) + ": " + d.proposal_body : "none";
        out += "\"";
    }
    out += ", explanation:\"" + d.explanation + "\"}";
    return out;
}

std::string scripted_decide(const DecisionInput& input, const ScriptedPolicy& policy) {
    return render_response(scripted_policy(input, policy), input.mode);
}

AgentState apply_round(AgentState agent, const ActionRecord& record, double observed_rate_kbps,
                       int round, CoopMode mode) {
    if (round < 1) throw ProtocolViolation("round numbers start at 1");
    if (!agent.memory.empty() && agent.memory.back().round >= round)
        throw ProtocolViolation("user " + std::to_string(agent.user_id) + " already has a memory entry for round " +
                                std::to_string(agent.memory.back().round));

    MemoryEntry e;
    e.user_id = agent.user_id;
    e.round = round;
    e.observation_rate_kbps = observed_rate_kbps;
    e.action_power_w = record.power_w;
    e.explanation = record.explanation;
    if (mode == CoopMode::cooperative) {
        std::string msg;
        for (const auto& p : record.proposals) {
            if (!msg.empty()) msg += "; ";
            msg += p.text();
        }
        e.message = msg.empty() ? "none" : msg;
    }
    agent.memory.push_back(std::move(e));
    agent.last_power_w = record.power_w;
    agent.inbox.clear();
    return agent;
}

RoutingResult route_proposals(const std::vector<ActionRecord>& records, int round, std::size_t n_users) {
    RoutingResult r;
    r.inboxes.resize(n_users);
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (Proposal p : records[i].proposals) {
            ++r.emitted;
            p.from_user = static_cast<int>(i) + 1;
            p.round_sent = round;
            if (p.to_user < 1 || static_cast<std::size_t>(p.to_user) > n_users || p.to_user == p.from_user) {
                ++r.dropped;
                continue;
            }
            r.inboxes[p.to_user - 1].push_back(std::move(p));
            ++r.delivered;
        }
    }
    return r;
}

}  // namespace pcsim
