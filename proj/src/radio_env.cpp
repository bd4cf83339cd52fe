#include "pcsim/radio_env.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "pcsim/errors.hpp"

namespace pcsim {

double PowerVector::total() const noexcept {
    return std::accumulate(watts.begin(), watts.end(), 0.0);
}

double rayleigh_sigma_for_mean(double amplitude_mean) {
    return amplitude_mean * std::sqrt(2.0 / std::numbers::pi);
}

double draw_rayleigh_amplitude(Engine& eng, double sigma) {
    // 1 - u lies in (0, 1], so the log is finite.
    const double u = uniform01(eng);
    return sigma * std::sqrt(-2.0 * std::log1p(-u));
}

Scenario generate_scenario(std::uint64_t seed, std::size_t n_pairs, const GenerationConfig& config) {
    if (n_pairs == 0) throw InvalidScenario("n_pairs must be at least 1");
    validate(config);

    Engine eng(seed);
    const std::size_t n = n_pairs;
    Scenario s;
    s.n_pairs = n;
    s.seed = seed;
    s.area_side_m = config.area_side_m;
    s.p_max_w = config.p_max_w;
    s.bandwidth_khz = config.bandwidth_khz;

    // Draw order is part of the reproducibility contract: gains, powers,
    // positions, scaling factors.
    const double sigma = rayleigh_sigma_for_mean(config.amplitude_mean);
    s.gains.resize(n * n);
    for (auto& g : s.gains) {
        const double h = draw_rayleigh_amplitude(eng, sigma);
        g = h * h;
    }
    s.p_init.watts.resize(n);
    for (auto& p : s.p_init.watts) p = uniform(eng, config.p_init_lo_w, config.p_init_hi_w);
    s.positions.resize(n);
    for (auto& pos : s.positions) {
        pos.x_m = uniform(eng, 0.0, config.area_side_m);
        pos.y_m = uniform(eng, 0.0, config.area_side_m);
    }
    s.mu.resize(n);
    for (auto& m : s.mu) m = uniform(eng, kMuLo, kMuHi);

    s.targets_kbps = compute_targets(s, s.p_init);
    return s;
}

void validate(const GenerationConfig& config) {
    if (!(config.p_max_w > 0.0)) throw InvalidScenario("p_max must be positive");
    if (!(config.bandwidth_khz > 0.0)) throw InvalidScenario("bandwidth must be positive");
    if (!(config.area_side_m > 0.0)) throw InvalidScenario("area side must be positive");
    if (!(config.amplitude_mean > 0.0)) throw InvalidScenario("amplitude mean must be positive");
    if (!(config.p_init_lo_w >= 0.0 && config.p_init_lo_w <= config.p_init_hi_w &&
          config.p_init_hi_w <= config.p_max_w))
        throw InvalidScenario("initial power range must lie within [0, p_max]");
}

void check_conforms(const Scenario& scenario, const PowerVector& powers) {
    if (powers.size() != scenario.n_pairs)
        throw DimensionError("power vector has " + std::to_string(powers.size()) +
                             " entries, scenario has " + std::to_string(scenario.n_pairs) + " pairs");
}

LinkMetrics compute_metrics(const Scenario& scenario, const PowerVector& powers) {
    check_conforms(scenario, powers);
    if (scenario.gains.size() != scenario.n_pairs * scenario.n_pairs)
        throw DimensionError("gain matrix is not N x N");

    const std::size_t n = scenario.n_pairs;
    LinkMetrics m;
    m.sinr.resize(n);
    m.rate_kbps.resize(n);
    for (std::size_t rx = 0; rx < n; ++rx) {
        double interference = 1.0;  // unit noise
        for (std::size_t tx = 0; tx < n; ++tx)
            if (tx != rx) interference += scenario.gain(tx, rx) * powers[tx];
        m.sinr[rx] = scenario.direct_gain(rx) * powers[rx] / interference;
        m.rate_kbps[rx] = scenario.bandwidth_khz * std::log2(1.0 + m.sinr[rx]);
    }
    return m;
}

std::vector<double> compute_targets(const Scenario& scenario, const PowerVector& p_init) {
    if (scenario.mu.size() != scenario.n_pairs) throw DimensionError("mu has wrong length");
    const LinkMetrics m = compute_metrics(scenario, p_init);
    std::vector<double> targets(scenario.n_pairs);
    for (std::size_t i = 0; i < targets.size(); ++i) targets[i] = scenario.mu[i] * m.rate_kbps[i];
    return targets;
}

void validate(const Scenario& s) {
    const std::size_t n = s.n_pairs;
    if (n == 0) throw InvalidScenario("n_pairs must be at least 1");
    if (s.gains.size() != n * n) throw InvalidScenario("gain matrix must be N x N");
    if (s.p_init.size() != n || s.mu.size() != n || s.targets_kbps.size() != n ||
        s.positions.size() != n)
        throw InvalidScenario("per-pair arrays must have N entries");
    if (!(s.p_max_w > 0.0)) throw InvalidScenario("p_max must be positive");
    if (!(s.bandwidth_khz > 0.0)) throw InvalidScenario("bandwidth must be positive");
    for (double g : s.gains)
        if (!(g >= 0.0) || !std::isfinite(g)) throw InvalidScenario("gains must be finite and nonnegative");
    for (double p : s.p_init.watts)
        if (!(p >= 0.0 && p <= s.p_max_w)) throw InvalidScenario("initial powers must lie in [0, p_max]");
    for (double m : s.mu)
        if (!(m >= kMuLo && m <= kMuHi)) throw InvalidScenario("mu must lie in [0.5, 1.5]");
    for (double t : s.targets_kbps)
        if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidScenario("targets must be finite and nonnegative");
}

}  // namespace pcsim
