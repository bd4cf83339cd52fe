#pragma once

#include <cmath>
#include <vector>

#include "pcsim/radio_env.hpp"

namespace pcsim::testing {

/// Hand-built scenario with explicit gains (row = transmitter) and targets.
inline Scenario make_scenario(std::vector<double> gains, std::vector<double> p_init, std::vector<double> targets_kbps,
                              double p_max = 10.0, double bandwidth = 10.0) {
    Scenario s;
    s.n_pairs = p_init.size();
    s.gains = std::move(gains);
    s.positions.assign(s.n_pairs, Position{});
    s.p_init = PowerVector(std::move(p_init));
    s.p_max_w = p_max;
    s.bandwidth_khz = bandwidth;
    s.mu.assign(s.n_pairs, 1.0);
    s.targets_kbps = std::move(targets_kbps);
    return s;
}

/// Target rate that corresponds to the given target SINR.
inline double rate_for_sinr(double sinr, double bandwidth = 10.0) { return bandwidth * std::log2(1.0 + sinr); }

/// Straight-line SINR evaluation used as an independent oracle: total
/// received power at each receiver minus the wanted signal.
inline std::vector<double> oracle_sinr(const Scenario& s, const std::vector<double>& p) {
    const std::size_t n = s.n_pairs;
    std::vector<double> out(n);
    for (std::size_t rx = 0; rx < n; ++rx) {
        long double received = 0.0L;
        for (std::size_t tx = 0; tx < n; ++tx) received += static_cast<long double>(s.gains[tx * n + rx]) * p[tx];
        const long double wanted = static_cast<long double>(s.gains[rx * n + rx]) * p[rx];
        out[rx] = static_cast<double>(wanted / (1.0L + (received - wanted)));
    }
    return out;
}

inline double rel_err(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

}  // namespace pcsim::testing
