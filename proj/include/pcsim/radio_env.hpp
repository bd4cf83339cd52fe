#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pcsim/rng.hpp"

namespace pcsim {

inline constexpr double kMuLo = 0.5;
inline constexpr double kMuHi = 1.5;

struct Position {
    double x_m = 0.0;
    double y_m = 0.0;
    bool operator==(const Position&) const = default;
};

/// Transmit powers in watts, one per transmitter.
struct PowerVector {
    std::vector<double> watts;

    PowerVector() = default;
    explicit PowerVector(std::vector<double> w) : watts(std::move(w)) {}

    std::size_t size() const noexcept { return watts.size(); }
    double& operator[](std::size_t i) { return watts[i]; }
    double operator[](std::size_t i) const { return watts[i]; }
    double total() const noexcept;
    bool operator==(const PowerVector&) const = default;
};

struct LinkMetrics {
    std::vector<double> sinr;
    std::vector<double> rate_kbps;
    bool operator==(const LinkMetrics&) const = default;
};

/// Parameters for drawing a scenario. Ranges default to the case-study values.
/// Target scaling factors are always drawn from [kMuLo, kMuHi].
struct GenerationConfig {
    double p_max_w = 10.0;
    double bandwidth_khz = 10.0;
    double area_side_m = 10.0;
    double p_init_lo_w = 1.0;
    double p_init_hi_w = 5.0;
    /// Mean of the Rayleigh amplitude |h|.
    double amplitude_mean = 1.0;
};

/// One immutable network instance.
///
/// gains is N x N row-major with gains[tx * N + rx]: the power gain from
/// transmitter `tx` to receiver `rx`. Diagonal entries are direct links.
/// Gains are normalized to unit noise power.
struct Scenario {
    std::size_t n_pairs = 0;
    std::vector<double> gains;
    std::vector<Position> positions;
    double area_side_m = 10.0;
    PowerVector p_init;
    double p_max_w = 10.0;
    double bandwidth_khz = 10.0;
    std::vector<double> mu;
    std::vector<double> targets_kbps;
    std::uint64_t seed = 0;

    double gain(std::size_t tx, std::size_t rx) const { return gains[tx * n_pairs + rx]; }
    double direct_gain(std::size_t i) const { return gain(i, i); }

    bool operator==(const Scenario&) const = default;
};

/// Rayleigh scale parameter giving the requested amplitude mean: E|h| = sigma*sqrt(pi/2).
double rayleigh_sigma_for_mean(double amplitude_mean);

/// One Rayleigh amplitude by inverse-CDF sampling.
double draw_rayleigh_amplitude(Engine& eng, double sigma);

Scenario generate_scenario(std::uint64_t seed, std::size_t n_pairs,
                           const GenerationConfig& config = {});

/// SINR and achievable rate at the given powers, with unit noise.
LinkMetrics compute_metrics(const Scenario& scenario, const PowerVector& powers);

/// Rate of each pair at `p_init`, scaled by the scenario's mu.
std::vector<double> compute_targets(const Scenario& scenario, const PowerVector& p_init);

/// Throws InvalidScenario when structural invariants are broken.
void validate(const Scenario& scenario);

/// Throws InvalidScenario for unusable generation parameters.
void validate(const GenerationConfig& config);

/// Throws DimensionError unless `powers` has one entry per pair.
void check_conforms(const Scenario& scenario, const PowerVector& powers);

}  // namespace pcsim
