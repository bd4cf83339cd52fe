#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pcsim/radio_env.hpp"
#include "pcsim/runlog.hpp"

namespace pcsim {

struct FeasibilityReport {
    std::vector<double> target_sinr;
    double spectral_radius = 0.0;
    /// Solution of (I - F) p = u; present iff spectral_radius < 1.
    std::optional<PowerVector> fixed_point;
    /// spectral_radius < 1 and the fixed point lies in [0, p_max].
    bool feasible = false;
    int iterations = 0;
};

/// SINR each pair needs to hit its target rate: 2^(target / B) - 1.
std::vector<double> target_sinr(const Scenario& scenario);

/// One Foschini-Miljanic update, clamped at p_max.
PowerVector dpc_step(const Scenario& scenario, const PowerVector& powers);
PowerVector dpc_step(const Scenario& scenario, const PowerVector& powers, std::span<const double> gamma);

/// Normalized interference matrix F (row-major, F[i][j] = gamma_i g_ji / g_ii
/// off the diagonal) and the noise term u (u_i = gamma_i / g_ii).
/// Throws DegenerateLink if any direct gain is zero.
struct LinearSystem {
    std::size_t n = 0;
    std::vector<double> f;
    std::vector<double> u;
};
LinearSystem interference_system(const Scenario& scenario, std::span<const double> gamma);

struct SpectralRadius {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Perron root of a nonnegative n x n matrix by shifted power iteration.
///
/// Each step brackets the root between the smallest and largest entry of
/// (F x) / x for the current positive iterate x, and stops once the bracket is
/// narrower than `tolerance`. The shift tracks the running estimate, which
/// also handles the period-2 structure of zero-diagonal 2 x 2 matrices. If the
/// bracket never closes (reducible matrices) the upper bound is returned.
SpectralRadius spectral_radius(std::span<const double> matrix, std::size_t n,
                               double tolerance = 1e-10, int max_iterations = 10000);

FeasibilityReport analyze_feasibility(const Scenario& scenario);

/// DPC from p_init for `rounds` steps. Throws DegenerateLink.
RunLog run_dpc(const Scenario& scenario, int rounds = 10);

}  // namespace pcsim
