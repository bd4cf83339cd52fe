#include "pcsim/parallel.hpp"

#include <numeric>

#include "pcsim/errors.hpp"
#include "pcsim/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pcsim {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

std::vector<LinkMetrics> evaluate_batch(std::span<const Scenario> scenarios, std::span<const PowerVector> powers,
                                        Execution exec) {
    if (scenarios.size() != powers.size()) throw DimensionError("scenario and power batches differ in length");
    std::vector<LinkMetrics> out(scenarios.size());
    const auto n = static_cast<std::ptrdiff_t>(scenarios.size());
    if (exec == Execution::serial) {
        for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = compute_metrics(scenarios[k], powers[k]);
        return out;
    }
    // DimensionError cannot escape an OpenMP region; check shapes up front.
    for (std::ptrdiff_t k = 0; k < n; ++k) check_conforms(scenarios[k], powers[k]);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = compute_metrics(scenarios[k], powers[k]);
    return out;
}

std::vector<FeasibilityReport> analyze_batch(std::span<const Scenario> scenarios, Execution exec) {
    std::vector<FeasibilityReport> out(scenarios.size());
    const auto n = static_cast<std::ptrdiff_t>(scenarios.size());
    if (exec == Execution::serial) {
        for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = analyze_feasibility(scenarios[k]);
        return out;
    }
    for (const auto& s : scenarios)
        for (std::size_t i = 0; i < s.n_pairs; ++i)
            if (!(s.direct_gain(i) > 0.0)) throw DegenerateLink("scenario has a zero direct gain");
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = analyze_feasibility(scenarios[k]);
    return out;
}

double mean_generated_gain(std::uint64_t seed, std::size_t n_pairs, std::size_t n_scenarios, Execution exec,
                           const GenerationConfig& config) {
    if (n_pairs == 0 || n_scenarios == 0) throw InvalidScenario("need at least one gain sample");
    validate(config);
    std::vector<double> sums(n_scenarios);
    const auto n = static_cast<std::ptrdiff_t>(n_scenarios);
    auto body = [&](std::ptrdiff_t k) {
        const Scenario s = generate_scenario(derive_seed(seed, "gain-sample", {static_cast<std::uint64_t>(k)}),
                                             n_pairs, config);
        sums[k] = std::accumulate(s.gains.begin(), s.gains.end(), 0.0);
    };
    if (exec == Execution::serial) {
        for (std::ptrdiff_t k = 0; k < n; ++k) body(k);
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < n; ++k) body(k);
    }
    const double total = std::accumulate(sums.begin(), sums.end(), 0.0);
    return total / static_cast<double>(n_pairs * n_pairs * n_scenarios);
}

}  // namespace pcsim
