#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pcsim/dpc.hpp"
#include "pcsim/radio_env.hpp"

namespace pcsim {

/// Serial loops are the reference; parallel variants use OpenMP and must
/// produce bit-identical results.
enum class Execution { serial, parallel };

/// Number of OpenMP threads the parallel variants will use (1 without OpenMP).
int max_threads();
void set_threads(int n);

/// compute_metrics over paired (scenario, powers) slices.
std::vector<LinkMetrics> evaluate_batch(std::span<const Scenario> scenarios, std::span<const PowerVector> powers,
                                        Execution exec = Execution::parallel);

std::vector<FeasibilityReport> analyze_batch(std::span<const Scenario> scenarios,
                                             Execution exec = Execution::parallel);

/// Mean power gain over every entry of `n_scenarios` generated scenarios,
/// drawn with seeds derive_seed(seed, "gain-sample", {k}). Per-scenario sums
/// are reduced in index order so the result does not depend on `exec`.
double mean_generated_gain(std::uint64_t seed, std::size_t n_pairs, std::size_t n_scenarios,
                           Execution exec = Execution::parallel, const GenerationConfig& config = {});

}  // namespace pcsim
