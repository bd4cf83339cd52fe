#include "doctest.h"
#include "pcsim/errors.hpp"
#include "pcsim/orchestrator.hpp"
#include "pcsim/parallel.hpp"

using namespace pcsim;

TEST_CASE("parallel batch kernels match the serial reference bit for bit") {
    const auto batch = generate_batch(6, 300, 1).scenarios;
    std::vector<PowerVector> powers;
    for (const auto& s : batch) powers.push_back(s.p_init);
    CHECK(evaluate_batch(batch, powers, Execution::parallel) == evaluate_batch(batch, powers, Execution::serial));

    const auto a = analyze_batch(batch, Execution::parallel);
    const auto b = analyze_batch(batch, Execution::serial);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].spectral_radius == b[k].spectral_radius);
        CHECK(a[k].feasible == b[k].feasible);
    }

    CHECK(mean_generated_gain(3, 5, 500, Execution::parallel) == mean_generated_gain(3, 5, 500, Execution::serial));
}

TEST_CASE("batch kernels check shapes before fanning out") {
    const auto batch = generate_batch(3, 4, 1).scenarios;
    std::vector<PowerVector> powers(4, PowerVector({1.0, 1.0}));
    CHECK_THROWS_AS(evaluate_batch(batch, powers), DimensionError);
    CHECK_THROWS_AS(evaluate_batch(batch, std::span(powers).first(2)), DimensionError);
    CHECK(max_threads() >= 1);
}
