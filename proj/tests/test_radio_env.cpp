#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "pcsim/errors.hpp"
#include "pcsim/parallel.hpp"
#include "pcsim/radio_env.hpp"
#include "pcsim/rng.hpp"

using namespace pcsim;
using pcsim::testing::make_scenario;
using pcsim::testing::oracle_sinr;
using pcsim::testing::rel_err;

TEST_CASE("generate_scenario honours ranges and defaults") {
    const Scenario s = generate_scenario(42, 4);
    CHECK(s.n_pairs == 4);
    CHECK(s.p_max_w == 10.0);
    CHECK(s.bandwidth_khz == 10.0);
    CHECK(s.area_side_m == 10.0);
    CHECK(s.gains.size() == 16);
    for (double p : s.p_init.watts) CHECK((p >= 1.0 && p <= 5.0));
    for (double m : s.mu) CHECK((m >= 0.5 && m <= 1.5));
    for (double g : s.gains) CHECK(g >= 0.0);
    for (const auto& pos : s.positions) {
        CHECK((pos.x_m >= 0.0 && pos.x_m <= 10.0));
        CHECK((pos.y_m >= 0.0 && pos.y_m <= 10.0));
    }
    CHECK_NOTHROW(validate(s));
}

TEST_CASE("generate_scenario is deterministic per seed") {
    CHECK(generate_scenario(42, 4) == generate_scenario(42, 4));
    CHECK(generate_scenario(42, 4) != generate_scenario(43, 4));
    GenerationConfig cfg;
    cfg.bandwidth_khz = 20.0;
    CHECK(generate_scenario(7, 3, cfg) == generate_scenario(7, 3, cfg));
}

TEST_CASE("generate_scenario rejects zero pairs and bad config") {
    CHECK_THROWS_AS(generate_scenario(1, 0), InvalidScenario);
    GenerationConfig cfg;
    cfg.p_init_hi_w = 20.0;
    CHECK_THROWS_AS(generate_scenario(1, 2, cfg), InvalidScenario);
}

TEST_CASE("Rayleigh calibration: amplitude mean 1, power-gain mean 4/pi") {
    // Oracle: for Rayleigh(sigma), E|h| = sigma sqrt(pi/2) and E|h|^2 = 2 sigma^2.
    const double sigma = rayleigh_sigma_for_mean(1.0);
    CHECK(sigma * std::sqrt(std::numbers::pi / 2.0) == doctest::Approx(1.0).epsilon(1e-15));
    Engine eng(2024);
    double amp = 0.0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) amp += draw_rayleigh_amplitude(eng, sigma);
    CHECK(amp / n == doctest::Approx(1.0).epsilon(0.01));

    const double mean_gain = mean_generated_gain(5, 10, 2000);
    CHECK(std::abs(mean_gain - 4.0 / std::numbers::pi) < 0.02);
}

TEST_CASE("compute_metrics worked examples") {
    SUBCASE("single link, no interference") {
        const auto s = make_scenario({1.0}, {2.0}, {0.0});
        const auto m = compute_metrics(s, PowerVector({2.0}));
        CHECK(m.sinr[0] == 2.0);
        CHECK(m.rate_kbps[0] == doctest::Approx(10.0 * std::log2(3.0)));
        CHECK(m.rate_kbps[0] == doctest::Approx(15.85).epsilon(1e-3));
    }
    SUBCASE("symmetric pair") {
        const auto s = make_scenario({1, 1, 1, 1}, {1, 1}, {0, 0});
        const auto m = compute_metrics(s, PowerVector({1.0, 1.0}));
        CHECK(m.sinr[0] == 0.5);
        CHECK(m.sinr[1] == 0.5);
    }
    SUBCASE("cross gains follow tx -> rx indexing") {
        // g[0][1] = 3: transmitter 1 hurts receiver 2 only.
        const auto s = make_scenario({1, 3, 0, 1}, {1, 1}, {0, 0});
        const auto m = compute_metrics(s, PowerVector({1.0, 1.0}));
        CHECK(m.sinr[0] == 1.0);
        CHECK(m.sinr[1] == 0.25);
    }
    SUBCASE("seeded N=3 against straight-line oracle") {
        const Scenario s = generate_scenario(99, 3);
        Engine eng(3);
        std::vector<double> p(3);
        for (auto& v : p) v = uniform(eng, 0.0, 10.0);
        const auto m = compute_metrics(s, PowerVector(p));
        const auto want = oracle_sinr(s, p);
        for (int i = 0; i < 3; ++i) {
            CHECK(rel_err(m.sinr[i], want[i]) <= 1e-12);
            CHECK(rel_err(m.rate_kbps[i], 10.0 * std::log2(1.0 + want[i])) <= 1e-12);
        }
    }
}

TEST_CASE("compute_metrics rejects dimension mismatch") {
    const Scenario s = generate_scenario(1, 3);
    CHECK_THROWS_AS(compute_metrics(s, PowerVector({1.0, 2.0})), DimensionError);
}

TEST_CASE("compute_targets scales initial rates") {
    Scenario s = generate_scenario(8, 4);
    const auto rates = compute_metrics(s, s.p_init).rate_kbps;
    s.mu.assign(4, 1.0);
    CHECK(compute_targets(s, s.p_init) == rates);
    s.mu[2] = 0.5;
    CHECK(compute_targets(s, s.p_init)[2] == rates[2] * 0.5);
}

TEST_CASE("stored targets are bit-equal to recomputation") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Scenario s = generate_scenario(seed, 1 + seed % 10);
        CHECK(compute_targets(s, s.p_init) == s.targets_kbps);
    }
}

TEST_CASE("SINR monotonicity in own and other powers") {
    Engine eng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 9;
        const Scenario s = generate_scenario(1000 + trial, n);
        std::vector<double> p(n);
        for (auto& v : p) v = uniform(eng, 0.0, 10.0);
        const auto base = compute_metrics(s, PowerVector(p));
        const std::size_t k = uniform_index(eng, n);
        auto raised = p;
        raised[k] += uniform(eng, 0.01, 5.0);
        const auto up = compute_metrics(s, PowerVector(raised));
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) {
                CHECK(up.sinr[i] >= base.sinr[i]);
                CHECK(up.rate_kbps[i] >= base.rate_kbps[i]);
            } else {
                CHECK(up.sinr[i] <= base.sinr[i]);
            }
        }
    }
}

TEST_CASE("doubling all powers raises every SINR") {
    for (int trial = 0; trial < 100; ++trial) {
        const Scenario s = generate_scenario(500 + trial, 2 + trial % 9);
        auto doubled = s.p_init;
        for (auto& v : doubled.watts) v *= 2.0;
        const auto a = compute_metrics(s, s.p_init);
        const auto b = compute_metrics(s, doubled);
        for (std::size_t i = 0; i < s.n_pairs; ++i) CHECK(b.sinr[i] > a.sinr[i]);
    }
}

TEST_CASE("rate is zero iff own power or direct gain is zero") {
    auto s = make_scenario({1, 2, 0.5, 0}, {1, 1}, {0, 0});
    auto m = compute_metrics(s, PowerVector({0.0, 1.0}));
    CHECK(m.sinr[0] == 0.0);
    CHECK(m.rate_kbps[0] == 0.0);
    CHECK(m.rate_kbps[1] == 0.0);  // g[1][1] = 0
    m = compute_metrics(s, PowerVector({1.0, 1.0}));
    CHECK(m.rate_kbps[0] > 0.0);
}

TEST_CASE("validate catches broken invariants") {
    Scenario s = generate_scenario(3, 3);
    CHECK_NOTHROW(validate(s));
    auto bad = s;
    bad.gains[1] = -1.0;
    CHECK_THROWS_AS(validate(bad), InvalidScenario);
    bad = s;
    bad.p_init[0] = 11.0;
    CHECK_THROWS_AS(validate(bad), InvalidScenario);
    bad = s;
    bad.mu[0] = 2.0;
    CHECK_THROWS_AS(validate(bad), InvalidScenario);
    bad = s;
    bad.targets_kbps.pop_back();
    CHECK_THROWS_AS(validate(bad), InvalidScenario);
}

TEST_CASE("derive_seed separates streams and indices") {
    CHECK(derive_seed(1, "scenario", {4, 0}) == derive_seed(1, "scenario", {4, 0}));
    CHECK(derive_seed(1, "scenario", {4, 0}) != derive_seed(1, "scenario", {4, 1}));
    CHECK(derive_seed(1, "scenario", {4, 0}) != derive_seed(1, "policy", {4, 0}));
    CHECK(derive_seed(1, "scenario") != derive_seed(2, "scenario"));
}
