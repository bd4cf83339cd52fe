#include <Eigen/Eigenvalues>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "pcsim/dpc.hpp"
#include "pcsim/errors.hpp"
#include "pcsim/orchestrator.hpp"

using namespace pcsim;
using pcsim::testing::make_scenario;
using pcsim::testing::rate_for_sinr;

namespace {

// 2x2 oracles written out by hand.
double closed_form_rho(const Scenario& s) {
    const auto g = target_sinr(s);
    const double f12 = g[0] * s.gain(1, 0) / s.gain(0, 0);
    const double f21 = g[1] * s.gain(0, 1) / s.gain(1, 1);
    return std::sqrt(f12 * f21);
}

std::vector<double> cramer_fixed_point(const Scenario& s) {
    const auto g = target_sinr(s);
    const double f12 = g[0] * s.gain(1, 0) / s.gain(0, 0);
    const double f21 = g[1] * s.gain(0, 1) / s.gain(1, 1);
    const double u1 = g[0] / s.gain(0, 0), u2 = g[1] / s.gain(1, 1);
    const double det = 1.0 - f12 * f21;
    return {(u1 + f12 * u2) / det, (u2 + f21 * u1) / det};
}

double eigen_rho(const LinearSystem& sys) {
    const auto n = static_cast<Eigen::Index>(sys.n);
    Eigen::MatrixXd f(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) f(i, j) = sys.f[static_cast<std::size_t>(i * n + j)];
    return f.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("target_sinr inverts the rate formula") {
    const auto s = make_scenario({1, 1, 1, 1, 1, 1, 1, 1, 1}, {1, 1, 1}, {10.0, 0.0, 20.0});
    const auto g = target_sinr(s);
    CHECK(g[0] == 1.0);
    CHECK(g[1] == 0.0);
    CHECK(g[2] == 3.0);
}

TEST_CASE("dpc_step worked examples") {
    SUBCASE("ratio one is a fixed point") {
        const auto s = make_scenario({2.0}, {1.5}, {rate_for_sinr(3.0)});
        const auto next = dpc_step(s, PowerVector({1.5}));
        CHECK(next[0] == doctest::Approx(1.5).epsilon(1e-14));
    }
    SUBCASE("single user converges in one step") {
        const auto s = make_scenario({1.0}, {1.0}, {rate_for_sinr(4.0)});
        const auto p1 = dpc_step(s, PowerVector({1.0}));
        CHECK(p1[0] == doctest::Approx(4.0).epsilon(1e-14));
        const auto p2 = dpc_step(s, p1);
        CHECK(p2[0] == doctest::Approx(4.0).epsilon(1e-14));
    }
    SUBCASE("clamped at p_max") {
        const auto s = make_scenario({1.0}, {1.0}, {rate_for_sinr(40.0)});
        CHECK(dpc_step(s, PowerVector({1.0}))[0] == 10.0);
    }
    SUBCASE("zero SINR with positive target jumps to p_max") {
        const auto s = make_scenario({1.0}, {0.0}, {10.0});
        CHECK(dpc_step(s, PowerVector({0.0}))[0] == 10.0);
    }
    SUBCASE("zero target switches off") {
        const auto s = make_scenario({1.0}, {3.0}, {0.0});
        CHECK(dpc_step(s, PowerVector({3.0}))[0] == 0.0);
    }
}

TEST_CASE("feasible 2-user DPC converges to the analytic fixed point") {
    // Weak coupling, modest targets.
    const auto s = make_scenario({2.0, 0.3, 0.2, 1.5}, {1.0, 4.0}, {rate_for_sinr(1.0), rate_for_sinr(2.0)});
    const auto rep = analyze_feasibility(s);
    REQUIRE(rep.fixed_point);
    const auto want = cramer_fixed_point(s);
    CHECK(rep.fixed_point->watts[0] == doctest::Approx(want[0]).epsilon(1e-12));
    CHECK(rep.fixed_point->watts[1] == doctest::Approx(want[1]).epsilon(1e-12));
    CHECK(rep.feasible);
    const RunLog log = run_dpc(s, 200);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(log.final_round().powers[i] - want[i]) < 1e-6);
}

TEST_CASE("analyze_feasibility worked examples") {
    SUBCASE("decoupled links") {
        const auto s = make_scenario({2.0, 0, 0, 0.5}, {1, 1}, {rate_for_sinr(4.0), rate_for_sinr(1.0)});
        const auto rep = analyze_feasibility(s);
        CHECK(rep.spectral_radius == 0.0);
        REQUIRE(rep.fixed_point);
        CHECK(rep.fixed_point->watts[0] == doctest::Approx(2.0));
        CHECK(rep.fixed_point->watts[1] == doctest::Approx(2.0));
        CHECK(rep.feasible);
    }
    SUBCASE("decoupled but above p_max") {
        const auto s = make_scenario({0.1, 0, 0, 1}, {1, 1}, {rate_for_sinr(4.0), rate_for_sinr(1.0)});
        const auto rep = analyze_feasibility(s);
        CHECK(rep.spectral_radius == 0.0);
        REQUIRE(rep.fixed_point);
        CHECK(rep.fixed_point->watts[0] == doctest::Approx(40.0));
        CHECK_FALSE(rep.feasible);
    }
    SUBCASE("symmetric unit pair sits on the boundary") {
        const auto s = make_scenario({1, 1, 1, 1}, {1, 1}, {10.0, 10.0});
        const auto rep = analyze_feasibility(s);
        CHECK(rep.spectral_radius == doctest::Approx(1.0).epsilon(1e-12));
        CHECK_FALSE(rep.fixed_point);
        CHECK_FALSE(rep.feasible);
    }
    SUBCASE("zero direct gain is degenerate") {
        const auto s = make_scenario({0, 1, 1, 1}, {1, 1}, {10.0, 10.0});
        CHECK_THROWS_AS(analyze_feasibility(s), DegenerateLink);
        CHECK_THROWS_AS(run_dpc(s, 10), DegenerateLink);
    }
}

TEST_CASE("2x2 spectral radius matches the closed form") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const Scenario s = generate_scenario(seed, 2);
        const auto rep = analyze_feasibility(s);
        CHECK(std::abs(rep.spectral_radius - closed_form_rho(s)) <= 1e-10);
    }
}

TEST_CASE("spectral radius agrees with a general eigensolver") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Scenario s = generate_scenario(seed, 3 + seed % 8);
        const auto sys = interference_system(s, target_sinr(s));
        const auto rho = spectral_radius(sys.f, sys.n);
        CHECK(rho.converged);
        CHECK(rho.value == doctest::Approx(eigen_rho(sys)).epsilon(1e-9));
    }
}

TEST_CASE("spectral radius of reducible and small matrices") {
    const std::vector<double> zero(9, 0.0);
    CHECK(spectral_radius(zero, 3).value == 0.0);
    // Block of a 2-cycle plus an isolated node: rho = sqrt(4 * 1) = 2.
    const std::vector<double> a{0, 4, 0, 1, 0, 0, 0, 0, 0};
    CHECK(spectral_radius(a, 3).value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK_THROWS_AS(spectral_radius(a, 2), DimensionError);
}

TEST_CASE("run_dpc on the infeasible symmetric pair saturates") {
    const auto s = make_scenario({1, 1, 1, 1}, {1, 1}, {10.0, 10.0});
    const RunLog log = run_dpc(s, 20);
    CHECK(log.rounds.size() == 20);
    CHECK(log.config.mode == Mode::dpc);
    for (std::size_t r = 9; r < 20; ++r) {
        CHECK(log.rounds[r].powers[0] == 10.0);
        CHECK(log.rounds[r].powers[1] == 10.0);
    }
    CHECK(log.diagnostics.emitted == 0);
}

TEST_CASE("run_dpc is deterministic") {
    const Scenario s = generate_scenario(11, 4);
    CHECK(run_dpc(s, 10) == run_dpc(s, 10));
    CHECK_THROWS_AS(run_dpc(s, 0), InvalidScenario);
}

TEST_CASE("fixed-point property over random feasible scenarios") {
    int checked = 0;
    for (std::uint64_t seed = 0; checked < 50 && seed < 5000; ++seed) {
        const Scenario s = generate_scenario(seed, 2 + seed % 3);
        const auto rep = analyze_feasibility(s);
        if (!rep.feasible) continue;
        ++checked;
        const auto next = dpc_step(s, *rep.fixed_point);
        for (std::size_t i = 0; i < s.n_pairs; ++i)
            CHECK(std::abs(next[i] - rep.fixed_point->watts[i]) <= 1e-12 * std::max(1.0, rep.fixed_point->watts[i]));
    }
    CHECK(checked == 50);
}

TEST_CASE("feasible scenarios converge within 500 steps") {
    int checked = 0;
    for (std::uint64_t seed = 0; checked < 100 && seed < 20000; ++seed) {
        const Scenario s = generate_scenario(seed, 2 + seed % 2 * 2);
        const auto rep = analyze_feasibility(s);
        if (!(rep.feasible && rep.spectral_radius < 0.95)) continue;
        ++checked;
        const auto log = run_dpc(s, 500);
        double err = 0.0;
        for (std::size_t i = 0; i < s.n_pairs; ++i)
            err = std::max(err, std::abs(log.final_round().powers[i] - rep.fixed_point->watts[i]));
        CHECK(err < 1e-6);
    }
    CHECK(checked == 100);
}

TEST_CASE("infeasible escalation: total power never drops after a clamp when rho >= 1") {
    const auto batch = generate_divergent_batch(4, 40, 17);
    for (const auto& s : batch.scenarios) {
        if (analyze_feasibility(s).spectral_radius < 1.0) continue;
        const auto log = run_dpc(s, 30);
        bool clamped = false;
        double prev = 0.0;
        for (const auto& r : log.rounds) {
            // Summation noise only; an unclamped user sitting at its fixed point can wobble by an ulp.
            if (clamped) CHECK(r.powers.total() >= prev * (1.0 - 1e-12));
            for (double p : r.powers.watts) clamped = clamped || p >= s.p_max_w;
            prev = r.powers.total();
        }
    }
}
