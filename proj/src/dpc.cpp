#include "pcsim/dpc.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pcsim/errors.hpp"

namespace pcsim {

std::vector<double> target_sinr(const Scenario& scenario) {
    std::vector<double> gamma(scenario.targets_kbps.size());
    for (std::size_t i = 0; i < gamma.size(); ++i)
        gamma[i] = std::exp2(scenario.targets_kbps[i] / scenario.bandwidth_khz) - 1.0;
    return gamma;
}

PowerVector dpc_step(const Scenario& scenario, const PowerVector& powers) {
    const auto gamma = target_sinr(scenario);
    return dpc_step(scenario, powers, gamma);
}

PowerVector dpc_step(const Scenario& scenario, const PowerVector& powers, std::span<const double> gamma) {
    if (gamma.size() != scenario.n_pairs) throw DimensionError("target SINR vector has wrong length");
    const LinkMetrics m = compute_metrics(scenario, powers);
    PowerVector next(std::vector<double>(powers.size()));
    for (std::size_t i = 0; i < powers.size(); ++i) {
        if (gamma[i] == 0.0)
            next[i] = 0.0;
        else if (m.sinr[i] == 0.0)
            next[i] = scenario.p_max_w;
        else
            next[i] = std::min(scenario.p_max_w, gamma[i] / m.sinr[i] * powers[i]);
    }
    return next;
}

LinearSystem interference_system(const Scenario& scenario, std::span<const double> gamma) {
    const std::size_t n = scenario.n_pairs;
    LinearSystem sys;
    sys.n = n;
    sys.f.assign(n * n, 0.0);
    sys.u.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double gii = scenario.direct_gain(i);
        if (!(gii > 0.0)) throw DegenerateLink("pair " + std::to_string(i + 1) + " has zero direct gain");
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) sys.f[i * n + j] = gamma[i] * scenario.gain(j, i) / gii;
        sys.u[i] = gamma[i] / gii;
    }
    return sys;
}

SpectralRadius spectral_radius(std::span<const double> a, std::size_t n, double tolerance, int max_iterations) {
    if (a.size() != n * n) throw DimensionError("matrix is not n x n");
    SpectralRadius out;
    if (n == 0) {
        out.converged = true;
        return out;
    }

    std::vector<double> x(n, 1.0), y(n);
    double hi = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * x[j];
            y[i] = s;
        }
        double lo = std::numeric_limits<double>::infinity();
        hi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i] <= 0.0) continue;
            const double r = y[i] / x[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        out.iterations = it;
        if (hi - lo <= tolerance) {
            out.value = 0.5 * (lo + hi);
            out.converged = true;
            return out;
        }
        const double shift = std::max(0.5 * (lo + hi), std::numeric_limits<double>::min());
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = y[i] + shift * x[i];
            norm = std::max(norm, x[i]);
        }
        for (auto& v : x) v /= norm;
    }
    out.value = hi;
    return out;
}

FeasibilityReport analyze_feasibility(const Scenario& scenario) {
    FeasibilityReport rep;
    rep.target_sinr = target_sinr(scenario);
    const LinearSystem sys = interference_system(scenario, rep.target_sinr);
    const SpectralRadius rho = spectral_radius(sys.f, sys.n);
    rep.spectral_radius = rho.value;
    rep.iterations = rho.iterations;
    if (rho.value < 1.0) {
        const auto n = static_cast<Eigen::Index>(sys.n);
        const Eigen::MatrixXd f = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            sys.f.data(), n, n);
        const Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(sys.u.data(), n);
        const Eigen::VectorXd p = (Eigen::MatrixXd::Identity(n, n) - f).partialPivLu().solve(u);
        rep.fixed_point = PowerVector(std::vector<double>(p.data(), p.data() + n));
        rep.feasible = std::all_of(rep.fixed_point->watts.begin(), rep.fixed_point->watts.end(),
                                   [&](double v) { return v >= 0.0 && v <= scenario.p_max_w; });
    }
    return rep;
}

RunLog run_dpc(const Scenario& scenario, int rounds) {
    if (rounds < 1) throw InvalidScenario("rounds must be at least 1");
    for (std::size_t i = 0; i < scenario.n_pairs; ++i)
        if (!(scenario.direct_gain(i) > 0.0))
            throw DegenerateLink("pair " + std::to_string(i + 1) + " has zero direct gain");

    RunLog log;
    log.config.mode = Mode::dpc;
    log.config.rounds = rounds;
    log.scenario = scenario;
    log.initial_metrics = compute_metrics(scenario, scenario.p_init);

    const auto gamma = target_sinr(scenario);
    PowerVector p = scenario.p_init;
    log.rounds.reserve(static_cast<std::size_t>(rounds));
    for (int r = 1; r <= rounds; ++r) {
        p = dpc_step(scenario, p, gamma);
        RoundRecord rec;
        rec.round = r;
        rec.metrics = compute_metrics(scenario, p);
        rec.powers = p;
        log.rounds.push_back(std::move(rec));
    }
    return log;
}

}  // namespace pcsim
