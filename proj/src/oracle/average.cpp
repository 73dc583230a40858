#include <chrono>
#include <cmath>
#include <limits>

#include "evolution.hpp"
#include "scrambler/errors.hpp"
#include "scrambler/parallel.hpp"

namespace scrambler::oracle {

AveragedResult disorder_average(const OracleConfig& config) {
    if (config.realizations < 2)
        throw ValidationError("disorder averaging needs at least 2 realizations");
    auto start = std::chrono::steady_clock::now();
    Evolver evolver(config);

    const std::size_t reps = static_cast<std::size_t>(config.realizations);
    std::vector<RealizationResult> runs(reps);
    parallel_for(reps, [&](std::size_t i) { runs[i] = evolver.realization(i); }, config.threads);

    AveragedResult out;
    out.t = evolver.record_times();
    out.realizations = config.realizations;
    const std::size_t nt = out.t.size();
    const std::size_t ns = runs[0].probs.empty() ? 0 : runs[0].probs[0].size();
    const double r = static_cast<double>(reps);

    out.p_mean.assign(nt, std::vector<double>(ns, 0.0));
    out.p_stderr.assign(nt, std::vector<double>(ns, 0.0));
    out.mean_size.assign(nt, 0.0);
    out.mean_size_stderr.assign(nt, 0.0);

    // Fixed summation order (realization index) keeps the result independent
    // of the thread schedule.
    for (const auto& run : runs) {
        out.max_unitarity_deviation = std::max(out.max_unitarity_deviation, run.max_unitarity_deviation);
        out.max_norm_deviation = std::max(out.max_norm_deviation, run.max_norm_deviation);
        for (std::size_t it = 0; it < nt; ++it) {
            out.mean_size[it] += run.mean_size[it];
            for (std::size_t s = 0; s < ns; ++s) out.p_mean[it][s] += run.probs[it][s];
        }
        out.realization_mean_size.push_back(run.mean_size);
    }
    for (std::size_t it = 0; it < nt; ++it) {
        out.mean_size[it] /= r;
        for (std::size_t s = 0; s < ns; ++s) out.p_mean[it][s] /= r;
    }
    for (const auto& run : runs) {
        for (std::size_t it = 0; it < nt; ++it) {
            double d = run.mean_size[it] - out.mean_size[it];
            out.mean_size_stderr[it] += d * d;
            for (std::size_t s = 0; s < ns; ++s) {
                double e = run.probs[it][s] - out.p_mean[it][s];
                out.p_stderr[it][s] += e * e;
            }
        }
    }
    for (std::size_t it = 0; it < nt; ++it) {
        out.mean_size_stderr[it] = std::sqrt(out.mean_size_stderr[it] / (r - 1.0) / r);
        for (std::size_t s = 0; s < ns; ++s) out.p_stderr[it][s] = std::sqrt(out.p_stderr[it][s] / (r - 1.0) / r);
    }
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

ComparisonReport compare_to_meanfield(const std::vector<double>& t_oracle,
                                      const std::vector<double>& oracle_mean,
                                      const std::vector<double>& oracle_stderr,
                                      const std::vector<double>& t_analytic,
                                      const std::vector<double>& analytic, double budget) {
    const std::size_t n = t_oracle.size();
    if (oracle_mean.size() != n || oracle_stderr.size() != n || t_analytic.size() != n ||
        analytic.size() != n)
        throw UsageError("oracle and analytic series must share one time grid");
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(t_oracle[i] - t_analytic[i]) > 1e-12 * std::max(1.0, std::abs(t_oracle[i])))
            throw UsageError("oracle and analytic time grids differ");

    ComparisonReport rep;
    rep.t = t_oracle;
    for (std::size_t i = 0; i < n; ++i) {
        double d = oracle_mean[i] - analytic[i];
        double se = oracle_stderr[i];
        double z = se > 0.0 ? d / se
                            : (d == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), d));
        bool flag = std::abs(d) > 3.0 * se && std::abs(d) > budget * std::abs(analytic[i]);
        rep.discrepancy.push_back(d);
        rep.z_scores.push_back(z);
        rep.flagged.push_back(flag);
        rep.sup_discrepancy = std::max(rep.sup_discrepancy, std::abs(d));
        rep.any_flagged = rep.any_flagged || flag;
    }
    rep.exact_agreement = rep.sup_discrepancy <= 1e-12;
    return rep;
}

std::vector<EnvironmentSweepEntry> environment_sweep(const OracleConfig& config,
                                                     const std::vector<int>& env_sizes) {
    std::vector<EnvironmentSweepEntry> out;
    for (int m : env_sizes) {
        OracleConfig c = config;
        c.n_env = m;
        out.push_back({m, disorder_average(c)});
    }
    return out;
}

}  // namespace scrambler::oracle
