#include "evolution.hpp"

#include <bit>
#include <cmath>

#include "scrambler/errors.hpp"
#include "scrambler/greens.hpp"
#include "scrambler/kernels.hpp"

namespace scrambler::oracle {

namespace {

constexpr double kUnitarityLimit = 1e-10;

std::size_t step_count(double t, double dt, const char* what) {
    double steps = t / dt;
    double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps))
        throw ValidationError(std::string(what) + " must be a multiple of dt");
    return static_cast<std::size_t>(rounded);
}

}  // namespace

void validate_config(const OracleConfig& config) {
    make_layout(config.n_sys, config.n_env);
    require_valid(config.menu);
    if (!(config.dt > 0.0) || !std::isfinite(config.dt)) throw ValidationError("dt must be > 0");
    if (!(config.t_final >= 0.0) || !std::isfinite(config.t_final))
        throw ValidationError("t_final must be finite and >= 0");
    if (config.realizations < 1) throw ValidationError("realizations must be >= 1");
    double gamma = quasiparticle_rate(config.menu, config.filling).gamma;
    if (config.dt * gamma > 0.05 * (1.0 + 1e-12))
        throw ValidationError("dt * Gamma exceeds the 0.05 stability limit");
    step_count(config.t_final, config.dt, "t_final");
    double prev = -1.0;
    for (double t : config.record_times) {
        if (!(t >= 0.0 && t <= config.t_final * (1.0 + 1e-12)))
            throw ValidationError("record times must lie in [0, t_final]");
        if (!(t > prev)) throw ValidationError("record times must be increasing");
        step_count(t, config.dt, "record time");
        prev = t;
    }
    single_copy_operator(make_layout(config.n_sys, config.n_env), config.initial_operator);
}

Evolver::Evolver(const OracleConfig& config)
    : config_(config),
      layout_(make_layout(config.n_sys, config.n_env)),
      model_(config.menu, layout_, config.convention),
      spectrum_(layout_, config.filling),
      signs_(reference_signs(layout_)) {
    validate_config(config);
    initial_ = operator_state(layout_, config.filling,
                              single_copy_operator(layout_, config.initial_operator));

    std::size_t total = step_count(config.t_final, config.dt, "t_final");
    if (config.record_times.empty()) {
        const std::size_t points = 20;
        for (std::size_t i = 0; i <= points; ++i) {
            std::size_t s = (i * total + points / 2) / points;
            if (record_steps_.empty() || s > record_steps_.back()) record_steps_.push_back(s);
        }
    } else {
        for (double t : config.record_times) record_steps_.push_back(step_count(t, config.dt, "record time"));
    }

    const int k = layout_.single_modes();
    const std::size_t mask = layout_.single_dim() - 1;
    const auto& blocks = model_.blocks();
    aux_rows_.assign(k + 1, {});
    for (int p = 0; p <= k; ++p)
        for (auto s : blocks[k - p]) aux_rows_[p].push_back(static_cast<std::uint32_t>(~s & mask));

    // Charge blocks (aux popcount p, original popcount q) the evolution touches.
    const std::size_t dim = layout_.single_dim();
    for (int p = 0; p <= k; ++p)
        for (int q = 0; q <= k; ++q) {
            bool occupied = false;
            for (auto b : aux_rows_[p]) {
                for (auto a : blocks[q])
                    if (initial_.amplitudes[b * dim + a] != cplx(0.0)) {
                        occupied = true;
                        break;
                    }
                if (occupied) break;
            }
            if (occupied || !config.restrict_charge_sector) active_blocks_.push_back({p, q});
        }
}

std::vector<double> Evolver::record_times() const {
    std::vector<double> t;
    for (auto s : record_steps_) t.push_back(static_cast<double>(s) * config_.dt);
    return t;
}

CMatrix Evolver::audited_unitary(const CMatrix& h, double& max_dev) const {
    CMatrix v = unitary_step(h, config_.dt);
    double dev = unitarity_deviation(v);
    if (dev > kUnitarityLimit) {
        CMatrix half = unitary_step(h, 0.5 * config_.dt);
        v = half * half;
        dev = unitarity_deviation(v);
        if (dev > kUnitarityLimit)
            throw NumericalError("step unitary failed the unitarity audit (deviation " +
                                 std::to_string(dev) + ")");
    }
    max_dev = std::max(max_dev, dev);
    return v;
}

void Evolver::step(std::vector<cplx>& psi, RngStream& rng, double& max_dev) const {
    const int k = layout_.single_modes();
    const std::size_t dim = layout_.single_dim();
    const auto& blocks = model_.blocks();
    auto h = model_.sample_blocks(rng, config_.dt);

    std::vector<CMatrix> v(k + 1), v_t(k + 1), u_aux(k + 1);
    for (int q = 0; q <= k; ++q) {
        v[q] = audited_unitary(h[q], max_dev);
        std::size_t d = blocks[q].size();
        v_t[q] = CMatrix(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) v_t[q](j, i) = v[q](i, j);
    }
    // The auxiliary copy evolves with p(~b) p(~b') conj(V[~b][~b']).
    for (int p = 0; p <= k; ++p) {
        const auto& src = blocks[k - p];
        const CMatrix& vq = v[k - p];
        std::size_t d = src.size();
        u_aux[p] = CMatrix(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                u_aux[p](i, j) = static_cast<double>(signs_[src[i]] * signs_[src[j]]) * std::conj(vq(i, j));
    }

    const auto& kern = kernels::active();
    for (const auto& [p, q] : active_blocks_) {
        const auto& rows = aux_rows_[p];
        const auto& cols = blocks[q];
        std::size_t nr = rows.size(), nc = cols.size();
        CMatrix blk(nr, nc), tmp(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j) blk(i, j) = psi[rows[i] * dim + cols[j]];
        kern.cgemm(nr, nc, nr, u_aux[p].a.data(), nr, blk.a.data(), nc, tmp.a.data(), nc);
        kern.cgemm(nr, nc, nc, tmp.a.data(), nc, v_t[q].a.data(), nc, blk.a.data(), nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j) psi[rows[i] * dim + cols[j]] = blk(i, j);
    }
}

template <class Visitor>
void Evolver::run(std::uint64_t realization, Visitor&& visit, double& max_dev) const {
    std::uint64_t stream = config_.force_identical_streams ? 0 : realization;
    RngStream rng(derive_stream_seed(config_.seed, stream));
    OperatorState state = initial_;
    std::size_t done = 0;
    for (std::size_t r = 0; r < record_steps_.size(); ++r) {
        for (; done < record_steps_[r]; ++done) step(state.amplitudes, rng, max_dev);
        visit(r, state);
    }
}

std::vector<OperatorState> Evolver::trajectory(std::uint64_t realization) const {
    std::vector<OperatorState> out;
    double dev = 0.0;
    run(realization, [&](std::size_t, OperatorState& st) {
        st.refresh_norm();
        out.push_back(st);
    }, dev);
    return out;
}

RealizationResult Evolver::realization(std::uint64_t index) const {
    RealizationResult res;
    res.t = record_times();
    run(index, [&](std::size_t, OperatorState& st) {
        OracleDistribution d = size_distribution_oracle(st, spectrum_);
        res.max_norm_deviation = std::max(res.max_norm_deviation, std::abs(d.raw_norm - 1.0));
        res.mean_size.push_back(d.mean());
        res.probs.push_back(std::move(d.probs));
    }, res.max_unitarity_deviation);
    return res;
}

std::vector<OperatorState> evolve_operator_state(const OracleConfig& config,
                                                 std::uint64_t realization) {
    return Evolver(config).trajectory(realization);
}

RealizationResult run_realization(const OracleConfig& config, std::uint64_t realization) {
    return Evolver(config).realization(realization);
}

}  // namespace scrambler::oracle
