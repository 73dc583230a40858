#include <doctest.h>

#include <cmath>
#include <random>

#include "scrambler/errors.hpp"
#include "scrambler/oracle.hpp"

using namespace scrambler;
using namespace scrambler::oracle;

namespace {

OracleConfig hopping_config(int n_sys, int n_env, double u1) {
    OracleConfig c;
    c.n_sys = n_sys;
    c.n_env = n_env;
    c.menu.cross[kHoppingKey] = u1;
    c.dt = 0.01;
    c.t_final = 1.0;
    c.realizations = 40;
    c.seed = 1234;
    c.record_times = {0.0, 0.25, 0.5, 1.0};
    return c;
}

// Single-particle Brownian mixing between N system and M environment modes:
// the averaged weight on the system relaxes to N/(N+M) at rate u1 (N+M)/M.
double exact_hopping_mean(int n, int m, double u1, double t) {
    double total = n + m;
    return n / total + (m / total) * std::exp(-u1 * total * t / m);
}

}  // namespace

TEST_CASE("config validation") {
    OracleConfig c = hopping_config(2, 1, 1.0);
    CHECK_NOTHROW(validate_config(c));
    OracleConfig big_dt = c;
    big_dt.dt = 0.1;
    CHECK_THROWS_AS(validate_config(big_dt), ValidationError);
    OracleConfig off_grid = c;
    off_grid.record_times = {0.0, 0.333};
    CHECK_THROWS_AS(validate_config(off_grid), ValidationError);
    OracleConfig bad_op = c;
    bad_op.initial_operator = "c9";
    CHECK_THROWS_AS(validate_config(bad_op), ValidationError);
    OracleConfig one = c;
    one.realizations = 1;
    CHECK_THROWS_AS(disorder_average(one), ValidationError);
}

TEST_CASE("empty menu leaves c1 at size one") {
    OracleConfig c = hopping_config(2, 1, 1.0);
    c.menu = {};
    c.realizations = 2;
    auto res = disorder_average(c);
    for (const auto& p : res.p_mean) {
        CHECK(std::abs(p[1] - 1.0) <= 1e-12);
        CHECK(std::abs(p[0]) <= 1e-12);
    }
    auto cmp = compare_to_meanfield(res.t, res.mean_size, res.mean_size_stderr, res.t,
                                    std::vector<double>(res.t.size(), 1.0));
    CHECK(cmp.exact_agreement);
    CHECK(!cmp.any_flagged);
}

TEST_CASE("step hamiltonian structure") {
    auto layout = make_layout(2, 2);
    CouplingMenu empty;
    RngStream rng(derive_stream_seed(1, 0));
    CHECK(sample_step_hamiltonian(empty, layout, 0.01, rng).max_abs() == 0.0);

    CouplingMenu m;
    m.intra[4] = 0.4;
    m.cross[kHoppingKey] = 0.3;
    m.cross[kScramblingKey] = 1.0;
    m.cross[CrossKey{{1, 1, 1, 1}}] = 0.2;
    CMatrix charge(layout.single_dim(), layout.single_dim());
    for (std::size_t s = 0; s < layout.single_dim(); ++s) charge(s, s) = static_cast<double>(std::popcount(s));
    for (int i = 0; i < 5; ++i) {
        CMatrix h = sample_step_hamiltonian(m, layout, 0.01, rng);
        CHECK((h - h.adjoint()).max_abs() <= 1e-12);
        CHECK((charge * h - h * charge).max_abs() <= 1e-12);
    }
}

TEST_CASE("quadratic intra term has the literal entry variance") {
    auto layout = make_layout(3, 0);
    CouplingMenu m;
    m.intra[2] = 0.9;
    for (auto conv : {VarianceConvention::kRateMatched, VarianceConvention::kVerbatim}) {
        StepHamiltonianModel model(m, layout, conv);
        RngStream rng(derive_stream_seed(5, 0));
        const double dt = 0.02;
        const int draws = 4000;
        double off = 0.0, diag = 0.0;
        for (int k = 0; k < draws; ++k) {
            CMatrix h = model.assemble_dense(model.sample_blocks(rng, dt));
            // One particle on site 0 or site 1: the single-particle block.
            off += std::norm(h(1, 2)) * dt;
            diag += std::norm(h(1, 1)) * dt;
        }
        CHECK(off / draws == doctest::Approx(0.9 / 3.0).epsilon(0.06));
        CHECK(diag / draws == doctest::Approx(0.9 / 3.0).epsilon(0.06));
    }
}

TEST_CASE("frobenius norm matches the analytic variance sum") {
    const int n = 2, m = 2;
    auto layout = make_layout(n, m);
    CouplingMenu menu;
    menu.cross[kHoppingKey] = 0.8;
    StepHamiltonianModel model(menu, layout, VarianceConvention::kRateMatched);
    // N M hermitian pairs, each with 2^(K-2) nonzero entries in X and in X^dag.
    double analytic = n * m * 2.0 * (0.8 / m) * std::pow(2.0, n + m - 2);
    CHECK(model.expected_frobenius_sq_dt() == doctest::Approx(analytic).epsilon(1e-14));
    RngStream rng(derive_stream_seed(6, 0));
    double sum = 0.0;
    const int draws = 1000;
    for (int k = 0; k < draws; ++k) {
        CMatrix h = model.assemble_dense(model.sample_blocks(rng, 0.05));
        double f = 0.0;
        for (auto v : h.a) f += std::norm(v);
        sum += f * 0.05;
    }
    CHECK(sum / draws == doctest::Approx(analytic).epsilon(0.05));
}

TEST_CASE("verbatim hopping has no variance") {
    auto layout = make_layout(2, 1);
    CouplingMenu menu;
    menu.cross[kHoppingKey] = 1.0;
    StepHamiltonianModel verbatim(menu, layout, VarianceConvention::kVerbatim);
    CHECK(verbatim.channels().empty());
    OracleConfig c = hopping_config(2, 1, 1.0);
    c.convention = VarianceConvention::kVerbatim;
    c.realizations = 3;
    auto res = disorder_average(c);
    CHECK(std::abs(res.mean_size.back() - 1.0) <= 1e-12);
    OracleConfig rm = hopping_config(2, 1, 1.0);
    auto decayed = disorder_average(rm);
    CHECK(decayed.mean_size.back() < 0.9);
}

TEST_CASE("matrix exponential") {
    CMatrix h(2, 2);
    h(0, 1) = 1.0;
    h(1, 0) = 1.0;
    for (double dt : {1e-3, 0.3, 2.0, 7.0}) {
        CMatrix u = unitary_step(h, dt);
        CHECK(std::abs(u(0, 0) - std::cos(dt)) <= 1e-13);
        CHECK(std::abs(u(0, 1) - cplx(0.0, -std::sin(dt))) <= 1e-13);
        CHECK(unitarity_deviation(u) <= 1e-13);
    }
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    CMatrix r(10, 10);
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            cplx v(nd(gen), i == j ? 0.0 : nd(gen));
            r(i, j) = v;
            r(j, i) = std::conj(v);
        }
    CMatrix full = unitary_step(r, 0.8);
    CMatrix half = unitary_step(r, 0.4);
    CHECK((full - half * half).max_abs() <= 1e-12);
    CHECK(unitarity_deviation(full) <= 1e-12);
}

TEST_CASE("pure hopping follows the exact finite-environment relaxation") {
    for (int m : {1, 2}) {
        OracleConfig c = hopping_config(2, m, 1.0);
        c.realizations = 200;
        auto res = disorder_average(c);
        CHECK(res.max_unitarity_deviation <= 1e-10);
        CHECK(res.max_norm_deviation <= 1e-10);
        for (std::size_t it = 0; it < res.t.size(); ++it) {
            double expect = exact_hopping_mean(2, m, 1.0, res.t[it]);
            CHECK_MESSAGE(std::abs(res.mean_size[it] - expect) <= 4.0 * res.mean_size_stderr[it] + 0.01,
                          "M=" << m << " t=" << res.t[it] << " got " << res.mean_size[it] << " expected "
                               << expect);
        }
    }
}

TEST_CASE("halving dt stays within the Monte Carlo error") {
    OracleConfig c = hopping_config(2, 1, 1.0);
    c.realizations = 100;
    auto coarse = disorder_average(c);
    c.dt = 0.005;
    c.seed = 99;
    auto fine = disorder_average(c);
    for (std::size_t it = 0; it < coarse.t.size(); ++it) {
        double se = std::hypot(coarse.mean_size_stderr[it], fine.mean_size_stderr[it]);
        CHECK(std::abs(coarse.mean_size[it] - fine.mean_size[it]) <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("identical streams give zero standard error") {
    OracleConfig c = hopping_config(2, 1, 1.0);
    c.realizations = 2;
    c.force_identical_streams = true;
    auto res = disorder_average(c);
    for (double se : res.mean_size_stderr) CHECK(se == 0.0);
    for (const auto& row : res.p_stderr)
        for (double se : row) CHECK(se == 0.0);
}

TEST_CASE("standard error shrinks like one over root realizations") {
    double ratio_sum = 0.0;
    const int trials = 10;
    for (int k = 0; k < trials; ++k) {
        OracleConfig c = hopping_config(1, 1, 1.0);
        c.record_times = {0.0, 0.5};
        c.t_final = 0.5;
        c.seed = 1000 + k;
        c.realizations = 40;
        double se1 = disorder_average(c).mean_size_stderr[1];
        c.realizations = 80;
        c.seed = 5000 + k;
        double se2 = disorder_average(c).mean_size_stderr[1];
        ratio_sum += se2 / se1;
    }
    CHECK(ratio_sum / trials == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.2));
}

TEST_CASE("results are deterministic across thread counts") {
    OracleConfig c = hopping_config(2, 1, 1.0);
    c.menu.cross[kScramblingKey] = 1.0;
    c.realizations = 6;
    c.threads = 1;
    auto a = disorder_average(c);
    c.threads = 3;
    auto b = disorder_average(c);
    auto again = disorder_average(c);
    CHECK(a.p_mean == b.p_mean);
    CHECK(a.p_stderr == b.p_stderr);
    CHECK(b.mean_size == again.mean_size);
}

TEST_CASE("charge-sector restriction is exact") {
    OracleConfig c = hopping_config(2, 2, 0.5);
    c.menu.cross[kScramblingKey] = 1.0;
    c.filling = Filling::from_density(0.3);
    c.realizations = 3;
    for (const char* op : {"c1", "cdag2", "charge1"}) {
        c.initial_operator = op;
        c.restrict_charge_sector = false;
        auto full = run_realization(c, 1);
        c.restrict_charge_sector = true;
        auto part = run_realization(c, 1);
        for (std::size_t it = 0; it < full.probs.size(); ++it)
            for (std::size_t s = 0; s < full.probs[it].size(); ++s)
                CHECK(std::abs(full.probs[it][s] - part.probs[it][s]) <= 1e-12);
    }
}

TEST_CASE("per-realization normalization and t = 0") {
    OracleConfig c = hopping_config(3, 1, 0.2);
    c.menu.cross[kScramblingKey] = 1.0;
    c.menu.intra[4] = 0.5;
    c.filling = Filling::from_density(0.4);
    auto r = run_realization(c, 0);
    CHECK(std::abs(r.probs[0][1] - 1.0) <= 1e-12);
    for (const auto& p : r.probs) {
        double sum = 0.0;
        for (double x : p) {
            CHECK(x >= -1e-15);
            sum += x;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-10);
    }
    CHECK(r.max_unitarity_deviation <= 1e-10);
    CHECK(r.max_norm_deviation <= 1e-10);
    auto states = evolve_operator_state(c, 0);
    CHECK(states.size() == c.record_times.size());
}

TEST_CASE("particle-hole mirror is statistically indistinguishable") {
    OracleConfig c;
    c.n_sys = 2;
    c.n_env = 1;
    c.menu.cross[kHoppingKey] = 0.1;
    c.menu.cross[kScramblingKey] = 1.0;
    c.dt = 0.01;
    c.t_final = 1.0;
    c.realizations = 60;
    c.record_times = {0.5, 1.0};
    c.filling = Filling::from_mu(0.8);
    c.seed = 11;
    auto a = disorder_average(c);
    c.filling = Filling::from_mu(-0.8);
    c.seed = 12;
    auto b = disorder_average(c);
    for (std::size_t it = 0; it < a.t.size(); ++it)
        for (std::size_t s = 0; s < a.p_mean[it].size(); ++s) {
            double se = std::hypot(a.p_stderr[it][s], b.p_stderr[it][s]);
            double diff = std::abs(a.p_mean[it][s] - b.p_mean[it][s]);
            CHECK(diff <= 3.0 * se + 1e-12);
        }
}

TEST_CASE("comparison report") {
    std::vector<double> t{0.0, 1.0}, mean{1.0, 0.5}, se{0.0, 0.01};
    auto same = compare_to_meanfield(t, mean, se, t, mean);
    CHECK(same.exact_agreement);
    for (double z : same.z_scores) CHECK(z == 0.0);
    auto off = compare_to_meanfield(t, mean, se, t, {1.0, 0.8});
    CHECK(off.any_flagged);
    CHECK(off.flagged[1]);
    CHECK(off.sup_discrepancy == doctest::Approx(0.3));
    auto within = compare_to_meanfield(t, mean, se, t, {1.0, 0.52});
    CHECK(!within.any_flagged);
    CHECK_THROWS_AS(compare_to_meanfield(t, mean, se, {0.0, 2.0}, mean), UsageError);
    CHECK_THROWS_AS(compare_to_meanfield(t, mean, se, {0.0}, {1.0}), UsageError);
}

TEST_CASE("environment sweep") {
    OracleConfig c = hopping_config(1, 1, 1.0);
    c.realizations = 200;
    auto sweep = environment_sweep(c, {1, 2, 3, 4});
    REQUIRE(sweep.size() == 4);
    for (const auto& e : sweep) {
        double expect = exact_hopping_mean(1, e.n_env, 1.0, 1.0);
        CHECK(std::abs(e.result.mean_size.back() - expect) <= 4.0 * e.result.mean_size_stderr.back() + 0.01);
    }
}
