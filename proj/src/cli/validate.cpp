#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "scrambler/cli.hpp"
#include "scrambler/errors.hpp"
#include "scrambler/greens.hpp"
#include "scrambler/kernels.hpp"
#include "scrambler/menu_json.hpp"
#include "scrambler/oracle.hpp"
#include "scrambler/scramblon.hpp"
#include "scrambler/sizeflow.hpp"

namespace scrambler::cli {

namespace {

std::string describe(const char* what, double value, double limit) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s = %.3e (limit %.1e)", what, value, limit);
    return buf;
}

SuiteResult check(const std::string& name, const char* what, double value, double limit) {
    return {name, std::isfinite(value) && value <= limit, describe(what, value, limit)};
}

SimplifiedModel reference_model(double r) {
    return SimplifiedModel::from_ratio(r, 1.0, Filling::from_density(0.5));
}

SuiteResult core_round_trip() {
    double worst = 0.0;
    for (double n : {1e-6, 0.1, 0.37, 0.5, 0.9, 1 - 1e-6}) {
        Filling f = Filling::from_density(n);
        worst = std::max(worst, std::abs(Filling::from_mu(f.mu()).n() - n) / n);
    }
    CouplingMenu menu;
    menu.intra[4] = 0.7;
    menu.cross[kHoppingKey] = 0.2;
    menu.cross[kScramblingKey] = 1.1;
    bool same = menu_from_json(menu_to_json(menu)).cross == menu.cross;
    SuiteResult out = check("core.round_trip", "max relative filling error", worst, 1e-12);
    out.passed = out.passed && same;
    return out;
}

SuiteResult greens_sum_rule() {
    CouplingMenu menu = reference_model(0.3).menu();
    Filling f = Filling::from_density(0.3);
    double worst = 0.0;
    for (double t : {0.1, 0.5, 2.0}) {
        GreensMatrix g = greens_matrix(menu, f, t);
        auto gr = retarded_greens(menu, f, t);
        // For t > 0 the retarded function is -i (G^{uu} - G^{ud}).
        worst = std::max(worst, std::abs(gr.imag() + (g.uu - g.ud)));
    }
    return check("greens.retarded_identity", "max deviation", worst, 1e-13);
}

SuiteResult ode_vs_closed_form() {
    SimplifiedModel model = reference_model(0.5);
    auto dyn = SimplifiedDynamics::from_model(model);
    std::vector<double> t{0.0, 0.5, 1.0, 2.0, 4.0};
    auto grid = integrate_generating_function(model.menu(), model.filling(), {0.0, 0.3, 0.7}, t, 1e-11);
    double worst = 0.0;
    for (std::size_t ix = 0; ix < grid.x.size(); ++ix)
        for (std::size_t it = 0; it < t.size(); ++it)
            worst = std::max(worst, std::abs(grid.z[ix][it] - closed_form_Z(dyn, grid.x[ix], t[it])));
    return check("sizeflow.ode_vs_closed_form", "max |Z_ode - Z_closed|", worst, 1e-8);
}

SuiteResult series_vs_closed_form() {
    SimplifiedModel model = reference_model(0.5);
    auto dyn = SimplifiedDynamics::from_model(model);
    SeriesOptions opt;
    opt.s_max = 128;
    auto dists = size_distribution_from_series(model.menu(), model.filling(), {1.0, 2.0}, opt);
    double worst = 0.0;
    for (const auto& d : dists)
        for (std::size_t s = 0; s < d.probs.size(); ++s)
            worst = std::max(worst, std::abs(d.probs[s] - closed_form_P(dyn, static_cast<long long>(s), d.t)));
    return check("sizeflow.series_vs_closed_form", "max |P_series - P_closed|", worst, 1e-9);
}

SuiteResult criticality() {
    double worst = 0.0;
    for (double n : {0.2, 0.5, 0.8}) {
        Filling f = Filling::from_density(n);
        CouplingMenu menu = reference_model(0.5).menu();
        double uc = critical_coupling(menu, f, TermKey::coupling(kHoppingKey), 1e-13);
        worst = std::max(worst, std::abs(uc - f.pauli()));
    }
    return check("sizeflow.critical_coupling", "max |u1_c - u3 n(1-n)|", worst, 1e-10);
}

SuiteResult scramblon_normalization() {
    ScramblonParams params(0.4, 0.5, 1e4, 0.6);
    double worst = 0.0;
    for (double lambda : {0.1, 1.0, 10.0}) {
        double mass = continuum_regular_mass(params, lambda).value;
        worst = std::max(worst, std::abs(mass + params.r() - 1.0));
    }
    return check("scramblon.normalization", "max |r + mass - 1|", worst, 1e-8);
}

SuiteResult oracle_gates() {
    oracle::OracleConfig c;
    c.n_sys = 2;
    c.n_env = 1;
    c.menu.cross[kHoppingKey] = 1.0;
    c.dt = 0.01;
    c.t_final = 0.2;
    c.realizations = 4;
    c.seed = 7;
    c.record_times = {0.0, 0.1, 0.2};
    auto res = oracle::disorder_average(c);
    double dev = std::max(res.max_unitarity_deviation, res.max_norm_deviation);
    double p0 = std::abs(res.p_mean.front()[1] - 1.0);
    SuiteResult out = check("oracle.unitarity_and_norm", "max deviation", dev, 1e-10);
    out.passed = out.passed && p0 < 1e-12;
    return out;
}

SuiteResult kernel_equivalence() {
    const kernels::KernelTable* scalar = kernels::table(kernels::Isa::kScalar);
    const kernels::KernelTable* simd = kernels::table(kernels::Isa::kAvx2);
    if (!simd) return {"kernels.equivalence", true, "AVX2 unavailable, scalar only"};
    std::mt19937_64 gen(11);
    std::normal_distribution<double> nd;
    const std::size_t m = 13, n = 11, k = 9;
    std::vector<kernels::cplx> a(m * k), b(k * n), c1(m * n), c2(m * n);
    for (auto& v : a) v = {nd(gen), nd(gen)};
    for (auto& v : b) v = {nd(gen), nd(gen)};
    scalar->cgemm(m, n, k, a.data(), k, b.data(), n, c1.data(), n);
    simd->cgemm(m, n, k, a.data(), k, b.data(), n, c2.data(), n);
    double worst = 0.0;
    for (std::size_t i = 0; i < c1.size(); ++i) worst = std::max(worst, std::abs(c1[i] - c2[i]));
    std::vector<double> x(37), y(37), o1(37), o2(37);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = nd(gen), y[i] = nd(gen);
    scalar->convolve_truncated(x.data(), y.data(), o1.data(), x.size());
    simd->convolve_truncated(x.data(), y.data(), o2.data(), x.size());
    for (std::size_t i = 0; i < o1.size(); ++i) worst = std::max(worst, std::abs(o1[i] - o2[i]));
    return check("kernels.equivalence", "max scalar/avx2 difference", worst, 1e-12);
}

}  // namespace

std::vector<SuiteResult> run_validation_suites() {
    const std::vector<std::function<SuiteResult()>> suites{
        core_round_trip, greens_sum_rule,        ode_vs_closed_form, series_vs_closed_form,
        criticality,     scramblon_normalization, oracle_gates,       kernel_equivalence};
    std::vector<SuiteResult> out;
    for (std::size_t i = 0; i < suites.size(); ++i) {
        try {
            out.push_back(suites[i]());
        } catch (const std::exception& e) {
            out.push_back({"suite " + std::to_string(i), false, std::string("threw: ") + e.what()});
        }
    }
    return out;
}

}  // namespace scrambler::cli
