#include <doctest.h>

#include <cmath>

#include "scrambler/errors.hpp"
#include "scrambler/sizeflow.hpp"

using namespace scrambler;

TEST_CASE("initial distribution is a single size-one peak") {
    Filling f = Filling::from_density(0.5);
    auto d = size_distribution_from_series(SimplifiedModel(0.1, 1.0, f).menu(), f, {0.0});
    REQUIRE(d.size() == 1);
    for (std::size_t s = 0; s < d[0].probs.size(); ++s) CHECK(d[0].probs[s] == (s == 1 ? 1.0 : 0.0));
    CHECK(d[0].tail_mass == 0.0);
    CHECK(!d[0].truncation_warning);
}

TEST_CASE("pure hopping is solvable by hand") {
    CouplingMenu m;
    m.cross[kHoppingKey] = 0.7;
    Filling f = Filling::from_density(0.2);
    auto d = size_distribution_from_series(m, f, {0.3, 1.0, 4.0});
    for (const auto& x : d) {
        CHECK(std::abs(x.probs[1] - std::exp(-0.7 * x.t)) < 1e-11);
        CHECK(std::abs(x.probs[0] - (1.0 - std::exp(-0.7 * x.t))) < 1e-11);
        for (std::size_t s = 2; s < x.probs.size(); ++s) CHECK(std::abs(x.probs[s]) < 1e-14);
    }
}

TEST_CASE("series matches the closed-form distribution") {
    for (double r : {0.0, 0.5, 1.0, 1.5}) {
        for (double n : {0.1, 0.5}) {
            Filling f = Filling::from_density(n);
            SimplifiedModel model = SimplifiedModel::from_ratio(r, 1.0, f);
            auto dyn = SimplifiedDynamics::from_model(model);
            std::vector<double> t{0.0, 1.0, 5.0, 20.0};
            SeriesOptions opt;
            opt.tail_budget = 1e-9;
            auto dists = size_distribution_adaptive(model.menu(), f, t, opt);
            for (const auto& d : dists) {
                if (std::exp(dyn.kappa * d.t) > 16.0) continue;
                CHECK(d.tail_mass <= 1e-8);
                for (std::size_t s = 0; s <= 32; ++s)
                    CHECK(std::abs(d.probs[s] - closed_form_P(dyn, static_cast<long long>(s), d.t)) <= 1e-8);
            }
        }
    }
}

TEST_CASE("truncation is reported and adaptive growth clears it") {
    Filling f = Filling::from_density(0.5);
    SimplifiedModel model = SimplifiedModel::from_ratio(0.5, 1.0, f);
    double t = std::log(16.0) / model.kappa();
    SeriesOptions opt;
    opt.s_max = 16;
    auto small = size_distribution_from_series(model.menu(), f, {t}, opt);
    CHECK(small[0].truncation_warning);
    CHECK(small[0].tail_mass > opt.tail_budget);

    auto grown = size_distribution_adaptive(model.menu(), f, {t}, opt);
    CHECK(!grown[0].truncation_warning);
    CHECK(grown[0].tail_mass <= opt.tail_budget);
    CHECK(grown[0].probs.size() > 17);

    auto capped = size_distribution_adaptive(model.menu(), f, {t}, opt, 32);
    CHECK(capped[0].truncation_warning);
}

TEST_CASE("series evaluation agrees with the scalar flow") {
    CouplingMenu m;
    m.intra[4] = 0.6;
    m.cross[kHoppingKey] = 0.1;
    m.cross[kScramblingKey] = 0.8;
    m.cross[CrossKey{{1, 1, 1, 1}}] = 0.2;
    Filling f = Filling::from_density(0.35);
    std::vector<double> t{0.0, 0.7, 2.0, 5.0};
    SeriesOptions opt;
    opt.s_max = 256;
    auto series = generating_series(m, f, t, opt);
    std::vector<double> xs{0.0, 0.3, 0.6, 0.9};
    auto grid = integrate_generating_function(m, f, xs, t, 1e-12);
    for (std::size_t it = 0; it < t.size(); ++it)
        for (std::size_t ix = 0; ix < xs.size(); ++ix)
            CHECK(std::abs(series[it].evaluate(xs[ix]) - grid.z[ix][it]) <= std::max(1e-8, series[it].tail));
}

TEST_CASE("distribution is particle-hole symmetric") {
    for (double n : {0.2, 0.4}) {
        Filling a = Filling::from_density(n), b = Filling::from_density(1.0 - n);
        auto pa = size_distribution_from_series(SimplifiedModel(0.05, 1.0, a).menu(), a, {1.0, 6.0});
        auto pb = size_distribution_from_series(SimplifiedModel(0.05, 1.0, b).menu(), b, {1.0, 6.0});
        for (std::size_t i = 0; i < pa.size(); ++i)
            for (std::size_t s = 0; s < pa[i].probs.size(); ++s)
                CHECK(std::abs(pa[i].probs[s] - pb[i].probs[s]) < 1e-13);
    }
}

TEST_CASE("mean of the series distribution tracks the exponent") {
    Filling f = Filling::from_density(0.5);
    SimplifiedModel model(0.05, 1.0, f);
    SeriesOptions opt;
    opt.s_max = 1024;
    auto d = size_distribution_from_series(model.menu(), f, {2.0, 6.0}, opt);
    for (const auto& x : d) CHECK(x.mean() == doctest::Approx(std::exp(model.kappa() * x.t)).epsilon(1e-7));
}

TEST_CASE("argument errors") {
    Filling f = Filling::from_density(0.5);
    CouplingMenu m = SimplifiedModel(0.1, 1.0, f).menu();
    SeriesOptions opt;
    opt.s_max = 0;
    CHECK_THROWS_AS(size_distribution_from_series(m, f, {1.0}, opt), DomainError);
    CHECK_THROWS_AS(size_distribution_from_series(m, f, {2.0, 1.0}), UsageError);
    CHECK_THROWS_AS(size_distribution_from_series(m, f, {-1.0}), DomainError);
}
