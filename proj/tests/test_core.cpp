#include <doctest.h>

#include <cmath>
#include <random>

#include "scrambler/core.hpp"
#include "scrambler/errors.hpp"
#include "scrambler/menu_json.hpp"

using namespace scrambler;

TEST_CASE("filling from chemical potential") {
    CHECK(Filling::from_mu(0.0).n() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(Filling::from_mu(std::log(9.0)).n() == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(Filling::from_mu(-std::log(9.0)).n() == doctest::Approx(0.9).epsilon(1e-14));
    CHECK_THROWS_AS(Filling::from_mu(NAN), DomainError);
    CHECK_THROWS_AS(Filling::from_mu(1e4), DomainError);
}

TEST_CASE("chemical potential from filling") {
    CHECK(std::abs(Filling::from_density(0.5).mu()) < 1e-15);
    CHECK(Filling::from_density(0.1).mu() == doctest::Approx(std::log(9.0)).epsilon(1e-14));
    CHECK(Filling::from_density(0.9).mu() == doctest::Approx(-std::log(9.0)).epsilon(1e-14));
    CHECK_THROWS_AS(Filling::from_density(0.0), DomainError);
    CHECK_THROWS_AS(Filling::from_density(1.0), DomainError);
    CHECK_THROWS_AS(Filling::from_density(NAN), DomainError);
}

TEST_CASE("round trip n -> mu -> n") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
    for (int i = 0; i < 1000; ++i) {
        double n = u(gen);
        double back = filling_from_mu(mu_from_filling(n).mu()).n();
        CHECK(std::abs(back - n) <= 1e-12);
    }
}

TEST_CASE("amplitude is sqrt(n(1-n)) for random mu") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        Filling f = Filling::from_mu(u(gen));
        REQUIRE(std::abs(f.amplitude() - std::sqrt(f.n() * (1.0 - f.n()))) <= 1e-12);
    }
}

TEST_CASE("menu validation examples") {
    CouplingMenu syk4;
    syk4.intra[4] = 1.0;
    CHECK(validate_menu(syk4).empty());

    CouplingMenu hop;
    hop.cross[kHoppingKey] = 0.5;
    CHECK(validate_menu(hop).empty());

    CouplingMenu bad;
    bad.cross[CrossKey{{2, 1, 0, 0}}] = 1.0;
    auto v = validate_menu(bad);
    REQUIRE(!v.empty());
    CHECK_THROWS_AS(require_valid(bad), ValidationError);

    CouplingMenu odd;
    odd.intra[3] = 1.0;
    CHECK(!validate_menu(odd).empty());

    CouplingMenu negative;
    negative.cross[kHoppingKey] = -1.0;
    CHECK(!validate_menu(negative).empty());

    CouplingMenu sys_only;
    sys_only.cross[CrossKey{{1, 1, 0, 0}}] = 1.0;
    CHECK(!validate_menu(sys_only).empty());
}

TEST_CASE("validator accepts random tuples iff charge is conserved") {
    std::mt19937_64 gen(17);
    std::uniform_int_distribution<int> d(0, 3);
    for (int i = 0; i < 2000; ++i) {
        CrossKey k{{d(gen), d(gen), d(gen), d(gen)}};
        if (k.total_order() < 2 || k.environment_order() < 1) continue;
        CouplingMenu m;
        m.cross[k] = 1.0;
        bool conserved = k.p[0] + k.p[2] == k.p[1] + k.p[3];
        CHECK(validate_menu(m).empty() == conserved);
    }
}

TEST_CASE("term rates") {
    Filling half = Filling::from_density(0.5);
    CouplingMenu m;
    m.intra[4] = 1.0;
    m.cross[kHoppingKey] = 0.5;
    m.cross[CrossKey{{0, 0, 1, 1}}] = 3.0;
    auto terms = expand_terms(m);
    REQUIRE(terms.size() == 3);
    for (const auto& t : terms) {
        double rate = term_rate(t, half);
        if (t.key.is_intra()) CHECK(rate == doctest::Approx(0.25));
        else if (t.key.cross == kHoppingKey) CHECK(rate == doctest::Approx(0.5));
        else CHECK(rate == 0.0);
    }
}

TEST_CASE("simplified model") {
    Filling f = Filling::from_density(0.3);
    SimplifiedModel m(0.1, 1.0, f);
    CHECK(m.kappa() == doctest::Approx(0.11).epsilon(1e-14));
    CHECK(m.r() == doctest::Approx(0.1 / 0.21).epsilon(1e-14));
    auto from_r = SimplifiedModel::from_ratio(0.5, 2.0, f);
    CHECK(from_r.u1() == doctest::Approx(0.21).epsilon(1e-14));
    CHECK(m.menu().cross.size() == 2);
    CHECK(SimplifiedModel(0.0, 1.0, f).menu().cross.count(kHoppingKey) == 0);
    CHECK_THROWS_AS(SimplifiedModel(0.1, 0.0, f), DomainError);
    CHECK_THROWS_AS(SimplifiedModel(-0.1, 1.0, f), DomainError);
}

TEST_CASE("menu json round trip") {
    auto doc = nlohmann::json::parse(R"({"intra": {"4": 1.0}, "cross": [{"p": [1,0,0,1], "u": 0.5}]})");
    CouplingMenu m = menu_from_json(doc);
    CHECK(m.intra.at(4) == 1.0);
    CHECK(m.cross.at(kHoppingKey) == 0.5);
    CouplingMenu back = menu_from_json(menu_to_json(m));
    CHECK(back.intra == m.intra);
    CHECK(back.cross == m.cross);
    CHECK_THROWS_AS(menu_from_json(nlohmann::json::parse(R"({"cross": [{"p": [2,1,0,0], "u": 1}]})")),
                    ValidationError);
    CHECK_THROWS_AS(menu_from_json(nlohmann::json::parse(R"({"intra": {"four": 1}})")), ValidationError);
    CHECK(filling_from_json(nlohmann::json::parse(R"({"mu": 0})")).n() == doctest::Approx(0.5));
    CHECK_THROWS_AS(filling_from_json(nlohmann::json::parse(R"({"n": 0.5, "mu": 0})")), ValidationError);
}
