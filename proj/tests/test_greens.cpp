#include <doctest.h>

#include <cmath>

#include "scrambler/errors.hpp"
#include "scrambler/greens.hpp"

using namespace scrambler;

namespace {

CouplingMenu mixed_menu() {
    CouplingMenu m;
    m.intra[4] = 0.7;
    m.cross[kHoppingKey] = 0.5;
    m.cross[kScramblingKey] = 2.0;
    m.cross[CrossKey{{1, 1, 1, 1}}] = 0.3;
    return m;
}

}  // namespace

TEST_CASE("quasiparticle rate examples") {
    CouplingMenu syk4;
    syk4.intra[4] = 1.0;
    CHECK(quasiparticle_rate(syk4, Filling::from_density(0.5)).gamma == doctest::Approx(0.25).epsilon(1e-15));

    CouplingMenu q2;
    q2.intra[2] = 1.0;
    for (double n : {0.1, 0.5, 0.77}) CHECK(quasiparticle_rate(q2, Filling::from_density(n)).gamma == 1.0);

    CouplingMenu simp;
    simp.cross[kHoppingKey] = 0.5;
    simp.cross[kScramblingKey] = 2.0;
    auto rate = quasiparticle_rate(simp, Filling::from_density(0.5));
    CHECK(rate.gamma == doctest::Approx(1.0).epsilon(1e-15));
    double sum = 0.0;
    for (const auto& c : rate.breakdown) {
        CHECK(c.value >= 0.0);
        sum += c.value;
    }
    CHECK(std::abs(sum - rate.gamma) <= 1e-12);
}

TEST_CASE("rate is particle-hole symmetric and monotone in the menu") {
    CouplingMenu m = mixed_menu();
    for (double n : {0.05, 0.2, 0.4}) {
        double a = quasiparticle_rate(m, Filling::from_density(n)).gamma;
        double b = quasiparticle_rate(m, Filling::from_density(1.0 - n)).gamma;
        CHECK(std::abs(a - b) <= 1e-14 * a);
        CouplingMenu more = m;
        more.intra[2] = 0.01;
        CHECK(quasiparticle_rate(more, Filling::from_density(n)).gamma > a);
    }
}

TEST_CASE("greens matrix at 0+") {
    CouplingMenu m = mixed_menu();
    auto g = greens_matrix(m, Filling::from_density(0.5), 0.0, Side::kPositive);
    CHECK(g.uu == doctest::Approx(0.5));
    CHECK(g.dd == doctest::Approx(-0.5));
    CHECK(g.ud == doctest::Approx(-0.5));
    CHECK(g.du == doctest::Approx(0.5));

    auto h = greens_matrix(m, Filling::from_density(0.3), 0.0, Side::kPositive);
    CHECK(h.uu == doctest::Approx(0.7));
    CHECK(h.dd == doctest::Approx(-0.3));
    CHECK(h.ud == doctest::Approx(-0.3));
    CHECK(h.du == doctest::Approx(0.7));
    CHECK(h.du - h.ud == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS(greens_matrix(m, Filling::from_density(0.3), 0.0));
}

TEST_CASE("greens matrix decays at rate gamma/2") {
    CouplingMenu m = mixed_menu();
    Filling f = Filling::from_density(0.5);
    double gamma = quasiparticle_rate(m, f).gamma;
    auto g = greens_matrix(m, f, 4.0 * std::log(2.0) / gamma);
    CHECK(g.du == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(g.uu == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(g.ud == doctest::Approx(-0.125).epsilon(1e-14));
}

TEST_CASE("retarded and advanced functions") {
    CouplingMenu m = mixed_menu();
    Filling f = Filling::from_density(0.4);
    double gamma = quasiparticle_rate(m, f).gamma;
    CHECK(retarded_greens(m, f, -1.0) == std::complex<double>(0.0, 0.0));
    auto at0 = retarded_greens(m, f, 0.0, Side::kPositive);
    CHECK(at0.real() == 0.0);
    CHECK(at0.imag() == doctest::Approx(-1.0));
    auto later = retarded_greens(m, f, 2.0 / gamma);
    CHECK(later.imag() == doctest::Approx(-std::exp(-1.0)).epsilon(1e-14));
    CHECK(advanced_greens(m, f, 1.0) == std::complex<double>(0.0, 0.0));
    CHECK(advanced_greens(m, f, -2.0 / gamma).imag() == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

    double prev = 2.0;
    for (double t = 0.01; t < 20.0; t *= 1.3) {
        double mag = std::abs(retarded_greens(m, f, t));
        CHECK(mag <= prev);
        prev = mag;
    }
}
