#include "scrambler/greens.hpp"

#include <cmath>

#include "scrambler/errors.hpp"

namespace scrambler {

QuasiparticleRate quasiparticle_rate(const CouplingMenu& menu, const Filling& filling) {
    require_valid(menu);
    QuasiparticleRate out;
    for (const auto& term : expand_terms(menu)) {
        double rate = term_rate(term, filling);
        out.breakdown.push_back({term.key, rate});
        out.gamma += rate;
    }
    return out;
}

namespace {

double side_sign(double t, Side side) {
    if (t > 0.0) return 1.0;
    if (t < 0.0) return -1.0;
    return side == Side::kPositive ? 1.0 : -1.0;
}

GreensMatrix build(double gamma, const Filling& filling, double t, double sgn) {
    double n = filling.n();
    double decay = std::exp(-0.5 * gamma * std::abs(t));
    GreensMatrix g;
    g.t = t;
    g.uu = (0.5 - n + 0.5 * sgn) * decay;
    g.dd = (0.5 - n - 0.5 * sgn) * decay;
    g.ud = -n * decay;
    g.du = (1.0 - n) * decay;
    return g;
}

void reject_zero(double t) {
    if (t == 0.0)
        throw DomainError("Green's function is discontinuous at t = 0; pass an explicit side");
    if (!std::isfinite(t)) throw DomainError("time must be finite");
}

}  // namespace

GreensMatrix greens_matrix(const CouplingMenu& menu, const Filling& filling, double t) {
    reject_zero(t);
    return build(quasiparticle_rate(menu, filling).gamma, filling, t, side_sign(t, Side::kPositive));
}

GreensMatrix greens_matrix(const CouplingMenu& menu, const Filling& filling, double t, Side side) {
    if (!std::isfinite(t)) throw DomainError("time must be finite");
    return build(quasiparticle_rate(menu, filling).gamma, filling, t, side_sign(t, side));
}

std::complex<double> retarded_greens(const CouplingMenu& menu, const Filling& filling, double t) {
    reject_zero(t);
    return retarded_greens(menu, filling, t, Side::kPositive);
}

std::complex<double> retarded_greens(const CouplingMenu& menu, const Filling& filling, double t,
                                     Side side) {
    if (!std::isfinite(t)) throw DomainError("time must be finite");
    double gamma = quasiparticle_rate(menu, filling).gamma;
    if (side_sign(t, side) < 0.0) return {0.0, 0.0};
    return {0.0, -std::exp(-0.5 * gamma * std::abs(t))};
}

std::complex<double> advanced_greens(const CouplingMenu& menu, const Filling& filling, double t) {
    reject_zero(t);
    return advanced_greens(menu, filling, t, Side::kPositive);
}

std::complex<double> advanced_greens(const CouplingMenu& menu, const Filling& filling, double t,
                                     Side side) {
    if (!std::isfinite(t)) throw DomainError("time must be finite");
    double gamma = quasiparticle_rate(menu, filling).gamma;
    if (side_sign(t, side) > 0.0) return {0.0, 0.0};
    return {0.0, std::exp(-0.5 * gamma * std::abs(t))};
}

}  // namespace scrambler
