#include "scrambler/core.hpp"

#include <cmath>
#include <sstream>

#include "scrambler/errors.hpp"

namespace scrambler {

std::string CrossKey::label() const {
    std::ostringstream os;
    os << "(" << p[0] << "," << p[1] << "," << p[2] << "," << p[3] << ")";
    return os.str();
}

std::string TermKey::label() const {
    if (is_intra()) return "q=" + std::to_string(q);
    return cross.label();
}

std::vector<MenuViolation> validate_menu(const CouplingMenu& menu) {
    std::vector<MenuViolation> out;
    auto check_strength = [&](const std::string& key, double v) {
        if (!std::isfinite(v)) out.push_back({key, "strength must be finite"});
        else if (v < 0.0) out.push_back({key, "strength must be non-negative"});
    };

    for (const auto& [q, j] : menu.intra) {
        std::string key = "intra q=" + std::to_string(q);
        if (q < 2 || q % 2 != 0) out.push_back({key, "q must be even and >= 2"});
        check_strength(key, j);
    }
    for (const auto& [k, u] : menu.cross) {
        std::string key = "cross " + k.label();
        const auto& p = k.p;
        if (p[0] < 0 || p[1] < 0 || p[2] < 0 || p[3] < 0)
            out.push_back({key, "every p_l must be >= 0"});
        if (p[0] + p[2] != p[1] + p[3])
            out.push_back({key, "charge conservation requires p1+p3 = p2+p4"});
        if (k.total_order() < 2) out.push_back({key, "p1+p2+p3+p4 must be >= 2"});
        if (k.environment_order() < 1)
            out.push_back({key, "cross term must touch the environment (p3+p4 >= 1)"});
        check_strength(key, u);
    }
    return out;
}

void require_valid(const CouplingMenu& menu) {
    auto violations = validate_menu(menu);
    if (violations.empty()) return;
    std::ostringstream os;
    os << "invalid coupling menu:";
    for (const auto& v : violations) os << " [" << v.key << ": " << v.rule << "]";
    throw ValidationError(os.str());
}

std::vector<MenuTerm> expand_terms(const CouplingMenu& menu) {
    std::vector<MenuTerm> out;
    out.reserve(menu.intra.size() + menu.cross.size());
    for (const auto& [q, j] : menu.intra) out.push_back({TermKey::intra(q), j, q, q - 1});
    for (const auto& [k, u] : menu.cross)
        out.push_back({TermKey::coupling(k), u, k.total_order(), k.system_order() - 1});
    return out;
}

Filling Filling::from_density(double n) {
    if (!(n > 0.0 && n < 1.0)) throw DomainError("density n must lie in (0,1)");
    double mu = std::log((1.0 - n) / n);
    double pauli = n * (1.0 - n);
    return Filling(n, mu, pauli, std::sqrt(pauli));
}

Filling Filling::from_mu(double mu) {
    if (!std::isfinite(mu)) throw DomainError("chemical potential must be finite");
    // 1/(e^mu+1) written to stay accurate for either sign of mu.
    double n = mu >= 0.0 ? std::exp(-mu) / (1.0 + std::exp(-mu)) : 1.0 / (1.0 + std::exp(mu));
    if (!(n > 0.0 && n < 1.0)) throw DomainError("chemical potential too large for a finite density");
    double amplitude = 0.5 / std::cosh(0.5 * mu);
    return Filling(n, mu, amplitude * amplitude, amplitude);
}

Filling filling_from_mu(double mu) { return Filling::from_mu(mu); }
Filling mu_from_filling(double n) { return Filling::from_density(n); }

double term_rate(const MenuTerm& term, const Filling& filling) {
    // A term built only from environment operators never touches the system
    // fermions, so it drops out of every system-side rate.
    if (!term.key.is_intra() && term.key.cross.system_order() == 0) return 0.0;
    return term.strength * std::pow(filling.pauli(), 0.5 * term.total_order - 1.0);
}

SimplifiedModel::SimplifiedModel(double u1, double u3, Filling filling)
    : u1_(u1), u3_(u3), filling_(filling) {
    if (!(u1 >= 0.0) || !std::isfinite(u1)) throw DomainError("u1 must be finite and >= 0");
    if (!(u3 > 0.0) || !std::isfinite(u3)) throw DomainError("u3 must be finite and > 0");
}

SimplifiedModel SimplifiedModel::from_ratio(double r, double u3, Filling filling) {
    if (!(r >= 0.0)) throw DomainError("r must be >= 0");
    return SimplifiedModel(r * u3 * filling.pauli(), u3, filling);
}

CouplingMenu SimplifiedModel::menu() const {
    CouplingMenu m;
    if (u1_ > 0.0) m.cross[kHoppingKey] = u1_;
    m.cross[kScramblingKey] = u3_;
    return m;
}

}  // namespace scrambler
